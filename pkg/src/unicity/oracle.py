"""Exact brute-force ground truth on small instances.

Everything here enumerates rather than samples (except the naive
rejection sampler, which is exactly uniform by construction). These
routines exist to validate the estimators and the Markov chain sampler;
they make no attempt to scale.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .dataset import Dataset, InvertedIndex
from .errors import (
    EnumerationBudgetError,
    NoEligibleRecordError,
    RejectionBudgetError,
    UndefinedResultError,
)
from .validation import check_positive_int, check_random_state

DEFAULT_BUDGET = 10**7


def _check_budget(dataset: Dataset, k: int, budget: int) -> None:
    total = sum(math.comb(len(rec), k) for rec in dataset.records)
    if total > budget:
        raise EnumerationBudgetError(
            f"enumeration would generate {total} subsets (budget {budget})"
        )


def enumerate_omega(
    dataset: Dataset, k: int, budget: int = DEFAULT_BUDGET
) -> dict[tuple[int, ...], int]:
    """Map every K-subset occurring in some record to its exact support.

    A subset is generated once per containing record, so the multiplicity
    of generation equals the support. Guarded by ``budget`` on the total
    number of generated subsets.
    """
    k = check_positive_int(k, "k")
    _check_budget(dataset, k, budget)
    counts: dict[tuple[int, ...], int] = {}
    for rec in dataset.records:
        if len(rec) < k:
            continue
        for sub in combinations(rec, k):
            counts[sub] = counts.get(sub, 0) + 1
    return counts


def exact_unicity(dataset: Dataset, k: int, budget: int = DEFAULT_BUDGET) -> float:
    """Exact fraction of occurring K-subsets with support exactly 1."""
    counts = enumerate_omega(dataset, k, budget)
    if not counts:
        raise UndefinedResultError(f"no record has {k} items")
    unique = sum(1 for c in counts.values() if c == 1)
    return unique / len(counts)


def exact_rad(
    dataset: Dataset, k: int, budget: int = DEFAULT_BUDGET
) -> dict[int, float]:
    """Exact relative abundance histogram: support value -> fraction."""
    counts = enumerate_omega(dataset, k, budget)
    if not counts:
        raise UndefinedResultError(f"no record has {k} items")
    hist: dict[int, int] = {}
    for c in counts.values():
        hist[c] = hist.get(c, 0) + 1
    total = len(counts)
    assert sum(hist.values()) == total
    return {supp: n / total for supp, n in sorted(hist.items())}


def exact_h1_star(dataset: Dataset, k: int, budget: int = DEFAULT_BUDGET) -> float:
    """Exact unicity of K-subsets drawn from the largest record."""
    largest = max(dataset.records, key=len)
    if len(largest) < k:
        raise NoEligibleRecordError(f"largest record has {len(largest)} < {k} items")
    if math.comb(len(largest), k) > budget:
        raise EnumerationBudgetError("largest-record enumeration exceeds budget")
    index = InvertedIndex(dataset)
    unique = 0
    total = 0
    for sub in combinations(largest, k):
        total += 1
        unique += index.support(sub)[0] == 1
    return unique / total


def proposal_probabilities(
    dataset: Dataset, k: int, budget: int = DEFAULT_BUDGET
) -> dict[tuple[int, ...], float]:
    """Closed-form record-first selection probability of every K-subset.

    A subset x is selected by first picking an eligible record uniformly,
    then a uniform K-subset of it, so
    ``p(x) = (1/|U|) * sum over records containing x of 1/C(|record|, K)``.
    """
    k = check_positive_int(k, "k")
    _check_budget(dataset, k, budget)
    eligible = [rec for rec in dataset.records if len(rec) >= k]
    if not eligible:
        raise NoEligibleRecordError(f"no record has {k} items")
    probs: dict[tuple[int, ...], float] = {}
    for rec in eligible:
        w = 1.0 / math.comb(len(rec), k)
        for sub in combinations(rec, k):
            probs[sub] = probs.get(sub, 0.0) + w
    n = len(eligible)
    return {sub: p / n for sub, p in probs.items()}


def biased_unicity_expectation(
    dataset: Dataset, k: int, budget: int = DEFAULT_BUDGET
) -> float:
    """Expected value of the record-first sample unicity estimator."""
    counts = enumerate_omega(dataset, k, budget)
    probs = proposal_probabilities(dataset, k, budget)
    return sum(p for sub, p in probs.items() if counts[sub] == 1)


def transition_matrix(
    dataset: Dataset, k: int, budget: int = DEFAULT_BUDGET
) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Explicit single-step transition matrix of the uniform-target chain.

    Built from first principles: the proposal distribution is
    :func:`proposal_probabilities` and a move from x to a proposed y is
    accepted with probability ``min(1, p(x)/p(y))``. Returns the state
    list (sorted) and the row-stochastic matrix in that order.
    """
    probs = proposal_probabilities(dataset, k, budget)
    states = sorted(probs)
    p = np.array([probs[s] for s in states])
    n = len(states)
    ratio = np.minimum(1.0, p[:, None] / p[None, :])
    mat = ratio * p[None, :]
    np.fill_diagonal(mat, 0.0)
    mat[np.arange(n), np.arange(n)] = 1.0 - mat.sum(axis=1)
    return states, mat


def write_omega_csv(dataset: Dataset, k: int, fh, budget: int = DEFAULT_BUDGET) -> int:
    """Dump the exact enumeration as CSV rows ``item1..itemK,support``.

    Returns the number of subsets written. Intended for audits of the
    sampled estimates on small instances.
    """
    counts = enumerate_omega(dataset, k, budget)
    fh.write(",".join(f"item{i + 1}" for i in range(k)) + ",support\n")
    for sub in sorted(counts):
        fh.write(",".join(str(i) for i in sub) + f",{counts[sub]}\n")
    return len(counts)


def rejection_sample(
    dataset: Dataset,
    index: InvertedIndex,
    k: int,
    rng,
    max_tries: int = 1000,
) -> tuple[int, ...]:
    """Uniform K-subset of the occurring ones, by naive rejection.

    Draws uniform K-subsets of the whole item universe and accepts the
    first one with support >= 1. Exactly uniform, but the acceptance
    probability collapses quickly as K grows.
    """
    k = check_positive_int(k, "k")
    if k > dataset.num_items:
        raise NoEligibleRecordError(
            f"universe has {dataset.num_items} items, cannot draw {k}"
        )
    rng = check_random_state(rng)
    for _ in range(max_tries):
        candidate = np.sort(rng.choice(dataset.num_items, size=k, replace=False))
        sub = tuple(int(i) for i in candidate)
        if index.support(sub)[0] >= 1:
            return sub
    raise RejectionBudgetError(f"no occurring subset found in {max_tries} tries")
