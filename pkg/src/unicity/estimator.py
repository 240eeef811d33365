"""Unicity and relative-abundance estimation with Hoeffding sample sizes.

The estimators follow the scikit-learn convention: hyperparameters in
``__init__``, measurement in ``fit``, results in trailing-underscore
attributes. Module-level functions expose the same computations for
callers that manage their own index or need a functional interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .dataset import Dataset, InvertedIndex
from .errors import InvalidSizeError, NotInDatasetError
from .sampler import DEFAULT_BURN_IN, draw_samples
from .validation import (
    check_fraction,
    check_positive_int,
    derive_seed,
)


def sample_size_unicity(epsilon: float, sigma: float) -> int:
    """Samples needed to estimate unicity within ``epsilon`` at confidence ``sigma``.

    Hoeffding bound for a Bernoulli mean: ``ceil(ln(2/(1-sigma)) / (2 eps^2))``.
    """
    epsilon = check_fraction(epsilon, "epsilon")
    sigma = check_fraction(sigma, "sigma")
    return math.ceil(math.log(2.0 / (1.0 - sigma)) / (2.0 * epsilon**2))


def sample_size_rad(epsilon: float, sigma: float, depth: int) -> int:
    """Samples needed to estimate the first ``depth`` abundance buckets jointly.

    Union bound over ``depth`` Bernoulli means:
    ``ceil(ln(2*depth/(1-sigma)) / (2 eps^2))``.
    """
    epsilon = check_fraction(epsilon, "epsilon")
    sigma = check_fraction(sigma, "sigma")
    depth = check_positive_int(depth, "depth")
    return math.ceil(math.log(2.0 * depth / (1.0 - sigma)) / (2.0 * epsilon**2))


@dataclass(frozen=True)
class UnicityEstimate:
    """Sample unicity: the fraction of sampled K-subsets with support 1."""

    h1_hat: float
    n: int
    mode: str
    k: int


@dataclass(frozen=True)
class RadHistogram:
    """Relative abundance of sampled K-subsets by support count.

    ``frequencies[i]`` is the fraction with support ``i + 1``; ``tail``
    is the fraction with support above ``depth``. Everything sums to 1.
    """

    frequencies: tuple[float, ...]
    tail: float
    n: int
    k: int

    @property
    def depth(self) -> int:
        return len(self.frequencies)

    def frequency(self, support: int) -> float:
        if not 1 <= support <= self.depth:
            raise IndexError(f"support must be in [1, {self.depth}]")
        return self.frequencies[support - 1]


def estimate_unicity(
    dataset: Dataset,
    k: int,
    *,
    epsilon: float = 0.01,
    sigma: float = 0.99,
    mode: str = "uniform",
    burn_in: int = DEFAULT_BURN_IN,
    seed=None,
    index: InvertedIndex | None = None,
    view=None,
    workers: int | None = None,
) -> UnicityEstimate:
    """Estimate the unicity of K-subsets by sampling with replacement.

    The sample count comes from :func:`sample_size_unicity`, so the
    estimate is within ``epsilon`` of the sampled regime's expectation
    with probability ``sigma``. ``mode`` selects uniform (chain) or
    record-first (biased) sampling.
    """
    n = sample_size_unicity(epsilon, sigma)
    supports = draw_samples(
        dataset,
        k,
        n,
        mode=mode,
        burn_in=burn_in,
        seed=seed,
        index=index,
        view=view,
        workers=workers,
    )
    return UnicityEstimate(
        h1_hat=float(np.mean(supports == 1)), n=n, mode=mode, k=k
    )


def estimate_rad(
    dataset: Dataset,
    k: int,
    *,
    depth: int = 20,
    epsilon: float = 0.01,
    sigma: float = 0.99,
    burn_in: int = DEFAULT_BURN_IN,
    seed=None,
    index: InvertedIndex | None = None,
    view=None,
    workers: int | None = None,
) -> RadHistogram:
    """Estimate the relative abundance histogram with uniform samples."""
    depth = check_positive_int(depth, "depth")
    n = sample_size_rad(epsilon, sigma, depth)
    supports = draw_samples(
        dataset,
        k,
        n,
        mode="uniform",
        burn_in=burn_in,
        seed=seed,
        index=index,
        view=view,
        workers=workers,
    )
    counts = np.bincount(np.minimum(supports, depth + 1), minlength=depth + 2)
    frequencies = tuple(float(c) / n for c in counts[1 : depth + 1])
    tail = float(counts[depth + 1]) / n
    return RadHistogram(frequencies=frequencies, tail=tail, n=n, k=k)


def homogeneity(index: InvertedIndex, dataset: Dataset, items) -> set[int]:
    """Items shared by every record containing ``items``, minus ``items``.

    Even without a unique match, an adversary knowing ``items`` learns
    that the target also has all of these.
    """
    query = tuple(sorted({int(i) for i in items}))
    users = index.matching_users(query)
    if users.size == 0:
        raise NotInDatasetError(f"subset {items!r} occurs in no record")
    common = set(dataset.records[int(users[0])])
    for u in users[1:].tolist():
        common.intersection_update(dataset.records[u])
        if not common:
            break
    return common - set(query)


@dataclass(frozen=True)
class CurveSample:
    """Measured unicity at one dataset size."""

    size: int
    mean_h1: float
    stdev_h1: float
    trials: int


def unicity_vs_size(
    dataset: Dataset,
    k: int,
    sizes,
    *,
    epsilon: float = 0.01,
    sigma: float = 0.99,
    trials: int = 1,
    mode: str = "uniform",
    burn_in: int = DEFAULT_BURN_IN,
    seed=None,
    workers: int | None = None,
) -> list[CurveSample]:
    """Measure unicity on random user subsets of increasing size.

    For each size, repeats trials of subsample-then-estimate and
    reports the mean and population standard deviation across trials.
    """
    trials = check_positive_int(trials, "trials")
    out = []
    for si, size in enumerate(sizes):
        size = int(size)
        if not 1 <= size <= dataset.num_records:
            raise InvalidSizeError(
                f"curve size must be in [1, {dataset.num_records}], got {size}"
            )
        values = []
        for trial in range(trials):
            sub = dataset.subsample(size, derive_seed(seed, 0, si, trial))
            est = estimate_unicity(
                sub,
                k,
                epsilon=epsilon,
                sigma=sigma,
                mode=mode,
                burn_in=burn_in,
                seed=derive_seed(seed, 1, si, trial),
                workers=workers,
            )
            values.append(est.h1_hat)
        arr = np.asarray(values)
        out.append(
            CurveSample(
                size=size,
                mean_h1=float(arr.mean()),
                stdev_h1=float(arr.std()),
                trials=trials,
            )
        )
    return out


class UnicityEstimator(BaseEstimator):
    """Scikit-learn-style wrapper around :func:`estimate_unicity`.

    Parameters mirror the function; ``fit`` accepts a :class:`Dataset`
    or any iterable of item collections and exposes the results as
    ``unicity_`` and ``n_samples_``.
    """

    def __init__(
        self,
        k=2,
        epsilon=0.01,
        sigma=0.99,
        mode="uniform",
        burn_in=DEFAULT_BURN_IN,
        random_state=None,
        workers=None,
    ):
        self.k = k
        self.epsilon = epsilon
        self.sigma = sigma
        self.mode = mode
        self.burn_in = burn_in
        self.random_state = random_state
        self.workers = workers

    def fit(self, X, y=None):
        dataset = X if isinstance(X, Dataset) else Dataset.from_records(X)
        est = estimate_unicity(
            dataset,
            self.k,
            epsilon=self.epsilon,
            sigma=self.sigma,
            mode=self.mode,
            burn_in=self.burn_in,
            seed=self.random_state,
            workers=self.workers,
        )
        self.unicity_ = est.h1_hat
        self.n_samples_ = est.n
        return self


class RadEstimator(BaseEstimator):
    """Scikit-learn-style wrapper around :func:`estimate_rad`.

    After ``fit``, ``frequencies_`` holds the per-support fractions for
    supports ``1..depth`` and ``tail_`` the remaining mass.
    """

    def __init__(
        self,
        k=2,
        depth=20,
        epsilon=0.01,
        sigma=0.99,
        burn_in=DEFAULT_BURN_IN,
        random_state=None,
        workers=None,
    ):
        self.k = k
        self.depth = depth
        self.epsilon = epsilon
        self.sigma = sigma
        self.burn_in = burn_in
        self.random_state = random_state
        self.workers = workers

    def fit(self, X, y=None):
        dataset = X if isinstance(X, Dataset) else Dataset.from_records(X)
        hist = estimate_rad(
            dataset,
            self.k,
            depth=self.depth,
            epsilon=self.epsilon,
            sigma=self.sigma,
            burn_in=self.burn_in,
            seed=self.random_state,
            workers=self.workers,
        )
        self.frequencies_ = hist.frequencies
        self.tail_ = hist.tail
        self.n_samples_ = hist.n
        return self
