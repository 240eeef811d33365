"""Drawing K-item subsets from a dataset, biased and uniform.

Two sampling regimes live here. The cheap *record-first* scheme picks
an eligible record uniformly and then K of its items uniformly; it
over-represents subsets contained in many records. The *uniform*
scheme corrects that bias with an independence Metropolis chain: the
record-first draw is the proposal, and a proposed candidate C replaces
the current state S with probability ``min(1, q(S)/q(C))``, where
``q(x)`` sums, over the records containing x, the probability of
proposing x from that record (up to a constant factor common to S and
C). The chain's stationary distribution is uniform over all occurring
K-subsets, so its state after burn-in is an unbiased sample.

Convergence is monitored with a two-window z-score on the trace of
"current state is unique" bits, and the worst-case burn-in is bounded
by a coupling argument through :func:`mixing_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, InvertedIndex
from .errors import (
    BoundUndefinedError,
    InsufficientTraceError,
    InvalidSpecError,
    NoEligibleRecordError,
    NotConvergedError,
    NotInDatasetError,
)
from .validation import check_positive_int, check_random_state, derive_rng
from . import parallel

DEFAULT_BURN_IN = 3000

#: Entries kept in a per-run weight cache before insertion stops.
CACHE_LIMIT = 1 << 20


@dataclass(frozen=True)
class ChainConfig:
    """Chain parameters: subset size, burn-in steps, and the seed."""

    k: int
    burn_in: int = DEFAULT_BURN_IN
    seed: int | None = None


@dataclass(frozen=True)
class EligibleView:
    """Records with at least K items, plus per-record proposal weights.

    ``q_terms[r]`` is the probability, up to the constant ``K!``, of
    proposing any fixed K-subset of record ``r`` once that record has
    been picked: the product over i of ``1/(len(r) - K + i)``. It is 0
    for records smaller than K, which can never contain a K-subset.
    """

    k: int
    user_indices: np.ndarray
    records: tuple[tuple[int, ...], ...]
    q_terms: np.ndarray

    @classmethod
    def build(cls, dataset: Dataset, k: int) -> "EligibleView":
        k = check_positive_int(k, "k")
        sizes = dataset.record_sizes()
        mask = sizes >= k
        if not mask.any():
            raise NoEligibleRecordError(f"no record has {k} items")
        user_indices = np.flatnonzero(mask)
        q_terms = np.zeros(len(sizes))
        elig_sizes = sizes[mask].astype(float)
        term = np.ones_like(elig_sizes)
        for i in range(1, k + 1):
            term /= elig_sizes - k + i
        q_terms[mask] = term
        records = tuple(dataset.records[i] for i in user_indices)
        return cls(k=k, user_indices=user_indices, records=records, q_terms=q_terms)


def _rand_below(f: float, n: int) -> int:
    i = int(f * n)
    return n - 1 if i >= n else i


def _floyd(seq, k: int, floats, offset: int) -> tuple[int, ...]:
    """Uniform K-subset of ``seq`` from K pre-drawn uniforms (Floyd)."""
    s = len(seq)
    chosen = set()
    j = s - k
    for idx in range(k):
        t = _rand_below(floats[offset + idx], j + 1)
        chosen.add(t if t not in chosen else j)
        j += 1
    return tuple(seq[i] for i in sorted(chosen))


def uniform_k_subset(seq, k: int, rng) -> tuple[int, ...]:
    """Draw a uniformly random K-subset of a sorted sequence."""
    if k > len(seq):
        raise InvalidSpecError(f"cannot draw {k} items from {len(seq)}")
    return _floyd(seq, k, rng.random(k), 0)


def biased_sample(dataset: Dataset, k: int, rng, *, view: EligibleView | None = None):
    """Record-first draw: uniform eligible record, then K of its items.

    This is the biased scheme: subsets shared by many records are more
    likely. It doubles as the proposal distribution of the chain.
    """
    if view is None:
        view = EligibleView.build(dataset, k)
    rng = check_random_state(rng)
    floats = rng.random(k + 1)
    rec = view.records[_rand_below(floats[0], len(view.records))]
    return _floyd(rec, k, floats, 1)


def q_weight(index: InvertedIndex, view: EligibleView, items) -> float:
    """Proposal weight of an occurring subset (sum of per-record terms)."""
    users = index.matching_users(items)
    if users.size == 0:
        raise NotInDatasetError(f"subset {items!r} occurs in no record")
    return float(view.q_terms[users].sum())


def _q_and_support(index, view, items, cache) -> tuple[float, int]:
    hit = cache.get(items) if cache is not None else None
    if hit is not None:
        return hit
    users = index.matching_users(items)
    out = (float(view.q_terms[users].sum()), int(users.size))
    if cache is not None and len(cache) < CACHE_LIMIT:
        cache[items] = out
    return out


@dataclass
class ChainState:
    """Mutable state of one chain run.

    ``current_weight`` always equals ``q_weight(current)``;
    ``unique_trace`` holds one bit per completed step, 1 when the state
    after that step had support 1.
    """

    current: tuple[int, ...]
    current_weight: float
    current_support: int
    step_count: int = 0
    unique_trace: list[int] = field(default_factory=list)


def initial_state(
    dataset: Dataset,
    index: InvertedIndex,
    view: EligibleView,
    rng,
    start=None,
) -> ChainState:
    """Start a chain at ``start``, or at a fresh record-first draw."""
    if start is None:
        start = biased_sample(dataset, view.k, rng, view=view)
    else:
        start = tuple(sorted({int(i) for i in start}))
        if len(start) != view.k:
            raise InvalidSpecError(f"start state must have {view.k} distinct items")
    q, supp = _q_and_support(index, view, start, None)
    if supp == 0:
        raise NotInDatasetError(f"start state {start!r} occurs in no record")
    return ChainState(current=start, current_weight=q, current_support=supp)


def mcmc_step(
    state: ChainState,
    index: InvertedIndex,
    view: EligibleView,
    rng,
    cache: dict | None = None,
) -> ChainState:
    """Advance the chain one transition, in place.

    Proposes a record-first candidate, accepts it with probability
    ``min(1, q(current)/q(candidate))``, then appends the uniqueness bit
    of the (possibly unchanged) current state to the trace.
    """
    k = view.k
    floats = rng.random(k + 2)
    rec = view.records[_rand_below(floats[0], len(view.records))]
    candidate = _floyd(rec, k, floats, 1)
    q_cand, supp_cand = _q_and_support(index, view, candidate, cache)
    # accept iff U < q(S)/q(C), i.e. U*q(C) < q(S)
    if floats[k + 1] * q_cand < state.current_weight:
        state.current = candidate
        state.current_weight = q_cand
        state.current_support = supp_cand
    state.step_count += 1
    state.unique_trace.append(1 if state.current_support == 1 else 0)
    return state


def _advance(index, view, flat, off, steps, state_tuple, cache):
    """Advance ``steps`` transitions from pre-drawn uniforms.

    Identical dynamics and uniform-stream consumption as repeated
    :func:`mcmc_step`: each step reads one record uniform, K subset
    uniforms, and one acceptance uniform from ``flat`` starting at
    ``off``. ``state_tuple`` is ``(items, q, support)``.
    """
    k = view.k
    recs = view.records
    n_rec = len(recs)
    width = k + 2
    get = cache.get
    q_terms = view.q_terms
    matching = index.matching_users
    cur, q_cur, supp_cur = state_tuple
    for _ in range(steps):
        u = int(flat[off] * n_rec)
        if u >= n_rec:
            u = n_rec - 1
        rec = recs[u]
        s = len(rec)
        if k == 2:
            a = int(flat[off + 1] * (s - 1))
            if a >= s - 1:
                a = s - 2
            b = int(flat[off + 2] * s)
            if b >= s or b == a:
                b = s - 1
            cand = (rec[a], rec[b]) if a < b else (rec[b], rec[a])
        elif k == 1:
            a = int(flat[off + 1] * s)
            cand = (rec[a if a < s else s - 1],)
        else:
            cand = _floyd(rec, k, flat, off + 1)
        hit = get(cand)
        if hit is None:
            users = matching(cand)
            hit = (float(q_terms[users].sum()), int(users.size))
            if len(cache) < CACHE_LIMIT:
                cache[cand] = hit
        q_cand, supp_cand = hit
        if flat[off + width - 1] * q_cand < q_cur:
            cur = cand
            q_cur = q_cand
            supp_cur = supp_cand
        off += width
    return cur, q_cur, supp_cur


def _init_from_floats(index, view, flat, off, cache):
    """Biased draw from pre-drawn uniforms: one record uniform plus K."""
    rec = view.records[_rand_below(flat[off], len(view.records))]
    cur = _floyd(rec, view.k, flat, off + 1)
    q, supp = _q_and_support(index, view, cur, cache)
    return cur, q, supp


def mcmc_sample(
    dataset: Dataset,
    config: ChainConfig,
    start=None,
    *,
    index: InvertedIndex | None = None,
    view: EligibleView | None = None,
):
    """Run one chain for ``config.burn_in`` steps and return its state.

    The returned K-subset is an approximately uniform draw from the
    occurring K-subsets once the burn-in exceeds the mixing time.
    """
    if config.burn_in < 0:
        raise InvalidSpecError("burn_in must be >= 0")
    if index is None:
        index = InvertedIndex(dataset)
    if view is None:
        view = EligibleView.build(dataset, config.k)
    rng = check_random_state(config.seed)
    cache: dict = {}
    state = initial_state(dataset, index, view, rng, start)
    current = (state.current, state.current_weight, state.current_support)
    width = view.k + 2
    remaining = config.burn_in
    while remaining > 0:
        block = min(remaining, 8192)
        flat = rng.random(block * width).tolist()
        current = _advance(index, view, flat, 0, block, current, cache)
        remaining -= block
    return current[0]


def geweke_z(trace) -> float:
    """Two-window convergence z-score of a chain trace.

    Compares the mean of the first 10% of the trace against the mean of
    the last 50%, scaled by the root of the summed window variances
    (population variances). Degenerate traces where both variances are
    zero score 0 when the means agree and signed infinity otherwise.
    """
    x = np.asarray(trace, dtype=float)
    n = x.size
    if n < 20:
        raise InsufficientTraceError(f"need a trace of at least 20 steps, got {n}")
    head = x[: n // 10]
    tail = x[-(n // 2) :]
    diff = float(head.mean() - tail.mean())
    denom = float(head.var() + tail.var())
    if denom == 0.0:
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return diff / math.sqrt(denom)


def run_until_converged(
    dataset: Dataset,
    k: int,
    *,
    seed=None,
    check_every: int = 100,
    max_steps: int = 50_000,
    index: InvertedIndex | None = None,
    view: EligibleView | None = None,
    start=None,
):
    """Step a chain until the z-score settles into [-1, 1].

    The diagnostic is evaluated every ``check_every`` steps once the
    trace holds at least ``20 * check_every`` entries. Returns
    ``(sample, steps, z_history)`` where ``z_history`` is a list of
    ``(step, z)`` pairs. Raises :class:`NotConvergedError`, carrying the
    history, if ``max_steps`` runs out first.
    """
    check_every = check_positive_int(check_every, "check_every")
    max_steps = check_positive_int(max_steps, "max_steps")
    if index is None:
        index = InvertedIndex(dataset)
    if view is None:
        view = EligibleView.build(dataset, k)
    rng = check_random_state(seed)
    cache: dict = {}
    state = initial_state(dataset, index, view, rng, start)
    z_history: list[tuple[int, float]] = []
    first_check = 20 * check_every
    while state.step_count < max_steps:
        mcmc_step(state, index, view, rng, cache)
        steps = state.step_count
        if steps >= first_check and steps % check_every == 0:
            z = geweke_z(state.unique_trace)
            z_history.append((steps, z))
            if -1.0 <= z <= 1.0:
                return state.current, steps, z_history
    raise NotConvergedError(
        f"no convergence within {max_steps} steps", z_history=z_history
    )


def estimate_h1_star(dataset: Dataset, k: int, n: int, rng, *, index=None) -> float:
    """Estimate the unicity of K-subsets of the largest record.

    Draws ``n`` uniform K-subsets directly from the largest record and
    returns the fraction that occur in exactly one record. This is the
    quantity controlling the chain's worst-case mixing time.
    """
    n = check_positive_int(n, "n")
    largest = max(dataset.records, key=len)
    if len(largest) < k:
        raise NoEligibleRecordError(f"largest record has {len(largest)} < {k} items")
    if index is None:
        index = InvertedIndex(dataset)
    rng = check_random_state(rng)
    unique = 0
    for _ in range(n):
        sub = uniform_k_subset(largest, k, rng)
        unique += index.support(sub)[0] == 1
    return unique / n


def mixing_bound(num_records: int, xi: float, h1_star: float) -> int:
    """Worst-case steps for the chain to be within ``xi`` of uniform.

    Evaluates ``ceil(num_records * ln(1/xi) / h1_star)``, the coupling
    bound: chains coalesce whenever both draw a subset occurring only in
    the largest record, which happens with rate ``h1_star/num_records``.
    """
    num_records = check_positive_int(num_records, "num_records")
    if h1_star <= 0.0:
        raise BoundUndefinedError("h1_star must be positive for the bound to exist")
    if not 0.0 < xi <= 1.0:
        raise InvalidSpecError(f"xi must be in (0, 1], got {xi}")
    if h1_star > 1.0:
        raise InvalidSpecError(f"h1_star must be in (0, 1], got {h1_star}")
    return math.ceil(num_records * math.log(1.0 / xi) / h1_star)


# -- batch draws (the production entry point for estimators) -----------

#: Uniforms pre-drawn per work chunk (bounds chunk memory to ~32 MB).
_FLOAT_BUDGET = 1 << 22


def _batch_chunk_size(per_chain: int) -> int:
    return max(1, min(parallel.CHUNK, _FLOAT_BUDGET // per_chain))


def _uniform_chunk(args):
    """Draw samples ``lo..hi`` as fresh chains, one uniform-slice each.

    The chunk's uniforms come from the stream derived from
    ``(seed, lo)``; chunk boundaries depend only on (n, k, burn_in), so
    the result is independent of how chunks land on workers.
    """
    lo, hi, collect_items = args
    dataset, index, view, k, burn_in, seed = parallel.get_shared()
    cache: dict = {}
    per_chain = (k + 1) + burn_in * (k + 2)
    flat = derive_rng(seed, lo).random((hi - lo) * per_chain).tolist()
    supports = np.empty(hi - lo, dtype=np.int64)
    items = [] if collect_items else None
    off = 0
    for i in range(hi - lo):
        state = _init_from_floats(index, view, flat, off, cache)
        final, _, supp = _advance(
            index, view, flat, off + k + 1, burn_in, state, cache
        )
        off += per_chain
        supports[i] = supp
        if collect_items:
            items.append(final)
    return supports, items


def _biased_chunk(args):
    lo, hi, collect_items = args
    dataset, index, view, k, _, seed = parallel.get_shared()
    cache: dict = {}
    per_chain = k + 1
    flat = derive_rng(seed, lo).random((hi - lo) * per_chain).tolist()
    supports = np.empty(hi - lo, dtype=np.int64)
    items = [] if collect_items else None
    off = 0
    for i in range(hi - lo):
        sub, _, supp = _init_from_floats(index, view, flat, off, cache)
        off += per_chain
        supports[i] = supp
        if collect_items:
            items.append(sub)
    return supports, items


def draw_samples(
    dataset: Dataset,
    k: int,
    n: int,
    *,
    mode: str = "uniform",
    burn_in: int = DEFAULT_BURN_IN,
    seed=None,
    index: InvertedIndex | None = None,
    view: EligibleView | None = None,
    workers: int | None = None,
    return_items: bool = False,
):
    """Draw ``n`` independent K-subsets and their supports.

    ``mode`` is ``"uniform"`` (one fresh chain of ``burn_in`` steps per
    sample) or ``"biased"`` (plain record-first draws). Every sample
    consumes a fixed slice of a seed-derived uniform stream, so results
    are identical for any ``workers`` count. Returns the support array,
    plus the sampled subsets when ``return_items`` is set.
    """
    n = check_positive_int(n, "n")
    if mode not in ("uniform", "biased"):
        raise InvalidSpecError(f"mode must be 'uniform' or 'biased', got {mode!r}")
    if index is None:
        index = InvertedIndex(dataset)
    if view is None:
        view = EligibleView.build(dataset, k)
    if burn_in < 0:
        raise InvalidSpecError("burn_in must be >= 0")
    workers = parallel.resolve_workers(workers)
    shared = (dataset, index, view, k, burn_in, seed)
    chunk_fn = _uniform_chunk if mode == "uniform" else _biased_chunk
    per_chain = (k + 1) + (burn_in * (k + 2) if mode == "uniform" else 0)
    size = _batch_chunk_size(per_chain)
    chunks = [(lo, min(lo + size, n), return_items) for lo in range(0, n, size)]
    results = parallel.map_chunks(chunk_fn, chunks, workers, shared)
    supports = np.concatenate([r[0] for r in results])
    if return_items:
        items = [s for r in results for s in r[1]]
        return supports, items
    return supports
