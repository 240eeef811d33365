"""Deterministic fan-out of independent sampling work across processes.

Work is split into fixed-size index chunks and every random stream is
derived from ``(seed, sample_index)``, so the reassembled output is
byte-identical for any worker count. Shared read-only inputs are staged
in a module global before forking, which lets children inherit them
without pickling.
"""

from __future__ import annotations

import multiprocessing as mp
import os

#: Samples per work chunk; small enough to balance, large enough to amortize.
CHUNK = 1024

_SHARED = None


def get_shared():
    return _SHARED


def resolve_workers(workers: int | None) -> int:
    """Normalize a worker count, honoring the UNICITY_WORKERS override."""
    if workers is None:
        env = os.environ.get("UNICITY_WORKERS")
        workers = int(env) if env else 1
    return max(1, int(workers))


def map_chunks(fn, chunks, workers: int, shared) -> list:
    """Run ``fn`` over ``chunks`` and return results in chunk order.

    ``fn`` must be a module-level function reading its heavy inputs via
    :func:`get_shared`.
    """
    global _SHARED
    _SHARED = shared
    try:
        if workers <= 1 or len(chunks) <= 1:
            return [fn(c) for c in chunks]
        ctx = mp.get_context("fork")
        with ctx.Pool(min(workers, len(chunks))) as pool:
            return pool.map(fn, chunks)
    finally:
        _SHARED = None
