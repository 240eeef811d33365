"""Input validation helpers shared across the package.

Follows the scikit-learn convention: small ``check_*`` functions that
either return a normalized value or raise a descriptive error.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidSpecError

#: All seeds are folded into the unsigned 64-bit range.
SEED_MASK = (1 << 64) - 1


def check_random_state(seed) -> np.random.Generator:
    """Return a :class:`numpy.random.Generator` for ``seed``.

    ``seed`` may be None (OS entropy), any int (folded to 64 bits, so
    negative seeds are accepted), or an existing Generator, which is
    passed through unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.default_rng()
    if isinstance(seed, (int, np.integer)):
        return np.random.default_rng(int(seed) & SEED_MASK)
    raise InvalidSpecError(f"seed must be None, an int, or a Generator, got {seed!r}")


def derive_rng(seed, *path: int) -> np.random.Generator:
    """Return a Generator for a derived stream ``(seed, *path)``.

    The stream depends only on the seed and the path indices, never on
    which worker draws it, which makes parallel sampling reproducible
    for any worker count.
    """
    if seed is None:
        return np.random.default_rng()
    entropy = (int(seed) & SEED_MASK, *(int(p) & SEED_MASK for p in path))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed, *path: int):
    """Return a 64-bit integer seed for the derived stream ``(seed, *path)``.

    None propagates (meaning "use OS entropy"), so unseeded runs stay
    unseeded all the way down.
    """
    if seed is None:
        return None
    entropy = (int(seed) & SEED_MASK, *(int(p) & SEED_MASK for p in path))
    state = np.random.SeedSequence(entropy).generate_state(2, np.uint64)
    return int(state[0])


def check_fraction(value, name: str, *, inclusive_high: bool = False) -> float:
    """Validate a real parameter in (0, 1), optionally closed at 1."""
    value = float(value)
    high_ok = value <= 1.0 if inclusive_high else value < 1.0
    if not (0.0 < value and high_ok):
        bound = "(0, 1]" if inclusive_high else "(0, 1)"
        raise InvalidSpecError(f"{name} must be in {bound}, got {value}")
    return value


def check_positive_int(value, name: str, *, minimum: int = 1) -> int:
    """Validate an integer parameter with a lower bound."""
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise InvalidSpecError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InvalidSpecError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_item_tuple(items: Iterable[int]) -> tuple[int, ...]:
    """Normalize an item subset to the canonical sorted duplicate-free tuple."""
    out = tuple(sorted({int(i) for i in items}))
    if not out:
        raise InvalidSpecError("item subset must not be empty")
    return out


def as_float_array(values: Sequence, name: str) -> np.ndarray:
    """Coerce 1-d numeric input (or an (n, 1) column) to a float64 array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InvalidSpecError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidSpecError(f"{name} contains non-finite values")
    return arr
