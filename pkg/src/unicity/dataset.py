"""Set-valued dataset loading, indexing, and support queries.

A dataset is a collection of per-user records, each record being a set
of item ids. Tokens from the input (e.g. hashed app names) are interned
to dense integer ids once at load time; everything downstream works on
sorted integer tuples, which keeps subset/support computations cheap.
"""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import EmptyDatasetError, InvalidSizeError, UnknownItemError
from .validation import check_random_state

logger = logging.getLogger(__name__)

_TOKEN_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True)
class DatasetStats:
    """Population statistics of record sizes."""

    num_users: int
    num_items: int
    max_record_size: int
    min_record_size: int
    mean_record_size: float
    stdev_record_size: float

    def to_dict(self) -> dict:
        """Serializable form with the documented wire-format field names."""
        return {
            "numUsers": self.num_users,
            "numItems": self.num_items,
            "maxRecordSize": self.max_record_size,
            "minRecordSize": self.min_record_size,
            "meanRecordSize": self.mean_record_size,
            "stdevRecordSize": self.stdev_record_size,
        }


@dataclass(frozen=True)
class Dataset:
    """Immutable collection of records over an interned item universe.

    Attributes
    ----------
    records : tuple of tuple of int
        One tuple per user, strictly increasing item ids, never empty.
    items : tuple of str
        Symbol table mapping item id (the position) back to its token.
    """

    records: tuple[tuple[int, ...], ...]
    items: tuple[str, ...]

    def __post_init__(self):
        if not self.records:
            raise EmptyDatasetError("dataset has no records")
        object.__setattr__(
            self, "_token_ids", {tok: i for i, tok in enumerate(self.items)}
        )

    # -- construction ---------------------------------------------------

    @classmethod
    def from_records(cls, raw_records: Iterable[Iterable]) -> "Dataset":
        """Build a dataset from an iterable of item collections.

        Items may be any hashable values; they are stringified and
        interned in first-appearance order. Duplicates within a record
        collapse; empty records are rejected.
        """
        token_ids: dict[str, int] = {}
        records = []
        for raw in raw_records:
            ids = set()
            for item in raw:
                tok = item if isinstance(item, str) else str(item)
                idx = token_ids.setdefault(tok, len(token_ids))
                ids.add(idx)
            if not ids:
                raise EmptyDatasetError("records must be non-empty")
            records.append(tuple(sorted(ids)))
        if not records:
            raise EmptyDatasetError("dataset has no records")
        items = tuple(sorted(token_ids, key=token_ids.get))
        return cls(records=tuple(records), items=items)

    # -- symbol table ---------------------------------------------------

    @property
    def num_records(self) -> int:
        return len(self.records)

    @property
    def num_items(self) -> int:
        return len(self.items)

    def encode(self, tokens: Iterable) -> tuple[int, ...]:
        """Map tokens to the canonical sorted tuple of item ids."""
        ids = set()
        for tok in tokens:
            tok = tok if isinstance(tok, str) else str(tok)
            try:
                ids.add(self._token_ids[tok])
            except KeyError:
                raise UnknownItemError(tok) from None
        return tuple(sorted(ids))

    def decode(self, ids: Iterable[int]) -> tuple[str, ...]:
        """Map item ids back to their tokens."""
        out = []
        for i in ids:
            i = int(i)
            if not 0 <= i < len(self.items):
                raise UnknownItemError(i)
            out.append(self.items[i])
        return tuple(out)

    # -- derived data ---------------------------------------------------

    def record_sizes(self) -> np.ndarray:
        return np.fromiter((len(r) for r in self.records), dtype=np.int64)

    def max_record_size(self) -> int:
        return max(len(r) for r in self.records)

    def stats(self) -> DatasetStats:
        sizes = self.record_sizes()
        return DatasetStats(
            num_users=self.num_records,
            num_items=self.num_items,
            max_record_size=int(sizes.max()),
            min_record_size=int(sizes.min()),
            mean_record_size=float(sizes.mean()),
            stdev_record_size=float(sizes.std()),
        )

    def unique_record_fraction(self) -> float:
        """Fraction of records equal to no other record (multiset semantics)."""
        from collections import Counter

        counts = Counter(self.records)
        unique = sum(c for rec, c in counts.items() if c == 1)
        return unique / self.num_records

    # -- transformations ------------------------------------------------

    def filter_items(self, blacklist: Iterable) -> "Dataset":
        """Drop blacklisted tokens from every record.

        Records left empty are removed. Raises
        :class:`EmptyDatasetError` if nothing survives.
        """
        banned = {tok if isinstance(tok, str) else str(tok) for tok in blacklist}
        banned_ids = {self._token_ids[t] for t in banned if t in self._token_ids}
        if not banned_ids:
            return self
        kept_records = []
        for rec in self.records:
            filtered = tuple(i for i in rec if i not in banned_ids)
            if filtered:
                kept_records.append(filtered)
        if not kept_records:
            raise EmptyDatasetError("blacklist removed every record")
        return _reintern(kept_records, self.items)

    def subsample(self, m: int, seed) -> "Dataset":
        """Pick ``m`` records uniformly without replacement.

        Deterministic for a given seed; the symbol table is restricted
        to the items that survive.
        """
        if not 1 <= m <= self.num_records:
            raise InvalidSizeError(
                f"subsample size must be in [1, {self.num_records}], got {m}"
            )
        rng = check_random_state(seed)
        chosen = np.sort(rng.choice(self.num_records, size=m, replace=False))
        kept = [self.records[i] for i in chosen]
        return _reintern(kept, self.items)

    # -- serialization --------------------------------------------------

    def to_lines(self) -> Iterator[str]:
        """Yield one text line per record (the load format)."""
        for rec in self.records:
            yield " ".join(self.items[i] for i in rec)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.to_lines():
                fh.write(line + "\n")


def _reintern(records: list[tuple[int, ...]], items: tuple[str, ...]) -> Dataset:
    """Re-map surviving item ids to a dense range, preserving id order.

    The old-to-new mapping is monotone, so records stay sorted.
    """
    surviving = sorted({i for rec in records for i in rec})
    remap = {old: new for new, old in enumerate(surviving)}
    new_records = tuple(tuple(remap[i] for i in rec) for rec in records)
    new_items = tuple(items[i] for i in surviving)
    return Dataset(records=new_records, items=new_items)


def load_dataset(source) -> Dataset:
    """Parse the line-per-record text format into a :class:`Dataset`.

    ``source`` may be a path, a text or binary file object, or an
    iterable of lines. Tokens are separated by commas or whitespace;
    duplicates within a line collapse. Blank lines are skipped and
    counted in a warning.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return _parse_lines(fh)
    if isinstance(source, bytes):
        return _parse_lines(io.StringIO(source.decode("utf-8")))
    if hasattr(source, "read") and isinstance(source.read(0), bytes):
        return _parse_lines(io.TextIOWrapper(source, encoding="utf-8"))
    return _parse_lines(source)


def _parse_lines(lines: Iterable[str]) -> Dataset:
    token_ids: dict[str, int] = {}
    records = []
    skipped = 0
    for line in lines:
        tokens = [t for t in _TOKEN_SPLIT.split(line.strip()) if t]
        if not tokens:
            skipped += 1
            continue
        ids = {token_ids.setdefault(tok, len(token_ids)) for tok in tokens}
        records.append(tuple(sorted(ids)))
    if skipped:
        logger.warning("skipped %d blank line(s)", skipped)
    if not records:
        raise EmptyDatasetError("input contains no records")
    items = tuple(sorted(token_ids, key=token_ids.get))
    return Dataset(records=tuple(records), items=items)


class InvertedIndex:
    """Per-item sorted posting lists answering subset-support queries.

    ``postings[i]`` is the ascending array of record indices whose
    record contains item ``i``. The support of a K-item subset is the
    intersection of K posting lists, computed smallest-first with
    binary searches, so the cost is governed by the shortest list.
    """

    def __init__(self, dataset: Dataset):
        self.num_records = dataset.num_records
        self.num_items = dataset.num_items
        self.record_sizes = dataset.record_sizes()
        flat_items = np.fromiter(
            (i for rec in dataset.records for i in rec),
            dtype=np.int64,
            count=int(self.record_sizes.sum()),
        )
        flat_records = np.repeat(
            np.arange(self.num_records, dtype=np.int64), self.record_sizes
        )
        order = np.argsort(flat_items, kind="stable")
        sorted_items = flat_items[order]
        sorted_records = flat_records[order]
        bounds = np.searchsorted(sorted_items, np.arange(self.num_items + 1))
        self.postings: list[np.ndarray] = [
            sorted_records[bounds[i] : bounds[i + 1]] for i in range(self.num_items)
        ]

    def posting(self, item: int) -> np.ndarray:
        if not 0 <= item < self.num_items:
            raise UnknownItemError(item)
        return self.postings[item]

    def support(self, items: Iterable[int]) -> tuple[int, np.ndarray]:
        """Return ``(count, users)`` for the records containing all ``items``."""
        users = self.matching_users(items)
        return users.size, users

    def matching_users(self, items: Iterable[int]) -> np.ndarray:
        lists = [self.posting(i) for i in items]
        if not lists:
            raise UnknownItemError("empty item subset")
        lists.sort(key=len)
        acc = lists[0]
        for other in lists[1:]:
            if acc.size == 0:
                break
            acc = _intersect_sorted(acc, other)
        return acc

    def to_records(self) -> tuple[tuple[int, ...], ...]:
        """Invert the postings back into records (round-trip check)."""
        recs: list[list[int]] = [[] for _ in range(self.num_records)]
        for item, posting in enumerate(self.postings):
            for rec in posting.tolist():
                recs[rec].append(item)
        return tuple(tuple(r) for r in recs)


def _intersect_sorted(small: np.ndarray, large: np.ndarray) -> np.ndarray:
    """Intersect two sorted unique int arrays, binary-searching the larger."""
    if small.size > large.size:
        small, large = large, small
    pos = np.searchsorted(large, small)
    pos[pos == large.size] = 0
    return small[large[pos] == small]


def build_index(dataset: Dataset) -> InvertedIndex:
    """Convenience constructor mirroring ``InvertedIndex(dataset)``."""
    return InvertedIndex(dataset)
