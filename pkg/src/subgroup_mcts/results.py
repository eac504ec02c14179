"""Pattern pools and post-processing into a diverse, non-redundant result set.

The greedy filter sorts a pool by descending quality and keeps a pattern iff
its extent's Jaccard similarity with every already-kept extent stays below
the threshold. Redundancy, diversity and ground-truth recovery are the
evaluation metrics built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .dataset import Dataset, bit_indices
from .patterns import Description, canonical_key, description_mask

TREE = "tree"
MEMORY = "memory"


@dataclass
class PoolEntry:
    description: Description
    mask: int
    phi: float
    origin: str = TREE

    @property
    def support(self) -> int:
        return self.mask.bit_count()


class PatternPool:
    """Deduplicated collection of evaluated patterns (search tree + rollout memory)."""

    def __init__(self):
        self._entries: dict = {}
        self.tree_count = 0
        self.memory_count = 0

    def add(self, desc: Description, mask: int, phi: float, origin: str = TREE) -> None:
        key = canonical_key(desc)
        cur = self._entries.get(key)
        if cur is None:
            self._entries[key] = PoolEntry(desc, mask, phi, origin)
            if origin == TREE:
                self.tree_count += 1
            else:
                self.memory_count += 1
        elif phi > cur.phi:
            cur.phi = phi

    def entries(self) -> list:
        return list(self._entries.values())

    def best_phi(self) -> Optional[float]:
        if not self._entries:
            return None
        return max(e.phi for e in self._entries.values())

    def __len__(self):
        return len(self._entries)

    def __contains__(self, desc: Description):
        return canonical_key(desc) in self._entries


def jaccard_sim(mask1: int, mask2: int) -> float:
    """Jaccard similarity of two extent bitmasks."""
    union = (mask1 | mask2).bit_count()
    if union == 0:
        raise ValueError("Jaccard similarity of two empty extents is undefined")
    return (mask1 & mask2).bit_count() / union


@dataclass
class ResultSet:
    """Quality-sorted, redundancy-filtered patterns with the filter parameters used."""

    entries: list
    theta: float
    max_output: Optional[int]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _sort_key(entry: PoolEntry):
    # descending phi; ties by shorter description, then canonical key
    return (-entry.phi, len(entry.description), canonical_key(entry.description))


def filter_pool(entries: Iterable[PoolEntry], theta: float,
                max_output: Optional[int] = None) -> ResultSet:
    """Greedy diverse selection: best first, keep iff similarity to all kept < theta."""
    if not (0.0 < theta <= 1.0):
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    if max_output is not None and max_output < 1:
        raise ValueError(f"max_output must be >= 1, got {max_output}")
    kept: list = []
    for entry in sorted(entries, key=_sort_key):
        if all(jaccard_sim(entry.mask, k.mask) < theta for k in kept):
            kept.append(entry)
            if max_output is not None and len(kept) >= max_output:
                break
    return ResultSet(kept, theta, max_output)


def redundancy(entries, theta: float) -> float:
    """1 - kept/total under the uncapped greedy filter."""
    entries = list(entries)
    if not entries:
        raise ValueError("redundancy of an empty pattern set is undefined")
    kept = filter_pool(entries, theta, max_output=None)
    return 1.0 - len(kept) / len(entries)


def diversity(entries, theta: float) -> float:
    """Sum of qualities over the uncapped greedy filter (0 for an empty set)."""
    entries = list(entries)
    if not entries:
        return 0.0
    kept = filter_pool(entries, theta, max_output=None)
    return sum(e.phi for e in kept.entries)


def recovery_qual(hidden: Iterable[Description], found, data: Dataset) -> float:
    """Mean over hidden patterns of the best Jaccard overlap with a found pattern.

    `found` may be a ResultSet or any iterable of PoolEntry; an empty found
    set scores 0. Reaches 1 exactly when every hidden extent is recovered.
    """
    hidden = list(hidden)
    if not hidden:
        raise ValueError("recovery requires at least one hidden pattern")
    found_masks = [e.mask for e in found]
    if not found_masks:
        return 0.0
    total = 0.0
    for h in hidden:
        hmask = description_mask(h, data)
        total += max(jaccard_sim(hmask, fm) for fm in found_masks)
    return total / len(hidden)


def extent_indices(entry: PoolEntry) -> tuple:
    return bit_indices(entry.mask)
