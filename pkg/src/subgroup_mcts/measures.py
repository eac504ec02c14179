"""Subgroup quality measures and their normalization onto [0, 1].

All measures are functions of the subgroup extent, the target-label extent
and the dataset size, so they are computed from bitmask popcounts. Weighted
relative accuracy lives in [-0.25, 0.25] and is affinely mapped onto [0, 1]
for UCB rewards; the remaining measures are already in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dataset import Dataset
from .patterns import Subgroup


KINDS = ("wracc", "f1", "accuracy", "jaccard", "entropy_gain")

_RANGES = {
    "wracc": (-0.25, 0.25),
    "f1": (0.0, 1.0),
    "accuracy": (0.0, 1.0),
    "jaccard": (0.0, 1.0),
    "entropy_gain": (0.0, 1.0),
}


@dataclass(frozen=True)
class MeasureSpec:
    """A quality-measure kind bound to one target class label."""

    kind: str
    target: object

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind: {self.kind!r}")


def _entropy(counts, total) -> float:
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def evaluate_mask(measure: MeasureSpec, mask: int, data: Dataset) -> float:
    """Raw measure value of the subgroup given by extent bitmask `mask`."""
    supp = mask.bit_count()
    if supp == 0:
        raise ValueError("cannot evaluate a subgroup with empty extent")
    n = data.n_objects
    lmask = data.label_mask(measure.target)
    tp = (mask & lmask).bit_count()
    pos = lmask.bit_count()
    kind = measure.kind
    if kind == "wracc":
        # supp/n * (tp/supp - pos/n), evaluated with a single division
        return (tp * n - supp * pos) / (n * n)
    if kind == "f1":
        return 2 * tp / (supp + pos)
    if kind == "accuracy":
        return tp / supp
    if kind == "jaccard":
        return tp / (supp + pos - tp)
    # entropy_gain: information gain of the in/out split on the class
    # variable, normalized by the dataset class entropy
    base_counts = [data.label_mask(c).bit_count() for c in data.classes]
    h_base = _entropy(base_counts, n)
    if h_base == 0.0:
        return 0.0
    in_counts = [(mask & data.label_mask(c)).bit_count() for c in data.classes]
    out_counts = [b - i for b, i in zip(base_counts, in_counts)]
    rest = n - supp
    h_in = _entropy(in_counts, supp)
    h_out = _entropy(out_counts, rest) if rest else 0.0
    gain = h_base - (supp / n) * h_in - (rest / n) * h_out
    return min(1.0, max(0.0, gain / h_base))


def evaluate(measure: MeasureSpec, sg: Subgroup, data: Dataset) -> float:
    return evaluate_mask(measure, sg.mask, data)


def normalize(measure: MeasureSpec, value: float) -> float:
    """Order-preserving affine map of the measure's range onto [0, 1]."""
    lo, hi = _RANGES[measure.kind]
    if not (lo <= value <= hi):
        raise ValueError(f"{measure.kind} value {value} outside [{lo}, {hi}]")
    return (value - lo) / (hi - lo)
