"""Reference searchers: beam search, exhaustive lectic DFS, uniform object sampler.

The exhaustive depth-first search doubles as the ground-truth oracle for the
other searchers: it visits every frequent description within the length bound
exactly once, enforced by the lectic restriction order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .dataset import Dataset
from .measures import MeasureSpec, evaluate_mask
from .patterns import (
    EMPTY,
    Description,
    IntervalRestriction,
    ValueRestriction,
    canonical_key,
    description_mask,
    direct_refinements,
    random_generalization,
    refinement_candidates,
)
from .results import TREE, PatternPool


class LatticeTooLargeError(RuntimeError):
    """Raised when an exhaustive enumeration exceeds its node cap."""


@dataclass(frozen=True)
class BeamConfig:
    width: int
    max_length: int
    min_supp: int
    measure: MeasureSpec

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("beam width must be >= 1")


def beam_search(data: Dataset, cfg: BeamConfig) -> PatternPool:
    """Level-wise greedy search keeping the best `width` patterns per level.

    Every evaluated pattern (all frequent direct refinements of each beam,
    plus the root) lands in the returned pool; levels stop at max_length or
    when no refinement survives.
    """
    pool = PatternPool()
    root_phi = evaluate_mask(cfg.measure, data.full_mask, data)
    pool.add(EMPTY, data.full_mask, root_phi, TREE)
    beam = [(EMPTY, data.full_mask)]
    for _ in range(cfg.max_length):
        level: dict = {}
        for desc, mask in beam:
            for child in direct_refinements(desc, data, cfg.min_supp, cfg.max_length):
                key = canonical_key(child)
                if key not in level:
                    level[key] = (child, description_mask(child, data))
        if not level:
            break
        scored = []
        for child, cmask in level.values():
            phi = evaluate_mask(cfg.measure, cmask, data)
            pool.add(child, cmask, phi, TREE)
            scored.append((phi, child, cmask))
        scored.sort(key=lambda t: (-t[0], len(t[1]), canonical_key(t[1])))
        beam = [(child, cmask) for _, child, cmask in scored[:cfg.width]]
    return pool


def exhaustive_dfs(data: Dataset, min_supp: int, max_length: int,
                   measure: MeasureSpec, node_cap: int = 1_000_000) -> PatternPool:
    """Complete frequent lattice within max_length, every description once."""
    if min_supp > data.n_objects:
        raise ValueError(
            f"min_supp={min_supp} exceeds the dataset size {data.n_objects}")
    pool = PatternPool()
    visited = 0
    stack = [(EMPTY, data.full_mask, -1)]
    while stack:
        desc, mask, last_rank = stack.pop()
        visited += 1
        if visited > node_cap:
            raise LatticeTooLargeError(
                f"frequent lattice exceeds the node cap of {node_cap}")
        pool.add(desc, mask, evaluate_mask(measure, mask, data), TREE)
        for child, cmask, rank, _kind in refinement_candidates(
                desc, data, min_supp, max_length, "direct", lectic_rank=last_rank):
            stack.append((child, cmask, rank))
    return pool


def uniform_sampler(data: Dataset, draws: int, min_supp: int,
                    measure: MeasureSpec, seed: int = 0) -> PatternPool:
    """Independent draws: a random object, then a uniform generalization of it.

    The drawn object's most specific description (a point restriction per
    attribute) is generalized attribute-wise at random; infrequent draws are
    discarded, duplicate draws collapse in the pool.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = random.Random(seed)
    pool = PatternPool()
    for _ in range(draws):
        obj = rng.randrange(data.n_objects)
        restrictions = []
        for attr, meta in enumerate(data.attributes):
            value = data.columns[attr][obj]
            if meta.kind == "nominal":
                restrictions.append(ValueRestriction(attr, value))
            else:
                vi = meta.domain.index(value)
                if len(meta.domain) > 1:
                    restrictions.append(IntervalRestriction(attr, vi, vi))
        desc = random_generalization(Description(restrictions), data, rng)
        mask = description_mask(desc, data)
        if mask.bit_count() < min_supp:
            continue
        pool.add(desc, mask, evaluate_mask(measure, mask, data), TREE)
    return pool
