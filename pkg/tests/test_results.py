import random

import pytest

from subgroup_mcts.dataset import mask_from_indices
from subgroup_mcts.patterns import Description, IntervalRestriction, ValueRestriction
from subgroup_mcts.results import (
    PatternPool,
    PoolEntry,
    diversity,
    filter_pool,
    jaccard_sim,
    recovery_qual,
    redundancy,
)

D = Description
VV = ValueRestriction


def entry(name_attr, phi, indices):
    return PoolEntry(D([VV(0, name_attr)]), mask_from_indices(indices), phi)


def three_pattern_pool():
    return [
        entry("A", 0.3, [1, 2, 3]),
        entry("B", 0.25, [1, 2, 4]),
        entry("C", 0.2, [7, 8]),
    ]


def test_jaccard_identical_and_disjoint():
    m = mask_from_indices([1, 2, 3])
    assert jaccard_sim(m, m) == 1.0
    assert jaccard_sim(m, mask_from_indices([5, 6])) == 0.0


def test_jaccard_partial_overlap():
    m1 = mask_from_indices([2, 3, 5, 6])
    m2 = mask_from_indices([1, 2, 3, 5, 6])
    assert jaccard_sim(m1, m2) == pytest.approx(4 / 5)


def test_jaccard_both_empty_undefined():
    with pytest.raises(ValueError):
        jaccard_sim(0, 0)


def test_filter_singleton_pool():
    pool = [entry("A", 0.1, [1, 2])]
    assert len(filter_pool(pool, 0.5, 10)) == 1


def test_filter_drops_duplicate_extent():
    pool = [entry("A", 0.2, [1, 2]), entry("B", 0.1, [1, 2])]
    out = filter_pool(pool, 0.9, 10)
    assert len(out) == 1
    assert out.entries[0].phi == 0.2


def test_filter_greedy_trace():
    out = filter_pool(three_pattern_pool(), 0.5, 10)
    phis = [e.phi for e in out.entries]
    assert phis == [0.3, 0.2]  # B rejected: similarity to A is 2/4 = 0.5 >= theta


def test_filter_cap():
    out = filter_pool(three_pattern_pool(), 0.1, 1)
    assert len(out) == 1


def test_filter_empty_pool():
    assert len(filter_pool([], 0.5, 5)) == 0


def test_filter_invalid_theta():
    with pytest.raises(ValueError):
        filter_pool([], 0.0, 5)
    with pytest.raises(ValueError):
        filter_pool([], 1.5, 5)


def test_redundancy_distinct_patterns():
    pool = [entry("A", 0.3, [1]), entry("B", 0.2, [2]), entry("C", 0.1, [3])]
    assert redundancy(pool, 0.5) == 0.0


def test_redundancy_duplicates():
    pool = [entry(str(i), 0.1, [1, 2]) for i in range(4)]
    assert redundancy(pool, 0.5) == pytest.approx(1 - 1 / 4)


def test_redundancy_greedy_trace():
    assert redundancy(three_pattern_pool(), 0.5) == pytest.approx(1 / 3)


def test_redundancy_empty_pool_undefined():
    with pytest.raises(ValueError):
        redundancy([], 0.5)


def test_diversity_empty_and_example():
    assert diversity([], 0.5) == 0.0
    assert diversity(three_pattern_pool(), 0.5) == pytest.approx(0.5)


def _random_pool(rng, n_objects=24, size=None):
    size = size if size is not None else rng.randint(1, 40)
    pool = []
    for i in range(size):
        indices = rng.sample(range(n_objects), rng.randint(1, n_objects))
        pool.append(PoolEntry(D([VV(0, f"p{i}")]), mask_from_indices(indices),
                              rng.uniform(-0.25, 0.25)))
    return pool


def test_filter_contract_random_pools():
    rng = random.Random(17)
    for _ in range(200):
        pool = _random_pool(rng)
        theta = rng.choice([0.2, 0.5, 0.8, 1.0])
        cap = rng.randint(1, 12)
        out = filter_pool(pool, theta, cap)
        assert len(out) <= cap
        phis = [e.phi for e in out.entries]
        assert all(a >= b for a, b in zip(phis, phis[1:]))
        for i, e1 in enumerate(out.entries):
            for e2 in out.entries[i + 1:]:
                assert jaccard_sim(e1.mask, e2.mask) < theta
        if out.entries:
            assert redundancy(out.entries, theta) == 0.0
        again = filter_pool(out.entries, theta, cap)
        assert [id(e) for e in again.entries] == [id(e) for e in out.entries]


def test_recovery_perfect_and_empty(toy):
    h = D([IntervalRestriction(0, 5, 5)])
    from subgroup_mcts.patterns import description_mask
    found = [PoolEntry(h, description_mask(h, toy), 0.2)]
    assert recovery_qual([h], found, toy) == 1.0
    assert recovery_qual([h], [], toy) == 0.0


def test_recovery_partial_overlap(toy):
    # hidden extent {1,2} vs found {1,3}: intersection 1, union 3... use
    # controlled masks via a found entry
    h = D([IntervalRestriction(0, 0, 1)])  # a in [128,136] -> objects {2,3}
    found = [PoolEntry(D(), mask_from_indices([1, 2, 4, 5]), 0.1)]
    # ext(h) = {1,2} (0-based), found {1,2,4,5}: jaccard = 2/4
    assert recovery_qual([h], found, toy) == pytest.approx(0.5)


def test_recovery_monotone_in_found(toy):
    h = D([IntervalRestriction(0, 0, 1)])
    f1 = [PoolEntry(D(), mask_from_indices([1]), 0.1)]
    f2 = f1 + [PoolEntry(D(), mask_from_indices([1, 2]), 0.1)]
    assert recovery_qual([h], f2, toy) >= recovery_qual([h], f1, toy)


def test_pool_dedups_and_keeps_max_phi():
    pool = PatternPool()
    d = D([VV(0, "x")])
    pool.add(d, 0b11, 0.1)
    pool.add(d, 0b11, 0.3)
    pool.add(D([VV(0, "y")]), 0b10, 0.2)
    assert len(pool) == 2
    assert pool.best_phi() == 0.3
