import random

import pytest

from subgroup_mcts.baselines import (
    BeamConfig,
    LatticeTooLargeError,
    beam_search,
    exhaustive_dfs,
    uniform_sampler,
)
from subgroup_mcts.dataset import NOMINAL, Dataset
from subgroup_mcts.measures import MeasureSpec, evaluate_mask
from subgroup_mcts.patterns import (
    EMPTY,
    IntervalRestriction,
    canonical_key,
    description_mask,
    direct_refinements,
)

WRACC_L2 = MeasureSpec("wracc", "l2")


def nominal_data():
    random.seed(0)
    rng = random.Random(42)
    cols = [[rng.choice("abc") for _ in range(30)] for _ in range(3)]
    labels = [rng.choice("pn") for _ in range(30)]
    return Dataset.from_columns("nom", [("x", NOMINAL), ("y", NOMINAL), ("z", NOMINAL)],
                                labels, cols)


# ---------------------------------------------------------------------------
# beam search
# ---------------------------------------------------------------------------

def test_wide_beam_equals_exhaustive_on_nominal_data():
    data = nominal_data()
    measure = MeasureSpec("wracc", "p")
    beam = beam_search(data, BeamConfig(width=10**6, max_length=3,
                                        min_supp=2, measure=measure))
    full = exhaustive_dfs(data, 2, 3, measure)
    beam_keys = {canonical_key(e.description) for e in beam.entries()}
    full_keys = {canonical_key(e.description) for e in full.entries()}
    assert beam_keys == full_keys


def test_beam_width_one_is_greedy_hill_climbing(toy):
    cfg = BeamConfig(width=1, max_length=3, min_supp=1, measure=WRACC_L2)
    pool = beam_search(toy, cfg)
    # independent greedy trace: expand the single best pattern per level
    expected = {canonical_key(EMPTY)}
    beam = EMPTY
    for _ in range(3):
        kids = direct_refinements(beam, toy, 1, 3)
        if not kids:
            break
        scored = sorted(
            ((evaluate_mask(WRACC_L2, description_mask(k, toy), toy), k) for k in kids),
            key=lambda t: (-t[0], len(t[1]), canonical_key(t[1])))
        expected.update(canonical_key(k) for _, k in scored)
        beam = scored[0][1]
    assert {canonical_key(e.description) for e in pool.entries()} == expected


def test_beam_stops_on_empty_level(toy):
    pool = beam_search(toy, BeamConfig(width=5, max_length=4, min_supp=6,
                                       measure=WRACC_L2))
    assert len(pool) == 1  # nothing refinable: only the root was evaluated


def test_beam_subset_of_exhaustive(toy):
    beam = beam_search(toy, BeamConfig(width=3, max_length=2, min_supp=2,
                                       measure=WRACC_L2))
    full = exhaustive_dfs(toy, 2, 2, WRACC_L2)
    beam_keys = {canonical_key(e.description) for e in beam.entries()}
    full_keys = {canonical_key(e.description) for e in full.entries()}
    assert beam_keys <= full_keys
    assert full.best_phi() >= beam.best_phi()


def test_beam_outputs_respect_constraints(toy):
    pool = beam_search(toy, BeamConfig(width=4, max_length=2, min_supp=2,
                                       measure=WRACC_L2))
    for e in pool.entries():
        assert e.mask.bit_count() >= 2
        assert e.description.effective_length(toy) <= 2


def test_beam_width_validated():
    with pytest.raises(ValueError):
        BeamConfig(width=0, max_length=2, min_supp=1, measure=WRACC_L2)


# ---------------------------------------------------------------------------
# exhaustive lectic DFS
# ---------------------------------------------------------------------------

def test_exhaustive_full_coverage_only_at_min_supp_six(toy):
    # every single restriction drops at least one object, so only the root
    # pattern covers all six
    pool = exhaustive_dfs(toy, 6, 3, WRACC_L2)
    assert len(pool) == 1
    assert pool.best_phi() == 0.0


def test_exhaustive_infeasible_support_is_error(toy):
    with pytest.raises(ValueError):
        exhaustive_dfs(toy, 7, 3, WRACC_L2)


def test_exhaustive_node_cap(toy):
    with pytest.raises(LatticeTooLargeError):
        exhaustive_dfs(toy, 1, 3, WRACC_L2, node_cap=10)


def bfs_dedup_count(data, min_supp, max_length):
    seen = {canonical_key(EMPTY)}
    frontier = [EMPTY]
    while frontier:
        nxt = []
        for d in frontier:
            for child in direct_refinements(d, data, min_supp, max_length):
                key = canonical_key(child)
                if key not in seen:
                    seen.add(key)
                    nxt.append(child)
        frontier = nxt
    return len(seen)


def test_exhaustive_matches_bfs_count(toy):
    for ms, ml in ((2, 2), (3, 3)):
        pool = exhaustive_dfs(toy, ms, ml, WRACC_L2)
        assert len(pool) == bfs_dedup_count(toy, ms, ml)


def test_exhaustive_contains_best_pattern(toy):
    pool = exhaustive_dfs(toy, 3, 3, WRACC_L2)
    assert pool.best_phi() == pytest.approx(1 / 6, abs=1e-15)


# ---------------------------------------------------------------------------
# uniform object sampler
# ---------------------------------------------------------------------------

def test_sampler_single_draw_covers_drawn_object():
    data = Dataset.from_columns("one", [("a", NOMINAL)], ["p", "n", "n"],
                                [["x", "y", "y"]])
    pool = uniform_sampler(data, 1, 1, MeasureSpec("wracc", "p"), seed=4)
    assert len(pool) == 1
    entry = pool.entries()[0]
    assert entry.mask.bit_count() >= 1


def test_sampler_deterministic_per_seed(toy):
    p1 = uniform_sampler(toy, 200, 1, WRACC_L2, seed=9)
    p2 = uniform_sampler(toy, 200, 1, WRACC_L2, seed=9)
    k1 = sorted(canonical_key(e.description) for e in p1.entries())
    k2 = sorted(canonical_key(e.description) for e in p2.entries())
    assert k1 == k2
    p3 = uniform_sampler(toy, 200, 1, WRACC_L2, seed=10)
    assert sorted(canonical_key(e.description) for e in p3.entries()) != k1


def test_sampler_point_coverage_smoke(toy):
    # with 10k draws, every point restriction on attribute c should appear
    # among the drawn patterns (each has per-draw probability >= ~1/36)
    pool = uniform_sampler(toy, 10_000, 1, WRACC_L2, seed=1)
    seen_points = set()
    for e in pool.entries():
        r = e.description.get(2)
        if isinstance(r, IntervalRestriction) and r.lo == r.hi:
            seen_points.add(r.lo)
    assert seen_points == {0, 1, 2, 3}


def test_sampler_respects_min_supp(toy):
    pool = uniform_sampler(toy, 500, 3, WRACC_L2, seed=2)
    for e in pool.entries():
        assert e.mask.bit_count() >= 3


def test_sampler_rejects_zero_draws(toy):
    with pytest.raises(ValueError):
        uniform_sampler(toy, 0, 1, WRACC_L2, seed=0)


def test_sampler_draw_covers_source_object(toy):
    # the generalization of an object's point description always covers it
    pool = uniform_sampler(toy, 50, 1, WRACC_L2, seed=3)
    for e in pool.entries():
        assert e.mask.bit_count() >= 1


def test_exhaustive_dominates_all_searchers(toy):
    full = exhaustive_dfs(toy, 2, 3, WRACC_L2)
    beam = beam_search(toy, BeamConfig(width=2, max_length=3, min_supp=2,
                                       measure=WRACC_L2))
    sampled = uniform_sampler(toy, 300, 2, WRACC_L2, seed=5)
    assert full.best_phi() >= beam.best_phi()
    assert full.best_phi() >= sampled.best_phi()
