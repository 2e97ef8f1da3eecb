from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference
from conftest import binary_subtrees
from treedim import kernels
from treedim.cover_engine import (
    BudgetExceededError,
    Cover,
    CoverError,
    NonUniformTreeError,
    brute_force_min_cover,
    cost_close,
    cost_le,
    count_covers,
    covers_space,
    is_prefix_free,
    iter_covers,
    level_cost,
    min_level_cost,
    normalize_cover,
    r_cost,
    random_cover,
)
from treedim.families import example_countable_tree
from treedim.profinite import c2_tower, cyclic_tower, subgroup_projections, subgroup_to_subtree, system_to_tree
from treedim.tree_core import BranchingProfile, build_tree

BIN2 = build_tree(BranchingProfile.constant(2), 2, ambient=True)
GRID = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(3, 2), Fraction(2)]


def test_prefix_free():
    assert is_prefix_free([(0, 0), (0, 1), (1,)])
    assert not is_prefix_free([(0,), (0, 1)])
    assert not is_prefix_free([(), (1,)])
    with pytest.raises(CoverError):
        Cover.of([(0,), (0, 1)])


def test_r_cost_examples():
    F = [(0, 0), (0, 1), (1,)]
    assert r_cost(F, BIN2, 2).exact == Fraction(3, 8)
    assert r_cost(F, BIN2, 1).exact == 1
    half = r_cost(F, BIN2, Fraction(1, 2))
    assert half.exact is None
    assert abs(float(half) - (2 * 4**-0.5 + 2**-0.5)) < 1e-15


def test_negative_r_rejected():
    with pytest.raises(ValueError):
        r_cost([()], BIN2, -1)


def test_normalize_worked_example():
    trace = normalize_cover([(0, 0), (0, 1), (1,)], BIN2, BIN2, 2)
    assert [s.case for s in trace.steps] == ["b", "a"]
    assert trace.final_level == 2
    assert trace.bound.exact == Fraction(1, 4)
    assert trace.initial_cost.exact == Fraction(3, 8)
    assert trace.steps[0].cover.nodes == frozenset({(0, 0), (0, 1), (1,)})
    assert trace.steps[1].cover.nodes == frozenset({(0, 0), (0, 1), (1, 0), (1, 1)})


def test_normalize_terminates_in_case_a_on_tie():
    trace = normalize_cover([(0,), (1, 0), (1, 1)], BIN2, BIN2, 1)
    assert len(trace.steps) == 1 and trace.steps[0].case == "a"
    assert trace.steps[0].sigma == (0,)
    assert trace.bound.exact == 1


def test_normalize_full_level_cover_is_one_step():
    trace = normalize_cover([(0, 0), (0, 1), (1, 0), (1, 1)], BIN2, BIN2, Fraction(1, 2))
    assert len(trace.steps) == 1 and trace.final_level == 2


def test_normalize_rejects_non_uniform_tree():
    S = example_countable_tree(4)
    T = build_tree(BranchingProfile.constant(2), 4, ambient=True)
    with pytest.raises(NonUniformTreeError, match="level-wise uniformly"):
        normalize_cover(list(S.iter_level(2)), S, T, 1)


@pytest.mark.parametrize(
    "cover, n",
    [([(0, 0), (0, 1)], 0), ([(0,), (1,), (2,)], 0), ([(0,), (1, 0), (1, 1)], 2), ([], 0)],
)
def test_normalize_rejects_bad_covers(cover, n):
    with pytest.raises(CoverError):
        normalize_cover(cover, BIN2, BIN2, 1, n)


def test_normalize_on_group_tree_stays_inside_s():
    # symbols of a subgroup tree are group elements, not 0..k-1, so the
    # sub-cover has to be carried over by sibling rank
    sys_ = c2_tower(4)
    T = system_to_tree(sys_)
    S = subgroup_to_subtree(sys_, subgroup_projections(sys_, [{0: 1}, {2: 1}]), T)
    rng = np.random.default_rng(3)
    for _ in range(20):
        F = random_cover(S, 1, rng)
        trace = normalize_cover(F, S, T, Fraction(1, 2), 1)
        for step in trace.steps:
            assert all(S.contains(v) for v in step.cover.nodes)
            assert covers_space(step.cover, S)


def test_covers_space():
    assert covers_space([(0,), (1,)], BIN2)
    assert not covers_space([(0,), (1, 0)], BIN2)
    assert covers_space([()], BIN2)


def test_oracle_simple_cases():
    cover, cost = brute_force_min_cover(BIN2, BIN2, 0)
    assert cover.nodes == frozenset({()}) and cost.exact == 1
    cover, cost = brute_force_min_cover(BIN2, BIN2, 2)
    assert len(cover) == 4 and cost.exact == Fraction(1, 4)


def test_oracle_budget():
    T = build_tree(BranchingProfile.constant(3), 4, ambient=True)
    with pytest.raises(BudgetExceededError):
        brute_force_min_cover(T, T, 1, budget=1)


def test_oracle_respects_min_length():
    cover, cost = brute_force_min_cover(BIN2, BIN2, 0, n=1)
    assert cover.min_length >= 1 and cost.exact == 2


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_oracle_matches_explicit_enumeration_on_all_binary_subtrees(depth):
    T = build_tree(BranchingProfile.constant(2), depth, ambient=True)
    for nodes in binary_subtrees(depth):
        S = build_tree(nodes, depth)
        covers = list(iter_covers(S))
        assert len(covers) == count_covers(S)
        for r in (Fraction(1), Fraction(1, 2), Fraction(2)):
            _, best = brute_force_min_cover(S, T, r)
            explicit = min((r_cost(F, T, r) for F in covers), key=float)
            assert cost_close(best, explicit)


def test_oracle_matches_naive_recursion_on_countable_tree():
    S = example_countable_tree(6)
    T = build_tree(BranchingProfile.constant(2), 6, ambient=True)
    levels = [set(l) for l in reference.enumerate_levels(reference.countable_member, 2, 6)]
    for r in (Fraction(3, 10), Fraction(9, 20), Fraction(1)):
        for n in (0, 1, 2, 3):
            _, best = brute_force_min_cover(S, T, r, n)
            assert abs(float(best) - float(reference.min_cover_cost(levels, T.level_counts, r, n))) < 1e-12


def test_oracle_matches_antichain_listing():
    S = build_tree([(0,), (1,), (0, 0), (0, 1), (1, 1)], 2)
    levels = [set(S.iter_level(n)) for n in range(3)]
    for r in (0, 1, 2, 3):
        _, best = brute_force_min_cover(S, BIN2, r)
        assert best.exact == reference.brute_force_cover_costs(levels, BIN2.level_counts, r)


@pytest.mark.skipif(kernels.numba_backend is None, reason="numba not installed")
@given(st.lists(st.integers(1, 3), min_size=1, max_size=5), st.sampled_from(GRID), st.integers(0, 2))
def test_oracle_backends_agree(branchings, r, n):
    depth = len(branchings)
    S = build_tree(BranchingProfile.explicit(branchings), depth)
    T = build_tree(BranchingProfile.constant(3), depth, ambient=True)
    n = min(n, depth)
    a = brute_force_min_cover(S, T, r, n, backend=kernels.numpy_backend)
    b = brute_force_min_cover(S, T, r, n, backend=kernels.numba_backend)
    assert a[0] == b[0]
    assert cost_close(a[1], b[1])


def test_min_level_cost_tie_goes_to_smallest_level():
    k, cost = min_level_cost(BIN2, BIN2, 1)
    assert k == 0 and cost.exact == 1
    k, cost = min_level_cost(BIN2, BIN2, 1, n=1)
    assert k == 1


def test_level_cost_fractional_exponent():
    T = build_tree(BranchingProfile.constant(3), 3)
    c = level_cost(T, T, 3, Fraction(1, 2))
    assert abs(float(c) - 27**0.5) < 1e-12


@given(st.lists(st.integers(1, 3), min_size=1, max_size=4), st.sampled_from(GRID), st.integers(0, 10**6))
def test_normalization_never_increases_cost(branchings, r, seed):
    depth = len(branchings)
    S = build_tree(BranchingProfile.explicit(branchings), depth)
    T = build_tree(BranchingProfile.explicit([max(b, 2) for b in branchings]), depth, ambient=True)
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, depth + 1))
    F = random_cover(S, n, rng)
    trace = normalize_cover(F, S, T, r, n)
    prev = trace.initial_cost
    for step in trace.steps:
        assert cost_le(step.cost_after, step.cost_before)
        assert cost_close(step.cost_before, prev)
        prev = step.cost_after
    assert trace.final_level >= n
    assert cost_le(trace.bound, trace.initial_cost)
    assert cost_close(trace.bound, level_cost(S, T, trace.final_level, r))


@given(st.lists(st.integers(1, 3), min_size=1, max_size=4), st.integers(0, 10**6))
def test_random_cover_is_a_cover(branchings, seed):
    S = build_tree(BranchingProfile.explicit(branchings), len(branchings))
    rng = np.random.default_rng(seed)
    F = random_cover(S, 1, rng)
    assert is_prefix_free(F.nodes) and covers_space(F, S) and F.min_length >= 1


def test_trace_serialisation():
    trace = normalize_cover([(0, 0), (0, 1), (1,)], BIN2, BIN2, 2)
    d = trace.to_dict()
    assert d["bound"]["exact"] == "1/4" and d["bound_holds"] is True
    assert [s["case"] for s in d["steps"]] == ["b", "a"]
    assert "final level k=2" in trace.to_text()


def test_cyclic_group_tree_oracle_equals_level_cost():
    sys_ = cyclic_tower(2, 4)
    T = system_to_tree(sys_)
    S = subgroup_to_subtree(sys_, subgroup_projections(sys_, [2]), T)
    for r in GRID:
        _, best = brute_force_min_cover(S, T, r)
        assert cost_close(best, min_level_cost(S, T, r)[1])
