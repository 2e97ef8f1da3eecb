import csv
import io
import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference
from treedim.cover_engine import NonUniformTreeError
from treedim.dimension import (
    Certification,
    DimensionError,
    box_estimates,
    dimension_report,
    exact_box_limits,
    local_upper_box_check,
    ratio_sequence,
    tail_window,
)
from treedim.families import (
    ALTERNATING_BLOCKS,
    constant_ratio_pair,
    example_alternating_blocks,
    example_countable_tree,
    full_binary,
)
from treedim.tree_core import BranchingProfile, build_tree


def test_constant_ratio_sequences():
    S, T = constant_ratio_pair(2, 4, 10)
    assert all(v == mpmath.mpf(1) / 2 for v in ratio_sequence(S, T).values)
    S, T = constant_ratio_pair(3, 3, 5)
    assert all(v == 1 for v in ratio_sequence(S, T).values)
    S, T = constant_ratio_pair(1, 2, 5)
    assert all(v == 0 for v in ratio_sequence(S, T).values)


def test_tail_window():
    assert tail_window(100, 0.5) == (50, 100)
    assert tail_window(4096, 0.9) == (410, 4096)
    assert tail_window(3, 0.99) == (1, 3)
    with pytest.raises(DimensionError):
        tail_window(10, 0)
    with pytest.raises(DimensionError):
        tail_window(10, 1)


def test_example_block_counts_match_level_by_level_walk():
    S = example_alternating_blocks(300)
    assert list(S.level_counts) == reference.block_profile_counts((1, 2), 4, 1, 300)
    assert S.level_counts[4] == 1 and S.level_counts[16] == 2**12 and S.level_counts[64] == 2**12


def test_example_block_exact_limits_match_hand_derivation():
    lim = exact_box_limits(ALTERNATING_BLOCKS, BranchingProfile.constant(2))
    assert lim.exact == reference.odd_block_density_limits() == (Fraction(1, 5), Fraction(4, 5))


def test_example_block_ratios_approach_closed_form():
    lo, hi = reference.odd_block_density_limits()
    S = example_alternating_blocks(4**8)
    for K in range(3, 8):
        n = 4 ** (K + 1)
        ratio = Fraction(S.level_counts[n].bit_length() - 1, n)
        if K < 6:
            assert ratio == Fraction(reference.odd_block_count(n), n)
        target = lo if K % 2 == 0 else hi
        assert abs(ratio - target) < Fraction(4, n)


@pytest.mark.parametrize(
    "s_prof, t_prof, expected",
    [
        (BranchingProfile.periodic((1, 2)), BranchingProfile.constant(2), Fraction(1, 2)),
        (BranchingProfile.periodic((2, 4)), BranchingProfile.constant(8), Fraction(1, 2)),
        (BranchingProfile.periodic((1, 1, 2)), BranchingProfile.periodic((2, 4)), Fraction(2, 9)),
    ],
)
def test_periodic_exact_limit(s_prof, t_prof, expected):
    lim = exact_box_limits(s_prof, t_prof)
    assert lim.exact == (expected, expected)


def test_incommensurable_values_give_numeric_limit():
    lim = exact_box_limits(BranchingProfile.constant(2), BranchingProfile.constant(3))
    assert lim.exact is None
    with mpmath.workprec(128):
        assert abs(lim.lower - mpmath.log(2) / mpmath.log(3)) < mpmath.mpf(2) ** -120


def test_explicit_profiles_have_no_closed_form():
    assert exact_box_limits(BranchingProfile.explicit((2, 2)), BranchingProfile.constant(2)) is None


@given(st.integers(2, 5), st.lists(st.integers(1, 2), min_size=2, max_size=3))
def test_block_limits_agree_with_deep_boundaries(base, values):
    prof = BranchingProfile.block_schedule(values, base=base, scale=1)
    lim = exact_box_limits(prof, BranchingProfile.constant(2))
    K_last = 1
    while base ** (K_last + 2) <= 50_000:
        K_last += 1
    # values are 1 or 2, so log2 of a level count is the number of 2s so far
    twos = [0]
    for b in prof.branchings(base ** (K_last + 1)):
        twos.append(twos[-1] + (b == 2))
    # the boundary ratios converge like 1/n; compare the last full period of boundaries
    ratios = [Fraction(twos[base ** (K + 1)], base ** (K + 1)) for K in range(K_last - len(values) + 1, K_last + 1)]
    slack = Fraction(base ** len(values), base ** (K_last - len(values) + 2))
    assert abs(min(ratios) - lim.exact[0]) <= slack
    assert abs(max(ratios) - lim.exact[1]) <= slack


def test_report_certification():
    S, T = example_alternating_blocks(64), full_binary(64)
    rep = dimension_report(S, T)
    assert rep.certification is Certification.UNIFORM_EQUALITY
    assert rep.hausdorff.relation == "=" and rep.hausdorff.exact == Fraction(1, 5)
    rep = dimension_report(example_countable_tree(64), full_binary(64))
    assert rep.certification is Certification.INEQUALITY_ONLY
    assert rep.packing.relation == "<="
    assert any("not level-wise uniformly" in n for n in rep.notes)


def test_box_estimates_on_example_block_tree():
    S, T = example_alternating_blocks(1024), full_binary(1024)
    est = box_estimates(ratio_sequence(S, T), 0.9)
    assert est.window == (103, 1024)
    # extremes at the block ends 4^5 (after an even block) and 4^4 (after an odd one)
    with mpmath.workprec(128):
        assert abs(est.lower - mpmath.mpf(204) / 1024) < mpmath.mpf(2) ** -120
        assert abs(est.upper - mpmath.mpf(204) / 256) < mpmath.mpf(2) ** -120


def test_json_and_csv_round_trip_full_precision():
    S, T = constant_ratio_pair(2, 3, 20)
    rep = dimension_report(S, T, prec=160)
    data = json.loads(rep.to_json())
    assert data["precision_bits"] == 160
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert len(rows) == 20 == len(data["levels"])
    with mpmath.workprec(160):
        for n, row in enumerate(rows, 1):
            stored = rep.ratios.values[n - 1]
            assert mpmath.mpf(row["ratio"]) == stored
            assert mpmath.mpf(data["levels"][n - 1]["ratio"]) == stored
            assert int(row["s_n"]) == 2**n and int(row["t_n"]) == 3**n
        assert mpmath.mpf(data["lower_box_estimate"]) == rep.lower_box_estimate


def test_report_is_deterministic():
    a = dimension_report(example_alternating_blocks(200), full_binary(200))
    b = dimension_report(example_alternating_blocks(200), full_binary(200))
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv() and a.to_text() == b.to_text()


def test_text_report_omits_long_table():
    rep = dimension_report(example_alternating_blocks(128), full_binary(128))
    assert "level table omitted" in rep.to_text()
    assert "2^" in dimension_report(*constant_ratio_pair(2, 4, 40)).to_text()


def test_local_upper_box_check():
    S, T = example_alternating_blocks(256), full_binary(256)
    for sigma in [(), (0,) * 5, (0, 0, 0, 0, 1, 0, 1)]:
        chk = local_upper_box_check(S, T, sigma)
        assert chk.agree
    chk = local_upper_box_check(*constant_ratio_pair(2, 4, 40), (1, 0, 1))
    assert chk.agree and abs(chk.local_sup - chk.global_sup) <= chk.discrepancy_bound


def test_local_check_requires_uniform_tree():
    with pytest.raises(NonUniformTreeError):
        local_upper_box_check(example_countable_tree(10), full_binary(10), (0,))


def test_local_check_rejects_non_member():
    from treedim.tree_core import TreeError

    with pytest.raises(TreeError):
        local_upper_box_check(example_alternating_blocks(16), full_binary(16), (1,))


def test_ratio_sequence_rejects_depth_mismatch():
    with pytest.raises(Exception):
        ratio_sequence(build_tree(BranchingProfile.constant(2), 5), build_tree(BranchingProfile.constant(2), 4))


def test_local_check_full_binary_closed_form():
    T = full_binary(30)
    chk = local_upper_box_check(T, T, (0, 1))
    # the cone above a level-2 node has 2^(n-2) members at level n
    with mpmath.workprec(128):
        for i, v in enumerate(chk.local_values):
            n = i + 3
            assert abs(v - mpmath.mpf(n - 2) / n) < mpmath.mpf(2) ** -120
    assert chk.agree
    root = local_upper_box_check(T, T, ())
    assert root.local_values == ratio_sequence(T, T).values and root.local_sup == root.global_sup


@pytest.mark.parametrize(
    "pair",
    [
        lambda: (example_alternating_blocks(64), full_binary(64)),
        lambda: constant_ratio_pair(2, 4, 40),
        lambda: constant_ratio_pair(3, 3, 20),
        lambda: (build_tree(BranchingProfile.periodic((1, 2, 3)), 30), build_tree(BranchingProfile.constant(3), 30, ambient=True)),
    ],
)
def test_local_check_agrees_for_all_nodes_up_to_level_3(pair):
    S, T = pair()
    for level in range(4):
        for sigma in S.iter_level(level):
            assert local_upper_box_check(S, T, sigma).agree, sigma


profiles = st.lists(st.integers(1, 3), min_size=1, max_size=3)


@given(profiles, st.integers(0, 3), st.sampled_from([0.2, 0.5, 0.9]))
def test_report_sandwich_and_certification(period, bump, tail):
    t_period = [max(2, b + bump) for b in period]
    S = build_tree(BranchingProfile.periodic(period), 24)
    T = build_tree(BranchingProfile.periodic(t_period), 24, ambient=True)
    rep = dimension_report(S, T, tail)
    est = rep.estimates
    assert est.lower <= est.upper
    assert rep.hausdorff.value <= est.lower and rep.packing.value <= est.upper
    assert rep.certification is Certification.UNIFORM_EQUALITY
    rep = dimension_report(example_countable_tree(24), full_binary(24), tail)
    assert rep.certification is Certification.INEQUALITY_ONLY
    assert rep.hausdorff.relation == "<=" and rep.packing.relation == "<="


@given(profiles, st.integers(0, 3))
def test_level_costs_stay_above_one_below_the_lower_limit(period, bump):
    from treedim.cover_engine import min_level_cost

    t_period = [max(2, b + bump) for b in period]
    lim = exact_box_limits(BranchingProfile.periodic(period), BranchingProfile.periodic(t_period))
    r = Fraction(int((float(lim.lower) - 0.05) * 100), 100)
    if r <= 0:
        return
    S = build_tree(BranchingProfile.periodic(period), 100)
    T = build_tree(BranchingProfile.periodic(t_period), 100, ambient=True)
    # a partial period shifts log s_k and log t_k by at most p*log 3 while log t_k >= k*log 2,
    # so the ratio is within p*log2(3)/k of its limit; k >= 96 clears a 0.05 gap for p <= 3
    _, cost = min_level_cost(S, T, r, n=96)
    assert float(cost) >= 1
