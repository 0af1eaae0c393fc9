from fractions import Fraction

import pytest
from hypothesis import given, assume, strategies as st

from oracles import brute_force_round, direct_priority_quotas
from ricsim.domain import CellConfig, PrbAllocation, RanSnapshot, validate_allocation
from ricsim.xapps import (DegenerateInput, StaleSnapshot, XappConfig, XappKind,
                          compute_equal_allocation, compute_priority_allocation,
                          largest_remainder, on_tick, priority_quotas, priority_ratios)

X1 = XappConfig("xapp-1", XappKind.PRIORITY_SLICE, priority=10, prioritized_slice="A")
X2 = XappConfig("xapp-2", XappKind.EQUAL_SPLIT, priority=5, phase_offset=5000)


def cell(P=100, slices=("A", "B")):
    return CellConfig(P, slices)


def snap(ues, P=100, t=0):
    c = cell(P)
    return RanSnapshot(c, ues, compute_equal_allocation(c), t)


@pytest.mark.parametrize("U, U_A, S, r_a, r_s", [
    (3, 2, 2, Fraction(2, 3), Fraction(1, 3)),
    (2, 1, 2, Fraction(1, 2), Fraction(1, 2)),
    (4, 4, 2, Fraction(1), Fraction(0)),
])
def test_priority_ratios(U, U_A, S, r_a, r_s):
    r = priority_ratios(U, U_A, S)
    assert (r.prioritized, r.other) == (r_a, r_s)


@pytest.mark.parametrize("U, S", [(0, 2), (3, 1)])
def test_degenerate_ratios(U, S):
    with pytest.raises(DegenerateInput):
        priority_ratios(U, 0, S)


@pytest.mark.parametrize("P, U, U_A, expected", [
    (100, 3, 2, {"A": 58, "B": 42}),
    (100, 2, 1, {"A": 50, "B": 50}),
    (51, 3, 2, {"A": 30, "B": 21}),
])
def test_priority_allocation(P, U, U_A, expected):
    c = cell(P)
    # expected values cross-checked against the oracles
    assert brute_force_round(direct_priority_quotas(P, 2, U, U_A), P) == list(expected.values())
    assert compute_priority_allocation(c, priority_ratios(U, U_A, 2), "A") == PrbAllocation(expected)


@pytest.mark.parametrize("P, slices, expected", [
    (100, ("A", "B"), {"A": 50, "B": 50}),
    (51, ("A", "B"), {"A": 26, "B": 25}),
    (7, ("A",), {"A": 7}),
])
def test_equal_allocation(P, slices, expected):
    assert brute_force_round([P / len(slices)] * len(slices), P) == list(expected.values())
    assert compute_equal_allocation(cell(P, slices)) == PrbAllocation(expected)


def test_prioritized_slice_need_not_be_first():
    c = cell(100, ("B", "A"))
    alloc = compute_priority_allocation(c, priority_ratios(3, 2, 2), "A")
    assert alloc.as_dict() == {"B": 42, "A": 58}


# -- properties -------------------------------------------------------------

inputs = st.tuples(st.integers(1, 273), st.integers(2, 8), st.integers(1, 64)).flatmap(
    lambda t: st.tuples(st.just(t[0]), st.just(t[1]), st.just(t[2]), st.integers(0, t[2])))


@given(inputs)
def test_conservation_and_validity(args):
    P, S, U, U_A = args
    slices = tuple(f"s{i}" for i in range(S))
    c = CellConfig(P, slices)
    r = priority_ratios(U, U_A, S)
    assert r.prioritized + (S - 1) * r.other == 1
    for alloc in (compute_priority_allocation(c, r, "s0"), compute_equal_allocation(c)):
        assert alloc.total == P
        assert validate_allocation(alloc, c) is None


@given(inputs)
def test_rounding_matches_brute_force(args):
    P, S, U, U_A = args
    c = CellConfig(P, tuple(f"s{i}" for i in range(S)))
    quotas = priority_quotas(c, priority_ratios(U, U_A, S), "s0")
    assert list(largest_remainder(quotas, P).values()) == brute_force_round(list(quotas.values()), P)


@given(st.integers(1, 273), st.integers(1, 64), st.data())
def test_monotone_in_prioritized_ues(P, U, data):
    lo = data.draw(st.integers(0, U))
    hi = data.draw(st.integers(lo, U))
    c = cell(P)
    a_lo = compute_priority_allocation(c, priority_ratios(U, lo, 2), "A")["A"]
    a_hi = compute_priority_allocation(c, priority_ratios(U, hi, 2), "A")["A"]
    assert a_lo <= a_hi


@given(st.integers(1, 273), st.integers(2, 8), st.integers(1, 8))
def test_fair_share_agreement(P, S, k):
    c = CellConfig(P, tuple(f"s{i}" for i in range(S)))
    r = priority_ratios(S * k, k, S)  # U_A / U == 1/S
    assert compute_priority_allocation(c, r, "s0") == compute_equal_allocation(c)


@given(inputs)
def test_quota_bounds(args):
    P, S, U, U_A = args
    c = CellConfig(P, tuple(f"s{i}" for i in range(S)))
    q = priority_quotas(c, priority_ratios(U, U_A, S), "s0")["s0"]
    assert Fraction(P, 2 * S) <= q <= P * (1 + Fraction(1, S)) / 2


# -- on_tick ----------------------------------------------------------------

def test_equal_split_tick():
    msg = on_tick(X2, snap({"A": 2, "B": 1}, t=15_000), 15_000)
    assert {d.target.slice_id: d.value for d in msg.decisions} == {"A": 50, "B": 50}
    assert all(d.issued_at == 15_000 and d.valid_until == 35_000 for d in msg.decisions)


@pytest.mark.parametrize("ues, expected", [
    ({"A": 2, "B": 1}, {"A": 58, "B": 42}),
    ({"A": 1, "B": 1}, {"A": 50, "B": 50}),
    ({"A": 0, "B": 0}, {"A": 50, "B": 50}),  # no UEs: equal split fallback
])
def test_priority_tick(ues, expected):
    msg = on_tick(X1, snap(ues, t=20_000), 20_000, sequence_no=4)
    assert {d.target.slice_id: d.value for d in msg.decisions} == expected
    assert msg.sequence_no == 4 and msg.sender == "xapp-1"


def test_single_slice_priority_tick():
    c = cell(7, ("A",))
    s = RanSnapshot(c, {"A": 3}, PrbAllocation({"A": 7}), 0)
    assert [d.value for d in on_tick(X1, s, 0).decisions] == [7]


def test_stale_snapshot():
    with pytest.raises(StaleSnapshot):
        on_tick(X1, snap({"A": 1, "B": 1}, t=0), 10_000)
    with pytest.raises(StaleSnapshot):
        on_tick(X1, None, 0)


def test_off_phase_tick():
    with pytest.raises(ValueError):
        on_tick(X2, snap({"A": 1, "B": 1}, t=10_000), 10_000)


@pytest.mark.parametrize("kwargs", [
    dict(period=0), dict(phase_offset=10_000), dict(priority=-1), dict(decision_ttl=0),
])
def test_config_invariants(kwargs):
    with pytest.raises(ValueError):
        XappConfig("x", XappKind.EQUAL_SPLIT, **{"priority": 1, **kwargs})
