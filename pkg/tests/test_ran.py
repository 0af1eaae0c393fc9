import random
import statistics

import pytest
from hypothesis import given, strategies as st

from ricsim.domain import CellConfig, ControlDecision, ControlTarget, PrbAllocation, ScenarioError
from ricsim.ran import (GnbState, ThroughputModelParams, apply_control, attach_ue, detach_ue,
                        find_direct_overlaps, record_revocations, sample_throughput, snapshot)

CELL = CellConfig(100, ("A", "B"))
QUIET = ThroughputModelParams(noise_sigma=0.0)


def decisions(xapp="xapp-1", t=0, **values):
    return [ControlDecision(xapp, ControlTarget("cell-0", s), v, t, t + 20_000)
            for s, v in values.items()]


def gnb_with(alloc=None, ues=(("ue-0", "A"), ("ue-1", "B"))):
    g = GnbState(CELL, PrbAllocation(alloc) if alloc else None)
    for ue, s in ues:
        attach_ue(g, ue, s, 0)
    return g


def test_apply_overwrites():
    g = gnb_with()
    assert g.allocation == PrbAllocation({"A": 50, "B": 50})
    assert apply_control(g, decisions(A=58, B=42), 0).ok
    assert g.allocation == PrbAllocation({"A": 58, "B": 42})
    assert g.last_writer == "xapp-1"


def test_apply_invalid_is_nacked_and_retained():
    g = gnb_with()
    ack = apply_control(g, decisions(A=60, B=60), 0)
    assert not ack.ok and "sum exceeds P" in ack.violation
    assert snapshot(g, 0).current_allocation == PrbAllocation({"A": 50, "B": 50})


def test_apply_identical_is_noop():
    g = gnb_with()
    assert apply_control(g, decisions(A=50, B=50), 0).ok
    assert g.allocation == PrbAllocation({"A": 50, "B": 50})


def test_attach_detach_counts():
    g = gnb_with()
    attach_ue(g, "ue-2", "A", 60_000)
    s = snapshot(g, 60_000)
    assert (s.total_ues, s.ues_per_slice["A"]) == (3, 2)
    detach_ue(g, "ue-2", 70_000)
    s = snapshot(g, 70_000)
    assert (s.total_ues, s.ues_per_slice["A"]) == (2, 1)


@pytest.mark.parametrize("op", [
    lambda g: attach_ue(g, "ue-0", "A", 0),
    lambda g: detach_ue(g, "ue-9", 0),
    lambda g: attach_ue(g, "ue-5", "Z", 0),
])
def test_bad_ue_ops(op):
    with pytest.raises(ScenarioError):
        op(gnb_with())


def test_snapshot_copy():
    g = gnb_with({"A": 58, "B": 42}, (("ue-0", "A"), ("ue-1", "B"), ("ue-2", "A")))
    s = snapshot(g, 5)
    assert (s.total_ues, s.ues_per_slice["A"], s.slice_count, s.timestamp) == (3, 2, 2, 5)
    assert s.current_allocation == PrbAllocation({"A": 58, "B": 42})
    empty = snapshot(GnbState(CELL), 0)
    assert empty.total_ues == 0 and dict(empty.ues_per_slice) == {"A": 0, "B": 0}


def test_throughput_values():
    g = gnb_with({"A": 58, "B": 42}, (("ue-0", "A"), ("ue-1", "B"), ("ue-2", "A")))
    tp = {s.ue_id: s.throughput_mbps for s in sample_throughput(g, QUIET, random.Random(0), 0)}
    # 0.45 * 58 / 2 and 0.45 * 42
    assert tp == pytest.approx({"ue-0": 13.05, "ue-1": 18.90, "ue-2": 13.05}, abs=1e-12)


def test_throughput_two_ues():
    tp = [s.throughput_mbps for s in sample_throughput(gnb_with(), QUIET, random.Random(0), 0)]
    assert tp == pytest.approx([22.5, 22.5])


def test_zero_prb_slice():
    g = gnb_with({"A": 0, "B": 100}, (("ue-0", "A"),))
    assert sample_throughput(g, QUIET, random.Random(0), 0)[0].throughput_mbps == 0.0


def test_throughput_never_negative():
    g = gnb_with()
    wild = ThroughputModelParams(noise_sigma=5.0)
    rng = random.Random(3)
    assert min(s.throughput_mbps for _ in range(500)
               for s in sample_throughput(g, wild, rng, 0)) == 0.0


@given(st.integers(0, 100), st.lists(st.sampled_from("AB"), min_size=1, max_size=6))
def test_fairness_and_cell_conservation(a_prbs, slices):
    g = gnb_with({"A": a_prbs, "B": 100 - a_prbs},
                 tuple((f"ue-{i}", s) for i, s in enumerate(slices)))
    out = sample_throughput(g, QUIET, random.Random(0), 0)
    for s in "AB":
        assert len({x.throughput_mbps for x in out if x.slice == s}) <= 1
    populated = set(slices)
    expected = 0.45 * sum(g.allocation[s] for s in populated)
    assert sum(x.throughput_mbps for x in out) == pytest.approx(expected)


@given(st.lists(st.tuples(st.integers(0, 100), st.booleans()), min_size=1, max_size=10))
def test_last_writer_wins(seq):
    g = gnb_with()
    expected = g.allocation.as_dict()
    for a, valid in seq:
        b = 100 - a if valid else 101 - a
        if apply_control(g, decisions(A=a, B=b), 0).ok:
            expected = {"A": a, "B": b}
    assert g.allocation.as_dict() == expected


def test_noise_statistics():
    g = gnb_with((), (("ue-0", "A"),))
    params = ThroughputModelParams(noise_sigma=0.03)
    rng = random.Random(11)
    xs = [sample_throughput(g, params, rng, 0)[0].throughput_mbps for _ in range(10_000)]
    base = 22.5
    assert abs(statistics.fmean(xs) - base) / base < 0.01
    assert abs(statistics.stdev(xs) / base - 0.03) / 0.03 < 0.10


def test_overlap_finder():
    g = gnb_with()
    apply_control(g, decisions("xapp-1", 0, A=58, B=42), 0)
    apply_control(g, decisions("xapp-2", 5_000, A=50, B=50), 5_000)
    assert len(find_direct_overlaps(g)) == 2
    # withdrawing the first decision before the second lands clears the clash
    record_revocations(g, [d.decision for d in g.applied[:2]], 5_000)
    assert find_direct_overlaps(g) == []


def test_same_xapp_replacement_is_not_an_overlap():
    g = gnb_with()
    apply_control(g, decisions("xapp-1", 0, A=50, B=50), 0)
    apply_control(g, decisions("xapp-1", 10_000, A=58, B=42), 10_000)
    assert find_direct_overlaps(g) == []
