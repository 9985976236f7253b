from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listlab.core import ConfigInvalid, Element, RankOutOfRange
from listlab.labelers import AdaptivePMA, ClassicPMA, NaiveCompactor
from listlab.labelers.pma import DensityTable
from listlab.oracle import TraceAuditor, check_sorted
from listlab.workloads import make_trace


def _sequential_fill(struct, count: int) -> int:
    total = 0
    for i in range(count):
        total += sum(ev.cost for ev in struct.insert(i + 1, Element(i + 1)))
    return total


def test_density_bands_keep_rho_below_tau() -> None:
    for height in (0, 1, 3, 7):
        table = DensityTable.build(height, 0.75, 0.375)
        assert len(table.taus) == height + 1
        for tau, rho in zip(table.taus, table.rhos):
            assert rho < tau
        assert list(table.taus) == sorted(table.taus, reverse=True)
        assert list(table.rhos) == sorted(table.rhos)


def test_window_widths_double_up_to_the_root() -> None:
    struct = ClassicPMA(64)
    m = struct.spec.slot_count
    for leaf in range(struct.leaf_count):
        for level in range(struct.height + 1):
            lo, hi = struct.window(leaf, level)
            assert 0 <= lo < hi <= m
            assert lo <= leaf * struct.leaf_size < hi or hi == m
            assert hi - lo == min(struct.leaf_size << level, m)


def test_default_sizing_doubles_capacity() -> None:
    struct = ClassicPMA(64)
    assert struct.spec.slot_count == 128
    assert struct.spec.expected_bound == math.ceil(2 * math.log2(64) ** 2)
    with pytest.raises(ConfigInvalid):
        ClassicPMA(64, 64)


def test_first_insert_is_a_single_move() -> None:
    struct = ClassicPMA(64)
    events = struct.insert(1, Element(1))
    assert len(events) == 1
    assert sum(ev.cost for ev in events) == 1


def test_sequential_fill_matches_the_compactor_baseline() -> None:
    """n=64 sequential fill, with the measured cost frozen as a regression pin."""
    struct = ClassicPMA(64)
    baseline = NaiveCompactor(64, 65)
    total = _sequential_fill(struct, 64)
    _sequential_fill(baseline, 64)
    got = [item.uid for _, item in struct.occupants()]
    want = [item.uid for _, item in baseline.occupants()]
    assert got == want
    assert total == 612


def test_mixed_trace_tracks_the_reference_model() -> None:
    struct = ClassicPMA(128)
    TraceAuditor(struct, full_every=16).run(make_trace("uniform:p=0.3", 128, 512, 2))


def test_adaptive_mixed_trace_tracks_the_reference_model() -> None:
    struct = AdaptivePMA(128)
    TraceAuditor(struct, full_every=16).run(make_trace("hammer:p=0.3", 128, 512, 2))


def test_rebalanced_windows_land_inside_their_density_band() -> None:
    struct = ClassicPMA(64)
    checked = 0
    original = struct._redistribute

    def spying(lo, hi, events, extra=None, extra_index=0):
        nonlocal checked
        original(lo, hi, events, extra=extra, extra_index=extra_index)
        width = hi - lo
        level = min(struct.height,
                    max(0, (width // struct.leaf_size).bit_length() - 1))
        assert struct.occupancy(lo, hi) <= struct.densities.taus[level] * width
        checked += 1

    struct._redistribute = spying
    _sequential_fill(struct, 64)
    assert checked


def test_delete_keeps_leaves_above_the_sparse_band() -> None:
    struct = ClassicPMA(64)
    _sequential_fill(struct, 64)
    for _ in range(60):
        struct.delete(1)
    assert [item.uid for _, item in struct.occupants()] == [61, 62, 63, 64]


def test_rank_bounds_are_enforced() -> None:
    struct = ClassicPMA(64)
    struct.insert(1, Element(1))
    with pytest.raises(RankOutOfRange):
        struct.insert(3, Element(2))
    with pytest.raises(RankOutOfRange):
        struct.delete(2)
    with pytest.raises(RankOutOfRange):
        struct.at_rank(0)


def test_adaptive_beats_classic_on_a_hammer_point() -> None:
    classic = ClassicPMA(1024)
    adaptive = AdaptivePMA(1024)
    trace = make_trace("hammer", 1024, 1024, 0)
    totals = []
    for struct in (classic, adaptive):
        total = 0
        uid = 0
        for rec in trace:
            uid += 1
            total += sum(ev.cost for ev in struct.insert(rec.rank, Element(uid)))
        totals.append(total)
    assert totals[1] < totals[0]


def test_adaptive_matches_classic_contents_everywhere() -> None:
    classic = ClassicPMA(256)
    adaptive = AdaptivePMA(256)
    trace = make_trace("uniform:p=0.2", 256, 768, 4)
    uid = 0
    for rec in trace:
        if rec.kind == "I":
            uid += 1
            classic.insert(rec.rank, Element(uid))
            adaptive.insert(rec.rank, Element(uid))
        else:
            classic.delete(rec.rank)
            adaptive.delete(rec.rank)
    got = [item.uid for _, item in adaptive.occupants()]
    want = [item.uid for _, item in classic.occupants()]
    assert got == want


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([ClassicPMA, AdaptivePMA]))
def test_physical_order_is_always_sorted(seed: int, cls: type) -> None:
    struct = cls(64)
    trace = make_trace("uniform:p=0.3", 64, 128, seed)
    uid = 0
    keys: dict[int, int] = {}
    order: list[int] = []
    for rec in trace:
        if rec.kind == "I":
            uid += 1
            struct.insert(rec.rank, Element(uid))
            order.insert(rec.rank - 1, uid)
        else:
            struct.delete(rec.rank)
            order.pop(rec.rank - 1)
        keys = {u: i for i, u in enumerate(order)}
        entries = [(pos, keys[item.uid]) for pos, item in struct.occupants()]
        assert check_sorted(entries) is None
