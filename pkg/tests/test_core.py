from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listlab.core import (
    ArrayModel,
    ConfigInvalid,
    CostClass,
    CostMeter,
    Fenwick,
    IllegalMove,
    LabelerSpec,
    MoveEvent,
    OutOfRange,
    RankIndex,
    SlotKind,
    place,
    retire,
)


def test_cost_classes_bill_content_moves_only() -> None:
    assert MoveEvent(1, 0, 1, CostClass.REAL).cost == 1
    assert MoveEvent(1, 0, 1, CostClass.DEADWEIGHT).cost == 1
    assert MoveEvent(None, 0, 1, CostClass.DUMMY_RELABEL).cost == 0
    assert MoveEvent(1, 0, 1, CostClass.GHOST).cost == 0
    assert MoveEvent(1, 0, None, CostClass.RETIRE).cost == 0


def test_place_and_retire_shapes() -> None:
    ev = place(7, 3)
    assert (ev.uid, ev.src, ev.dst, ev.cls) == (7, None, 3, CostClass.REAL)
    ev = retire(7, 3, rshell=True)
    assert (ev.uid, ev.src, ev.dst, ev.cls) == (7, 3, None, CostClass.RETIRE)
    assert ev.rshell


def test_cost_meter_separates_init_from_operations() -> None:
    meter = CostMeter()
    meter.record_init([place(1, 0), place(2, 5), retire(1, 0)])
    assert meter.init_cost == 2
    assert meter.total_real == 0
    meter.record_op([place(3, 1), MoveEvent(1, 0, 2, CostClass.DEADWEIGHT)])
    meter.record_op([MoveEvent(None, 1, 3, CostClass.DUMMY_RELABEL)])
    assert meter.total_real == 2
    assert meter.deadweight == 1
    assert meter.per_element_deadweight == {1: 1}
    assert meter.op_count == 2
    assert meter.max_per_op == 2
    assert meter.amortized == pytest.approx(1.0)


def test_cost_meter_counts_shell_moves_separately() -> None:
    meter = CostMeter()
    meter.record_op([MoveEvent(1, 0, 2, CostClass.DEADWEIGHT, rshell=True)])
    assert meter.rshell_moves == 1
    assert meter.deadweight == 0


def test_fenwick_prefix_and_select_round_trip() -> None:
    fw = Fenwick(10)
    for pos in (0, 3, 7, 9):
        fw.add(pos, 1)
    assert fw.prefix(0) == 0
    assert fw.prefix(4) == 2
    assert fw.prefix(10) == 4
    assert [fw.select(k) for k in (1, 2, 3, 4)] == [0, 3, 7, 9]
    with pytest.raises(OutOfRange):
        fw.select(5)
    with pytest.raises(OutOfRange):
        fw.select(0)


@settings(max_examples=200)
@given(st.lists(st.integers(min_value=0, max_value=63), max_size=64), st.integers(0, 64))
def test_fenwick_matches_list_counting(marked: list[int], upto: int) -> None:
    fw = Fenwick(64)
    flags = [0] * 64
    for pos in marked:
        if not flags[pos]:
            flags[pos] = 1
            fw.add(pos, 1)
    assert fw.prefix(upto) == sum(flags[:upto])
    total = sum(flags)
    for k in range(1, total + 1):
        want = [i for i, f in enumerate(flags) if f][k - 1]
        assert fw.select(k) == want


def test_rank_index_rejects_empty_array() -> None:
    with pytest.raises(ConfigInvalid):
        RankIndex(0)


def test_rank_index_initial_population() -> None:
    ri = RankIndex(8, SlotKind.F_FREE)
    assert ri.count((SlotKind.F_FREE,)) == 8
    assert ri.count((SlotKind.R_EMPTY,)) == 0
    assert ri.select((SlotKind.F_FREE,), 3) == 2


def test_rank_index_count_rank_select_consistency() -> None:
    ri = RankIndex(12)
    layout = [
        SlotKind.F_OCCUPIED, SlotKind.BUF_DUMMY, SlotKind.F_FREE,
        SlotKind.F_GHOST, SlotKind.BUF_OCCUPIED, SlotKind.R_EMPTY,
        SlotKind.F_OCCUPIED, SlotKind.F_FREE, SlotKind.BUF_DUMMY,
        SlotKind.R_EMPTY, SlotKind.F_OCCUPIED, SlotKind.BUF_OCCUPIED,
    ]
    for pos, kind in enumerate(layout):
        ri.set_kind(pos, kind)
    front = (SlotKind.F_OCCUPIED, SlotKind.F_FREE, SlotKind.F_GHOST)
    positions = [p for p, k in enumerate(layout) if k in front]
    assert ri.count(front) == len(positions)
    for j, pos in enumerate(positions, start=1):
        assert ri.select(front, j) == pos
        assert ri.rank(front, pos) == j
    counts = ri.counts_by_kind()
    assert counts[SlotKind.F_OCCUPIED] == 3
    assert counts[SlotKind.R_EMPTY] == 2
    assert sum(counts.values()) == 12


@settings(max_examples=150)
@given(st.lists(st.tuples(st.integers(0, 31),
                          st.sampled_from(list(SlotKind))), max_size=80))
def test_rank_index_agrees_with_a_plain_list(writes: list[tuple[int, SlotKind]]) -> None:
    ri = RankIndex(32)
    plain = [SlotKind.R_EMPTY] * 32
    for pos, kind in writes:
        ri.set_kind(pos, kind)
        plain[pos] = kind
    group = (SlotKind.F_OCCUPIED, SlotKind.BUF_OCCUPIED)
    want = [p for p, k in enumerate(plain) if k in group]
    assert ri.count(group) == len(want)
    for j, pos in enumerate(want, start=1):
        assert ri.select(group, j) == pos
    for pos in range(32):
        assert ri.kind_at(pos) == plain[pos]


def test_array_model_replays_a_consistent_log() -> None:
    model = ArrayModel(6)
    model.apply([
        place(1, 0),
        place(2, 3),
        MoveEvent(1, 0, 1, CostClass.REAL),
        MoveEvent(2, 3, 2, CostClass.DEADWEIGHT),
        MoveEvent(None, 4, 5, CostClass.DUMMY_RELABEL),
        retire(1, 1),
    ])
    assert list(model.occupied()) == [(2, 2)]


def test_array_model_rejects_bad_moves() -> None:
    model = ArrayModel(4)
    model.apply_move(place(1, 0))
    with pytest.raises(IllegalMove):
        model.apply_move(place(2, 0))
    with pytest.raises(IllegalMove):
        model.apply_move(MoveEvent(9, 2, 3, CostClass.REAL))
    with pytest.raises(IllegalMove):
        model.apply_move(retire(1, 3))
    with pytest.raises(IllegalMove):
        model.apply_move(MoveEvent(1, 0, None, CostClass.REAL))


def test_labeler_spec_validates_shape() -> None:
    with pytest.raises(ConfigInvalid):
        LabelerSpec("x", 0, 4, 1, 1, 0)
    with pytest.raises(ConfigInvalid):
        LabelerSpec("x", 8, 8, 1, 1, 0)
    spec = LabelerSpec("x", 8, 9, 2, 4, 0)
    assert spec.slot_count == 9
