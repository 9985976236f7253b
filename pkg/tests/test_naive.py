from __future__ import annotations

import pytest

from listlab.core import (
    CapacityExceeded,
    CostClass,
    Element,
    RankOutOfRange,
)
from listlab.labelers import NaiveCompactor


def _filled(count: int, capacity: int = 16) -> NaiveCompactor:
    struct = NaiveCompactor(capacity)
    for i in range(count):
        struct.insert(i + 1, Element(i + 1))
    return struct


def test_default_sizing_leaves_one_spare_slot() -> None:
    struct = NaiveCompactor(10)
    assert struct.spec.slot_count == 11
    assert struct.spec.expected_bound == struct.spec.worst_bound == 11


def test_insert_mid_shifts_the_suffix() -> None:
    struct = _filled(5)
    events = struct.insert(3, Element(99))
    assert sum(ev.cost for ev in events) == 4
    assert len(events) == 4
    assert all(ev.cls is CostClass.REAL for ev in events)
    assert [item.uid for _, item in struct.occupants()] == [1, 2, 99, 3, 4, 5]


def test_append_costs_one_move() -> None:
    struct = _filled(5)
    events = struct.insert(struct.size + 1, Element(99))
    assert sum(ev.cost for ev in events) == 1
    assert struct.item_at(5).uid == 99


def test_delete_front_compacts_the_suffix() -> None:
    struct = _filled(4)
    events = struct.delete(1)
    assert sum(ev.cost for ev in events) == 3
    retire_evs = [ev for ev in events if ev.cls is CostClass.RETIRE]
    assert len(retire_evs) == 1 and retire_evs[0].uid == 1
    assert [item.uid for _, item in struct.occupants()] == [2, 3, 4]


def test_items_stay_left_packed() -> None:
    struct = _filled(6)
    struct.delete(2)
    struct.insert(4, Element(50))
    positions = [pos for pos, _ in struct.occupants()]
    assert positions == list(range(struct.size))
    for rank in range(1, struct.size + 1):
        assert struct.position_of(struct.at_rank(rank).uid) == rank - 1


def test_rank_bounds_are_enforced() -> None:
    struct = _filled(3)
    with pytest.raises(RankOutOfRange):
        struct.insert(0, Element(9))
    with pytest.raises(RankOutOfRange):
        struct.insert(5, Element(9))
    with pytest.raises(RankOutOfRange):
        struct.delete(4)
    with pytest.raises(RankOutOfRange):
        struct.at_rank(4)


def test_capacity_is_enforced() -> None:
    struct = _filled(4, capacity=4)
    with pytest.raises(CapacityExceeded):
        struct.insert(1, Element(9))
