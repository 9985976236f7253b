"""Left-packed baseline: every item sits at slot rank-1."""

from __future__ import annotations

from typing import Any

from ..core import (
    CapacityExceeded,
    LabelerSpec,
    MoveEvent,
    CostClass,
    RankOutOfRange,
    place,
    retire,
)
from .base import Labeler


class NaiveCompactor(Labeler):
    """Keeps items contiguous from slot 0; shifts the whole suffix per op."""

    def __init__(self, capacity: int, slot_count: int | None = None, seed: int = 0) -> None:
        m = slot_count if slot_count is not None else capacity + 1
        self.spec = LabelerSpec(
            name="naive",
            capacity=capacity,
            slot_count=m,
            expected_bound=capacity + 1,
            worst_bound=capacity + 1,
            rng_seed=seed,
        )
        self.size = 0
        self._slots: list[Any | None] = [None] * m
        self._pos: dict[int, int] = {}

    def insert(self, rank: int, item: Any) -> list[MoveEvent]:
        if self.size >= self.spec.capacity:
            raise CapacityExceeded(f"naive holds {self.size} of {self.spec.capacity}")
        if not 1 <= rank <= self.size + 1:
            raise RankOutOfRange(f"insert rank {rank} with size {self.size}")
        events: list[MoveEvent] = []
        for i in range(self.size - 1, rank - 2, -1):
            moved = self._slots[i]
            self._slots[i + 1] = moved
            self._slots[i] = None
            self._pos[moved.uid] = i + 1
            events.append(MoveEvent(moved.uid, i, i + 1, CostClass.REAL))
        self._slots[rank - 1] = item
        self._pos[item.uid] = rank - 1
        self.size += 1
        events.append(place(item.uid, rank - 1))
        return events

    def delete(self, rank: int) -> list[MoveEvent]:
        if not 1 <= rank <= self.size:
            raise RankOutOfRange(f"delete rank {rank} with size {self.size}")
        gone = self._slots[rank - 1]
        events = [retire(gone.uid, rank - 1)]
        self._slots[rank - 1] = None
        del self._pos[gone.uid]
        for i in range(rank, self.size):
            moved = self._slots[i]
            self._slots[i - 1] = moved
            self._slots[i] = None
            self._pos[moved.uid] = i - 1
            events.append(MoveEvent(moved.uid, i, i - 1, CostClass.REAL))
        self.size -= 1
        return events

    def position_of(self, uid: int) -> int:
        return self._pos[uid]

    def item_at(self, pos: int) -> Any | None:
        return self._slots[pos]

    def at_rank(self, rank: int) -> Any:
        if not 1 <= rank <= self.size:
            raise RankOutOfRange(f"rank {rank} with size {self.size}")
        return self._slots[rank - 1]

    def slot_items(self):
        return iter(self._slots)
