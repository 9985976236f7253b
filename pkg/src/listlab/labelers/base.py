"""Contract shared by every rank-addressed labeling structure."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Any, Iterator

from ..core import LabelerSpec, MoveEvent, RankOutOfRange


def log2_squared_bound(capacity: int, factor: float) -> int:
    """ceil(factor * log2(capacity)^2), floored at one move."""
    if capacity < 2:
        return 1
    return max(1, math.ceil(factor * math.log2(capacity) ** 2))


class Labeler(ABC):
    """Maintains items in sorted slot order, addressed purely by rank.

    insert/delete return the move events they caused, with physical slot
    indices. Items are opaque; only their uid attribute is touched.
    """

    spec: LabelerSpec
    size: int

    @abstractmethod
    def insert(self, rank: int, item: Any) -> list[MoveEvent]:
        """Insert item at 1-based rank in 1..size+1."""

    @abstractmethod
    def delete(self, rank: int) -> list[MoveEvent]:
        """Remove the item at 1-based rank in 1..size."""

    @abstractmethod
    def position_of(self, uid: int) -> int:
        """Physical slot currently holding the item with this uid."""

    @abstractmethod
    def item_at(self, pos: int) -> Any | None:
        """Item in slot pos, or None when the slot is empty."""

    def at_rank(self, rank: int) -> Any:
        """Item with 1-based rank in 1..size."""
        seen = 0
        for item in self.slot_items():
            if item is not None:
                seen += 1
                if seen == rank:
                    return item
        raise RankOutOfRange(f"rank {rank} with size {self.size}")

    def slot_items(self) -> Iterator[Any | None]:
        for pos in range(self.spec.slot_count):
            yield self.item_at(pos)

    def occupants(self) -> Iterator[tuple[int, Any]]:
        """(pos, item) pairs in slot order."""
        for pos, item in enumerate(self.slot_items()):
            if item is not None:
                yield pos, item
