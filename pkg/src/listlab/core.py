"""Shared vocabulary for the labeling structures: slot roles, move events,
cost metering, and position/rank indexing over a fixed slot array."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


class LabelingError(Exception):
    """Base class for every error raised by this package."""


class RankOutOfRange(LabelingError):
    """Insert rank outside 1..size+1, or delete rank outside 1..size."""


class OutOfRange(LabelingError):
    """Order-statistic query beyond the current count."""


class CapacityExceeded(LabelingError):
    """Insert into a structure already holding its declared capacity."""


class ConfigInvalid(LabelingError):
    """Structure parameters that cannot produce a working instance."""


class IllegalMove(LabelingError):
    """Event replay hit a move whose source/destination state is wrong."""


class NotAdjacent(LabelingError):
    """Emulated move between slots that are not neighbors in the slot order."""


class NotFree(LabelingError):
    """Placement or move into a slot that is not free for that role."""


class NotInCheckpoint(LabelingError):
    """Rebuild referenced an element the frozen snapshot does not hold."""


class Halting(LabelingError):
    """A structure that must never refuse an operation refused one."""


class InternalBudgetOverflow(LabelingError):
    """Mandatory local work exceeded the per-operation work budget."""


class AmplificationOnFastPath(LabelingError):
    """A fast-path operation produced a buffered-content shift."""


class ParseError(LabelingError):
    """Malformed trace input.

    Attributes
    ----------
    line : int
        1-based line number of the offending record, 0 for header trouble.
    """

    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class SlotKind(enum.IntEnum):
    """Role of one physical slot inside the embedding's array."""

    F_OCCUPIED = 0
    F_FREE = 1
    F_GHOST = 2
    BUF_OCCUPIED = 3
    BUF_DUMMY = 4
    R_EMPTY = 5


F_KINDS = (SlotKind.F_OCCUPIED, SlotKind.F_FREE, SlotKind.F_GHOST)
BUF_KINDS = (SlotKind.BUF_OCCUPIED, SlotKind.BUF_DUMMY)
REAL_KINDS = (SlotKind.F_OCCUPIED, SlotKind.BUF_OCCUPIED)
NONEMPTY_KINDS = F_KINDS + BUF_KINDS


class CostClass(enum.IntEnum):
    """Billing category of one move event."""

    REAL = 0
    DEADWEIGHT = 1
    DUMMY_RELABEL = 2
    GHOST = 3
    RETIRE = 4


_UNIT_COST = (1, 1, 0, 0, 0)


@dataclass(frozen=True, slots=True)
class Element:
    """One stored item: a stable id plus an optional comparable key.

    Keys exist for small order-audited runs; long runs track order by id
    sequence alone so key arithmetic never dominates.
    """

    uid: int
    key: Fraction | int | None = None


@dataclass(frozen=True, slots=True)
class MoveEvent:
    """One slot-level effect of an operation.

    uid is the moved item's id (None when only empty capacity moved),
    src/dst are physical slot indices (src None for a placement, dst None
    for a retirement), and rshell marks events that originated inside a
    rank-addressed shell rather than the structure's own logic.
    """

    uid: int | None
    src: int | None
    dst: int | None
    cls: CostClass
    rshell: bool = False

    @property
    def cost(self) -> int:
        return _UNIT_COST[self.cls]


def place(uid: int, dst: int, *, rshell: bool = False) -> MoveEvent:
    return MoveEvent(uid, None, dst, CostClass.REAL, rshell)


def retire(uid: int, src: int, *, rshell: bool = False) -> MoveEvent:
    return MoveEvent(uid, src, None, CostClass.RETIRE, rshell)


class CostMeter:
    """Running totals over an event stream, per operation and overall."""

    __slots__ = (
        "total_real",
        "deadweight",
        "rshell_moves",
        "init_cost",
        "per_op",
        "max_per_op",
        "per_element_deadweight",
    )

    def __init__(self) -> None:
        self.total_real = 0
        self.deadweight = 0
        self.rshell_moves = 0
        self.init_cost = 0
        self.per_op: list[int] = []
        self.max_per_op = 0
        self.per_element_deadweight: dict[int, int] = {}

    def record_init(self, events: Iterable[MoveEvent]) -> None:
        """Charge setup events to init_cost only; they never join per_op.

        Construction traffic is mostly contentless capacity being spread
        around, so init_cost counts slot writes rather than content moves.
        """
        for ev in events:
            if ev.dst is not None:
                self.init_cost += 1

    def record_op(self, events: Iterable[MoveEvent]) -> int:
        op_cost = 0
        for ev in events:
            c = _UNIT_COST[ev.cls]
            op_cost += c
            self.total_real += c
            if ev.rshell:
                self.rshell_moves += 1
            elif ev.cls is CostClass.DEADWEIGHT:
                self.deadweight += 1
                if ev.uid is not None:
                    self.per_element_deadweight[ev.uid] = (
                        self.per_element_deadweight.get(ev.uid, 0) + 1
                    )
        self.per_op.append(op_cost)
        if op_cost > self.max_per_op:
            self.max_per_op = op_cost
        return op_cost

    @property
    def op_count(self) -> int:
        return len(self.per_op)

    @property
    def amortized(self) -> float:
        return self.total_real / len(self.per_op) if self.per_op else 0.0


class Fenwick:
    """Binary indexed tree over a fixed range of physical positions."""

    __slots__ = ("n", "tree")

    def __init__(self, n: int) -> None:
        self.n = n
        self.tree = [0] * (n + 1)

    def add(self, pos: int, delta: int) -> None:
        """Add delta at 0-based pos."""
        i = pos + 1
        tree = self.tree
        n = self.n
        while i <= n:
            tree[i] += delta
            i += i & (-i)

    def prefix(self, count: int) -> int:
        """Sum of the first `count` positions (0-based pos < count)."""
        s = 0
        tree = self.tree
        while count > 0:
            s += tree[count]
            count -= count & (-count)
        return s

    def select(self, k: int) -> int:
        """0-based position of the k-th (1-based) unit, assuming 0/1 weights."""
        if k <= 0:
            raise OutOfRange(f"select {k}")
        pos = 0
        bit = 1 << self.n.bit_length()
        remaining = k
        tree = self.tree
        n = self.n
        while bit:
            nxt = pos + bit
            if nxt <= n and tree[nxt] < remaining:
                remaining -= tree[nxt]
                pos = nxt
            bit >>= 1
        if pos >= n:
            raise OutOfRange(f"select {k} of {self.prefix(n)}")
        return pos


class RankIndex:
    """Kind-tagged slot array with order-statistic queries per kind set.

    Positions are 0-based and fixed; only kinds change. count/select/rank
    treat any subset of kinds as one combined population.
    """

    def __init__(self, size: int, initial: SlotKind = SlotKind.R_EMPTY) -> None:
        if size <= 0:
            raise ConfigInvalid("slot array must have at least one slot")
        self.size = size
        self.kinds = [initial] * size
        self._trees = [Fenwick(size) for _ in SlotKind]
        if initial is not None:
            t = self._trees[initial].tree
            # Bulk-build: every position starts at 1 for the initial kind.
            for i in range(1, size + 1):
                t[i] = i & (-i)

    def kind_at(self, pos: int) -> SlotKind:
        return self.kinds[pos]

    def set_kind(self, pos: int, kind: SlotKind) -> None:
        old = self.kinds[pos]
        if old is kind:
            return
        self._trees[old].add(pos, -1)
        self._trees[kind].add(pos, 1)
        self.kinds[pos] = kind

    def count(self, kinds: Sequence[SlotKind], upto: int | None = None) -> int:
        """Number of slots with kind in `kinds` at positions < upto."""
        hi = self.size if upto is None else upto
        return sum(self._trees[k].prefix(hi) for k in kinds)

    def rank(self, kinds: Sequence[SlotKind], pos: int) -> int:
        """1-based rank of slot `pos` within the `kinds` population."""
        return self.count(kinds, pos + 1)

    def select(self, kinds: Sequence[SlotKind], k: int) -> int:
        """Position of the k-th (1-based) slot whose kind is in `kinds`."""
        if k <= 0 or k > self.count(kinds):
            raise OutOfRange(f"select {k} of {self.count(kinds)}")
        trees = [self._trees[kind].tree for kind in kinds]
        pos = 0
        bit = 1 << (self.size.bit_length())
        remaining = k
        while bit:
            nxt = pos + bit
            if nxt <= self.size:
                here = sum(t[nxt] for t in trees)
                if here < remaining:
                    remaining -= here
                    pos = nxt
            bit >>= 1
        return pos

    def counts_by_kind(self) -> dict[SlotKind, int]:
        return {k: self._trees[k].prefix(self.size) for k in SlotKind}


class ArrayModel:
    """Replayable picture of which item sits in which physical slot.

    apply_move validates each event against the current picture, so a
    replay of a full event log proves the log is self-consistent and
    reproduces the final occupancy.
    """

    def __init__(self, size: int) -> None:
        self.size = size
        self.slot: list[int | None] = [None] * size
        self.pos: dict[int, int] = {}

    def apply_move(self, ev: MoveEvent) -> None:
        cls = ev.cls
        if cls is CostClass.DUMMY_RELABEL or cls is CostClass.GHOST:
            return
        if cls is CostClass.RETIRE:
            if ev.src is None or ev.uid is None:
                raise IllegalMove(f"retire needs uid and src: {ev}")
            if self.slot[ev.src] != ev.uid:
                raise IllegalMove(f"retire of {ev.uid} but slot holds {self.slot[ev.src]}")
            self.slot[ev.src] = None
            del self.pos[ev.uid]
            return
        if ev.dst is None:
            raise IllegalMove(f"content move without destination: {ev}")
        if ev.uid is None:
            if ev.src is None:
                raise IllegalMove(f"contentless event cannot be a placement: {ev}")
            return
        if self.slot[ev.dst] is not None:
            raise IllegalMove(f"destination {ev.dst} occupied by {self.slot[ev.dst]}")
        if ev.src is None:
            if ev.uid in self.pos:
                raise IllegalMove(f"placement of {ev.uid} already at {self.pos[ev.uid]}")
        else:
            if self.slot[ev.src] != ev.uid:
                raise IllegalMove(f"move of {ev.uid} but slot {ev.src} holds {self.slot[ev.src]}")
            self.slot[ev.src] = None
        self.slot[ev.dst] = ev.uid
        self.pos[ev.uid] = ev.dst

    def apply(self, events: Iterable[MoveEvent]) -> None:
        for ev in events:
            self.apply_move(ev)

    def occupied(self) -> Iterator[tuple[int, int]]:
        """(pos, uid) pairs in position order."""
        for i, u in enumerate(self.slot):
            if u is not None:
                yield i, u


@dataclass(frozen=True, slots=True)
class LabelerSpec:
    """Declared envelope of one structure instance."""

    name: str
    capacity: int
    slot_count: int
    expected_bound: int
    worst_bound: int
    rng_seed: int

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ConfigInvalid("capacity must be positive")
        if self.slot_count <= self.capacity:
            raise ConfigInvalid("slot_count must exceed capacity")
