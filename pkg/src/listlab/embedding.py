"""Buffered embedding combinator.

Hosts a simulated fast structure over virtual front slots, realizes its
layout inside a rank-addressed shell, and pays for expensive front
rearrangements a budgeted slice at a time. Cheap operations replay the
simulation directly; expensive ones park the new item in a buffer slot
and advance the current rebuild.

Slot bookkeeping lives in cells. A cell is an item of the shell, so the
shell may relocate it physically; its role and content are this layer's
business. Cell objects never trade places with each other, which keeps
the shell's rank-visible state independent of anything the front does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator

from .core import (
    BUF_KINDS,
    AmplificationOnFastPath,
    CapacityExceeded,
    ConfigInvalid,
    CostClass,
    F_KINDS,
    Halting,
    IllegalMove,
    LabelerSpec,
    MoveEvent,
    NONEMPTY_KINDS,
    NotAdjacent,
    NotFree,
    NotInCheckpoint,
    RankIndex,
    RankOutOfRange,
    SlotKind,
    place,
    retire,
)
from .labelers.base import Labeler

LabelerFactory = Callable[[int, int, int], Labeler]


def derive_seed(seed: int, salt: int) -> int:
    """Stable 64-bit child seed (splitmix64 step)."""
    z = (seed + (salt + 1) * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class LayerConfig:
    """Tuning knobs for one embedding layer."""

    eps: float = 0.25
    beta: float = 1.0
    expected_override: int | Callable[[int], int] | None = None
    worst_override: int | Callable[[int], int] | None = None


@dataclass(frozen=True)
class Checkpoint:
    """One frozen front snapshot plus bookkeeping about its origin."""

    serial: int
    opened_at_op: int
    dirty_slots: int
    queued: int
    snapshot: tuple[int | None, ...]


class _Cell:
    """One shell-managed slot: a role plus at most one item of content."""

    __slots__ = ("uid", "kind", "content", "marker")

    def __init__(self, uid: int, kind: SlotKind) -> None:
        self.uid = uid
        self.kind = kind
        self.content: Any | None = None
        self.marker: int | None = None


class _Entry:
    """One planned assignment: which uid belongs at front index dst_f.

    Where the uid sits when its turn comes is resolved at execution time;
    in-place incorporations renumber front slots, so a source frozen at
    planning time could go stale.
    """

    __slots__ = ("uid", "dst_f")

    def __init__(self, uid: int, dst_f: int) -> None:
        self.uid = uid
        self.dst_f = dst_f


class _Interval:
    """A self-contained dirty stretch of front slots with its two phases."""

    __slots__ = ("lo_f", "hi_f", "align", "placing", "align_idx", "place_idx")

    def __init__(self, lo_f: int, hi_f: int, align: list[_Entry], placing: list[_Entry]) -> None:
        self.lo_f = lo_f
        self.hi_f = hi_f
        self.align = align
        self.placing = placing
        self.align_idx = 0
        self.place_idx = 0

    @property
    def done(self) -> bool:
        return self.align_idx >= len(self.align) and self.place_idx >= len(self.placing)


class RebuildPlan:
    """Ordered intervals still owed to the current checkpoint."""

    __slots__ = ("intervals", "idx", "checkpoint")

    def __init__(self, intervals: list[_Interval], checkpoint: Checkpoint) -> None:
        self.intervals = intervals
        self.idx = 0
        self.checkpoint = checkpoint

    @property
    def done(self) -> bool:
        return self.idx >= len(self.intervals)


def default_layer_counts(capacity: int, eps: Fraction) -> tuple[int, int, int]:
    """(front slots, buffer slots, spare shell slots) for a flat shell."""
    n = capacity
    front = -(-(n + eps * n) // 1)
    pad = -(-(eps * n) // 1)
    return int(front), int(pad), int(pad)


class Layer(Labeler):
    """Embedding of a front structure inside a rank-addressed shell."""

    def __init__(
        self,
        capacity: int,
        f_factory: LabelerFactory,
        r_factory: LabelerFactory,
        config: LayerConfig | None = None,
        seed: int = 0,
        name: str = "layer",
    ) -> None:
        cfg = config or LayerConfig()
        self.config = cfg
        eps = Fraction(str(cfg.eps))
        if eps <= 0 or eps * capacity < 1:
            raise ConfigInvalid(f"eps {cfg.eps} too small for capacity {capacity}")
        n_front_hint, n_buf, _spare = default_layer_counts(capacity, eps)
        self.sim = f_factory(capacity, n_front_hint, derive_seed(seed, 0))
        n_front = self.sim.spec.slot_count
        shell_cap = n_front + n_buf
        self.shell = r_factory(shell_cap, shell_cap + _spare, derive_seed(seed, 1))
        total = self.shell.spec.slot_count
        expected = cfg.expected_override
        worst = cfg.worst_override
        if callable(expected):
            expected = expected(capacity)
        if callable(worst):
            worst = worst(capacity)
        self.spec = LabelerSpec(
            name=name,
            capacity=capacity,
            slot_count=total,
            expected_bound=expected or self.shell.spec.expected_bound,
            worst_bound=worst or self.shell.spec.worst_bound,
            rng_seed=seed,
        )
        self.size = 0
        self.n_front = n_front
        self.n_buffer = n_buf
        self.beta = cfg.beta

        self._kinds = RankIndex(total, SlotKind.R_EMPTY)
        self._pos2cell: dict[int, _Cell] = {}
        self._cellpos: dict[int, int] = {}
        self._cells_by_uid: dict[int, _Cell] = {}
        self._holder: dict[int, _Cell] = {}
        self._next_cell_uid = 0

        # Front mirror: what the simulation believes sits at each front index,
        # what the array actually realizes, and where they disagree.
        self._mirror: list[int | None] = [None] * n_front
        self._af: list[int | None] = [None] * n_front
        self._dirty: set[int] = set()
        self._ghost_cells: set[_Cell] = set()

        self.plan: RebuildPlan | None = None
        self._checkpoint_serial = 0
        self._op_index = 0

        self.r_op_log: list[tuple[str, int]] = []
        self.deadweight_by_item: dict[int, int] = {}
        self._deadweight_this_rebuild: dict[int, int] = {}
        self.max_deadweight_per_rebuild = 0
        self.last_path = "fast"
        self.max_rebuild_span = 0
        self.max_move_span = 0
        self.max_buffer_occupancy = 0
        self._buf_occupied = 0

        self.init_events: list[MoveEvent] = []
        self._build_cells()

    # ------------------------------------------------------------------
    # construction

    def _build_cells(self) -> None:
        nf, nb = self.n_front, self.n_buffer
        total_cells = nf + nb
        out = self.init_events
        for component in (self.sim, self.shell):
            inner = getattr(component, "init_events", None)
            if inner:
                out.extend(inner)
        for j in range(total_cells):
            if (j + 1) * nb // total_cells > j * nb // total_cells:
                kind = SlotKind.BUF_DUMMY
            else:
                kind = SlotKind.F_FREE
            cell = _Cell(self._next_cell_uid, kind)
            self._next_cell_uid += 1
            self._cells_by_uid[cell.uid] = cell
            self.r_op_log.append(("I", j + 1))
            evs = self.shell.insert(j + 1, cell)
            self._absorb_shell_events(evs, out)

    # ------------------------------------------------------------------
    # shell event translation

    def _absorb_shell_events(self, evs: list[MoveEvent], out: list[MoveEvent]) -> None:
        """Fold shell moves into this layer's books, one translation hop."""
        kinds = self._kinds
        p2c = self._pos2cell
        for ev in evs:
            uid = ev.uid
            if uid is None or ev.cls is CostClass.GHOST:
                out.append(MoveEvent(None, ev.src, ev.dst, ev.cls if uid is None else CostClass.GHOST, True))
                continue
            cell = self._cells_by_uid[uid]
            if ev.cls is CostClass.RETIRE:
                kinds.set_kind(ev.src, SlotKind.R_EMPTY)
                del p2c[ev.src]
                del self._cellpos[uid]
                continue
            if ev.src is None:
                kinds.set_kind(ev.dst, cell.kind)
                p2c[ev.dst] = cell
                self._cellpos[uid] = ev.dst
                c = cell.content
                if c is not None:
                    out.append(MoveEvent(c.uid, None, ev.dst, CostClass.REAL, True))
                else:
                    out.append(MoveEvent(None, None, ev.dst, CostClass.DUMMY_RELABEL, True))
            else:
                kinds.set_kind(ev.src, SlotKind.R_EMPTY)
                kinds.set_kind(ev.dst, cell.kind)
                del p2c[ev.src]
                p2c[ev.dst] = cell
                self._cellpos[uid] = ev.dst
                c = cell.content
                cls = CostClass.REAL if c is not None else CostClass.DUMMY_RELABEL
                out.append(MoveEvent(c.uid if c is not None else None, ev.src, ev.dst, cls, True))

    # ------------------------------------------------------------------
    # front-index geometry

    def _f_phys(self, f_index: int) -> int:
        return self._kinds.select(F_KINDS, f_index + 1)

    def _f_index(self, pos: int) -> int:
        return self._kinds.rank(F_KINDS, pos) - 1

    def _cell_at_f(self, f_index: int) -> tuple[int, _Cell]:
        pos = self._f_phys(f_index)
        return pos, self._pos2cell[pos]

    # ------------------------------------------------------------------
    # mirror/divergence bookkeeping

    def _set_mirror(self, f_index: int, uid: int | None) -> None:
        self._mirror[f_index] = uid
        if self._af[f_index] == uid:
            self._dirty.discard(f_index)
        else:
            self._dirty.add(f_index)

    def _set_af(self, f_index: int, uid: int | None) -> None:
        self._af[f_index] = uid
        if self._mirror[f_index] == uid:
            self._dirty.discard(f_index)
        else:
            self._dirty.add(f_index)

    def _absorb_sim_events(self, evs: list[MoveEvent]) -> None:
        for ev in evs:
            if ev.cls is CostClass.GHOST:
                continue
            if ev.cls is CostClass.RETIRE:
                self._set_mirror(ev.src, None)
            elif ev.uid is not None and ev.dst is not None:
                if ev.src is not None:
                    self._set_mirror(ev.src, None)
                self._set_mirror(ev.dst, ev.uid)

    # ------------------------------------------------------------------
    # public labeler API

    def insert(self, rank: int, item: Any) -> list[MoveEvent]:
        if self.size >= self.spec.capacity:
            raise CapacityExceeded(f"layer holds {self.size} of {self.spec.capacity}")
        if not 1 <= rank <= self.size + 1:
            raise RankOutOfRange(f"insert rank {rank} with size {self.size}")
        self._op_index += 1
        sim_events = self.sim.insert(rank, item)
        self._absorb_sim_events(sim_events)
        cost = sum(ev.cost for ev in sim_events)
        events: list[MoveEvent] = []
        if self.plan is None and cost <= self.expected_budget:
            self.last_path = "fast"
            self._replay_fast(sim_events, item, events)
        else:
            self.last_path = "slow"
            self._buffer_insert(item, rank, events)
            if self.plan is None:
                self._open_checkpoint()
            self._rebuild_step(events)
        self.size += 1
        return events

    def delete(self, rank: int) -> list[MoveEvent]:
        if not 1 <= rank <= self.size:
            raise RankOutOfRange(f"delete rank {rank} with size {self.size}")
        self._op_index += 1
        sim_events = self.sim.delete(rank)
        self._absorb_sim_events(sim_events)
        cost = sum(ev.cost for ev in sim_events)
        uid = next(ev.uid for ev in sim_events if ev.cls is CostClass.RETIRE)
        events: list[MoveEvent] = []
        if self.plan is None and cost <= self.expected_budget:
            self.last_path = "fast"
            self._replay_fast(sim_events, None, events)
        else:
            self.last_path = "slow"
            self._retire_physical(uid, events)
            if self.plan is None:
                self._open_checkpoint()
            self._rebuild_step(events)
        self.size -= 1
        return events

    def position_of(self, uid: int) -> int:
        return self._cellpos[self._holder[uid].uid]

    def item_at(self, pos: int) -> Any | None:
        cell = self._pos2cell.get(pos)
        return cell.content if cell is not None else None

    def at_rank(self, rank: int) -> Any:
        return self.sim.at_rank(rank)

    @property
    def expected_budget(self) -> int:
        return self.spec.expected_bound

    # ------------------------------------------------------------------
    # fast path

    def _replay_fast(self, sim_events: list[MoveEvent], item: Any | None, out: list[MoveEvent]) -> None:
        start = len(out)
        for ev in sim_events:
            if ev.uid is None or ev.cls is CostClass.GHOST:
                continue
            if ev.cls is CostClass.RETIRE:
                pos, cell = self._cell_at_f(ev.src)
                if cell.kind is not SlotKind.F_OCCUPIED or cell.content.uid != ev.uid:
                    raise IllegalMove(f"front slot {ev.src} does not hold {ev.uid}")
                cell.kind = SlotKind.F_FREE
                self._kinds.set_kind(pos, SlotKind.F_FREE)
                del self._holder[ev.uid]
                cell.content = None
                self._set_af(ev.src, None)
                out.append(retire(ev.uid, pos))
            elif ev.src is None:
                pos, cell = self._cell_at_f(ev.dst)
                if cell.kind is not SlotKind.F_FREE:
                    raise NotFree(f"front slot {ev.dst} is {cell.kind.name}")
                cell.kind = SlotKind.F_OCCUPIED
                cell.content = item
                self._kinds.set_kind(pos, SlotKind.F_OCCUPIED)
                self._holder[item.uid] = cell
                self._set_af(ev.dst, item.uid)
                out.append(place(item.uid, pos))
            else:
                self._emu_move_front(ev.src, ev.dst, out, track_span=False)
        for ev in out[start:]:
            if ev.cls is CostClass.DEADWEIGHT:
                raise AmplificationOnFastPath(f"buffered shift on a fast operation: {ev}")

    # ------------------------------------------------------------------
    # slow path pieces

    def _buffer_insert(self, item: Any, rank: int, out: list[MoveEvent]) -> None:
        kinds = self._kinds
        if kinds.count((SlotKind.BUF_DUMMY,)) == 0:
            raise Halting("no spare buffer slot left")
        dummy_pos = kinds.select((SlotKind.BUF_DUMMY,), 1)
        dummy_cell = self._pos2cell[dummy_pos]
        trunc = kinds.rank(NONEMPTY_KINDS, dummy_pos)
        self.r_op_log.append(("D", trunc))
        self._absorb_shell_events(self.shell.delete(trunc), out)
        del self._cells_by_uid[dummy_cell.uid]

        cell = _Cell(self._next_cell_uid, SlotKind.BUF_OCCUPIED)
        self._next_cell_uid += 1
        cell.content = item
        self._cells_by_uid[cell.uid] = cell
        self._holder[item.uid] = cell
        if rank == 1:
            target = 1
        else:
            pred = self.at_rank(rank - 1)
            pred_pos = self.position_of(pred.uid)
            target = kinds.rank(NONEMPTY_KINDS, pred_pos) + 1
        self.r_op_log.append(("I", target))
        self._absorb_shell_events(self.shell.insert(target, cell), out)
        self._buf_occupied += 1
        if self._buf_occupied > self.max_buffer_occupancy:
            self.max_buffer_occupancy = self._buf_occupied

    def _retire_physical(self, uid: int, out: list[MoveEvent]) -> None:
        cell = self._holder.pop(uid)
        pos = self._cellpos[cell.uid]
        out.append(retire(uid, pos))
        if cell.kind is SlotKind.BUF_OCCUPIED:
            cell.kind = SlotKind.BUF_DUMMY
            cell.content = None
            self._kinds.set_kind(pos, SlotKind.BUF_DUMMY)
            self._buf_occupied -= 1
        elif cell.kind is SlotKind.F_OCCUPIED:
            f_index = self._f_index(pos)
            cell.kind = SlotKind.F_GHOST
            cell.content = None
            cell.marker = uid
            self._kinds.set_kind(pos, SlotKind.F_GHOST)
            self._ghost_cells.add(cell)
            self._set_af(f_index, None)
        else:
            raise IllegalMove(f"delete of {uid} found cell kind {cell.kind.name}")

    def _clear_ghosts(self) -> None:
        """Release deletion markers; only a fresh checkpoint may do this."""
        for cell in self._ghost_cells:
            pos = self._cellpos[cell.uid]
            cell.kind = SlotKind.F_FREE
            cell.marker = None
            self._kinds.set_kind(pos, SlotKind.F_FREE)
        self._ghost_cells.clear()

    def _ghost_hop(self, src_f: int, dst_f: int, out: list[MoveEvent]) -> None:
        src_pos, src_cell = self._cell_at_f(src_f)
        dst_pos, dst_cell = self._cell_at_f(dst_f)
        if dst_cell.kind is not SlotKind.F_FREE:
            raise NotFree(f"front target {dst_f} is {dst_cell.kind.name}")
        marker = src_cell.marker
        src_cell.kind = SlotKind.F_FREE
        src_cell.marker = None
        self._kinds.set_kind(src_pos, SlotKind.F_FREE)
        self._ghost_cells.discard(src_cell)
        dst_cell.kind = SlotKind.F_GHOST
        dst_cell.marker = marker
        self._kinds.set_kind(dst_pos, SlotKind.F_GHOST)
        self._ghost_cells.add(dst_cell)
        out.append(MoveEvent(marker, src_pos, dst_pos, CostClass.GHOST))

    # ------------------------------------------------------------------
    # checkpoints and plans

    def _open_checkpoint(self) -> None:
        self._clear_ghosts()
        self._deadweight_this_rebuild = {}

        dirty = sorted(self._dirty)
        self._checkpoint_serial += 1
        cp = Checkpoint(
            self._checkpoint_serial,
            self._op_index,
            len(dirty),
            self._buf_occupied,
            tuple(self._mirror),
        )
        if not dirty:
            self.plan = None
            return

        mirror, af = self._mirror, self._af
        intervals: list[_Interval] = []
        groups: list[tuple[int, int]] = []
        run_lo = dirty[0]
        prev = dirty[0]
        for f in dirty[1:]:
            separated = False
            for mid in range(prev + 1, f):
                if mirror[mid] is not None and af[mid] == mirror[mid]:
                    separated = True
                    break
            if separated:
                groups.append((run_lo, prev))
                run_lo = f
            prev = f
        groups.append((run_lo, prev))

        for lo_f, hi_f in groups:
            slots = [f for f in range(lo_f, hi_f + 1) if mirror[f] is not None]
            listed = [mirror[f] for f in slots]
            res_f = {af[f]: f for f in range(lo_f, hi_f + 1) if af[f] is not None}
            buffered = 0
            for uid in listed:
                if uid in res_f:
                    continue
                cell = self._holder.get(uid)
                if cell is None or cell.kind is not SlotKind.BUF_OCCUPIED:
                    raise NotInCheckpoint(f"{uid} is neither fronted nor buffered")
                buffered += 1
            # Buffered members join the front during the leftward pass, and
            # doing so can renumber slots under members that looked settled,
            # so in that case every member gets an entry in both passes.
            align: list[_Entry] = []
            placing: list[_Entry] = []
            for i, uid in enumerate(listed):
                dst = lo_f + i
                if buffered or res_f[uid] != dst:
                    align.append(_Entry(uid, dst))
                if buffered or dst != slots[i]:
                    placing.append(_Entry(uid, slots[i]))
            placing.reverse()
            iv = _Interval(lo_f, hi_f, align, placing)
            if not iv.done:
                intervals.append(iv)

        self.plan = RebuildPlan(intervals, cp) if intervals else None

    def remaining_cost(self) -> int:
        """Upper bound on budget units the open plan still needs."""
        plan = self.plan
        if plan is None:
            return 0
        kinds = self._kinds
        total = 0
        for i in range(plan.idx, len(plan.intervals)):
            iv = plan.intervals[i]
            total += len(iv.align) - iv.align_idx + len(iv.placing) - iv.place_idx
            in_align = iv.align_idx < len(iv.align)
            weight = 2 if in_align else 1
            lo = kinds.select(F_KINDS, iv.lo_f + 1)
            hi = kinds.select(F_KINDS, iv.hi_f + 1)
            buffered = kinds.count(BUF_KINDS, hi + 1) - kinds.count(BUF_KINDS, lo)
            total += weight * buffered
        return total

    def _rebuild_step(self, out: list[MoveEvent]) -> None:
        budget = max(1, math.ceil(self.beta * self.expected_budget))
        units = 0
        while self.plan is not None and units < budget:
            units += self._execute_burst(out)
        if self.plan is not None and self.remaining_cost() < self.expected_budget:
            while self.plan is not None:
                self._execute_burst(out)
        cheap_rule_used = False
        for _ in range(4):
            if self.plan is not None:
                break
            self._open_checkpoint()
            if self.plan is None:
                break
            if not cheap_rule_used and self.remaining_cost() < self.expected_budget:
                cheap_rule_used = True
                while self.plan is not None:
                    self._execute_burst(out)
            else:
                break

    def _execute_burst(self, out: list[MoveEvent]) -> int:
        plan = self.plan
        iv = plan.intervals[plan.idx]
        start = len(out)
        if iv.align_idx < len(iv.align):
            entry = iv.align[iv.align_idx]
            iv.align_idx += 1
            self._execute_align(iv, entry, out)
        else:
            entry = iv.placing[iv.place_idx]
            iv.place_idx += 1
            self._execute_placing(entry, out)
        if iv.done:
            plan.idx += 1
            if plan.done:
                span = self._op_index - plan.checkpoint.opened_at_op + 1
                if span > self.max_rebuild_span:
                    self.max_rebuild_span = span
                self.plan = None
                self._clear_ghosts()
        return len(out) - start

    def _find_ghost(self, uid: int) -> _Cell | None:
        for cell in self._ghost_cells:
            if cell.marker == uid:
                return cell
        return None

    def _execute_align(self, iv: _Interval, entry: _Entry, out: list[MoveEvent]) -> None:
        """Bring entry.uid no further right than front index entry.dst_f.

        Members only ever travel left here; a member already at or left of
        its packed slot stays put, which is what keeps the rightward pass
        free of backtracking.
        """
        uid, dst_f = entry.uid, entry.dst_f
        cell = self._holder.get(uid)
        if cell is None:
            ghost = self._find_ghost(uid)
            if ghost is not None:
                src_f = self._f_index(self._cellpos[ghost.uid])
                if src_f > dst_f:
                    self._ghost_hop(src_f, dst_f, out)
            return
        if cell.kind is SlotKind.F_OCCUPIED:
            src_f = self._f_index(self._cellpos[cell.uid])
            if src_f > dst_f:
                self._emu_move_front(src_f, dst_f, out, track_span=True)
        elif cell.kind is SlotKind.BUF_OCCUPIED:
            pos = self._cellpos[cell.uid]
            if self._kinds.count(F_KINDS, pos) > dst_f:
                self._emu_incorporate(cell, uid, dst_f, out)
            else:
                self._refront_in_place(cell, uid, iv.hi_f)
        else:
            raise NotInCheckpoint(f"{uid} sits in a {cell.kind.name} slot")

    def _execute_placing(self, entry: _Entry, out: list[MoveEvent]) -> None:
        uid, dst_f = entry.uid, entry.dst_f
        cell = self._holder.get(uid)
        if cell is None:
            ghost = self._find_ghost(uid)
            if ghost is not None:
                src_f = self._f_index(self._cellpos[ghost.uid])
                if src_f < dst_f:
                    self._ghost_hop(src_f, dst_f, out)
                elif src_f > dst_f:
                    raise NotInCheckpoint(f"{uid} would back up from {src_f} to {dst_f}")
            return
        if cell.kind is not SlotKind.F_OCCUPIED:
            raise NotInCheckpoint(f"{uid} missed the leftward pass")
        src_f = self._f_index(self._cellpos[cell.uid])
        if src_f == dst_f:
            return
        if src_f > dst_f:
            raise NotInCheckpoint(f"{uid} would back up from {src_f} to {dst_f}")
        self._emu_move_front(src_f, dst_f, out, track_span=True)

    # ------------------------------------------------------------------
    # emulated front moves

    def emulator_move(self, src_f: int, dst_f: int) -> list[MoveEvent]:
        """Move the occupant of front slot src_f into the adjacent free slot dst_f."""
        if abs(dst_f - src_f) != 1:
            raise NotAdjacent(f"front slots {src_f} and {dst_f} are not adjacent")
        out: list[MoveEvent] = []
        self._emu_move_front(src_f, dst_f, out, track_span=False)
        return out

    def _emu_move_front(self, src_f: int, dst_f: int, out: list[MoveEvent], track_span: bool) -> None:
        src_pos, src_cell = self._cell_at_f(src_f)
        dst_pos, dst_cell = self._cell_at_f(dst_f)
        if dst_cell.kind is not SlotKind.F_FREE:
            raise NotFree(f"front target {dst_f} is {dst_cell.kind.name}")
        item = src_cell.content
        self._sweep_and_place(src_pos, dst_pos, item, from_buffer=False, out=out, track_span=track_span)
        self._set_af(src_f, None)
        self._set_af(dst_f, item.uid)

    def _emu_incorporate(self, cell: _Cell, uid: int, dst_f: int, out: list[MoveEvent]) -> None:
        src_pos = self._cellpos[cell.uid]
        dst_pos, dst_cell = self._cell_at_f(dst_f)
        if dst_cell.kind is not SlotKind.F_FREE:
            raise NotFree(f"front target {dst_f} is {dst_cell.kind.name}")
        item = cell.content
        self._sweep_and_place(src_pos, dst_pos, item, from_buffer=True, out=out, track_span=True)
        self._buf_occupied -= 1
        self._set_af(dst_f, uid)

    def _refront_in_place(self, cell: _Cell, uid: int, hi_f: int) -> None:
        """Swap roles between a buffered cell and a spare front slot to its right.

        Used when the buffered cell already sits left of where its packed
        front slot materializes: nothing needs to travel, so no move events
        are emitted and no slot changes occupancy. Front slots between the
        two cells are renumbered, so the stored front assignments shift with
        them and the divergence set is refreshed over that stretch.
        """
        kinds = self._kinds
        pos = self._cellpos[cell.uid]
        new_f = kinds.count(F_KINDS, pos)
        free = (SlotKind.F_FREE,)
        spare_pos = kinds.select(free, kinds.count(free, pos) + 1)
        spare_f = kinds.count(F_KINDS, spare_pos)
        if spare_f > hi_f:
            raise IllegalMove(f"no spare front slot within reach for {uid}")
        spare_cell = self._pos2cell[spare_pos]
        cell.kind = SlotKind.F_OCCUPIED
        kinds.set_kind(pos, SlotKind.F_OCCUPIED)
        spare_cell.kind = SlotKind.BUF_DUMMY
        kinds.set_kind(spare_pos, SlotKind.BUF_DUMMY)
        self._buf_occupied -= 1
        af = self._af
        af.insert(new_f, uid)
        dropped = af.pop(spare_f + 1)
        if dropped is not None:
            raise IllegalMove(f"spare front slot {spare_f} was booked by {dropped}")
        mirror = self._mirror
        for f in range(new_f, spare_f + 1):
            if af[f] == mirror[f]:
                self._dirty.discard(f)
            else:
                self._dirty.add(f)

    def _sweep_and_place(
        self,
        src_pos: int,
        dst_pos: int,
        item: Any,
        from_buffer: bool,
        out: list[MoveEvent],
        track_span: bool,
    ) -> None:
        """Relocate item between slots, sweeping buffered cells out of the way.

        The swept cells bunch at the span end the mover came from... at the
        far end in the travel direction, which keeps them clear of every
        remaining planned span and shifts each at most once per phase.
        """
        kinds = self._kinds
        p2c = self._pos2cell
        lo, hi = (src_pos, dst_pos) if src_pos < dst_pos else (dst_pos, src_pos)
        rightward = dst_pos > src_pos
        if track_span and hi - lo + 1 > self.max_move_span:
            self.max_move_span = hi - lo + 1

        solid = (SlotKind.F_OCCUPIED, SlotKind.F_GHOST)
        in_span = kinds.count(solid, hi + 1) - kinds.count(solid, lo)
        if in_span != (0 if from_buffer else 1):
            raise IllegalMove(f"span [{lo},{hi}] crosses a held front slot")

        b_lo = kinds.count(BUF_KINDS, lo)
        b_hi = kinds.count(BUF_KINDS, hi + 1)
        b_positions = [kinds.select(BUF_KINDS, j) for j in range(b_lo + 1, b_hi + 1)]
        if from_buffer:
            others = [p for p in b_positions if p != src_pos]
        else:
            others = b_positions
        a = len(others)

        src_cell = p2c[src_pos]
        if a == 0:
            dst_cell = p2c[dst_pos]
            dst_cell.content = item
            dst_cell.kind = SlotKind.F_OCCUPIED
            kinds.set_kind(dst_pos, SlotKind.F_OCCUPIED)
            src_cell.content = None
            if from_buffer:
                src_cell.kind = SlotKind.BUF_DUMMY
                kinds.set_kind(src_pos, SlotKind.BUF_DUMMY)
            else:
                src_cell.kind = SlotKind.F_FREE
                kinds.set_kind(src_pos, SlotKind.F_FREE)
            self._holder[item.uid] = dst_cell
            out.append(MoveEvent(item.uid, src_pos, dst_pos, CostClass.REAL))
            return

        ne_lo = kinds.count(NONEMPTY_KINDS, lo)
        ne_hi = kinds.count(NONEMPTY_KINDS, hi + 1)
        if rightward:
            finals = [kinds.select(NONEMPTY_KINDS, j) for j in range(ne_hi - a + 1, ne_hi + 1)]
            mover_final = kinds.select(NONEMPTY_KINDS, ne_hi - a)
        else:
            finals = [kinds.select(NONEMPTY_KINDS, j) for j in range(ne_lo + 1, ne_lo + a + 1)]
            mover_final = kinds.select(NONEMPTY_KINDS, ne_lo + a + 1)

        moves = list(zip(others, finals))
        order = reversed(moves) if rightward else iter(moves)
        touched: list[int] = []
        for old_p, new_p in order:
            if old_p == new_p:
                continue
            old_cell = p2c[old_p]
            new_cell = p2c[new_p]
            content = old_cell.content
            new_cell.content = content
            old_cell.content = None
            touched.append(old_p)
            if content is not None:
                new_cell.kind = SlotKind.BUF_OCCUPIED
                kinds.set_kind(new_p, SlotKind.BUF_OCCUPIED)
                self._holder[content.uid] = new_cell
                out.append(MoveEvent(content.uid, old_p, new_p, CostClass.DEADWEIGHT))
                self.deadweight_by_item[content.uid] = self.deadweight_by_item.get(content.uid, 0) + 1
                per_rebuild = self._deadweight_this_rebuild.get(content.uid, 0) + 1
                self._deadweight_this_rebuild[content.uid] = per_rebuild
                if per_rebuild > self.max_deadweight_per_rebuild:
                    self.max_deadweight_per_rebuild = per_rebuild
            else:
                new_cell.kind = SlotKind.BUF_DUMMY
                kinds.set_kind(new_p, SlotKind.BUF_DUMMY)
                out.append(MoveEvent(None, old_p, new_p, CostClass.DUMMY_RELABEL))

        mover_cell = p2c[mover_final]
        mover_cell.content = item
        mover_cell.kind = SlotKind.F_OCCUPIED
        kinds.set_kind(mover_final, SlotKind.F_OCCUPIED)
        self._holder[item.uid] = mover_cell
        out.append(MoveEvent(item.uid, src_pos, mover_final, CostClass.REAL))

        src_cell.content = None
        if from_buffer:
            src_cell.kind = SlotKind.BUF_DUMMY
            kinds.set_kind(src_pos, SlotKind.BUF_DUMMY)
        else:
            src_cell.kind = SlotKind.F_FREE
            kinds.set_kind(src_pos, SlotKind.F_FREE)

        final_set = set(finals)
        final_set.add(mover_final)
        if from_buffer:
            final_set.add(src_pos)
        for old_p in touched:
            if old_p not in final_set and old_p != src_pos:
                cell = p2c[old_p]
                if cell.content is None and cell.kind in BUF_KINDS:
                    cell.kind = SlotKind.F_FREE
                    kinds.set_kind(old_p, SlotKind.F_FREE)

    # ------------------------------------------------------------------
    # introspection helpers

    def counts(self) -> dict[SlotKind, int]:
        return self._kinds.counts_by_kind()

    def truncated_state(self) -> tuple[tuple[str, int | None], ...]:
        """Shell-visible summary: roles and content ids of non-empty slots."""
        cells = sorted(self._cellpos.items(), key=lambda kv: kv[1])
        result = []
        for cell_uid, _pos in cells:
            cell = self._cells_by_uid[cell_uid]
            payload = cell.content.uid if cell.content is not None else cell.marker
            result.append((cell.kind.name, payload))
        return tuple(result)

    def serialize_r_log(self) -> str:
        return "\n".join(f"{op} {rank}" for op, rank in self.r_op_log)

    def buffered_count(self) -> int:
        return self._buf_occupied

    def slot_items(self) -> Iterator[Any | None]:
        for pos in range(self.spec.slot_count):
            cell = self._pos2cell.get(pos)
            yield cell.content if cell is not None else None
