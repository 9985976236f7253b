"""Packed-memory array with a hard per-operation move budget.

Keeps the eager variant's density bands, but a window redistribution
runs as a background job drained a bounded number of moves at a time.
Triggers that arrive while a job is active either grow the job or wait
in a queue; every queued request is revalidated against live densities
before it may become the next job. Each job move is checked against
live neighbors before it executes, so operations that land mid-job can
never be overtaken or shadowed.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import deque
from random import Random
from typing import Any

from ..core import CostClass, InternalBudgetOverflow, MoveEvent
from .pma import PmaBase, _proportional_shares

WORK_FACTOR = 8
QUEUE_CAP = 256


class _Job:
    """One in-flight window redistribution.

    The target table is frozen at creation. Progress is anchored to a
    physical frontier rather than item ranks, so operations that land
    mid-job shift the outcome a little without ever breaking a step.
    """

    __slots__ = ("lo", "hi", "level", "phase", "j", "next_pos", "total", "leaves", "prefix", "jitters")

    def __init__(self, lo: int, hi: int, level: int, leaves, quotas, jitters) -> None:
        self.lo = lo
        self.hi = hi
        self.level = level
        self.leaves = leaves
        self.jitters = jitters
        self.prefix = []
        run = 0
        for q in quotas:
            run += q
            self.prefix.append(run)
        self.total = run
        self.phase = 1
        self.j = run
        self.next_pos = hi

    def target(self, i: int) -> int:
        """Frozen destination slot for the i-th (1-based) item of the window."""
        w = bisect_left(self.prefix, i)
        before = self.prefix[w - 1] if w else 0
        a, b = self.leaves[w]
        quota = self.prefix[w] - before
        return a + int((i - before - 1 + self.jitters[w]) * (b - a) / quota)


class BoundedPMA(PmaBase):
    """Packed-memory array whose per-op moves stay under a fixed budget."""

    name = "bounded"

    def __init__(self, capacity: int, slot_count: int | None = None, seed: int = 0) -> None:
        super().__init__(capacity, slot_count, seed)
        self._job: _Job | None = None
        self._job_rng = Random(seed ^ 0x5DEECE66D)
        self._queue: deque[tuple[int, str]] = deque()
        self._queued: set[tuple[int, str]] = set()

    def _worst_bound(self, capacity: int, m: int) -> int:
        if capacity < 2:
            return WORK_FACTOR
        return WORK_FACTOR * max(1, math.ceil(math.log2(capacity) ** 2))

    @property
    def job_active(self) -> bool:
        return self._job is not None

    # -- operation wrappers -------------------------------------------------

    def insert(self, rank: int, item: Any) -> list[MoveEvent]:
        events = super().insert(rank, item)
        self._finish_op(events)
        return events

    def delete(self, rank: int) -> list[MoveEvent]:
        events = super().delete(rank)
        self._finish_op(events)
        return events

    def _finish_op(self, events: list[MoveEvent]) -> None:
        mandatory = sum(ev.cost for ev in events)
        budget = self.spec.worst_bound - mandatory
        if budget < 0:
            raise InternalBudgetOverflow(
                f"{mandatory} unavoidable moves exceed budget {self.spec.worst_bound}"
            )
        if self._job is not None:
            self._drain(budget, events)

    # -- triggers -----------------------------------------------------------

    def _note_insert(self, leaf: int) -> None:
        lo, hi = self.window(leaf, 0)
        if self.occupancy(lo, hi) >= hi - lo:
            self._trigger_insert(leaf)

    def _rebalance_insert(self, item: Any, rank: int, leaf: int, events: list[MoveEvent]) -> None:
        s = self._select_pos(rank) if rank <= self.size else self.spec.slot_count
        p = s - 1
        f_left = self._nearest_free_left(s)
        f_right = self._nearest_free_right(s)
        d_left = p - f_left if f_left is not None else None
        d_right = f_right - s if f_right is not None else None
        if d_right is None or (d_left is not None and d_left <= d_right):
            self._shift_run(f_left + 1, p, -1, events)
            self._place(item, p, events)
        else:
            self._shift_run(s, f_right - 1, +1, events)
            self._place(item, s, events)

    def _after_delete(self, pos: int, events: list[MoveEvent]) -> None:
        leaf = pos // self.leaf_size
        lo, hi = self.window(leaf, 0)
        if self.occupancy(lo, hi) < self.densities.rhos[0] * (hi - lo):
            self._trigger_delete(leaf)

    def _trigger_insert(self, leaf: int) -> None:
        for level in range(1, self.height + 1):
            lo, hi = self.window(leaf, level)
            if self.occupancy(lo, hi) + 1 <= self.densities.taus[level] * (hi - lo):
                self._propose(lo, hi, level, leaf, "i")
                return

    def _trigger_delete(self, leaf: int) -> None:
        for level in range(1, self.height + 1):
            lo, hi = self.window(leaf, level)
            if self.occupancy(lo, hi) >= self.densities.rhos[level] * (hi - lo):
                self._propose(lo, hi, level, leaf, "d")
                return

    def _propose(self, lo: int, hi: int, level: int, leaf: int, kind: str) -> None:
        job = self._job
        if job is None:
            self._job = self._make_job(lo, hi, level)
            return
        if lo >= job.lo and hi <= job.hi:
            return
        if lo <= job.lo and hi >= job.hi:
            self._job = self._make_job(lo, hi, level)
            return
        if hi <= job.lo or lo >= job.hi:
            key = (leaf, kind)
            if key not in self._queued and len(self._queue) < QUEUE_CAP:
                self._queue.append(key)
                self._queued.add(key)
            return
        while level < self.height:
            level += 1
            lo, hi = self.window(leaf, level)
            if lo <= job.lo and hi >= job.hi:
                break
        self._job = self._make_job(lo, hi, level)

    def _make_job(self, lo: int, hi: int, level: int) -> _Job | None:
        k = self.occupancy(lo, hi)
        if k == 0:
            return None
        first_leaf = lo // self.leaf_size
        last_leaf = -(-hi // self.leaf_size)
        leaves = [
            (max(lo, f * self.leaf_size), min(hi, (f + 1) * self.leaf_size))
            for f in range(first_leaf, last_leaf)
        ]
        sizes = [b - a for a, b in leaves]
        quotas = _proportional_shares(k, sizes, sizes)
        jitters = [self._job_rng.random() for _ in leaves]
        return _Job(lo, hi, level, leaves, quotas, jitters)

    def _job_done(self) -> None:
        self._job = None
        while self._queue and self._job is None:
            leaf, kind = self._queue.popleft()
            self._queued.discard((leaf, kind))
            lo, hi = self.window(leaf, 0)
            occ = self.occupancy(lo, hi)
            if kind == "i" and occ >= hi - lo:
                self._trigger_insert(leaf)
            elif kind == "d" and occ < self.densities.rhos[0] * (hi - lo):
                self._trigger_delete(leaf)

    # -- free-slot search ----------------------------------------------------

    def _nearest_free_left(self, s: int) -> int | None:
        """Largest free slot below s; [result+1, s) is a solid occupied run."""
        if s - self._occ.prefix(s) == 0:
            return None
        lo, hi = 0, s  # invariant: run start is in (lo, hi]
        base = self._occ.prefix(s)
        while lo < hi - 1:
            mid = (lo + hi) // 2
            if base - self._occ.prefix(mid) == s - mid:
                hi = mid
            else:
                lo = mid
        return hi - 1

    def _nearest_free_right(self, s: int) -> int | None:
        m = self.spec.slot_count
        total = self._occ.prefix(m) - self._occ.prefix(s)
        if total == m - s:
            return None
        base = self._occ.prefix(s)
        lo, hi = s, m  # smallest z with [s, z] not fully occupied
        while lo < hi:
            mid = (lo + hi) // 2
            if self._occ.prefix(mid + 1) - base == mid + 1 - s:
                lo = mid + 1
            else:
                hi = mid
        return lo

    # -- the drain ------------------------------------------------------------

    def _drain(self, budget: int, events: list[MoveEvent]) -> None:
        """Advance the active job: float items rightward onto their frozen
        targets scanning from the right, then sink the remainder leftward
        scanning from the left.

        The rightward pass runs over items in descending order, so each
        item's live successor has already been placed; the leftward pass
        runs ascending, so each item's live predecessor has.  Clamping the
        target against that neighbor keeps the landing slot inside a gap
        that is free by definition, so a step can always execute no matter
        what the interleaved operations did to the window.
        """
        moves = 0
        visited = 0
        visit_cap = max(256, 4 * budget)
        occ = self._occ
        m = self.spec.slot_count
        while self._job is not None and moves < budget and visited < visit_cap:
            job = self._job
            visited += 1
            base = occ.prefix(job.lo)
            if job.phase == 1:
                avail = occ.prefix(job.next_pos) - base
                if avail == 0 or job.j < 1:
                    job.phase = 2
                    job.j = 1
                    job.next_pos = job.lo - 1
                    continue
                idx = base + avail
                p = occ.select(idx)
                succ = occ.select(idx + 1) if idx < self.size else m
                t = min(job.target(job.j), min(succ, job.hi) - 1)
                job.j -= 1
                job.next_pos = p
                if t > p:
                    self._job_move(p, t, events)
                    moves += 1
            else:
                done_upto = occ.prefix(job.next_pos + 1)
                idx = done_upto + 1
                if job.j > job.total or idx > occ.prefix(job.hi):
                    self._job_done()
                    continue
                p = occ.select(idx)
                if p >= job.hi:
                    self._job_done()
                    continue
                pred = occ.select(idx - 1) if idx >= 2 else -1
                t = max(job.target(job.j), pred + 1, job.lo)
                job.j += 1
                job.next_pos = p
                if t < p:
                    self._job_move(p, t, events)
                    moves += 1

    def _job_move(self, src: int, dst: int, events: list[MoveEvent]) -> None:
        assert self._slots[dst] is None, "job step must land on a free slot"
        moved = self._slots[src]
        self._slots[dst] = moved
        self._slots[src] = None
        self._pos[moved.uid] = dst
        self._occ.add(src, -1)
        self._occ.add(dst, 1)
        events.append(MoveEvent(moved.uid, src, dst, CostClass.REAL))
