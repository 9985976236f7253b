"""Packed-memory arrays: density-managed sorted slot arrays.

The eager variants redistribute a whole window the moment a leaf leaves
its density band. Windows are aligned groups of 2^d leaves, so every leaf
has one unique ancestor chain.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Any

from ..core import (
    CapacityExceeded,
    ConfigInvalid,
    CostClass,
    Fenwick,
    LabelerSpec,
    MoveEvent,
    RankOutOfRange,
    place,
    retire,
)
from .base import Labeler, log2_squared_bound


@dataclass(frozen=True)
class DensityTable:
    """Per-level density bands, level 0 at the leaves.

    taus descend from 1.0 at the leaf toward the root bound; rhos rise
    from 0.25 toward half the root bound. rho < tau holds at every level.
    """

    taus: tuple[float, ...]
    rhos: tuple[float, ...]

    @classmethod
    def build(cls, height: int, tau_root: float, rho_root: float) -> "DensityTable":
        if height == 0:
            return cls((tau_root,), (rho_root,))
        taus = tuple(1.0 + (tau_root - 1.0) * d / height for d in range(height + 1))
        rhos = tuple(0.25 + (rho_root - 0.25) * d / height for d in range(height + 1))
        return cls(taus, rhos)


class PmaBase(Labeler):
    """Shared slot/threshold machinery for the packed-memory variants."""

    name = "pma"
    expected_factor = 2.0

    def __init__(self, capacity: int, slot_count: int | None = None, seed: int = 0) -> None:
        m = slot_count if slot_count is not None else 2 * capacity
        if m <= capacity:
            raise ConfigInvalid(f"need more slots than capacity, got {m} <= {capacity}")
        self.spec = LabelerSpec(
            name=self.name,
            capacity=capacity,
            slot_count=m,
            expected_bound=log2_squared_bound(capacity, self.expected_factor),
            worst_bound=self._worst_bound(capacity, m),
            rng_seed=seed,
        )
        self.size = 0
        self.leaf_size = max(1, math.ceil(math.log2(m)))
        self.leaf_count = -(-m // self.leaf_size)
        self.height = max(1, math.ceil(math.log2(self.leaf_count))) if self.leaf_count > 1 else 0
        tau_root = max(0.75, capacity / m)
        rho_root = min(0.5, tau_root / 2)
        self.densities = DensityTable.build(self.height, tau_root, rho_root)
        self._slots: list[Any | None] = [None] * m
        self._pos: dict[int, int] = {}
        self._occ = Fenwick(m)
        self._rng = random.Random(seed)

    def _worst_bound(self, capacity: int, m: int) -> int:
        return 2 * m

    # -- geometry ---------------------------------------------------------

    def window(self, leaf: int, level: int) -> tuple[int, int]:
        """Slot range [lo, hi) of the level-d window over this leaf.

        Interior windows are buddy-aligned; a window that would spill past
        the last slot slides left instead of shrinking, so the width ladder
        keeps doubling all the way to the root even at the right edge.
        """
        m = self.spec.slot_count
        first = (leaf >> level) << level
        lo = first * self.leaf_size
        hi = (first + (1 << level)) * self.leaf_size
        if hi > m:
            lo = max(0, lo - (hi - m))
            hi = m
        return lo, hi

    def occupancy(self, lo: int, hi: int) -> int:
        return self._occ.prefix(hi) - self._occ.prefix(lo)

    def _select_pos(self, k: int) -> int:
        """Slot of the k-th (1-based) occupied position."""
        return self._occ.select(k)

    # -- labeler API ------------------------------------------------------

    def position_of(self, uid: int) -> int:
        return self._pos[uid]

    def item_at(self, pos: int) -> Any | None:
        return self._slots[pos]

    def at_rank(self, rank: int) -> Any:
        if not 1 <= rank <= self.size:
            raise RankOutOfRange(f"rank {rank} with size {self.size}")
        return self._slots[self._select_pos(rank)]

    def slot_items(self):
        return iter(self._slots)

    def insert(self, rank: int, item: Any) -> list[MoveEvent]:
        if self.size >= self.spec.capacity:
            raise CapacityExceeded(f"{self.name} holds {self.size} of {self.spec.capacity}")
        if not 1 <= rank <= self.size + 1:
            raise RankOutOfRange(f"insert rank {rank} with size {self.size}")
        events: list[MoveEvent] = []
        p = self._select_pos(rank - 1) if rank > 1 else -1
        s = self._select_pos(rank) if rank <= self.size else self.spec.slot_count
        if s - p >= 2:
            self._place(item, (p + s) // 2, events)
        else:
            self._insert_tight(item, rank, p, s, events)
        return events

    def delete(self, rank: int) -> list[MoveEvent]:
        if not 1 <= rank <= self.size:
            raise RankOutOfRange(f"delete rank {rank} with size {self.size}")
        pos = self._select_pos(rank)
        gone = self._slots[pos]
        events = [retire(gone.uid, pos)]
        self._slots[pos] = None
        del self._pos[gone.uid]
        self._occ.add(pos, -1)
        self.size -= 1
        self._after_delete(pos, events)
        return events

    # -- placement paths --------------------------------------------------

    def _place(self, item: Any, dst: int, events: list[MoveEvent]) -> None:
        self._slots[dst] = item
        self._pos[item.uid] = dst
        self._occ.add(dst, 1)
        self.size += 1
        events.append(place(item.uid, dst))
        self._note_insert(dst // self.leaf_size)

    def _shift_run(self, src_lo: int, src_hi: int, delta: int, events: list[MoveEvent]) -> None:
        """Move the occupied run [src_lo, src_hi] by one slot, delta = +-1.

        Emission order keeps each hop landing in an empty slot.
        """
        order = range(src_lo, src_hi + 1) if delta < 0 else range(src_hi, src_lo - 1, -1)
        for i in order:
            moved = self._slots[i]
            self._slots[i + delta] = moved
            self._slots[i] = None
            self._pos[moved.uid] = i + delta
            self._occ.add(i, -1)
            self._occ.add(i + delta, 1)
            events.append(MoveEvent(moved.uid, i, i + delta, CostClass.REAL))

    def _leaf_free_left(self, leaf_lo: int, upto: int) -> int | None:
        for f in range(upto, leaf_lo - 1, -1):
            if self._slots[f] is None:
                return f
        return None

    def _leaf_free_right(self, start: int, leaf_hi: int) -> int | None:
        for f in range(start, leaf_hi):
            if self._slots[f] is None:
                return f
        return None

    def _insert_tight(self, item: Any, rank: int, p: int, s: int, events: list[MoveEvent]) -> None:
        """No free slot between neighbors: make room in the leaf or rebalance."""
        m = self.spec.slot_count
        ip = min(s, m - 1)
        leaf = ip // self.leaf_size
        leaf_lo = leaf * self.leaf_size
        leaf_hi = min(m, leaf_lo + self.leaf_size)
        f_left = self._leaf_free_left(leaf_lo, p) if p >= leaf_lo else None
        f_right = self._leaf_free_right(s, leaf_hi) if s < leaf_hi else None
        if f_left is None and f_right is None:
            self._rebalance_insert(item, rank, leaf, events)
            return
        d_left = p - f_left if f_left is not None else None
        d_right = f_right - s if f_right is not None else None
        if d_right is None or (d_left is not None and d_left <= d_right):
            self._shift_run(f_left + 1, p, -1, events)
            self._place(item, p, events)
        else:
            self._shift_run(s, f_right - 1, +1, events)
            self._place(item, s, events)

    def _rebalance_insert(self, item: Any, rank: int, leaf: int, events: list[MoveEvent]) -> None:
        for level in range(1, self.height + 1):
            lo, hi = self.window(leaf, level)
            if self.occupancy(lo, hi) + 1 <= self.densities.taus[level] * (hi - lo):
                new_index = rank - self._occ.prefix(lo)
                self._redistribute(lo, hi, events, extra=item, extra_index=new_index)
                return
        raise CapacityExceeded("no window can absorb the insert")

    def _after_delete(self, pos: int, events: list[MoveEvent]) -> None:
        leaf = pos // self.leaf_size
        lo, hi = self.window(leaf, 0)
        if self.occupancy(lo, hi) >= self.densities.rhos[0] * (hi - lo):
            return
        for level in range(1, self.height + 1):
            lo, hi = self.window(leaf, level)
            if self.occupancy(lo, hi) >= self.densities.rhos[level] * (hi - lo):
                self._redistribute(lo, hi, events)
                return
        # Sparser than the root band everywhere: nothing worth compacting.

    # -- redistribution ---------------------------------------------------

    def _targets(self, lo: int, hi: int, k: int) -> list[int]:
        """Ascending destination slots for k items across [lo, hi)."""
        width = hi - lo
        phi = self._rng.random()
        return [lo + int((i + phi) * width / k) for i in range(k)]

    def _redistribute(
        self,
        lo: int,
        hi: int,
        events: list[MoveEvent],
        extra: Any | None = None,
        extra_index: int = 0,
    ) -> None:
        existing = self.occupancy(lo, hi)
        k = existing + (1 if extra is not None else 0)
        if k == 0:
            return
        targets = self._targets(lo, hi, k)
        slots = self._slots
        positions = [i for i in range(lo, hi) if slots[i] is not None]

        def target_for(j: int) -> int:
            virt = j if extra is None or j < extra_index else j + 1
            return targets[virt - 1]

        # Rightward moves first, from the highest index down, then leftward
        # moves from the lowest up: every hop lands in an empty slot and the
        # array stays sorted after each one.
        for j in range(existing, 0, -1):
            cur = positions[j - 1]
            t = target_for(j)
            if t > cur:
                moved = slots[cur]
                slots[t] = moved
                slots[cur] = None
                self._pos[moved.uid] = t
                self._occ.add(cur, -1)
                self._occ.add(t, 1)
                positions[j - 1] = t
                events.append(MoveEvent(moved.uid, cur, t, CostClass.REAL))
        for j in range(1, existing + 1):
            cur = positions[j - 1]
            t = target_for(j)
            if t < cur:
                moved = slots[cur]
                slots[t] = moved
                slots[cur] = None
                self._pos[moved.uid] = t
                self._occ.add(cur, -1)
                self._occ.add(t, 1)
                positions[j - 1] = t
                events.append(MoveEvent(moved.uid, cur, t, CostClass.REAL))
        if extra is not None:
            self._place(extra, targets[extra_index - 1], events)
        self._after_redistribute(lo, hi)

    # -- hooks ------------------------------------------------------------

    def _note_insert(self, leaf: int) -> None:
        pass

    def _after_redistribute(self, lo: int, hi: int) -> None:
        pass


class ClassicPMA(PmaBase):
    """Eager packed-memory array with uniform spreads."""

    name = "classic"


class AdaptivePMA(PmaBase):
    """Packed-memory array that banks extra gaps where inserts cluster.

    Each leaf carries an insertion counter; a redistribution hands every
    leaf free space proportional to counter+1, then halves the counters
    it covered.
    """

    name = "adaptive"

    def __init__(self, capacity: int, slot_count: int | None = None, seed: int = 0) -> None:
        super().__init__(capacity, slot_count, seed)
        self._heat = [0] * self.leaf_count

    def _note_insert(self, leaf: int) -> None:
        self._heat[leaf] += 1

    def _after_redistribute(self, lo: int, hi: int) -> None:
        for leaf in range(lo // self.leaf_size, -(-hi // self.leaf_size)):
            self._heat[leaf] //= 2

    def _targets(self, lo: int, hi: int, k: int) -> list[int]:
        first_leaf = lo // self.leaf_size
        last_leaf = -(-hi // self.leaf_size)
        bounds = [
            (max(lo, leaf * self.leaf_size), min(hi, (leaf + 1) * self.leaf_size))
            for leaf in range(first_leaf, last_leaf)
        ]
        sizes = [b - a for a, b in bounds]
        free_total = (hi - lo) - k
        weights = [self._heat[leaf] + 1 for leaf in range(first_leaf, last_leaf)]
        frees = _proportional_shares(free_total, weights, sizes)
        targets: list[int] = []
        for (a, b), width, fr in zip(bounds, sizes, frees):
            q = width - fr
            if q <= 0:
                continue
            phi = self._rng.random()
            targets.extend(a + int((j + phi) * width / q) for j in range(q))
        return targets


def _proportional_shares(total: int, weights: list[int], caps: list[int]) -> list[int]:
    """Split `total` into integer shares proportional to weights, share_i <= caps_i."""
    shares = [0] * len(weights)
    remaining = total
    live = [i for i in range(len(weights)) if caps[i] > 0]
    while remaining > 0 and live:
        wsum = sum(weights[i] for i in live)
        pool = remaining
        progress = False
        quotients = []
        for i in live:
            raw = pool * weights[i] / wsum
            take = min(int(raw), caps[i] - shares[i])
            quotients.append((raw - int(raw), i))
            if take > 0:
                shares[i] += take
                remaining -= take
                progress = True
        if not progress:
            # Hand out single slots by largest fractional part, then index.
            quotients.sort(key=lambda t: (-t[0], t[1]))
            for _, i in quotients:
                if remaining == 0:
                    break
                if shares[i] < caps[i]:
                    shares[i] += 1
                    remaining -= 1
                    progress = True
        live = [i for i in live if shares[i] < caps[i]]
        if not progress and not live:
            break
    return shares
