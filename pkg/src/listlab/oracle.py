"""Independent correctness audits: reference model, per-op trace checks,
deadweight and rebuild-span accounting, and the twin-seed independence
trial.  Everything here consumes public structure surfaces and event
logs only, never internals of a specific labeler."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator

from .core import CostClass, Element, MoveEvent
from .embedding import Layer
from .workloads import OpRecord, OpTrace


class AuditFailure(AssertionError):
    """An audit found a divergence; message carries the first bad step."""


class ReferenceModel:
    """Ground-truth ordered sequence driven by the same trace."""

    def __init__(self) -> None:
        self.items: list[int] = []

    def insert(self, rank: int, uid: int) -> None:
        self.items.insert(rank - 1, uid)

    def delete(self, rank: int) -> int:
        return self.items.pop(rank - 1)

    def __len__(self) -> int:
        return len(self.items)


def check_sorted(entries: Any) -> int | None:
    """Scan (position, key) pairs in position order; return the first
    position whose key fails to strictly increase, or None."""
    last_key = None
    for pos, key in entries:
        if last_key is not None and key <= last_key:
            return pos
        last_key = key
    return None


def iter_layers(struct: Any) -> Iterator[Layer]:
    """Yield every Layer in a composition, outermost first."""
    stack = [struct]
    while stack:
        node = stack.pop()
        if isinstance(node, Layer):
            yield node
            stack.append(node.shell)
            stack.append(node.sim)


class TraceAuditor:
    """Drives a structure and the reference model in lockstep.

    Every operation gets size and mutation-site spot checks through the
    rank interface; physical-order equality against the full reference
    sequence runs every `full_every` operations and at finish, so any
    divergence is caught within one scan period and reported with the
    first differing step seen."""

    def __init__(self, struct: Any, full_every: int | None = None,
                 fast_purity: bool = True) -> None:
        self.struct = struct
        self.model = ReferenceModel()
        self.full_every = full_every or max(32, struct.spec.capacity // 2)
        self.fast_purity = fast_purity and isinstance(struct, Layer)
        self._ops = 0
        self._next_uid = 0

    def apply(self, rec: OpRecord) -> list[MoveEvent]:
        if rec.kind == "I":
            self._next_uid += 1
            uid = self._next_uid
            events = self.struct.insert(rec.rank, Element(uid))
            self.model.insert(rec.rank, uid)
        else:
            events = self.struct.delete(rec.rank)
            self.model.delete(rec.rank)
        self._ops += 1
        self._spot_check(rec)
        if self.fast_purity:
            self._check_fast(rec, events)
        if self._ops % self.full_every == 0:
            self.full_check(rec.t)
        return events

    def run(self, trace: OpTrace) -> None:
        for rec in trace:
            self.apply(rec)
        self.finish()

    def finish(self) -> None:
        self.full_check(self._ops - 1)

    def _spot_check(self, rec: OpRecord) -> None:
        if self.struct.size != len(self.model):
            raise AuditFailure(
                f"t={rec.t}: size {self.struct.size} != reference {len(self.model)}")
        for rank in (rec.rank - 1, rec.rank, rec.rank + 1):
            if 1 <= rank <= len(self.model):
                got = self.struct.at_rank(rank).uid
                want = self.model.items[rank - 1]
                if got != want:
                    raise AuditFailure(
                        f"t={rec.t}: rank {rank} holds id {got}, reference has {want}")

    def _check_fast(self, rec: OpRecord, events: list[MoveEvent]) -> None:
        if self.struct.last_path != "fast":
            return
        cost = 0
        for ev in events:
            if ev.cls is CostClass.DEADWEIGHT:
                raise AuditFailure(f"t={rec.t}: deadweight move on a fast operation")
            cost += ev.cost
        if cost > self.struct.expected_budget:
            raise AuditFailure(
                f"t={rec.t}: fast op cost {cost} exceeds expected bound "
                f"{self.struct.expected_budget}")

    def full_check(self, t: int) -> None:
        got = [item.uid for _, item in self.struct.occupants()]
        want = self.model.items
        if got != want:
            k = next((i for i, (g, w) in enumerate(zip(got, want)) if g != w),
                     min(len(got), len(want)))
            raise AuditFailure(
                f"t={t}: physical order diverges from reference at element {k} "
                f"(got {got[k] if k < len(got) else 'end'}, "
                f"want {want[k] if k < len(want) else 'end'})")


@dataclass(frozen=True)
class DeadweightReport:
    ok: bool
    worst_item: int | None
    worst_lifetime: int
    worst_per_rebuild: int


def deadweight_audit(struct: Any) -> DeadweightReport:
    """Check per-element deadweight: lifetime at most 4, at most 2 inside
    any single rebuild, independently at every nesting level."""
    worst_item = None
    worst_life = 0
    worst_rebuild = 0
    ok = True
    for layer in iter_layers(struct):
        for item_id, count in layer.deadweight_by_item.items():
            if count > worst_life:
                worst_life = count
                worst_item = item_id
            if count > 4:
                ok = False
        if layer.max_deadweight_per_rebuild > worst_rebuild:
            worst_rebuild = layer.max_deadweight_per_rebuild
        if layer.max_deadweight_per_rebuild > 2:
            ok = False
    return DeadweightReport(ok, worst_item, worst_life, worst_rebuild)


@dataclass(frozen=True)
class SpanReport:
    ok: bool
    max_span: int
    max_buffer_occupancy: int
    worst_occupancy_ratio: float


def rebuild_span_audit(struct: Any) -> SpanReport:
    """Report rebuild-duration and buffer-occupancy maxima over all
    nesting levels; occupancy must stay strictly below the slack at
    every level."""
    max_span = 0
    max_buf = 0
    worst_ratio = 0.0
    ok = True
    for layer in iter_layers(struct):
        max_span = max(max_span, layer.max_rebuild_span)
        max_buf = max(max_buf, layer.max_buffer_occupancy)
        slack = layer.config.eps * layer.spec.capacity
        ratio = layer.max_buffer_occupancy / slack if slack else 0.0
        worst_ratio = max(worst_ratio, ratio)
        if layer.max_buffer_occupancy >= slack:
            ok = False
    return SpanReport(ok, max_span, max_buf, worst_ratio)


def independence_trial(trace: OpTrace, expr: str, seed: int,
                       r_seed_a: int, r_seed_b: int,
                       eps: float = 0.25, beta: float = 1.0) -> int | None:
    """Run the composition twice, differing only in the reliable shell's
    seed, and compare the shell-visible operation logs byte for byte.
    Returns None when equal, else the index of the first differing line."""
    from .expr import build_structure

    logs = []
    for r_seed in (r_seed_a, r_seed_b):
        struct = build_structure(expr, trace.n, seed, eps=eps, beta=beta,
                                 r_base_seed=r_seed)
        if not isinstance(struct, Layer):
            raise TypeError("independence trial needs a layered composition")
        uid = 0
        for rec in trace:
            if rec.kind == "I":
                uid += 1
                struct.insert(rec.rank, Element(uid))
            else:
                struct.delete(rec.rank)
        logs.append(struct.serialize_r_log())
    if logs[0] == logs[1]:
        return None
    a, b = logs[0].split("\n"), logs[1].split("\n")
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return i
    return min(len(a), len(b))
