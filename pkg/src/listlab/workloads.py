"""Seeded workload generators and the replayable trace format."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .core import ConfigInvalid, ParseError

TRACE_MAGIC = "#llbl v1"


class OpRecord(NamedTuple):
    t: int
    kind: str
    rank: int


@dataclass
class OpTrace:
    n: int
    gen: str
    seed: int
    records: list[OpRecord] = field(default_factory=list)

    @property
    def T(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[OpRecord]:
        return iter(self.records)

    def validate(self) -> None:
        size = 0
        for rec in self.records:
            if rec.kind == "I":
                if not 1 <= rec.rank <= size + 1:
                    raise ConfigInvalid(f"t={rec.t}: insert rank {rec.rank} at size {size}")
                size += 1
            elif rec.kind == "D":
                if not 1 <= rec.rank <= size:
                    raise ConfigInvalid(f"t={rec.t}: delete rank {rec.rank} at size {size}")
                size -= 1
            else:
                raise ConfigInvalid(f"t={rec.t}: unknown op kind {rec.kind!r}")
            if size > self.n:
                raise ConfigInvalid(f"t={rec.t}: size {size} exceeds capacity {self.n}")


def _check_budget(n: int, T: int, p_delete: float) -> None:
    if p_delete == 0 and T > n:
        raise ConfigInvalid(f"pure-insert trace of length {T} exceeds capacity {n}")
    if not 0 <= p_delete < 1:
        raise ConfigInvalid(f"p_delete {p_delete} outside [0, 1)")


def _mixed_records(n: int, T: int, rng: random.Random, p_delete: float,
                   ins_rank, del_rank) -> list[OpRecord]:
    """Shared engine: per-step delete coin only when mixing, else the
    random stream matches the pure-insert generator exactly."""
    records = []
    size = 0
    for t in range(T):
        if size == 0:
            drop = False
            if p_delete > 0:
                rng.random()
        elif size == n:
            drop = True
            if p_delete > 0:
                rng.random()
        elif p_delete > 0:
            drop = rng.random() < p_delete
        else:
            drop = False
        if drop:
            records.append(OpRecord(t, "D", del_rank(size)))
            size -= 1
        else:
            records.append(OpRecord(t, "I", ins_rank(size)))
            size += 1
    return records


def gen_uniform(n: int, T: int, seed: int, p_delete: float = 0.0) -> OpTrace:
    """Insert at a rank uniform in 1..size+1; optionally mix in deletes
    at uniform ranks with probability p_delete per step."""
    _check_budget(n, T, p_delete)
    rng = random.Random(seed)
    records = _mixed_records(
        n, T, rng, p_delete,
        ins_rank=lambda size: rng.randint(1, size + 1),
        del_rank=lambda size: rng.randint(1, size),
    )
    return OpTrace(n=n, gen="uniform", seed=seed, records=records)


def gen_mixed(n: int, T: int, seed: int, p_delete: float) -> OpTrace:
    trace = gen_uniform(n, T, seed, p_delete)
    return OpTrace(n=n, gen="mixed", seed=seed, records=trace.records)


def gen_hammer(n: int, T: int, seed: int, r0: int = 1, p_delete: float = 0.0) -> OpTrace:
    """All inserts at the fixed rank r0 (clamped when the list is still
    shorter); delete mixing churns the same hotspot."""
    _check_budget(n, T, p_delete)
    if r0 < 1:
        raise ConfigInvalid(f"hammer rank {r0} must be positive")
    rng = random.Random(seed)
    records = _mixed_records(
        n, T, rng, p_delete,
        ins_rank=lambda size: min(r0, size + 1),
        del_rank=lambda size: min(r0, size),
    )
    return OpTrace(n=n, gen="hammer", seed=seed, records=records)


class _DensityMap:
    """Leaf-occupancy sketch of a density-thresholded array: tracks where
    mass concentrates under even-spread rebalances without simulating
    element identity."""

    def __init__(self, n: int) -> None:
        self.m = 2 * n
        self.leaf = max(2, math.ceil(math.log2(self.m)))
        self.leaves = -(-self.m // self.leaf)
        self.occ = [0] * self.leaves
        self.height = max(1, math.ceil(math.log2(self.leaves)))

    def densest(self) -> int:
        best = 0
        for i in range(1, self.leaves):
            if self.occ[i] > self.occ[best]:
                best = i
        return best

    def add(self, leaf: int) -> None:
        self.occ[leaf] += 1
        width = self.leaf
        lo, hi = leaf, leaf + 1
        for level in range(self.height + 1):
            tau = 1.0 - 0.25 * level / self.height
            total = sum(self.occ[lo:hi])
            if total <= tau * width * (hi - lo):
                if level:
                    share, extra = divmod(total, hi - lo)
                    for i in range(lo, hi):
                        self.occ[i] = share + (1 if i - lo < extra else 0)
                return
            span = 1 << (level + 1)
            lo = (leaf // span) * span
            hi = min(lo + span, self.leaves)
        share, extra = divmod(sum(self.occ), self.leaves)
        self.occ = [share + (1 if i < extra else 0) for i in range(self.leaves)]

    def remove_first(self) -> None:
        for i, c in enumerate(self.occ):
            if c:
                self.occ[i] -= 1
                return


def gen_adversarial_classic(n: int, T: int, p_delete: float = 0.0) -> OpTrace:
    """Deterministic stress for density-thresholded arrays: every insert
    lands at the midpoint rank of the currently densest leaf of a virtual
    even-spread array; delete mixing removes rank 1 at a fixed cadence."""
    _check_budget(n, T, p_delete)
    sketch = _DensityMap(n)
    cadence = math.ceil(1 / p_delete) if p_delete > 0 else 0
    records = []
    size = 0
    for t in range(T):
        drop = size == n or (cadence and t % cadence == cadence - 1 and size > 0)
        if drop:
            records.append(OpRecord(t, "D", 1))
            sketch.remove_first()
            size -= 1
            continue
        leaf = sketch.densest()
        before = sum(sketch.occ[:leaf])
        rank = min(before + sketch.occ[leaf] // 2 + 1, size + 1)
        records.append(OpRecord(t, "I", rank))
        sketch.add(leaf)
        size += 1
    return OpTrace(n=n, gen="adversarial", seed=0, records=records)


def trace_write(trace: OpTrace, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{TRACE_MAGIC} n={trace.n} gen={trace.gen} seed={trace.seed} T={trace.T}\n")
        for rec in trace.records:
            fh.write(f"{rec.t} {rec.kind} {rec.rank}\n")


def trace_read(path: str) -> OpTrace:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        fields = header.split()
        if fields[: len(TRACE_MAGIC.split())] != TRACE_MAGIC.split():
            raise ParseError(f"line 1: bad magic, expected {TRACE_MAGIC!r}")
        meta = {}
        for tok in fields[2:]:
            key, _, val = tok.partition("=")
            if not val:
                raise ParseError(f"line 1: malformed header field {tok!r}")
            meta[key] = val
        try:
            n = int(meta["n"])
            seed = int(meta["seed"])
            declared = int(meta["T"])
            gen = meta["gen"]
        except (KeyError, ValueError) as exc:
            raise ParseError(f"line 1: incomplete header ({exc})") from None
        records = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3 or parts[1] not in ("I", "D"):
                raise ParseError(f"line {lineno}: expected '<t> <I|D> <rank>'")
            try:
                records.append(OpRecord(int(parts[0]), parts[1], int(parts[2])))
            except ValueError:
                raise ParseError(f"line {lineno}: non-integer field") from None
    if len(records) != declared:
        raise ParseError(f"header declares T={declared} but {len(records)} records found")
    trace = OpTrace(n=n, gen=gen, seed=seed, records=records)
    try:
        trace.validate()
    except ConfigInvalid as exc:
        raise ParseError(str(exc)) from None
    return trace


def parse_workload_spec(spec: str) -> tuple[str, dict[str, float]]:
    """Split 'name' or 'name:key=val,key=val' into generator name and knobs."""
    name, _, tail = spec.partition(":")
    knobs: dict[str, float] = {}
    if tail:
        for piece in tail.split(","):
            key, sep, val = piece.partition("=")
            if not sep:
                raise ConfigInvalid(f"workload knob {piece!r} is not key=value")
            try:
                knobs[key.strip()] = float(val)
            except ValueError:
                raise ConfigInvalid(f"workload knob {piece!r} has a non-numeric value") from None
    return name.strip(), knobs


def make_trace(spec: str, n: int, T: int, seed: int) -> OpTrace:
    name, knobs = parse_workload_spec(spec)
    p = knobs.pop("p", knobs.pop("p_delete", 0.0))
    if name == "uniform":
        trace = gen_uniform(n, T, seed, p)
    elif name == "mixed":
        trace = gen_mixed(n, T, seed, p)
    elif name == "hammer":
        trace = gen_hammer(n, T, seed, int(knobs.pop("r0", 1)), p)
    elif name == "adversarial":
        trace = gen_adversarial_classic(n, T, p)
    else:
        raise ConfigInvalid(f"unknown workload {name!r}")
    if knobs:
        raise ConfigInvalid(f"unused workload knobs: {sorted(knobs)}")
    return trace
