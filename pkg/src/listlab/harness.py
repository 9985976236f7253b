"""Experiment runner: binds algorithm expressions, workloads, audits,
and cost reporting into deterministic CSV/JSON rows."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, fields
from typing import Any, Iterable, TextIO

from .core import ConfigInvalid, Element
from .embedding import Layer
from .expr import build_structure
from .oracle import TraceAuditor, deadweight_audit, rebuild_span_audit
from .workloads import OpTrace, make_trace

DEFAULT_AUDITS = frozenset({"order", "deadweight", "span", "fast"})


@dataclass(frozen=True)
class ResultRow:
    algo: str
    workload: str
    n: int
    seed: int
    T: int
    total_real: int
    amortized: float
    max_per_op: int
    deadweight: int
    rshell_moves: int
    init_cost: int
    max_rebuild_span: int
    max_buffer_occupancy: int
    wall_ms: int


RESULT_COLUMNS = [f.name for f in fields(ResultRow)]


@dataclass
class ExperimentConfig:
    algo: str
    workload: str
    n_values: list[int]
    T: int | None = None
    seeds: list[int] = field(default_factory=lambda: [0])
    eps: float = 0.25
    beta: float = 1.0
    out: str | None = None
    audits: frozenset[str] = DEFAULT_AUDITS
    timing: bool = True


def run_trial(algo: str, workload: str, n: int, T: int, seed: int, *,
              eps: float = 0.25, beta: float = 1.0,
              audits: frozenset[str] = DEFAULT_AUDITS,
              trace: OpTrace | None = None) -> ResultRow:
    """Run one (algorithm, workload, n, seed) cell and return its row.

    Inline audits raise AuditFailure at the first violating step; the
    end-of-run deadweight and span audits raise the same way."""
    if trace is None:
        trace = make_trace(workload, n, T, seed)
    struct = build_structure(algo, n, seed, eps=eps, beta=beta)
    start = time.perf_counter()
    total = 0
    max_per_op = 0
    rshell = 0
    if "order" in audits:
        auditor = TraceAuditor(struct, fast_purity="fast" in audits)
        for rec in trace:
            events = auditor.apply(rec)
            c = 0
            for ev in events:
                c += ev.cost
                if ev.rshell:
                    rshell += 1
            total += c
            if c > max_per_op:
                max_per_op = c
        auditor.finish()
    else:
        uid = 0
        for rec in trace:
            if rec.kind == "I":
                uid += 1
                events = struct.insert(rec.rank, Element(uid))
            else:
                events = struct.delete(rec.rank)
            c = 0
            for ev in events:
                c += ev.cost
                if ev.rshell:
                    rshell += 1
            total += c
            if c > max_per_op:
                max_per_op = c
    wall_ms = int((time.perf_counter() - start) * 1000)

    deadweight = 0
    init_cost = 0
    max_span = 0
    max_buf = 0
    if isinstance(struct, Layer):
        dw = deadweight_audit(struct)
        span = rebuild_span_audit(struct)
        if "deadweight" in audits and not dw.ok:
            raise AssertionError(
                f"deadweight audit: item {dw.worst_item} lifetime {dw.worst_lifetime}, "
                f"per-rebuild {dw.worst_per_rebuild}")
        if "span" in audits and not span.ok:
            raise AssertionError(
                f"span audit: buffer occupancy {span.max_buffer_occupancy} reached slack")
        deadweight = dw.worst_lifetime
        max_span = span.max_span
        max_buf = span.max_buffer_occupancy
        init_cost = len(struct.init_events)
    return ResultRow(
        algo=algo, workload=workload, n=n, seed=seed, T=trace.T,
        total_real=total,
        amortized=total / trace.T if trace.T else 0.0,
        max_per_op=max_per_op, deadweight=deadweight, rshell_moves=rshell,
        init_cost=init_cost, max_rebuild_span=max_span,
        max_buffer_occupancy=max_buf, wall_ms=wall_ms,
    )


def run_config(cfg: ExperimentConfig) -> list[ResultRow]:
    rows = []
    for n in cfg.n_values:
        T = cfg.T if cfg.T is not None else n
        for seed in cfg.seeds:
            rows.append(run_trial(
                cfg.algo, cfg.workload, n, T, seed,
                eps=cfg.eps, beta=cfg.beta, audits=cfg.audits))
    rows.sort(key=lambda r: (r.algo, r.workload, r.n, r.seed))
    return rows


def _columns(timing: bool) -> list[str]:
    if timing:
        return RESULT_COLUMNS
    return [c for c in RESULT_COLUMNS if c != "wall_ms"]


def _row_values(row: ResultRow, cols: list[str]) -> list[Any]:
    return [getattr(row, c) for c in cols]


def emit_csv(rows: Iterable[ResultRow], out: str | TextIO, timing: bool = True) -> None:
    cols = _columns(timing)
    close = False
    if isinstance(out, str):
        out = open(out, "w", newline="", encoding="ascii")
        close = True
    try:
        writer = csv.writer(out)
        writer.writerow(cols)
        for row in rows:
            writer.writerow(_row_values(row, cols))
    finally:
        if close:
            out.close()


def emit_json(rows: Iterable[ResultRow], out: str | TextIO, timing: bool = True) -> None:
    cols = _columns(timing)
    payload = [dict(zip(cols, _row_values(r, cols))) for r in rows]
    if isinstance(out, str):
        with open(out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(payload, out, indent=2)
        out.write("\n")


def read_csv(path: str) -> list[ResultRow]:
    rows = []
    with open(path, newline="", encoding="ascii") as fh:
        for rec in csv.DictReader(fh):
            rows.append(ResultRow(
                algo=rec["algo"], workload=rec["workload"],
                n=int(rec["n"]), seed=int(rec["seed"]), T=int(rec["T"]),
                total_real=int(rec["total_real"]),
                amortized=float(rec["amortized"]),
                max_per_op=int(rec["max_per_op"]),
                deadweight=int(rec["deadweight"]),
                rshell_moves=int(rec["rshell_moves"]),
                init_cost=int(rec["init_cost"]),
                max_rebuild_span=int(rec["max_rebuild_span"]),
                max_buffer_occupancy=int(rec["max_buffer_occupancy"]),
                wall_ms=int(rec.get("wall_ms", 0) or 0),
            ))
    return rows


_MODELS = {
    "const": lambda n: 1.0,
    "log2n": lambda n: math.log2(n),
    "log2n^2": lambda n: math.log2(n) ** 2,
}
_MODEL_ALIASES = {"log2n2": "log2n^2", "log2n_squared": "log2n^2"}


def fit_scaling(points: Iterable[tuple[int, float]],
                model: str) -> tuple[float, float]:
    """Least-squares fit y = a*g(n) through the origin.

    Returns (a, max relative deviation of the fit from the data)."""
    model = _MODEL_ALIASES.get(model, model)
    try:
        g = _MODELS[model]
    except KeyError:
        raise ConfigInvalid(f"unknown scaling model {model!r}") from None
    pts = [(g(n), y) for n, y in points]
    if not pts:
        raise ConfigInvalid("scaling fit needs at least one point")
    denom = sum(x * x for x, _ in pts)
    a = sum(x * y for x, y in pts) / denom if denom else 0.0
    worst = 0.0
    for x, y in pts:
        if y:
            worst = max(worst, abs(a * x - y) / abs(y))
        elif a * x:
            worst = max(worst, 1.0)
    return a, worst


SUMMARY_COLUMNS = [
    "algo", "workload", "n", "T", "trials",
    "amortized_mean", "max_per_op_max", "deadweight_max",
    "rshell_moves_mean", "init_cost_mean",
    "max_rebuild_span_max", "max_buffer_occupancy_max",
]


def summarize_rows(rows: Iterable[ResultRow]) -> list[dict[str, Any]]:
    """Aggregate trials over seeds: means for amortized quantities,
    maxima for worst-case ones."""
    groups: dict[tuple, list[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.algo, row.workload, row.n, row.T), []).append(row)
    out = []
    for (algo, workload, n, T), grp in sorted(groups.items()):
        out.append({
            "algo": algo, "workload": workload, "n": n, "T": T,
            "trials": len(grp),
            "amortized_mean": sum(r.amortized for r in grp) / len(grp),
            "max_per_op_max": max(r.max_per_op for r in grp),
            "deadweight_max": max(r.deadweight for r in grp),
            "rshell_moves_mean": sum(r.rshell_moves for r in grp) / len(grp),
            "init_cost_mean": sum(r.init_cost for r in grp) / len(grp),
            "max_rebuild_span_max": max(r.max_rebuild_span for r in grp),
            "max_buffer_occupancy_max": max(r.max_buffer_occupancy for r in grp),
        })
    return out


def emit_summary_csv(summary: list[dict[str, Any]], out: str | TextIO) -> None:
    close = False
    if isinstance(out, str):
        out = open(out, "w", newline="", encoding="ascii")
        close = True
    try:
        writer = csv.DictWriter(out, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for rec in summary:
            writer.writerow(rec)
    finally:
        if close:
            out.close()
