"""Sorted-array labeling structures, a buffered embedding combinator,
and a deterministic benchmark harness."""

from __future__ import annotations

from .core import (
    AmplificationOnFastPath,
    CapacityExceeded,
    ConfigInvalid,
    CostClass,
    CostMeter,
    Element,
    Halting,
    IllegalMove,
    InternalBudgetOverflow,
    LabelingError,
    MoveEvent,
    NotAdjacent,
    NotFree,
    NotInCheckpoint,
    OutOfRange,
    ParseError,
    RankOutOfRange,
    SlotKind,
)
from .embedding import Checkpoint, Layer, LayerConfig
from .expr import build_structure, parse_expr
from .harness import (
    ExperimentConfig,
    ResultRow,
    emit_csv,
    emit_json,
    fit_scaling,
    run_trial,
    summarize_rows,
)
from .labelers import (
    AdaptivePMA,
    BoundedPMA,
    ClassicPMA,
    Labeler,
    NaiveCompactor,
    make_flat,
)
from .oracle import (
    AuditFailure,
    ReferenceModel,
    TraceAuditor,
    check_sorted,
    deadweight_audit,
    independence_trial,
    rebuild_span_audit,
)
from .workloads import (
    OpRecord,
    OpTrace,
    gen_adversarial_classic,
    gen_hammer,
    gen_mixed,
    gen_uniform,
    make_trace,
    trace_read,
    trace_write,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptivePMA",
    "AmplificationOnFastPath",
    "AuditFailure",
    "BoundedPMA",
    "CapacityExceeded",
    "Checkpoint",
    "ClassicPMA",
    "ConfigInvalid",
    "CostClass",
    "CostMeter",
    "Element",
    "ExperimentConfig",
    "Halting",
    "IllegalMove",
    "InternalBudgetOverflow",
    "Labeler",
    "LabelingError",
    "Layer",
    "LayerConfig",
    "MoveEvent",
    "NaiveCompactor",
    "NotAdjacent",
    "NotFree",
    "NotInCheckpoint",
    "OpRecord",
    "OpTrace",
    "OutOfRange",
    "ParseError",
    "RankOutOfRange",
    "ReferenceModel",
    "ResultRow",
    "SlotKind",
    "TraceAuditor",
    "build_structure",
    "check_sorted",
    "deadweight_audit",
    "emit_csv",
    "emit_json",
    "fit_scaling",
    "gen_adversarial_classic",
    "gen_hammer",
    "gen_mixed",
    "gen_uniform",
    "independence_trial",
    "make_flat",
    "make_trace",
    "parse_expr",
    "rebuild_span_audit",
    "run_trial",
    "summarize_rows",
    "trace_read",
    "trace_write",
    "__version__",
]
