from __future__ import annotations

from typing import Any

import pytest

from listlab import build_structure
from listlab.core import Element, MoveEvent
from listlab.labelers import NaiveCompactor
from listlab.oracle import (
    AuditFailure,
    ReferenceModel,
    TraceAuditor,
    check_sorted,
    deadweight_audit,
    independence_trial,
    iter_layers,
    rebuild_span_audit,
)
from listlab.workloads import OpRecord, make_trace


class _SwappingCompactor(NaiveCompactor):
    """Deliberately corrupt baseline: silently swaps its first two items."""

    def insert(self, rank: int, item: Any) -> list[MoveEvent]:
        events = super().insert(rank, item)
        if self.size == 8:
            a, b = self._slots[0], self._slots[1]
            self._slots[0], self._slots[1] = b, a
            self._pos[a.uid], self._pos[b.uid] = 1, 0
        return events


def test_reference_model_is_a_plain_ordered_list() -> None:
    model = ReferenceModel()
    model.insert(1, 10)
    model.insert(2, 20)
    model.insert(2, 15)
    assert model.items == [10, 15, 20]
    assert model.delete(2) == 15
    assert len(model) == 2


def test_check_sorted_accepts_empty_and_ordered_input() -> None:
    assert check_sorted([]) is None
    assert check_sorted([(0, 1), (4, 3), (9, 7)]) is None


def test_check_sorted_reports_the_first_violating_position() -> None:
    assert check_sorted([(0, 1), (4, 3), (9, 2)]) == 9
    assert check_sorted([(0, 5), (1, 5)]) == 1


def test_auditor_passes_an_honest_structure() -> None:
    struct = NaiveCompactor(128)
    TraceAuditor(struct, full_every=8).run(make_trace("uniform:p=0.3", 128, 512, 0))


def test_auditor_catches_a_corrupted_structure() -> None:
    struct = _SwappingCompactor(64)
    auditor = TraceAuditor(struct, full_every=4)
    with pytest.raises(AuditFailure):
        auditor.run(make_trace("uniform", 64, 64, 0))


def test_auditor_spot_checks_sizes() -> None:
    struct = NaiveCompactor(16)
    auditor = TraceAuditor(struct)
    auditor.apply(OpRecord(0, "I", 1))
    auditor.model.items.append(99)
    with pytest.raises(AuditFailure, match="size"):
        auditor.apply(OpRecord(1, "I", 1))


def test_iter_layers_walks_nested_compositions() -> None:
    flat = NaiveCompactor(16)
    assert list(iter_layers(flat)) == []
    nested = build_structure("layer(adaptive,layer(classic,bounded))", 64, 0)
    layers = list(iter_layers(nested))
    assert len(layers) == 2
    assert layers[0] is nested
    assert layers[1] is nested.shell


def test_audits_are_quiet_on_an_untouched_structure() -> None:
    struct = build_structure("layer(classic,bounded)", 64, 0)
    dw = deadweight_audit(struct)
    assert dw.ok and dw.worst_lifetime == 0 and dw.worst_item is None
    span = rebuild_span_audit(struct)
    assert span.ok and span.max_span == 0 and span.max_buffer_occupancy == 0


def test_audits_summarize_a_fast_only_run() -> None:
    struct = build_structure("layer(classic,bounded)", 128, 2)
    TraceAuditor(struct).run(make_trace("uniform", 128, 128, 2))
    dw = deadweight_audit(struct)
    span = rebuild_span_audit(struct)
    assert dw.ok
    assert span.ok
    assert span.worst_occupancy_ratio < 1.0


def test_independence_trial_needs_a_layered_expression() -> None:
    trace = make_trace("uniform", 64, 64, 0)
    with pytest.raises(TypeError):
        independence_trial(trace, "classic", 0, 1, 2)


def test_independence_trial_is_seed_blind_on_a_small_trace() -> None:
    trace = make_trace("uniform:p=0.3", 64, 128, 11)
    assert independence_trial(trace, "layer(classic,bounded)", 3, 100, 200) is None
