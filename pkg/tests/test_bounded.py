from __future__ import annotations

from listlab.core import Element
from listlab.labelers import BoundedPMA, ClassicPMA
from listlab.oracle import TraceAuditor
from listlab.workloads import gen_adversarial_classic, make_trace


def _worst_per_op(struct, trace) -> int:
    worst = 0
    uid = 0
    for rec in trace:
        if rec.kind == "I":
            uid += 1
            events = struct.insert(rec.rank, Element(uid))
        else:
            events = struct.delete(rec.rank)
        worst = max(worst, len(events), sum(ev.cost for ev in events))
    return worst


def test_declared_worst_bound_at_power_of_two() -> None:
    struct = BoundedPMA(1024)
    assert struct.spec.worst_bound == 800


def test_first_insert_is_a_single_event() -> None:
    events = BoundedPMA(1024).insert(1, Element(1))
    assert len(events) == 1
    assert sum(ev.cost for ev in events) == 1


def test_every_op_stays_under_the_worst_bound_on_adversarial_input() -> None:
    struct = BoundedPMA(1024)
    worst = _worst_per_op(struct, gen_adversarial_classic(1024, 1024))
    assert worst <= struct.spec.worst_bound


def test_every_op_stays_under_the_worst_bound_on_hammer_churn() -> None:
    struct = BoundedPMA(512)
    worst = _worst_per_op(struct, make_trace("hammer:p=0.3", 512, 1536, 6))
    assert worst <= struct.spec.worst_bound


def test_adversarial_input_hurts_the_eager_variant_more() -> None:
    eager = _worst_per_op(ClassicPMA(512), gen_adversarial_classic(512, 512))
    uniform = _worst_per_op(ClassicPMA(512), make_trace("uniform", 512, 512, 1))
    assert eager >= uniform
    bounded = _worst_per_op(BoundedPMA(512), gen_adversarial_classic(512, 512))
    assert bounded <= BoundedPMA(512).spec.worst_bound


def test_contents_track_the_reference_model_under_churn() -> None:
    struct = BoundedPMA(256)
    TraceAuditor(struct, full_every=32).run(make_trace("uniform:p=0.3", 256, 1024, 3))


def test_background_job_drains_to_completion() -> None:
    struct = BoundedPMA(256)
    saw_active = False
    uid = 0
    for rec in make_trace("hammer", 256, 256, 0):
        uid += 1
        struct.insert(rec.rank, Element(uid))
        saw_active = saw_active or struct.job_active
    assert saw_active
    while struct.job_active:
        struct.delete(struct.size)
    assert not struct.job_active
