from __future__ import annotations

import math
from pathlib import Path

import pytest

from listlab.core import ConfigInvalid, ParseError
from listlab.workloads import (
    OpRecord,
    gen_adversarial_classic,
    gen_hammer,
    gen_mixed,
    gen_uniform,
    make_trace,
    parse_workload_spec,
    trace_read,
    trace_write,
)


def test_uniform_starts_at_rank_one_and_respects_size() -> None:
    trace = gen_uniform(64, 64, 0)
    assert trace.records[0] == OpRecord(0, "I", 1)
    trace.validate()


def test_uniform_is_deterministic_per_seed() -> None:
    a = gen_uniform(128, 128, 9)
    b = gen_uniform(128, 128, 9)
    c = gen_uniform(128, 128, 10)
    assert a.records == b.records
    assert a.records != c.records


def test_uniform_rank_histogram_is_flat_within_three_sigma() -> None:
    trace = gen_uniform(4096, 4096, 7)
    buckets = [0] * 16
    size = 0
    for rec in trace:
        u = (rec.rank - 1) / (size + 1) if size else 0.0
        buckets[min(15, int(u * 16))] += 1
        size += 1
    expected = trace.T / 16
    sigma = math.sqrt(trace.T * (1 / 16) * (15 / 16))
    for count in buckets:
        assert abs(count - expected) <= 3 * sigma


def test_pure_insert_budget_is_enforced() -> None:
    with pytest.raises(ConfigInvalid):
        gen_uniform(256, 512, 0)
    with pytest.raises(ConfigInvalid):
        gen_uniform(256, 256, 0, p_delete=1.5)


def test_mixed_at_zero_delete_rate_degenerates_to_uniform() -> None:
    mixed = gen_mixed(128, 128, 3, 0.0)
    uniform = gen_uniform(128, 128, 3)
    assert mixed.records == uniform.records
    assert mixed.gen == "mixed"


def test_mixed_keeps_size_within_bounds() -> None:
    trace = gen_mixed(64, 512, 5, 0.4)
    trace.validate()
    kinds = {rec.kind for rec in trace}
    assert kinds == {"I", "D"}


def test_hammer_always_hits_the_hot_rank() -> None:
    trace = gen_hammer(64, 64, 0, r0=5)
    size = 0
    for rec in trace:
        assert rec.rank == min(5, size + 1)
        size += 1


def test_hammer_append_variant_tracks_the_tail() -> None:
    trace = gen_hammer(64, 64, 0, r0=10**9)
    size = 0
    for rec in trace:
        assert rec.rank == size + 1
        size += 1


def test_hammer_rejects_nonpositive_rank() -> None:
    with pytest.raises(ConfigInvalid):
        gen_hammer(64, 64, 0, r0=0)


def test_adversarial_is_deterministic() -> None:
    a = gen_adversarial_classic(256, 256)
    b = gen_adversarial_classic(256, 256)
    assert a.records == b.records
    a.validate()


def test_adversarial_mixes_deletes_at_a_fixed_cadence() -> None:
    trace = gen_adversarial_classic(128, 512, p_delete=0.25)
    trace.validate()
    deletes = [rec for rec in trace if rec.kind == "D"]
    assert deletes
    assert all(rec.rank == 1 for rec in deletes)


def test_trace_round_trips_through_a_file(tmp_path: Path) -> None:
    trace = gen_mixed(64, 256, 11, 0.3)
    path = tmp_path / "trace.txt"
    trace_write(trace, str(path))
    again = trace_read(str(path))
    assert again.records == trace.records
    assert (again.n, again.gen, again.seed) == (trace.n, trace.gen, trace.seed)
    text = path.read_text(encoding="ascii")
    assert text.startswith("#llbl v1 n=64 gen=mixed seed=11 T=256\n")


def test_trace_read_reports_the_offending_line(tmp_path: Path) -> None:
    path = tmp_path / "bad.txt"
    path.write_text(
        "#llbl v1 n=4 gen=uniform seed=0 T=2\n0 I 1\n1 X 2\n", encoding="ascii")
    with pytest.raises(ParseError) as err:
        trace_read(str(path))
    assert err.value.line == 3


def test_trace_read_rejects_bad_magic(tmp_path: Path) -> None:
    path = tmp_path / "bad.txt"
    path.write_text("#other v9 n=4\n", encoding="ascii")
    with pytest.raises(ParseError, match="line 1"):
        trace_read(str(path))


def test_trace_read_rejects_count_mismatch(tmp_path: Path) -> None:
    path = tmp_path / "bad.txt"
    path.write_text("#llbl v1 n=4 gen=uniform seed=0 T=3\n0 I 1\n", encoding="ascii")
    with pytest.raises(ParseError, match="declares T=3"):
        trace_read(str(path))


def test_trace_read_rejects_invalid_rank_sequences(tmp_path: Path) -> None:
    path = tmp_path / "bad.txt"
    path.write_text("#llbl v1 n=4 gen=uniform seed=0 T=1\n0 I 5\n", encoding="ascii")
    with pytest.raises(ParseError):
        trace_read(str(path))


def test_workload_spec_grammar() -> None:
    assert parse_workload_spec("uniform") == ("uniform", {})
    assert parse_workload_spec("hammer:r0=3,p=0.25") == ("hammer", {"r0": 3.0, "p": 0.25})
    with pytest.raises(ConfigInvalid):
        parse_workload_spec("hammer:r0")
    with pytest.raises(ConfigInvalid):
        parse_workload_spec("hammer:r0=abc")


def test_make_trace_rejects_unknown_names_and_knobs() -> None:
    with pytest.raises(ConfigInvalid):
        make_trace("sweep", 64, 64, 0)
    with pytest.raises(ConfigInvalid):
        make_trace("uniform:r0=3", 64, 64, 0)
    trace = make_trace("hammer:r0=2,p_delete=0.2", 64, 128, 1)
    trace.validate()
