import pytest
from hypothesis import given, settings

from satpredict.errors import (
    HeaderMismatch,
    InvalidRecord,
    MalformedLine,
    MissingField,
    NonConsecutiveIteration,
    RowArity,
    UnknownAdapter,
)
from satpredict.trace import (
    CSV_COLUMNS,
    STAT_NAMES,
    STILL_RUNNING,
    Outcome,
    RunTrace,
    format_stats_stream,
    iter_stats_records,
    parse_canonical_csv,
    parse_stats_stream,
    register_adapter,
    serialize_canonical_csv,
    terminated,
    timed_out,
)

from conftest import make_record, trace_lists, traces

BLOCK1 = """c [iter 1]
c [stat] all-threads: 12.5
c [stat] conflicts/second: 9000
c [stat] blocked-restarts: 3
c [stat] restarts: 7
c [stat] props/decision: 210.5
c [stat] props/conflict: 1500
c [stat] literals/conflict: 55.5
c [stat] decisions/conflict: 7.25
c [iter-end 1]
"""


def test_single_block_still_running():
    t = parse_stats_stream(BLOCK1.splitlines())
    assert len(t.records) == 1
    assert t.outcome.kind == STILL_RUNNING
    r = t.records[0]
    assert r.iteration_index == 1
    assert r.all_threads_time == 12.5
    assert r.conflicts_per_second == 9000
    assert r.decisions_per_conflict == 7.25


def test_outcome_markers():
    text = BLOCK1 + "s SATISFIABLE\nc [outcome] terminated 1234.5\n"
    t = parse_stats_stream(text.splitlines())
    assert t.outcome == terminated(1234.5)

    t = parse_stats_stream((BLOCK1 + "c [outcome] timeout 3600\n").splitlines())
    assert t.outcome == timed_out(3600.0)


def test_status_line_without_runtime():
    t = parse_stats_stream((BLOCK1 + "s SATISFIABLE\n").splitlines())
    assert t.outcome == Outcome("terminated", None)


def test_missing_field_rejected():
    text = "\n".join(l for l in BLOCK1.splitlines() if "] restarts:" not in l)
    with pytest.raises(MissingField) as e:
        parse_stats_stream(text.splitlines())
    assert (e.value.iteration, e.value.field) == (1, "restarts")


def test_non_consecutive_blocks():
    text = BLOCK1 + BLOCK1.replace("iter 1]", "iter 3]").replace("iter-end 1]", "iter-end 3]")
    with pytest.raises(NonConsecutiveIteration) as e:
        parse_stats_stream(text.splitlines())
    assert (e.value.expected, e.value.got) == (2, 3)


@pytest.mark.parametrize("bad, line_no", [
    ("c [stat] restarts: lots", 5),
    ("c [stat] restarts: -1", 5),
    ("c [stat] bogus-stat: 1", 5),
    ("c [stat]restarts 1", 5),
])
def test_malformed_stat_line(bad, line_no):
    lines = BLOCK1.splitlines()
    lines[4] = bad
    with pytest.raises(MalformedLine) as e:
        parse_stats_stream(lines)
    assert e.value.line_no == line_no


def test_zero_all_threads_rejected():
    lines = BLOCK1.replace("all-threads: 12.5", "all-threads: 0").splitlines()
    with pytest.raises(MalformedLine):
        parse_stats_stream(lines)


def test_stat_outside_block_and_duplicate():
    with pytest.raises(MalformedLine):
        parse_stats_stream(["c [stat] restarts: 1"])
    lines = BLOCK1.splitlines()
    lines.insert(3, "c [stat] restarts: 7")
    with pytest.raises(MalformedLine):
        parse_stats_stream(lines)


def test_other_lines_ignored():
    noise = ["c o some solver banner", "random text", "", "v 1 -2 0"]
    t = parse_stats_stream(noise + BLOCK1.splitlines() + noise)
    assert len(t.records) == 1


def test_truncated_stream_keeps_closed_blocks():
    two = BLOCK1 + BLOCK1.replace("iter 1]", "iter 2]").replace("iter-end 1]", "iter-end 2]")
    lines = two.splitlines()[:-3]  # block 2 never closes
    t = parse_stats_stream(lines)
    assert [r.iteration_index for r in t.records] == [1]


def test_iter_records_is_incremental():
    seen = []

    def lines():
        for line in BLOCK1.splitlines():
            seen.append(line)
            yield line
        raise AssertionError("parser read past the first block")

    it = iter_stats_records(lines())
    rec = next(it)
    assert rec.iteration_index == 1
    assert len(seen) == len(BLOCK1.splitlines())


def test_adapter_registry():
    with pytest.raises(UnknownAdapter):
        parse_stats_stream([], adapter="nope")

    # a toy native format "it=1 all-threads=12.5 ..." mapped onto canonical lines
    def kv(line):
        if not line.startswith("it="):
            return ()
        parts = dict(p.split("=") for p in line.split())
        k = parts.pop("it")
        return [f"c [iter {k}]", *(f"c [stat] {n}: {v}" for n, v in parts.items()),
                f"c [iter-end {k}]"]

    register_adapter("kv-test", kv)
    line = "it=1 " + " ".join(f"{n}=2.0" for n in STAT_NAMES)
    t = parse_stats_stream([line], adapter="kv-test")
    assert t.records[0].restarts == 2.0


@given(traces())
def test_stats_stream_round_trip(t):
    back = parse_stats_stream(format_stats_stream(t).splitlines(), run_id=t.run_id,
                              instance_id=t.instance_id)
    assert back == t


def test_record_invariants():
    with pytest.raises(InvalidRecord):
        make_record(0)
    with pytest.raises(InvalidRecord):
        make_record(1, all_threads_time=0.0)
    with pytest.raises(InvalidRecord):
        make_record(1, restarts=-1.0)
    with pytest.raises(NonConsecutiveIteration):
        RunTrace("r", "i", (make_record(1), make_record(3)))


# ---------------------------------------------------------------- canonical CSV

HEADER = ",".join(CSV_COLUMNS) + "\n"


def test_csv_two_rows_one_run():
    text = HEADER + (
        "r1,inst,1,10.0,900.0,1.0,2.0,3.0,4.0,5.0,6.0,terminated,55.0\n"
        "r1,inst,2,20.0,800.0,1.0,2.0,3.0,4.0,5.0,6.0,terminated,55.0\n")
    [t] = parse_canonical_csv(text)
    assert len(t.records) == 2
    assert t.outcome == terminated(55.0)
    assert t.records[1].all_threads_time == 20.0


def test_csv_gap():
    text = HEADER + (
        "r1,inst,1,10.0,900.0,1.0,2.0,3.0,4.0,5.0,6.0,still_running,\n"
        "r1,inst,3,20.0,800.0,1.0,2.0,3.0,4.0,5.0,6.0,still_running,\n")
    with pytest.raises(NonConsecutiveIteration) as e:
        parse_canonical_csv(text)
    assert (e.value.expected, e.value.got) == (2, 3)


def test_csv_header_only_and_errors():
    assert parse_canonical_csv(HEADER) == []
    with pytest.raises(HeaderMismatch):
        parse_canonical_csv("run_id,foo\n")
    with pytest.raises(HeaderMismatch):
        parse_canonical_csv("")
    with pytest.raises(RowArity):
        parse_canonical_csv(HEADER + "r1,inst,1,10.0\n")


def test_serialize_empty_and_single():
    assert serialize_canonical_csv([]) == HEADER
    t = RunTrace("r", "i", (make_record(1),))
    assert serialize_canonical_csv([t]).count("\n") == 2


@settings(max_examples=100)
@given(trace_lists())
def test_csv_round_trip(ts):
    assert parse_canonical_csv(serialize_canonical_csv(ts)) == ts
