"""Solver statistics ingest: canonical line grammar, adapters, canonical CSV.

A canonical iteration block looks like::

    c [iter 1]
    c [stat] all-threads: 41.7
    c [stat] conflicts/second: 9120.5
    ...
    c [iter-end 1]

optionally followed by ``s SATISFIABLE`` and ``c [outcome] terminated 1234.5``
(or ``c [outcome] timeout 3600``).
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import (
    HeaderMismatch,
    InvalidRecord,
    MalformedLine,
    MissingField,
    NonConsecutiveIteration,
    RowArity,
    SatPredictError,
    UnknownAdapter,
)

# solver stat name -> IterationRecord attribute
STAT_FIELDS = {
    "all-threads": "all_threads_time",
    "conflicts/second": "conflicts_per_second",
    "blocked-restarts": "blocked_restarts",
    "restarts": "restarts",
    "props/decision": "props_per_decision",
    "props/conflict": "props_per_conflict",
    "literals/conflict": "literals_per_conflict",
    "decisions/conflict": "decisions_per_conflict",
}
STAT_NAMES = tuple(STAT_FIELDS)

TERMINATED = "terminated"
TIMED_OUT = "timed_out"
STILL_RUNNING = "still_running"


@dataclass(frozen=True)
class IterationRecord:
    iteration_index: int
    all_threads_time: float
    conflicts_per_second: float
    blocked_restarts: float
    restarts: float
    props_per_decision: float
    props_per_conflict: float
    literals_per_conflict: float
    decisions_per_conflict: float

    def __post_init__(self):
        if not isinstance(self.iteration_index, int) or self.iteration_index < 1:
            raise InvalidRecord("iteration_index", self.iteration_index)
        for name, attr in STAT_FIELDS.items():
            v = getattr(self, attr)
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
                raise InvalidRecord(name, v)
        if self.all_threads_time <= 0:
            raise InvalidRecord("all-threads", self.all_threads_time)

    def stat(self, name: str) -> float:
        return getattr(self, STAT_FIELDS[name])


@dataclass(frozen=True)
class Outcome:
    kind: str = STILL_RUNNING
    seconds: float | None = None

    def __post_init__(self):
        if self.kind not in (TERMINATED, TIMED_OUT, STILL_RUNNING):
            raise SatPredictError(f"unknown outcome {self.kind!r}")
        if self.kind == STILL_RUNNING and self.seconds is not None:
            raise SatPredictError("still_running outcome carries no seconds")
        if self.kind == TIMED_OUT and self.seconds is None:
            raise SatPredictError("timed_out outcome needs a limit")
        if self.seconds is not None and not (math.isfinite(self.seconds) and self.seconds > 0):
            raise SatPredictError(f"outcome seconds must be positive, got {self.seconds!r}")


def terminated(seconds: float | None) -> Outcome:
    return Outcome(TERMINATED, seconds)


def timed_out(limit: float) -> Outcome:
    return Outcome(TIMED_OUT, limit)


@dataclass(frozen=True)
class RunTrace:
    run_id: str
    instance_id: str
    records: tuple[IterationRecord, ...]
    outcome: Outcome = Outcome()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        for expected, rec in enumerate(self.records, start=1):
            if rec.iteration_index != expected:
                raise NonConsecutiveIteration(expected, rec.iteration_index)

    def prefix(self, k: int) -> "RunTrace":
        """The first ``k`` iterations of this run, outcome unknown."""
        return RunTrace(self.run_id, self.instance_id, self.records[:k])


# ---------------------------------------------------------------- adapters

Adapter = Callable[[str], Iterable[str]]


def canonical_adapter(line: str) -> Iterable[str]:
    return (line,)


ADAPTERS: dict[str, Adapter] = {"canonical": canonical_adapter}


def register_adapter(name: str, adapter: Adapter) -> None:
    """Register a translator from native solver lines to canonical lines.

    An adapter receives one raw line and returns zero or more canonical lines.
    """
    ADAPTERS[name] = adapter


def get_adapter(name: str) -> Adapter:
    try:
        return ADAPTERS[name]
    except KeyError:
        raise UnknownAdapter(f"unknown adapter {name!r}; known: {sorted(ADAPTERS)}") from None


# ---------------------------------------------------------------- stream parser

_ITER_RE = re.compile(r"^c \[iter (\d+)\]$")
_ITER_END_RE = re.compile(r"^c \[iter-end (\d+)\]$")
_STAT_RE = re.compile(r"^c \[stat\] ([a-z/-]+):\s*(\S+)$")
_OUTCOME_RE = re.compile(r"^c \[outcome\] (terminated|timeout) (\S+)$")
_STATUS = ("s SATISFIABLE", "s UNSATISFIABLE")


def _parse_float(text):
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


class StatsStreamParser:
    """Incremental parser over canonical lines.

    Feed lines one at a time with :meth:`feed`; a completed
    :class:`IterationRecord` is returned whenever an ``iter-end`` line closes a
    block. Only the open block is buffered.
    """

    def __init__(self):
        self.records: list[IterationRecord] = []
        self.outcome = Outcome()
        self.finished = False
        self._open: int | None = None
        self._stats: dict[str, float] = {}

    def feed(self, line: str, line_no: int) -> IterationRecord | None:
        line = line.rstrip("\r\n").strip()
        if line.startswith("s "):
            if line not in _STATUS:
                raise MalformedLine(line_no, line, "unknown status")
            self.finished = True
            if self.outcome.kind == STILL_RUNNING:
                self.outcome = terminated(None)
            return None
        if not line.startswith("c ["):
            return None

        if m := _ITER_RE.match(line):
            k = int(m.group(1))
            if self._open is not None:
                raise MalformedLine(line_no, line, f"iteration {self._open} still open")
            expected = len(self.records) + 1
            if k != expected:
                raise NonConsecutiveIteration(expected, k)
            self._open = k
            self._stats = {}
            return None

        if m := _STAT_RE.match(line):
            name, raw = m.groups()
            if self._open is None:
                raise MalformedLine(line_no, line, "stat outside an iteration block")
            if name not in STAT_FIELDS:
                raise MalformedLine(line_no, line, f"unknown stat {name!r}")
            if name in self._stats:
                raise MalformedLine(line_no, line, f"duplicate stat {name!r}")
            v = _parse_float(raw)
            if v is None or v < 0 or (name == "all-threads" and v <= 0):
                raise MalformedLine(line_no, line, "bad value")
            self._stats[name] = v
            return None

        if m := _ITER_END_RE.match(line):
            k = int(m.group(1))
            if self._open != k:
                raise MalformedLine(line_no, line, "iter-end does not match open block")
            for name in STAT_NAMES:
                if name not in self._stats:
                    raise MissingField(k, name)
            rec = IterationRecord(k, **{STAT_FIELDS[n]: v for n, v in self._stats.items()})
            self.records.append(rec)
            self._open = None
            self._stats = {}
            return rec

        if m := _OUTCOME_RE.match(line):
            kind, raw = m.groups()
            v = _parse_float(raw)
            if v is None or v <= 0:
                raise MalformedLine(line_no, line, "bad outcome seconds")
            self.outcome = terminated(v) if kind == "terminated" else timed_out(v)
            self.finished = True
            return None

        raise MalformedLine(line_no, line)

    def trace(self, run_id="", instance_id="") -> RunTrace:
        # an unclosed trailing block is dropped
        return RunTrace(run_id, instance_id, tuple(self.records), self.outcome)


def iter_stats_records(lines: Iterable[str], adapter: str = "canonical",
                       parser: StatsStreamParser | None = None) -> Iterator[IterationRecord]:
    """Yield records as soon as each iteration block closes."""
    translate = get_adapter(adapter)
    parser = parser if parser is not None else StatsStreamParser()
    for line_no, raw in enumerate(lines, start=1):
        try:
            for line in translate(raw.rstrip("\r\n")):
                rec = parser.feed(line, line_no)
                if rec is not None:
                    yield rec
        except SatPredictError as e:
            if getattr(e, "line_no", None) is None:
                e.line_no = line_no
            raise


def parse_stats_stream(lines: Iterable[str], adapter: str = "canonical",
                       run_id: str = "", instance_id: str = "") -> RunTrace:
    parser = StatsStreamParser()
    for _ in iter_stats_records(lines, adapter, parser):
        pass
    return parser.trace(run_id, instance_id)


def format_stats_block(rec: IterationRecord) -> list[str]:
    """Render one record in the canonical grammar."""
    k = rec.iteration_index
    out = [f"c [iter {k}]"]
    out += [f"c [stat] {name}: {rec.stat(name)!r}" for name in STAT_NAMES]
    out.append(f"c [iter-end {k}]")
    return out


def format_stats_stream(trace: RunTrace) -> str:
    lines = []
    for rec in trace.records:
        lines += format_stats_block(rec)
    if trace.outcome.kind == TERMINATED:
        lines.append("s SATISFIABLE")
        if trace.outcome.seconds is not None:
            lines.append(f"c [outcome] terminated {trace.outcome.seconds!r}")
    elif trace.outcome.kind == TIMED_OUT:
        lines.append(f"c [outcome] timeout {trace.outcome.seconds!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- canonical CSV

CSV_COLUMNS = (
    "run_id", "instance_id", "iteration_index", "all_threads", "conflicts_per_sec",
    "blocked_restarts", "restarts", "props_per_decision", "props_per_conflict",
    "literals_per_conflict", "decisions_per_conflict", "outcome", "outcome_seconds",
)
_CSV_STATS = STAT_NAMES  # column order of the eight stat columns matches STAT_NAMES


def _fmt(v: float) -> str:
    return repr(float(v))


def serialize_canonical_csv(traces: Iterable[RunTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for t in traces:
        secs = "" if t.outcome.seconds is None else _fmt(t.outcome.seconds)
        for rec in t.records:
            w.writerow([t.run_id, t.instance_id, rec.iteration_index,
                        *(_fmt(rec.stat(n)) for n in _CSV_STATS),
                        t.outcome.kind, secs])
    return buf.getvalue()


def parse_canonical_csv(text: str | Iterable[str]) -> list[RunTrace]:
    lines = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise HeaderMismatch(f"expected header {','.join(CSV_COLUMNS)}")

    runs: dict[str, dict] = {}
    for row in reader:
        line_no = reader.line_num
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise RowArity(line_no, len(CSV_COLUMNS), len(row))
        run_id, instance_id, idx, *stats, kind, secs = row
        try:
            k = int(idx)
            values = [float(s) for s in stats]
            outcome = Outcome(kind, float(secs) if secs != "" else None)
            rec = IterationRecord(k, **{STAT_FIELDS[n]: v for n, v in zip(_CSV_STATS, values)})
        except SatPredictError:
            raise
        except ValueError as e:
            raise MalformedLine(line_no, ",".join(row), str(e)) from None
        run = runs.get(run_id)
        if run is None:
            run = runs[run_id] = {"instance_id": instance_id, "outcome": outcome, "records": []}
        if run["instance_id"] != instance_id or run["outcome"] != outcome:
            raise MalformedLine(line_no, ",".join(row), "inconsistent run metadata")
        expected = len(run["records"]) + 1
        if k != expected:
            raise NonConsecutiveIteration(expected, k)
        run["records"].append(rec)

    return [RunTrace(rid, r["instance_id"], tuple(r["records"]), r["outcome"])
            for rid, r in runs.items()]
