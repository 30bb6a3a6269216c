"""Labeling, balancing, stratified splitting and CSV persistence of datasets."""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateSplit,
    EmptyDataset,
    HeaderMismatch,
    MissingRuntime,
    OneClassOnly,
    RowArity,
    RunStillInProgress,
    SatPredictError,
)
from .features import FeatureSetSpec, extract_features
from .trace import STILL_RUNNING, TERMINATED, RunTrace


@dataclass(frozen=True)
class LabeledExample:
    features: tuple[float, ...]
    label: int
    run_id: str

    def __post_init__(self):
        if self.label not in (0, 1):
            raise SatPredictError(f"label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "features", tuple(float(x) for x in self.features))


@dataclass(frozen=True)
class Dataset:
    examples: tuple[LabeledExample, ...]
    spec: FeatureSetSpec = field(default_factory=FeatureSetSpec)
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        n = self.spec.length
        for ex in self.examples:
            if len(ex.features) != n:
                raise SatPredictError(
                    f"example {ex.run_id!r} has {len(ex.features)} features, spec needs {n}")

    def __len__(self):
        return len(self.examples)

    @property
    def X(self) -> np.ndarray:
        return np.array([ex.features for ex in self.examples], dtype=float).reshape(
            len(self.examples), self.spec.length)

    @property
    def y(self) -> np.ndarray:
        return np.array([ex.label for ex in self.examples], dtype=float)

    def class_counts(self) -> tuple[int, int]:
        pos = sum(ex.label for ex in self.examples)
        return len(self.examples) - pos, pos


def label_run(trace: RunTrace, time_limit: float) -> int:
    """1 iff the run terminated within ``time_limit`` seconds."""
    kind = trace.outcome.kind
    if kind == STILL_RUNNING:
        raise RunStillInProgress(f"run {trace.run_id!r} has no outcome yet")
    if kind == TERMINATED:
        if trace.outcome.seconds is None:
            raise MissingRuntime(f"run {trace.run_id!r} terminated without a reported runtime")
        return int(trace.outcome.seconds <= time_limit)
    return 0


def build_balanced(traces, labels, spec: FeatureSetSpec, seed: int,
                   total: int | None = None) -> Dataset:
    """Down-sample the majority class and shuffle, both driven by ``seed``.

    With ``total`` given, ``total // 2`` examples per class are drawn and an odd
    remainder goes to the positive class (classes then differ by one).
    """
    traces = list(traces)
    labels = [int(l) for l in labels]
    if len(traces) != len(labels):
        raise SatPredictError("traces and labels differ in length")
    pos = [i for i, l in enumerate(labels) if l == 1]
    neg = [i for i, l in enumerate(labels) if l == 0]
    if not pos or not neg:
        raise OneClassOnly(f"need both classes, got {len(pos)} positive / {len(neg)} negative")

    if total is None:
        n_pos = n_neg = min(len(pos), len(neg))
    else:
        n_neg = total // 2
        n_pos = total - n_neg
        if n_pos > len(pos) or n_neg > len(neg):
            raise SatPredictError(
                f"cannot draw {n_pos}/{n_neg} from {len(pos)} positive / {len(neg)} negative")

    rng = np.random.default_rng(seed)
    chosen = ([pos[i] for i in sorted(rng.choice(len(pos), n_pos, replace=False))]
              + [neg[i] for i in sorted(rng.choice(len(neg), n_neg, replace=False))])
    order = rng.permutation(len(chosen))
    examples = [
        LabeledExample(tuple(extract_features(traces[chosen[j]], spec)), labels[chosen[j]],
                       traces[chosen[j]].run_id)
        for j in order
    ]
    return Dataset(tuple(examples), spec, False)


def _round_half_up(x: float) -> int:
    # guard against 1/3*150 = 49.99999...
    return int(math.floor(x + 0.5 + 1e-9))


def split(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified split; each class contributes round-half-up(fraction * count) to test."""
    if not 0 < test_fraction < 1:
        raise SatPredictError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_idx: list[int] = []
    for label in (0, 1):
        idx = [i for i, ex in enumerate(ds.examples) if ex.label == label]
        if not idx:
            continue
        n_test = _round_half_up(test_fraction * len(idx))
        if n_test == 0 or n_test == len(idx):
            raise DegenerateSplit(
                f"class {label}: {len(idx)} examples would put {n_test} in test")
        test_idx += [idx[i] for i in rng.choice(len(idx), n_test, replace=False)]
    chosen = set(test_idx)
    train = [ex for i, ex in enumerate(ds.examples) if i not in chosen]
    test = [ex for i, ex in enumerate(ds.examples) if i in chosen]
    return replace(ds, examples=tuple(train)), replace(ds, examples=tuple(test))


_META_RE = re.compile(r"^# spec=(set1|set2);K=(\d+);normalized=([01])$")


def dumps_dataset(ds: Dataset) -> str:
    if not ds.examples:
        raise EmptyDataset("refusing to save an empty dataset")
    buf = io.StringIO()
    buf.write(f"# spec={ds.spec.set_id};K={ds.spec.iterations};normalized={int(ds.normalized)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["run_id", "label"] + [f"f{i}" for i in range(ds.spec.length)])
    for ex in ds.examples:
        w.writerow([ex.run_id, ex.label, *(repr(v) for v in ex.features)])
    return buf.getvalue()


def loads_dataset(text: str) -> Dataset:
    lines = text.splitlines()
    if not lines:
        raise HeaderMismatch("empty dataset file")
    m = _META_RE.match(lines[0].strip())
    if not m:
        raise HeaderMismatch(f"bad metadata line: {lines[0]!r}")
    spec = FeatureSetSpec(m.group(1), int(m.group(2)))
    normalized = m.group(3) == "1"
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    expected = ["run_id", "label"] + [f"f{i}" for i in range(spec.length)]
    if header != expected:
        raise HeaderMismatch(
            f"column header does not match spec {spec.set_id} K={spec.iterations}")
    examples = []
    for line_no, row in enumerate(reader, start=3):
        if not row:
            continue
        if len(row) != len(expected):
            raise RowArity(line_no, len(expected), len(row))
        try:
            examples.append(LabeledExample(tuple(float(v) for v in row[2:]), int(row[1]), row[0]))
        except ValueError as e:
            raise SatPredictError(f"line {line_no}: {e}") from None
    return Dataset(tuple(examples), spec, normalized)


def save_dataset(ds: Dataset, path) -> None:
    Path(path).write_text(dumps_dataset(ds))


def load_dataset(path) -> Dataset:
    return loads_dataset(Path(path).read_text())
