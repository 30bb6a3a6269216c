"""Fixed-length feature vectors from the first K solver iterations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, InsufficientIterations, LengthMismatch, SpecMismatch
from .trace import RunTrace

FEATURE_SETS = {
    "set1": ("all-threads", "conflicts/second", "blocked-restarts", "restarts",
             "props/decision", "props/conflict"),
    "set2": ("all-threads", "conflicts/second", "blocked-restarts", "restarts",
             "props/decision", "literals/conflict", "decisions/conflict"),
}


@dataclass(frozen=True)
class FeatureSetSpec:
    set_id: str = "set1"
    iterations: int = 2

    def __post_init__(self):
        if self.set_id not in FEATURE_SETS:
            raise SpecMismatch(f"unknown feature set {self.set_id!r}")
        if not isinstance(self.iterations, int) or self.iterations < 1:
            raise SpecMismatch(f"iterations must be >= 1, got {self.iterations!r}")

    @property
    def param_names(self) -> tuple[str, ...]:
        return FEATURE_SETS[self.set_id]

    @property
    def length(self) -> int:
        return len(self.param_names) * self.iterations

    def feature_names(self) -> list[str]:
        return [f"{p}@{i}" for i in range(1, self.iterations + 1) for p in self.param_names]


def extract_features(trace: RunTrace, spec: FeatureSetSpec) -> np.ndarray:
    """Iteration-major flattening: iteration 1's parameters, then iteration 2's, ..."""
    k = spec.iterations
    if len(trace.records) < k:
        raise InsufficientIterations(len(trace.records), k)
    return np.array([rec.stat(p) for rec in trace.records[:k] for p in spec.param_names],
                    dtype=float)


@dataclass(frozen=True)
class Normalizer:
    mean: tuple[float, ...]
    std: tuple[float, ...]

    def __post_init__(self):
        if len(self.mean) != len(self.std):
            raise LengthMismatch("mean and std lengths differ")

    @property
    def dim(self) -> int:
        return len(self.mean)

    @classmethod
    def identity(cls, dim: int) -> "Normalizer":
        return cls((0.0,) * dim, (1.0,) * dim)

    def apply(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise LengthMismatch(f"vector length {X.shape[-1]} != normalizer dim {self.dim}")
        return (X - np.array(self.mean)) / np.array(self.std)


def fit_normalizer(vectors) -> Normalizer:
    """Per-dimension mean and population stddev; zero-variance dims get stddev 1."""
    if len(vectors) == 0:
        raise EmptyInput("cannot fit a normalizer on no vectors")
    lengths = {len(v) for v in vectors}
    if len(lengths) != 1:
        raise LengthMismatch(f"vectors of differing lengths {sorted(lengths)}")
    X = np.asarray(vectors, dtype=float)
    # constant columns are detected exactly; X.mean can round away from the constant
    const = X.max(axis=0) == X.min(axis=0)
    mean = np.where(const, X[0], X.mean(axis=0))
    std = np.where(const, 1.0, X.std(axis=0))
    std = np.where(std > 0, std, 1.0)
    return Normalizer(tuple(float(m) for m in mean), tuple(float(s) for s in std))


def apply_normalizer(n: Normalizer, v) -> np.ndarray:
    return n.apply(v)
