"""Synthetic solver traces with known class-conditional densities.

Each (class, statistic, iteration) cell is drawn independently:

* ``lognormal`` cells: ``center * exp(spread * noise_scale * z)``.
* ``count`` cells: ``max(0, round(center + spread * noise_scale * z))``, i.e. a
  discretized normal with the negative mass folded onto zero.

Centers are given for iterations 1 and 2; later iterations continue geometrically
with ``late_trend``. Because the density is known exactly, :func:`bayes_accuracy`
can score the likelihood-ratio classifier by Monte Carlo.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import log_ndtr

from .errors import BadParams
from .features import FeatureSetSpec
from .trace import STAT_FIELDS, STAT_NAMES, IterationRecord, RunTrace, terminated, timed_out

KINDS = ("lognormal", "count")


@dataclass(frozen=True)
class ParamDist:
    kind: str
    centers: tuple[float, float]
    spread: float
    late_trend: float = 1.0

    def center(self, iteration: int) -> float:
        c1, c2 = self.centers
        if iteration == 1:
            return c1
        return c2 * self.late_trend ** (iteration - 2)


@dataclass(frozen=True)
class ClassParams:
    n_iterations: int
    params: dict[str, ParamDist]


def _lognormal(c1, c2, spread, trend=1.0):
    return ParamDist("lognormal", (c1, c2), spread, trend)


def _count(c1, c2, spread, trend=1.0):
    return ParamDist("count", (c1, c2), spread, trend)


# Terminating runs: short first iteration, high and rising conflict rate, lively restarts.
# Non-terminating runs: long first iteration, low flat conflict rate, sluggish restarts.
# literals/conflict and decisions/conflict are nearly uninformative, so Set 2 scores below Set 1.
DEFAULT_CLASSES = {
    1: ClassParams(5, {
        "all-threads": _lognormal(60.0, 100.0, 0.3, 1.6),
        "conflicts/second": _lognormal(7600.0, 8800.0, 0.3, 0.85),
        "blocked-restarts": _count(40, 80, 18, 1.8),
        "restarts": _count(60, 120, 18, 1.8),
        "props/decision": _lognormal(250.0, 255.0, 0.3),
        "props/conflict": _lognormal(1750.0, 1700.0, 0.3),
        "literals/conflict": _lognormal(60.0, 61.0, 0.3),
        "decisions/conflict": _lognormal(7.4, 7.2, 0.3),
    }),
    0: ClassParams(8, {
        "all-threads": _lognormal(80.0, 125.0, 0.3, 1.6),
        "conflicts/second": _lognormal(6500.0, 6600.0, 0.3),
        "blocked-restarts": _count(30, 55, 18, 1.5),
        "restarts": _count(48, 90, 18, 1.5),
        "props/decision": _lognormal(285.0, 290.0, 0.3),
        "props/conflict": _lognormal(2500.0, 2550.0, 0.3),
        "literals/conflict": _lognormal(62.0, 62.5, 0.3),
        "decisions/conflict": _lognormal(7.5, 7.4, 0.3),
    }),
}


@dataclass(frozen=True)
class GeneratorParams:
    classes: dict[int, ClassParams] = field(default_factory=lambda: dict(DEFAULT_CLASSES))
    noise_scale: float = 1.0
    time_limit: float = 100000.0

    def validate(self) -> "GeneratorParams":
        if not (math.isfinite(self.noise_scale) and self.noise_scale >= 0):
            raise BadParams(f"noise_scale must be >= 0, got {self.noise_scale}")
        if not (math.isfinite(self.time_limit) and self.time_limit > 0):
            raise BadParams(f"time_limit must be > 0, got {self.time_limit}")
        if set(self.classes) != {0, 1}:
            raise BadParams("params must define classes 0 and 1")
        for label, cp in self.classes.items():
            if cp.n_iterations < 2:
                raise BadParams(f"class {label}: n_iterations must be >= 2")
            missing = set(STAT_NAMES) - set(cp.params)
            extra = set(cp.params) - set(STAT_NAMES)
            if missing or extra:
                raise BadParams(f"class {label}: missing {sorted(missing)}, unknown {sorted(extra)}")
            for name, d in cp.params.items():
                if d.kind not in KINDS:
                    raise BadParams(f"class {label} {name}: unknown kind {d.kind!r}")
                if name == "all-threads" and d.kind != "lognormal":
                    raise BadParams("all-threads must be lognormal (it has to stay positive)")
                if len(d.centers) != 2 or not all(math.isfinite(c) for c in d.centers):
                    raise BadParams(f"class {label} {name}: need two finite centers")
                if d.kind == "lognormal" and min(d.centers) <= 0:
                    raise BadParams(f"class {label} {name}: lognormal centers must be > 0")
                if d.kind == "count" and min(d.centers) < 0:
                    raise BadParams(f"class {label} {name}: count centers must be >= 0")
                if not (d.spread >= 0 and d.late_trend > 0):
                    raise BadParams(f"class {label} {name}: bad spread/late_trend")
        return self

    def to_dict(self) -> dict:
        return {
            "noise_scale": self.noise_scale,
            "time_limit": self.time_limit,
            "classes": {
                str(label): {
                    "n_iterations": cp.n_iterations,
                    "params": {name: {"kind": d.kind, "centers": list(d.centers),
                                      "spread": d.spread, "late_trend": d.late_trend}
                               for name, d in cp.params.items()},
                }
                for label, cp in sorted(self.classes.items())
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorParams":
        """Build params from a (possibly partial) dict layered over the defaults."""
        base = cls()
        try:
            classes = dict(base.classes)
            for key, cd in d.get("classes", {}).items():
                label = int(key)
                if label not in classes:
                    raise BadParams(f"unknown class {key!r}")
                cp = classes[label]
                params = dict(cp.params)
                for name, pd in cd.get("params", {}).items():
                    if name not in params:
                        raise BadParams(f"unknown statistic {name!r}")
                    old = params[name]
                    params[name] = ParamDist(
                        pd.get("kind", old.kind),
                        tuple(float(c) for c in pd.get("centers", old.centers)),
                        float(pd.get("spread", old.spread)),
                        float(pd.get("late_trend", old.late_trend)),
                    )
                classes[label] = ClassParams(int(cd.get("n_iterations", cp.n_iterations)), params)
            out = cls(classes, float(d.get("noise_scale", base.noise_scale)),
                      float(d.get("time_limit", base.time_limit)))
        except (AttributeError, TypeError, ValueError) as e:
            raise BadParams(f"bad generator config: {e}") from None
        return out.validate()

    @classmethod
    def from_json(cls, path) -> "GeneratorParams":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def with_noise(self, noise_scale: float) -> "GeneratorParams":
        return replace(self, noise_scale=noise_scale)


# ---------------------------------------------------------------- sampling

def _sample(dist: ParamDist, center: float, noise: float, rng, n=None):
    z = rng.standard_normal(n)
    if dist.kind == "lognormal":
        return center * np.exp(dist.spread * noise * z)
    return np.maximum(0.0, np.round(center + dist.spread * noise * z))


def _loglik(dist: ParamDist, center: float, noise: float, v: np.ndarray) -> np.ndarray:
    s = dist.spread * noise
    if dist.kind == "lognormal":
        if s == 0:
            return np.where(v == center, 0.0, -np.inf)
        z = (np.log(v) - math.log(center)) / s
        return -0.5 * z * z - math.log(s) - np.log(v)
    if s == 0:
        return np.where(v == max(0.0, float(np.round(center))), 0.0, -np.inf)
    hi = (v + 0.5 - center) / s
    lo = (v - 0.5 - center) / s
    with np.errstate(divide="ignore"):
        # Phi(hi) - Phi(lo), evaluated on the tail where it does not cancel
        right = lo > 0
        a = np.where(right, -hi, lo)
        b = np.where(right, -lo, hi)
        lb, la = log_ndtr(b), log_ndtr(a)
        mass = lb + np.log1p(-np.exp(la - lb))
        return np.where(v == 0, log_ndtr(hi), mass)


def generate_trace(class_label: int, params: GeneratorParams | None = None, seed: int = 0,
                   run_id: str | None = None, instance_id: str = "synthetic") -> RunTrace:
    params = (params or GeneratorParams()).validate()
    if class_label not in (0, 1):
        raise BadParams(f"class_label must be 0 or 1, got {class_label!r}")
    cp = params.classes[class_label]
    rng = np.random.default_rng(seed)
    records = []
    for k in range(1, cp.n_iterations + 1):
        values = {STAT_FIELDS[name]: float(_sample(cp.params[name], cp.params[name].center(k),
                                                   params.noise_scale, rng))
                  for name in STAT_NAMES}
        records.append(IterationRecord(k, **values))
    if class_label == 1:
        outcome = terminated(params.time_limit * float(rng.uniform(0.05, 0.95)))
    else:
        outcome = timed_out(params.time_limit)
    if run_id is None:
        run_id = f"c{class_label}-s{seed}"
    return RunTrace(run_id, instance_id, tuple(records), outcome)


def generate_corpus(n_per_class: int, params: GeneratorParams | None = None, seed: int = 0,
                    instance_id: str = "synthetic") -> tuple[list[RunTrace], list[int]]:
    """``n_per_class`` runs of each class, interleaved 1, 0, 1, 0, ..."""
    if n_per_class < 1:
        raise BadParams(f"n_per_class must be >= 1, got {n_per_class}")
    params = (params or GeneratorParams()).validate()
    seeds = np.random.default_rng(seed).integers(0, 2**63 - 1, size=2 * n_per_class)
    traces, labels = [], []
    for i in range(n_per_class):
        for j, label in enumerate((1, 0)):
            s = int(seeds[2 * i + j])
            traces.append(generate_trace(label, params, s, run_id=f"run{2 * i + j:05d}",
                                         instance_id=instance_id))
            labels.append(label)
    return traces, labels


def bayes_accuracy(params: GeneratorParams | None = None, n_mc: int = 100000, seed: int = 0,
                   features: FeatureSetSpec | None = None) -> tuple[float, float]:
    """Monte-Carlo accuracy of the likelihood-ratio rule, with its standard error.

    The rule sees the statistics named by ``features`` over its first K iterations
    (all eight statistics over two iterations when ``features`` is None). Classes
    are equally likely; ties go to class 1.
    """
    params = (params or GeneratorParams()).validate()
    if n_mc < 1000:
        raise BadParams(f"n_mc must be >= 1000, got {n_mc}")
    names = features.param_names if features is not None else STAT_NAMES
    k_max = features.iterations if features is not None else 2
    for label, cp in params.classes.items():
        if cp.n_iterations < k_max:
            raise BadParams(f"class {label} generates fewer than {k_max} iterations")

    rng = np.random.default_rng(seed)
    y = rng.random(n_mc) < 0.5
    ll = {0: np.zeros(n_mc), 1: np.zeros(n_mc)}
    for k in range(1, k_max + 1):
        for name in names:
            v = np.empty(n_mc)
            for label in (0, 1):
                d = params.classes[label].params[name]
                mask = y == bool(label)
                v[mask] = _sample(d, d.center(k), params.noise_scale, rng, int(mask.sum()))
            for label in (0, 1):
                d = params.classes[label].params[name]
                ll[label] += _loglik(d, d.center(k), params.noise_scale, v)
    pred = ll[1] >= ll[0]
    acc = float(np.mean(pred == y))
    return acc, math.sqrt(max(acc * (1 - acc), 0.0) / n_mc)
