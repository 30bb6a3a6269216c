"""Hit ratio, confusion counts and report rendering."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .dataset import Dataset
from .errors import EmptyDataset, SatPredictError, SpecMismatch
from .nn import TrainedModel, forward_batch


@dataclass(frozen=True)
class EvalReport:
    hit_ratio: float
    tp: int
    fp: int
    tn: int
    fn: int
    n_test: int
    training_accuracy: float | None = None
    model_id: str = ""
    dataset_id: str = ""

    def __post_init__(self):
        if self.tp + self.fp + self.tn + self.fn != self.n_test:
            raise SatPredictError("confusion counts do not sum to n_test")

    @property
    def confusion(self) -> dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion_report(predicted, actual, training_accuracy=None, model_id="",
                     dataset_id="") -> EvalReport:
    pred = np.asarray(predicted).astype(bool)
    act = np.asarray(actual).astype(bool)
    n = pred.size
    if n == 0:
        raise EmptyDataset("no test examples")
    tp = int(np.sum(pred & act))
    tn = int(np.sum(~pred & ~act))
    fp = int(np.sum(pred & ~act))
    fn = int(np.sum(~pred & act))
    return EvalReport((tp + tn) / n, tp, fp, tn, fn, n, training_accuracy, model_id, dataset_id)


def evaluate(tm: TrainedModel, test: Dataset, threshold: float = 0.5, model_id: str = "",
             dataset_id: str = "") -> EvalReport:
    """Score ``tm`` on ``test`` in inference mode.

    A test set flagged ``normalized`` is taken to be already scaled; otherwise the
    model's stored normalizer is applied. Training accuracy is the last epoch's
    recorded value (None for an untrained model).
    """
    if test.spec != tm.spec:
        raise SpecMismatch(
            f"model expects {tm.spec.set_id} K={tm.spec.iterations}, "
            f"dataset is {test.spec.set_id} K={test.spec.iterations}")
    if len(test) == 0:
        raise EmptyDataset("test dataset is empty")
    if test.normalized:
        p, _ = forward_batch(tm.model, test.X, "infer")
    else:
        p = tm.predict_proba(test.X)
    return confusion_report(p >= threshold, test.y == 1, tm.training_accuracy, model_id,
                            dataset_id)


def report_to_dict(r: EvalReport) -> dict:
    d = asdict(r)
    d["confusion"] = r.confusion
    for k in ("tp", "fp", "tn", "fn"):
        del d[k]
    return d


def report_from_dict(d: dict) -> EvalReport:
    c = d["confusion"]
    return EvalReport(d["hit_ratio"], c["tp"], c["fp"], c["tn"], c["fn"], d["n_test"],
                      d.get("training_accuracy"), d.get("model_id", ""), d.get("dataset_id", ""))


def render_report(r: EvalReport, format: str = "text") -> str:
    if format == "json":
        return json.dumps(report_to_dict(r), indent=1)
    if format != "text":
        raise SatPredictError(f"unknown report format {format!r}")
    train_acc = "n/a" if r.training_accuracy is None else f"{r.training_accuracy:.4f}"
    lines = [
        f"model_id={r.model_id or '-'} dataset_id={r.dataset_id or '-'}",
        f"hit_ratio={r.hit_ratio:.4f} ({r.tp + r.tn}/{r.n_test})",
        f"training_accuracy={train_acc}",
        f"n_test={r.n_test}",
        f"confusion: tp={r.tp} fp={r.fp} tn={r.tn} fn={r.fn}",
    ]
    return "\n".join(lines)
