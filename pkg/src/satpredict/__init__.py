"""Early classification of CDCL solver runs from per-iteration runtime statistics."""

from .cnf import CnfInstance, InstanceFeatures, instance_features, parse_dimacs, quartiles
from .dataset import Dataset, LabeledExample, build_balanced, label_run, load_dataset, save_dataset, split
from .evaluation import EvalReport, evaluate, render_report
from .features import FeatureSetSpec, Normalizer, apply_normalizer, extract_features, fit_normalizer
from .nn import TrainConfig, TrainedModel, build_model, load_model, predict, save_model, train
from .synth import GeneratorParams, bayes_accuracy, generate_corpus, generate_trace
from .trace import (
    IterationRecord,
    Outcome,
    RunTrace,
    parse_canonical_csv,
    parse_stats_stream,
    serialize_canonical_csv,
)

__version__ = "0.1.0"
