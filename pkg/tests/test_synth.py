import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satpredict.dataset import label_run
from satpredict.errors import BadParams
from satpredict.features import FeatureSetSpec
from satpredict.synth import (
    DEFAULT_CLASSES,
    ClassParams,
    GeneratorParams,
    bayes_accuracy,
    generate_corpus,
    generate_trace,
)
from satpredict.trace import STAT_NAMES, parse_canonical_csv, serialize_canonical_csv

SET1 = FeatureSetSpec("set1", 2)


def test_zero_noise_emits_centers():
    p = GeneratorParams(noise_scale=0.0)
    for label in (0, 1):
        t = generate_trace(label, p, seed=5)
        cp = DEFAULT_CLASSES[label]
        assert len(t.records) == cp.n_iterations
        for rec in t.records:
            for name in STAT_NAMES:
                d = cp.params[name]
                c = d.center(rec.iteration_index)
                want = c if d.kind == "lognormal" else max(0.0, float(np.round(c)))
                assert rec.stat(name) == pytest.approx(want, rel=1e-12)


def test_seed_determinism():
    a, la = generate_corpus(5, seed=9)
    b, lb = generate_corpus(5, seed=9)
    assert a == b and la == lb
    c, _ = generate_corpus(5, seed=10)
    assert a != c


def test_corpus_shape_and_labels():
    traces, labels = generate_corpus(75, seed=0)
    assert len(traces) == 150
    assert labels.count(1) == labels.count(0) == 75
    assert len({t.run_id for t in traces}) == 150
    limit = GeneratorParams().time_limit
    assert [label_run(t, limit) for t in traces] == labels


def test_class_separation_on_conflict_rate():
    traces, labels = generate_corpus(200, seed=1)
    by = {0: [], 1: []}
    for t, l in zip(traces, labels):
        by[l].append(t.records[0].conflicts_per_second)
    assert np.mean(by[1]) > np.mean(by[0])


def test_distinct_seeds_give_distinct_traces():
    seen = {tuple(r.conflicts_per_second for r in generate_trace(1, seed=s).records)
            for s in range(50)}
    assert len(seen) == 50


def test_csv_round_trip_of_generated_corpus():
    traces, _ = generate_corpus(10, seed=3)
    assert parse_canonical_csv(serialize_canonical_csv(traces)) == traces


def test_oracle_no_noise_is_perfect():
    acc, se = bayes_accuracy(GeneratorParams(noise_scale=0.0), n_mc=2000)
    assert acc == 1.0 and se == 0.0


def test_oracle_identical_classes_is_chance():
    same = GeneratorParams(classes={0: DEFAULT_CLASSES[1], 1: DEFAULT_CLASSES[1]})
    acc, se = bayes_accuracy(same, n_mc=20000, seed=2)
    # identical likelihoods: every tie goes to class 1, so accuracy is the class-1 share
    assert abs(acc - 0.5) <= 3 * max(se, 0.5 / np.sqrt(20000))


def test_oracle_monotone_in_noise():
    accs = [bayes_accuracy(GeneratorParams(noise_scale=s), n_mc=20000, seed=1, features=SET1)[0]
            for s in (0.5, 1.0, 1.5)]
    assert accs[0] > accs[1] > accs[2]


def test_oracle_at_defaults_is_in_band():
    acc, se = bayes_accuracy(n_mc=20000, seed=0, features=SET1)
    assert 0.92 <= acc <= 0.99
    assert se < 0.005


def test_params_json_overlay(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"noise_scale": 0.7,
                                "classes": {"1": {"params": {"restarts": {"centers": [1, 2]}}}}}))
    p = GeneratorParams.from_json(path)
    assert p.noise_scale == 0.7
    assert p.classes[1].params["restarts"].centers == (1.0, 2.0)
    assert p.classes[0] == DEFAULT_CLASSES[0]
    assert GeneratorParams.from_dict(p.to_dict()) == p


@pytest.mark.parametrize("bad", [
    {"noise_scale": -1},
    {"time_limit": 0},
    {"classes": {"2": {}}},
    {"classes": {"1": {"params": {"bogus": {}}}}},
    {"classes": {"1": {"n_iterations": 1}}},
    {"classes": {"0": {"params": {"all-threads": {"kind": "count"}}}}},
    {"classes": {"0": {"params": {"props/decision": {"centers": [0, 1]}}}}},
    {"classes": {"0": {"params": {"restarts": {"spread": -2}}}}},
    {"classes": {"0": {"params": {"restarts": {"kind": "poisson"}}}}},
])
def test_bad_params(bad):
    with pytest.raises(BadParams):
        GeneratorParams.from_dict(bad)


def test_bad_calls():
    with pytest.raises(BadParams):
        generate_trace(2)
    with pytest.raises(BadParams):
        generate_corpus(0)
    with pytest.raises(BadParams):
        bayes_accuracy(n_mc=10)
    with pytest.raises(BadParams):
        bayes_accuracy(n_mc=1000, features=FeatureSetSpec("set1", 6))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 3))
def test_generated_values_always_valid(seed, noise):
    p = GeneratorParams(noise_scale=noise)
    for label in (0, 1):
        t = generate_trace(label, p, seed)
        for r in t.records:
            assert r.all_threads_time > 0
            assert r.restarts == int(r.restarts) and r.restarts >= 0
