import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from satpredict.errors import EmptyInput, InsufficientIterations, LengthMismatch, SpecMismatch
from satpredict.features import (
    FeatureSetSpec,
    Normalizer,
    apply_normalizer,
    extract_features,
    fit_normalizer,
)
from satpredict.trace import STAT_FIELDS, IterationRecord, RunTrace

from conftest import make_record


def sentinel_trace(n_iter):
    # value encodes (iteration, stat position): 100*k + j
    recs = []
    for k in range(1, n_iter + 1):
        vals = {attr: float(100 * k + j) for j, attr in enumerate(STAT_FIELDS.values())}
        recs.append(IterationRecord(k, **vals))
    return RunTrace("r", "i", tuple(recs))


def test_param_sets():
    assert FeatureSetSpec("set1").param_names == (
        "all-threads", "conflicts/second", "blocked-restarts", "restarts", "props/decision",
        "props/conflict")
    assert FeatureSetSpec("set2").param_names == (
        "all-threads", "conflicts/second", "blocked-restarts", "restarts", "props/decision",
        "literals/conflict", "decisions/conflict")
    with pytest.raises(SpecMismatch):
        FeatureSetSpec("set3")
    with pytest.raises(SpecMismatch):
        FeatureSetSpec("set1", 0)


def test_lengths_12_and_14():
    t = sentinel_trace(2)
    assert extract_features(t, FeatureSetSpec("set1", 2)).shape == (12,)
    assert extract_features(t, FeatureSetSpec("set2", 2)).shape == (14,)


def test_insufficient_iterations():
    with pytest.raises(InsufficientIterations) as e:
        extract_features(sentinel_trace(1), FeatureSetSpec("set1", 2))
    assert (e.value.have, e.value.need) == (1, 2)


@pytest.mark.parametrize("set_id", ["set1", "set2"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_iteration_major_layout(set_id, k):
    spec = FeatureSetSpec(set_id, k)
    v = extract_features(sentinel_trace(4), spec)
    order = list(STAT_FIELDS)
    P = len(spec.param_names)
    assert len(v) == P * k
    for i in range(1, k + 1):
        for j, name in enumerate(spec.param_names):
            assert v[(i - 1) * P + j] == 100 * i + order.index(name)


def test_fit_normalizer_hand_example():
    n = fit_normalizer([(0, 2), (2, 2)])
    assert n.mean == (1.0, 2.0)
    assert n.std == (1.0, 1.0)


def test_fit_single_vector():
    n = fit_normalizer([(3.0, -1.0, 7.5)])
    assert n.mean == (3.0, -1.0, 7.5)
    assert n.std == (1.0, 1.0, 1.0)
    assert np.all(apply_normalizer(n, (3.0, -1.0, 7.5)) == 0)


def test_fit_errors():
    with pytest.raises(EmptyInput):
        fit_normalizer([])
    with pytest.raises(LengthMismatch):
        fit_normalizer([(1, 2), (1, 2, 3)])
    with pytest.raises(LengthMismatch):
        apply_normalizer(Normalizer((0.0,), (1.0,)), (1.0, 2.0))


def test_apply_examples():
    n = Normalizer((1.0, 2.0), (1.0, 1.0))
    assert list(apply_normalizer(n, (1, 2))) == [0, 0]
    n = Normalizer((1.0, 2.0), (0.5, 4.0))
    assert list(apply_normalizer(n, (1.5, 6.0))) == [1, 1]


matrices = st.integers(1, 20).flatmap(lambda n: st.integers(1, 6).flatmap(
    lambda d: arrays(np.float64, (n, d), elements=st.floats(-1e4, 1e4))))


@given(matrices)
def test_normalized_fit_set_is_centered(X):
    n = fit_normalizer(X)
    Z = apply_normalizer(n, X)
    assert np.all(np.abs(Z.mean(axis=0)) < 1e-9 * max(1.0, np.abs(X).max()))
    assert all(s > 0 for s in n.std)


@given(matrices)
def test_normalizer_is_invertible(X):
    n = fit_normalizer(X)
    Z = apply_normalizer(n, X)
    back = Z * np.array(n.std) + np.array(n.mean)
    assert np.allclose(back, X, rtol=1e-9, atol=1e-6)
