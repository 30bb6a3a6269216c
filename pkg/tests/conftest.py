from pathlib import Path

import pytest
from hypothesis import strategies as st

from satpredict.trace import STAT_FIELDS, IterationRecord, Outcome, RunTrace

DATA = Path(__file__).parent / "data"

positive = st.floats(min_value=1e-6, max_value=1e7, allow_nan=False, allow_infinity=False)
nonneg = st.floats(min_value=0.0, max_value=1e7, allow_nan=False, allow_infinity=False)
ident = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789-_.", min_size=1, max_size=12)


@st.composite
def records(draw, n_min=1, n_max=6):
    n = draw(st.integers(n_min, n_max))
    out = []
    for k in range(1, n + 1):
        values = {attr: draw(nonneg) for attr in STAT_FIELDS.values()}
        values["all_threads_time"] = draw(positive)
        out.append(IterationRecord(k, **values))
    return tuple(out)


outcomes = st.one_of(
    st.just(Outcome()),
    st.builds(lambda s: Outcome("terminated", s), positive),
    st.builds(lambda s: Outcome("timed_out", s), positive),
)


@st.composite
def traces(draw, n_min=1, n_max=6):
    return RunTrace(draw(ident), draw(ident), draw(records(n_min, n_max)), draw(outcomes))


@st.composite
def trace_lists(draw, max_size=5):
    ids = draw(st.lists(ident, max_size=max_size, unique=True))
    return [RunTrace(rid, draw(ident), draw(records()), draw(outcomes)) for rid in ids]


def make_record(k, **overrides):
    values = {attr: float(i + 1) for i, attr in enumerate(STAT_FIELDS.values())}
    values.update(overrides)
    return IterationRecord(k, **values)


@pytest.fixture
def data_dir():
    return DATA
