import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeweave.churn import RoundTrace, ScenarioConfig, run_batch
from treeweave.errors import DomainError
from treeweave.report import (
    describe,
    summarize,
    summary_to_json,
    traces_from_csv,
    traces_to_csv,
    write_gnuplot,
)


def trace(values, run=0):
    return [RoundTrace(run, i + 1, "Mix", 8, v, 0, v == 0.0) for i, v in enumerate(values)]


def two_pass(values):
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1) if n > 1 else 0.0
    return min(values), max(values), mean, math.sqrt(var)


def test_constant_series():
    s = summarize(trace([0.5] * 10)).pooled
    assert (s.min, s.max, s.mean, s.stddev) == (0.5, 0.5, 0.5, 0.0)


def test_zero_one_series():
    s = summarize(trace([0.0, 1.0])).pooled
    assert s.mean == 0.5
    assert s.stddev == pytest.approx(math.sqrt(0.5), rel=1e-15)


def test_empty_is_error():
    with pytest.raises(DomainError):
        summarize([])
    with pytest.raises(DomainError):
        describe([])


@settings(max_examples=200)
@given(st.lists(st.floats(0.0, 8.0, allow_nan=False), min_size=1, max_size=300))
def test_matches_two_pass_oracle(values):
    s = describe(values)
    lo, hi, mean, sd = two_pass(values)
    assert (s.min, s.max) == (lo, hi)
    assert s.min <= s.mean <= s.max
    assert s.mean == pytest.approx(mean, rel=1e-12, abs=1e-300)
    assert s.stddev == pytest.approx(sd, rel=1e-12, abs=1e-12)


def test_per_run_split():
    traces = trace([0.1, 0.2], run=0) + trace([0.5, 0.7, 0.9], run=1)
    summary = summarize(traces)
    assert sorted(summary.per_run) == [0, 1]
    assert summary.per_run[1].mean == pytest.approx(0.7)
    assert summary.pooled.max == 0.9


def test_csv_round_trip_real_traces():
    config = ScenarioConfig(initial_leaves=32, total_rounds=14, churn_fraction=0.3, runs=2, seed=4)
    traces = run_batch(config)
    text = traces_to_csv(traces)
    assert text.splitlines()[0] == "run,round,phase,population,lambda2,swaps,disconnected"
    assert traces_from_csv(text) == traces


@settings(max_examples=100)
@given(st.lists(st.floats(0.0, 8.0, allow_nan=False), min_size=1, max_size=20))
def test_csv_round_trip_nine_digits(values):
    rounded = [float(f"{v:.9g}") for v in values]
    traces = trace(rounded)
    assert traces_from_csv(traces_to_csv(traces)) == traces


def test_csv_bad_header():
    with pytest.raises(DomainError):
        traces_from_csv("a,b\n1,2\n")


def test_json_schema():
    traces = trace([0.2, 0.4], run=0) + trace([0.6], run=1)
    doc = json.loads(summary_to_json(summarize(traces), {"seed": 1}))
    assert set(doc) == {"config", "pooled", "per_run"}
    assert set(doc["pooled"]) == {"min", "max", "mean", "stddev"}
    assert [r["run"] for r in doc["per_run"]] == [0, 1]
    assert set(doc["per_run"][0]) == {"run", "min", "max", "mean", "stddev"}


def test_gnuplot_files(tmp_path):
    traces = trace([0.25, 0.5], run=0) + trace([0.75], run=3)
    paths = write_gnuplot(traces, tmp_path / "fig")
    assert [p.name for p in paths] == ["fig_run000.dat", "fig_run003.dat"]
    rows = [line.split() for line in paths[0].read_text().splitlines() if not line.startswith("#")]
    assert rows == [["1", "0.25"], ["2", "0.5"]]
