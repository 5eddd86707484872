import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stattrials import rng
from stattrials.stats import (
    StabilityTracker, first_stable_index, histogram, merge, stability_reached, summarize,
)
from stattrials.symbol_channel import DEFAULT_MATRIX, DEFAULT_SOURCE, estimate_error_rate
from oracles import two_pass_moments


def test_summarize_small():
    s = summarize([1, 2, 3])
    assert (s.n, s.mean, s.variance, s.std) == (3, 2.0, 1.0, 1.0)
    assert s.stderr == pytest.approx(1 / math.sqrt(3))
    s = summarize([5, 5, 5, 5])
    assert s.mean == 5 and s.variance == 0


def test_summarize_single_and_empty():
    s = summarize([4.0])
    assert (s.n, s.mean, s.variance, s.stderr) == (1, 4.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        summarize([])


def test_summarize_uniforms():
    s = summarize(rng.new(3).uniforms(10**5))
    assert abs(s.mean - 0.5) <= 0.005
    assert abs(s.variance - 1 / 12) <= 0.003


def test_summarize_matches_two_pass():
    x = rng.new(17).uniforms(10**4) * 2e6 - 1e6
    mean, var = two_pass_moments(x)
    s = summarize(x)
    assert s.mean == pytest.approx(mean, rel=1e-12, abs=1e-9)
    assert s.variance == pytest.approx(var, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=200), st.randoms(use_true_random=False))
def test_permutation_invariance(xs, r):
    ys = list(xs)
    r.shuffle(ys)
    a, b = summarize(xs), summarize(ys)
    scale = max(1.0, max(abs(v) for v in xs))
    assert a.mean == pytest.approx(b.mean, rel=1e-12, abs=1e-12 * scale)
    assert a.variance == pytest.approx(b.variance, rel=1e-9, abs=1e-12 * scale * scale)
    ha, hb = histogram(xs, -1e6, 1e6, 17), histogram(ys, -1e6, 1e6, 17)
    assert ha.counts.tolist() == hb.counts.tolist()
    assert (ha.underflow, ha.overflow) == (hb.underflow, hb.overflow)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=100),
       st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=100))
def test_merge_equals_concatenation(xs, ys):
    m = merge(summarize(xs), summarize(ys))
    full = summarize(xs + ys)
    assert m.n == full.n
    assert m.mean == pytest.approx(full.mean, rel=1e-9, abs=1e-9)
    assert m.variance == pytest.approx(full.variance, rel=1e-9, abs=1e-7)
    m2 = merge(summarize(ys), summarize(xs))
    assert m2.mean == pytest.approx(m.mean, rel=1e-12, abs=1e-12)


def test_histogram_basic():
    h = histogram([0.5], 0, 1, 1)
    assert h.counts.tolist() == [1]
    h = histogram([-1, 2], 0, 1, 4)
    assert h.underflow == 1 and h.overflow == 1 and h.counts.sum() == 0
    # hi is exclusive, lo inclusive
    h = histogram([0.0, 1.0], 0, 1, 4)
    assert h.counts.tolist() == [1, 0, 0, 0] and h.overflow == 1


def test_histogram_uniforms():
    h = histogram(rng.new(5).uniforms(10**5), 0, 1, 10)
    assert np.all(np.abs(h.counts - 10**4) <= 500)


def test_histogram_errors():
    with pytest.raises(ValueError):
        histogram([1], 1, 1, 3)
    with pytest.raises(ValueError):
        histogram([1], 0, 1, 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), max_size=300), st.integers(1, 40))
def test_histogram_conservation(xs, bins):
    h = histogram(xs, -3.0, 4.0, bins)
    assert h.total == len(xs)


def test_stability_constant_stream():
    t = StabilityTracker(window=50, tolerance=0.02)
    results = [stability_reached(t, 0.365) for _ in range(50)]
    assert results[-1] and not any(results[:-1])


def test_stability_alternating():
    t = StabilityTracker(window=10, tolerance=0.02)
    assert not any(t.push(float(k % 2)) for k in range(100))


def test_stability_window_validation():
    with pytest.raises(ValueError):
        StabilityTracker(window=1)


def test_first_stable_index():
    assert first_stable_index([1.0] * 5, window=3, tolerance=0.1) == 3
    assert first_stable_index([0.0, 1.0] * 5, window=3, tolerance=0.1) is None


def test_symbol_channel_running_rate_stabilises_in_bracket():
    st = estimate_error_rate(DEFAULT_SOURCE, DEFAULT_MATRIX, 10**4, seed=1, window=200, tolerance=0.02)
    assert st.first_stable_n is not None and 500 <= st.first_stable_n <= 5000
