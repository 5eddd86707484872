import math

import pytest

from stattrials import rng
from stattrials.arq_channel import (
    BIT_EXACT, ArqConfig, bit_exact_success_probability, bsc_capacity, capacity_curve,
    empirical_capacity, encode_frame, parity_check, simulate, sweep_frame_length,
    throughput_analytic, throughput_stderr, undetected_probability,
)
from stattrials.errors import RunawayError
from oracles import frame_success_by_enumeration


@pytest.mark.parametrize("payload, parity", [("0000000", 0), ("1000000", 1), ("1011001", 0)])
def test_encode_examples(payload, parity):
    f = encode_frame([int(c) for c in payload], frame_len=8)
    assert f.parity == parity and len(f.bits) == 8


def test_encode_rejects_wrong_length():
    with pytest.raises(ValueError):
        encode_frame([1, 0, 1], frame_len=8)


def test_parity_round_trip_and_flips():
    s = rng.new(3)
    for _ in range(200):
        bits = [int(s.next_uniform() < 0.5) for _ in range(11)]
        f = list(encode_frame(bits).bits)
        assert parity_check(f)
        f[2] ^= 1
        assert not parity_check(f)
        f[7] ^= 1
        assert parity_check(f)


def test_noiseless_channel():
    r = simulate(ArqConfig(8, 0.0, 500))
    assert r.total_tacts == 4000 and r.throughput == 0.875 and r.retransmissions == 0
    r = simulate(ArqConfig(8, 0.0, 500, error_model=BIT_EXACT))
    assert r.total_tacts == 4000 and r.retransmissions == 0 and r.undetected_error_frames == 0


@pytest.mark.parametrize("p, target", [(0.01, 0.805), (0.05, 0.525)])
def test_long_runs_match_expected_throughput(p, target):
    r = simulate(ArqConfig(8, p, 10**5))
    assert abs(r.throughput - target) <= 0.005


@pytest.mark.parametrize("model", ["abstract", BIT_EXACT])
def test_accounting_identity(model):
    r = simulate(ArqConfig(6, 0.03, 5000, error_model=model, seed=2))
    assert r.total_tacts == 6 * (r.frames_delivered + r.retransmissions)
    assert r.throughput == r.n_frames * 5 / r.total_tacts


@pytest.mark.parametrize("D, p", [(8, 0.001), (8, 0.02), (4, 0.1), (16, 0.05)])
def test_converges_to_closed_form(D, p):
    r = simulate(ArqConfig(D, p, 10**5, seed=5))
    assert abs(r.throughput - throughput_analytic(D, p)) < 5 * throughput_stderr(D, p, 10**5)


def test_stderr_formula_against_replicates():
    D, p, n = 8, 0.05, 2000
    vs = [simulate(ArqConfig(D, p, n), rng.derive_stream((77, k))).throughput for k in range(400)]
    mean = sum(vs) / len(vs)
    sd = math.sqrt(sum((v - mean) ** 2 for v in vs) / (len(vs) - 1))
    assert sd == pytest.approx(throughput_stderr(D, p, n), rel=0.15)


def test_closed_form_values():
    assert throughput_analytic(8, 0.0) == 0.875
    assert throughput_analytic(8, 0.001) == pytest.approx(0.868, abs=5e-4)
    assert throughput_analytic(5, 0.05) == pytest.approx(0.60)
    with pytest.raises(ValueError):
        throughput_analytic(10, 0.1)


def test_bit_exact_probabilities_against_enumeration():
    for D in (2, 5, 8, 13):
        for p in (0.01, 0.1, 0.3):
            ok, und = frame_success_by_enumeration(D, p)
            assert bit_exact_success_probability(D, p) == pytest.approx(ok, rel=1e-12)
            assert undetected_probability(D, p) == pytest.approx(und, rel=1e-12, abs=1e-300)


def test_bit_exact_undetected_rate():
    D, p, n = 8, 0.01, 10**5
    r = simulate(ArqConfig(D, p, n, error_model=BIT_EXACT))
    u = undetected_probability(D, p)
    # delivered frames are conditioned on passing parity
    per_frame = u / bit_exact_success_probability(D, p)
    sigma = math.sqrt(n * per_frame * (1 - per_frame))
    assert abs(r.undetected_error_frames - n * per_frame) <= 5 * sigma
    assert abs(r.undetected_error_frames - n * u) <= 5 * math.sqrt(n * u * (1 - u))


def test_bit_exact_throughput():
    D, p, n = 8, 0.02, 50_000
    r = simulate(ArqConfig(D, p, n, error_model=BIT_EXACT, seed=4))
    s = bit_exact_success_probability(D, p)
    assert r.throughput == pytest.approx((D - 1) / D * s, rel=0.01)


def test_determinism_and_quantization():
    cfg = ArqConfig(8, 0.02, 3000, seed=11)
    assert simulate(cfg) == simulate(cfg)
    q = simulate(ArqConfig(8, 0.02, 10**5, quantize=1000))
    assert abs(q.throughput - throughput_analytic(8, 0.02)) < 5 * throughput_stderr(8, 0.02, 10**5)


def test_runaway_guard():
    with pytest.raises(RunawayError):
        simulate(ArqConfig(2, 0.49, 1000, max_attempts_per_frame=2))


@pytest.mark.parametrize("kwargs", [dict(frame_len=1), dict(bit_error_p=1.5), dict(n_frames=0),
                                    dict(error_model="bogus"), dict(frame_len=10, bit_error_p=0.1)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ArqConfig(**kwargs)


def test_bit_exact_allows_large_pd():
    r = simulate(ArqConfig(10, 0.2, 200, error_model=BIT_EXACT))
    assert r.frames_delivered == 200


def _argmax(points):
    best = max(points, key=lambda pt: (round(pt.v_analytic, 12), -pt.frame_len))
    return best.frame_len, best.v_analytic


def test_sweep_optimum_lengths():
    pts = sweep_frame_length(0.05, 2, 16, 500)
    D, v = _argmax(pts)
    assert D in (4, 5) and v == pytest.approx(0.60)
    assert [pt.frame_len for pt in pts] == list(range(2, 17))
    assert _argmax(sweep_frame_length(0.1, 2, 9, 500)) == (3, pytest.approx(0.4667, abs=1e-4))
    assert _argmax(sweep_frame_length(0.3, 2, 3, 500)) == (2, pytest.approx(0.20))


def test_sweep_skips_inadmissible_lengths(caplog):
    with caplog.at_level("INFO"):
        pts = sweep_frame_length(0.2, 2, 10, 100)
    assert [pt.frame_len for pt in pts] == [2, 3, 4]
    assert "skipping" in caplog.text
    with pytest.raises(ValueError):
        sweep_frame_length(0.5, 2, 10, 100)


def test_sweep_thread_independent():
    a = sweep_frame_length(0.02, 2, 20, 2000, threads=1)
    b = sweep_frame_length(0.02, 2, 20, 2000, threads=4)
    assert a == b


def test_empirical_capacity():
    assert empirical_capacity(0.0, 2, 64, 200) == (63 / 64, 64)
    c, _ = empirical_capacity(0.05, 2, 16, 10**5)
    assert abs(c - 0.60) <= 0.01


def test_bsc_capacity_values():
    assert bsc_capacity(0.0) == 1.0
    assert bsc_capacity(1.0) == 1.0
    assert bsc_capacity(0.5) == 0.0
    assert bsc_capacity(0.05) == pytest.approx(0.7136, abs=1e-4)
    assert bsc_capacity(0.1, c0=2.0) == pytest.approx(2 * bsc_capacity(0.1))


def test_capacity_curve_rows():
    (row,) = capacity_curve([0.0], d_max=64, n_frames=100)
    assert (row.p, row.c_emp, row.c_bsc, row.d_opt) == (0.0, 63 / 64, 1.0, 64)
    with pytest.raises(ValueError):
        capacity_curve([0.5])


def test_capacity_curve_monotone():
    rows = capacity_curve([0.0, 0.02, 0.05, 0.1, 0.2], d_max=32, n_frames=20_000)
    for a, b in zip(rows, rows[1:]):
        assert b.c_bsc <= a.c_bsc
        assert b.c_emp <= a.c_emp + 3 * math.hypot(a.stderr, b.stderr)
    p05 = rows[2]
    assert p05.c_emp < p05.c_bsc
