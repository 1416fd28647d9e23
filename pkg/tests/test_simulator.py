import csv
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from conftest import KS_ALPHA
from isacnet import SystemConfig, derive
from isacnet.analytic import (avg_coverage_networked, bistatic_coverages, coverage_comm,
                              coverage_mono)
from isacnet.kernels import mc_layout as L
from isacnet.simulator import (COMPONENTS, SimOptions, TrialOutcome, dump_trials,
                               estimate_coverage, estimate_from_samples, estimate_rate,
                               link_sinr, run_trial, select_sinr, simulate)

CFG = SystemConfig()
PHIS = [10 ** (d / 10) for d in range(-10, 11, 2)]


@pytest.fixture(scope="module")
def batch20():
    """Shared trial set at R1 = 20 m with four links."""
    return simulate(CFG, 100_000, 2024, 4, 20.0)


@pytest.fixture(scope="module")
def batch_random():
    """Random target position, four links."""
    return simulate(CFG, 50_000, 77, 4)


# ------------------------------------------------------------ reproducibility

def test_same_seed_same_estimate():
    a = estimate_coverage(CFG, "networked", 1.0, 2000, 5, r1=20.0)
    b = estimate_coverage(CFG, "networked", 1.0, 2000, 5, r1=20.0)
    assert a == b


def test_schedule_independence():
    serial = simulate(CFG, 3000, 9, 3, None, SimOptions(batch=3000))
    split = simulate(CFG, 3000, 9, 3, None, SimOptions(batch=257, workers=3))
    assert np.array_equal(serial.comps, split.comps)
    assert np.array_equal(serial.comm, split.comm)
    # a trial range computed on its own matches the same slice of a long run
    tail = simulate(CFG, 1000, 9, 3, None, first=2000)
    assert np.array_equal(tail.comps, serial.comps[2000:])


def test_run_trial_matches_batch():
    out = run_trial(CFG, 9, trial=17, n_coop=3)
    b = simulate(CFG, 20, 9, 3)
    s = link_sinr(b)[17]
    assert isinstance(out, TrialOutcome)
    assert out.sinr_mono == s[0] and out.sinr_bistatic == tuple(s[1:])
    assert out.sinr_networked == max(out.sinr_mono, *out.sinr_bistatic)
    bd = out.breakdowns[0]
    assert bd.sinr == pytest.approx(out.sinr_mono)
    assert min(bd.direct_los, bd.direct_nlos, bd.intra_clutter, bd.inter_clutter,
               bd.residual_si, bd.noise) >= 0


def test_minimum_trials():
    with pytest.raises(ValueError):
        estimate_coverage(CFG, "mono", 1.0, 999, 1)


def test_no_rerolls_at_table_density(batch20, batch_random):
    assert batch20.rerolls.sum() == 0 and batch_random.rerolls.sum() == 0


# ------------------------------------------------------------ closed-form checks

def test_single_bs_radar_equation():
    cfg = CFG.with_(lambda_bs=1e-12, lambda_cl=0.0, zeta_sic=1e-10)
    dp = derive(cfg)
    b = simulate(cfg, 20_000, 3, 1, 25.0)
    c = b.comps[:, 0]
    assert np.all(c[:, [L.C_DIRECT_LOS, L.C_DIRECT_NLOS, L.C_INTRA, L.C_INTER_TARGET,
                        L.C_INTER_CLUTTER]] == 0.0)
    assert np.allclose(c[:, L.C_NOISE], dp.noise_w)
    assert np.allclose(c[:, L.C_SI], dp.p_comm * cfg.zeta_sic)
    # recover the drawn cross-section from the radar equation; it must be Swerling I
    k = dp.p_sense * cfg.g_max ** 2 * dp.wavelength_m ** 2 / ((4 * math.pi) ** 3 * 25.0 ** 4)
    sigma = c[:, L.C_DESIRED] / k
    assert stats.kstest(sigma, "expon").pvalue > KS_ALPHA
    sinr = link_sinr(b)[:, 0]
    assert np.allclose(sinr, k * sigma / (dp.noise_w + dp.p_comm * cfg.zeta_sic), rtol=1e-12)


def test_bistatic_angle_uniform():
    b = simulate(CFG.with_(lambda_cl=0.0), 100_000, 31, 2)
    assert stats.kstest(b.beta[:, 1] / math.pi, "uniform").pvalue > KS_ALPHA


def test_nearest_distance_law(batch_random):
    # pi lambda R1^2 is Exp(1) for the true nearest BS
    assert stats.kstest(math.pi * CFG.lambda_bs * batch_random.r1 ** 2, "expon").pvalue > KS_ALPHA


# ------------------------------------------------------------ estimator invariants

def test_networked_dominates_mono(batch20):
    mono = select_sinr(batch20, "mono")
    net = select_sinr(batch20, "networked", n_coop=4)
    assert np.all(net >= mono)


@settings(max_examples=25)
@given(st.sets(st.sampled_from(COMPONENTS[1:])), st.floats(-10, 10))
def test_disabling_components_never_hurts(batch20, off, db):
    phi = 10 ** (db / 10)
    for metric in ("mono", "networked"):
        base = np.mean(select_sinr(batch20, metric, 4) > phi)
        less = np.mean(select_sinr(batch20, metric, 4, disabled=off) > phi)
        assert less >= base


def test_zeta_monotone_and_bistatic_invariant():
    zetas = [1e-14, 1e-12, 1e-10, 1e-8, 1e-6]
    mono, bi = [], []
    for z in zetas:
        b = simulate(CFG.with_(zeta_sic=z), 5000, 4, 3, 20.0)
        mono.append(np.mean(select_sinr(b, "mono") > 1.0))
        bi.append(select_sinr(b, "networked", 2, mode="multistatic"))
    assert all(a >= b for a, b in zip(mono, mono[1:]))
    assert mono[0] > mono[-1]
    assert all(np.array_equal(bi[0], x) for x in bi[1:])


def test_standard_error_scaling():
    n = 5000
    a = estimate_coverage(CFG, "networked", 1.0, n, 8)
    b = estimate_coverage(CFG, "networked", 1.0, 4 * n, 8)
    assert a.half_width_95 / b.half_width_95 == pytest.approx(2.0, rel=0.1)
    assert a.half_width_95 == pytest.approx(1.96 * math.sqrt(a.mean * (1 - a.mean) / n), rel=1e-3)


def test_jensen(batch_random):
    s = select_sinr(batch_random, "networked", 4)
    assert np.mean(np.log1p(s)) <= np.log1p(np.mean(s))


def test_zero_sinr_contributes_zero_rate():
    cfg = CFG.with_(gamma_blockage=5.0)
    e = estimate_rate(cfg, "networked", 2000, 1, n_coop=3, mode="multistatic")
    assert e.mean == 0.0 and e.half_width_95 == 0.0


def test_vanishing_threshold_limit(batch20):
    est = estimate_coverage(CFG, "networked", [1e-30, 0.1, 1.0, 10.0], 100_000, 2024,
                            batch=batch20)
    assert est[0].mean == 1.0       # the serving link is LoS
    assert all(est[0].mean >= e.mean for e in est[1:])


def test_estimate_from_samples():
    e = estimate_from_samples([1.0, 0.0, 1.0, 0.0], 3)
    assert e.mean == 0.5 and e.n_trials == 4 and e.seed == 3
    assert e.half_width_95 == pytest.approx(1.96 * math.sqrt(1 / 3 / 4))


# ------------------------------------------------------------ analytic cross-checks

def test_mono_matches_analytic(batch20):
    mc = estimate_coverage(CFG, "mono", PHIS, 100_000, 2024, batch=batch20)
    for phi, e in zip(PHIS, mc):
        assert abs(coverage_mono(20.0, phi, CFG).value - e.mean) <= 0.015


def test_bistatic_matches_analytic(batch20):
    mc = estimate_coverage(CFG, "bistatic", PHIS, 100_000, 2024, order=2, batch=batch20)
    for phi, e in zip(PHIS, mc):
        assert abs(bistatic_coverages(20.0, phi, 2, CFG)[0] - e.mean) <= 0.02


def test_random_target_matches_average(batch_random):
    e = estimate_coverage(CFG, "mono", 1.0, 50_000, 77, batch=batch_random)
    assert abs(e.mean - avg_coverage_networked(1.0, 1, CFG)) <= 0.015


def test_comm_matches_analytic(batch_random):
    e = estimate_coverage(CFG, "comm", 1.0, 50_000, 77, batch=batch_random)
    assert abs(e.mean - coverage_comm(1.0, CFG)) <= 0.02


def test_rates_near_reference_values(batch_random):
    sense = estimate_rate(CFG, "networked", 50_000, 77, n_coop=4, batch=batch_random)
    comm = estimate_rate(CFG, "comm", 50_000, 77, batch=batch_random)
    assert sense.mean == pytest.approx(26.0, rel=0.10)
    assert comm.mean == pytest.approx(37.0, rel=0.10)


def test_region_size_insensitive():
    small = estimate_coverage(CFG, "networked", 1.0, 20_000, 6, n_coop=3)
    big = estimate_coverage(CFG, "networked", 1.0, 20_000, 6, n_coop=3,
                            opts=SimOptions(side_m=10_000.0))
    # same seed, different far field: only edge effects can differ
    assert abs(small.mean - big.mean) <= 2 * math.hypot(small.half_width_95, big.half_width_95)


# ------------------------------------------------------------ options and dump

def test_option_validation():
    with pytest.raises(ValueError):
        SimOptions(disabled=frozenset({"desired"}))
    with pytest.raises(ValueError):
        SimOptions(disabled=frozenset({"bogus"}))
    with pytest.raises(ValueError):
        simulate(CFG, 10, 1, 1, 5000.0)


def test_dump_trials(tmp_path):
    b = simulate(CFG, 5, 1, 2)
    path = tmp_path / "trials.csv"
    dump_trials(b, path)
    rows = list(csv.reader(path.open()))
    assert len(rows) == 1 + 5 * 2
    assert rows[0][:4] == ["trial", "link", "r1", "beta"]
    assert float(rows[1][4]) == b.comps[0, 0, 0]
