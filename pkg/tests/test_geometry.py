import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from conftest import KS_ALPHA
from isacnet.geometry import (Disk, SensingGeometry, Square, backhaul_overhead, bistatic_angle,
                              cell_bistatic, cell_monostatic, pdf_beta, pdf_nearest,
                              pdf_nth_given_nearest, sample_ppp)

LAM = 250e-6
BW = 208e6
THETA = math.pi / 6


# ------------------------------------------------------------ point process

def test_empty_field(rng):
    assert len(sample_ppp(0.0, Square(100.0), rng)) == 0


def test_points_inside_region(rng):
    for region in (Square(300.0, (10.0, -5.0)), Disk(150.0)):
        f = sample_ppp(1e-3, region, rng)
        assert np.all(region.contains(f.points))


def test_count_mean_and_dispersion(rng):
    region = Disk(200.0)
    mean = LAM * region.area
    counts = np.array([len(sample_ppp(LAM, region, rng)) for _ in range(10_000)])
    assert abs(counts.mean() - mean) < 3 * math.sqrt(mean / counts.size)
    # index-of-dispersion test: (n-1) s^2 / mean ~ chi2(n-1) for Poisson counts
    stat = (counts.size - 1) * counts.var(ddof=1) / mean
    p = stats.chi2.cdf(stat, counts.size - 1)
    assert KS_ALPHA / 2 < p < 1 - KS_ALPHA / 2


def test_sampler_reproducible():
    a = sample_ppp(LAM, Square(500.0), np.random.default_rng(5)).points
    b = sample_ppp(LAM, Square(500.0), np.random.default_rng(5)).points
    assert np.array_equal(a, b)


# ------------------------------------------------------------ distance laws

def test_nearest_normalised():
    total, _ = integrate.quad(pdf_nearest, 0, np.inf, args=(LAM,), epsabs=1e-12, epsrel=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


@given(st.floats(0.5, 150.0), st.integers(2, 6))
def test_nth_normalised(r1, n):
    total, _ = integrate.quad(pdf_nth_given_nearest, r1, np.inf, args=(r1, n, LAM),
                              epsabs=1e-12, epsrel=1e-10, limit=200)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_nth_zero_below_r1():
    assert pdf_nth_given_nearest(10.0, 20.0, 2, LAM) == 0.0
    with pytest.raises(ValueError):
        pdf_nth_given_nearest(30.0, 20.0, 1, LAM)


def test_beta_uniform():
    assert pdf_beta() == pytest.approx(1 / math.pi)
    assert pdf_beta(np.array([0.0, 1.0, math.pi]))[1] == pytest.approx(1 / math.pi)
    assert pdf_beta(4.0) == 0.0


def _conditional_cdf(rn, r1, n):
    """CDF of the n-th distance given r1, by Gauss-Legendre on the density."""
    x, w = np.polynomial.legendre.leggauss(64)
    half = (rn - r1) / 2
    nodes = r1[:, None] + half[:, None] * (x[None, :] + 1)
    dens = np.array([pdf_nth_given_nearest(row, a, n, LAM) for row, a in zip(nodes, r1)])
    return (dens * w).sum(axis=1) * half


@pytest.mark.parametrize("n", [2, 3, 4])
def test_nth_nearest_ks_against_simulation(n):
    rng = np.random.default_rng(100 + n)
    region = Disk(300.0)
    r1 = np.empty(100_000)
    rn = np.empty(100_000)
    for i in range(r1.size):
        pts = sample_ppp(LAM, region, rng).points
        d = np.sort(np.hypot(pts[:, 0], pts[:, 1]))
        if d.size < n:       # probability ~1e-20 at this size; keep the draw valid
            d = np.append(d, [np.inf] * (n - d.size))
        r1[i], rn[i] = d[0], d[n - 1]
    ok = np.isfinite(rn)
    u = _conditional_cdf(rn[ok], r1[ok], n)
    assert stats.kstest(u, "uniform").pvalue > KS_ALPHA


# ------------------------------------------------------------ resolution cells

def test_monostatic_cell_area():
    # c theta r / (2 W) with c = 3e8: 3e8 * (pi/6) * 20 / 416e6
    assert cell_monostatic(20.0, THETA, BW).area == pytest.approx(7.552, abs=5e-4)
    assert cell_monostatic(40.0, THETA, BW).area == pytest.approx(2 * cell_monostatic(20.0, THETA, BW).area)
    assert cell_monostatic(20.0, THETA / 2, BW).area == pytest.approx(cell_monostatic(20.0, THETA, BW).area / 2)


def test_bistatic_cell_area():
    # twice the monostatic value at beta = pi/2
    assert cell_bistatic(20.0, THETA, BW, math.pi / 2).area == pytest.approx(15.104, abs=5e-4)
    with pytest.raises(ValueError):
        cell_bistatic(20.0, THETA, BW, math.pi)


@given(st.floats(1.0, 500.0))
def test_bistatic_reduces_to_monostatic(r):
    assert cell_bistatic(r, THETA, BW, 0.0).area == cell_monostatic(r, THETA, BW).area


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_bistatic_area_increasing_in_beta(b1, b2):
    lo, hi = sorted((b1, b2))
    if hi - lo < 1e-9:   # below the resolution of cos^2 in double precision
        return
    assert cell_bistatic(30.0, THETA, BW, hi).area > cell_bistatic(30.0, THETA, BW, lo).area


# ------------------------------------------------------------ angles, backhaul

def test_bistatic_angle():
    assert bistatic_angle((1, 0), (0, 0), (1, 0)) == 0.0
    assert bistatic_angle((1, 0), (0, 0), (-1, 0)) == pytest.approx(math.pi)
    assert bistatic_angle((0, 2), (0, 0), (3, 0)) == pytest.approx(math.pi / 2)


def test_sensing_geometry_checks():
    SensingGeometry(10.0, 20.0, 1.0)
    with pytest.raises(ValueError):
        SensingGeometry(30.0, 20.0, 1.0)
    with pytest.raises(ValueError):
        SensingGeometry(10.0, 20.0, 4.0)


def test_backhaul():
    assert backhaul_overhead(6, 32) == 192
    assert backhaul_overhead(1, 32) == 32
    assert backhaul_overhead(12, 32) == 2 * backhaul_overhead(6, 32)
    with pytest.raises(ValueError):
        backhaul_overhead(0, 32)
