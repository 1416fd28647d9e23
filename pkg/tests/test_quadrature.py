import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from isacnet.quadrature import (ACCURATE, FAST, QuadratureSpec, adaptive_gk,
                                composite_gauss_legendre, exp_weight_rule, gamma_weight_rule,
                                gauss_legendre, graded_exp_rule, radial_grid)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(axis_nodes=10)


@given(st.integers(1, 12))
def test_gauss_legendre_exact_for_polynomials(n):
    x, w = gauss_legendre(-1.0, 2.0, n)
    deg = 2 * n - 1
    exact = (2.0 ** (deg + 1) - (-1.0) ** (deg + 1)) / (deg + 1)
    assert w @ x ** deg == pytest.approx(exact, rel=1e-12)


def test_composite_rule():
    x, w = composite_gauss_legendre([0.0, 1.0, 3.0, 10.0], 6)
    assert w @ np.sin(x) == pytest.approx(1 - math.cos(10.0), abs=1e-4)


@pytest.mark.parametrize("f, a, b, exact", [
    (np.exp, 0.0, 1.0, math.e - 1),
    (lambda x: np.exp(-x ** 2), 0.0, math.inf, math.sqrt(math.pi) / 2),
    (lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf, math.pi / 2),
])
def test_adaptive_gk_known_integrals(f, a, b, exact):
    res = adaptive_gk(f, a, b, ACCURATE)
    assert res.value == pytest.approx(exact, rel=1e-6)


def test_adaptive_gk_endpoint_singularity():
    # bisection converges slowly here; the error estimate must still be honest
    res = adaptive_gk(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, ACCURATE)
    assert res.value == pytest.approx(2.0, rel=1e-5)
    assert abs(res.value - 2.0) <= 2 * res.error


def test_adaptive_gk_vector_valued():
    k = np.array([1.0, 2.0, 3.0])
    res = adaptive_gk(lambda x: np.exp(-k[:, None] * x[None, :]), 0.0, math.inf)
    assert np.allclose(res.value, 1.0 / k, rtol=1e-7)
    assert res.converged


def test_radial_grid_suffix_sums():
    limits = np.array([5.0, 20.0, 37.5, 200.0])
    g = radial_grid(limits, ACCURATE, far=5e4)
    f = lambda r: np.exp(-0.0149 * r) * r ** -1.0
    got = g.suffix(f(g.nodes))
    for lim, v in zip(limits, got):
        ref, _ = integrate.quad(f, lim, np.inf, epsabs=1e-14, epsrel=1e-11, limit=400)
        assert v == pytest.approx(ref, rel=1e-7)


def test_radial_grid_power_tail():
    g = radial_grid([10.0], FAST, far=1e5)
    assert g.suffix(g.nodes ** -3.0)[0] == pytest.approx(0.5 * 10.0 ** -2, rel=1e-6)


def test_radial_grid_unsorted():
    with pytest.raises(ValueError):
        radial_grid([3.0, 1.0])


@pytest.mark.parametrize("rule", [exp_weight_rule, graded_exp_rule])
def test_exp_weight_rules(rule):
    u, w = rule(48, ACCURATE)
    assert w.sum() == pytest.approx(1.0, abs=1e-6)
    assert w @ u ** 2 == pytest.approx(2.0, rel=1e-6)


def test_gamma_weight_rows():
    u, w = gamma_weight_rule(5, 64, ACCURATE)
    assert np.allclose(w.sum(axis=1), 1.0, atol=1e-8)
    # mean of Gamma(k) is k
    assert np.allclose(w @ u, np.arange(1, 6), rtol=1e-8)
    assert w[2] @ np.exp(-u) == pytest.approx(special.gamma(3) / 2 ** 3 / special.gamma(3), rel=1e-7)
