import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isacnet import SystemConfig, kernels
from isacnet.kernels import numpy_impl, rng as R
from isacnet.simulator import SimOptions, pack_params, simulate
from isacnet.kernels import mc_layout as L

numba = pytest.importorskip("numba")
from isacnet.kernels import mc_numba, numba_impl  # noqa: E402


# ------------------------------------------------------------ counter RNG

@given(st.integers(0, 2 ** 63), st.integers(0, 10 ** 9), st.integers(1, 19),
       st.integers(0, 2 ** 40))
def test_uniform_identical_across_implementations(seed, trial, stream, idx):
    key = R.trial_key(R.seed_key(seed), trial)
    py = R.uniform(key, stream, idx)
    vec = R.uniforms(key, stream, np.array([idx]))[0]
    nb = mc_numba.uniform(np.uint64(key), stream, idx)
    assert py == vec == nb
    assert 0.0 < py < 1.0


@given(st.integers(0, 2 ** 63), st.integers(0, 10 ** 6))
def test_trial_key_identical(seed, trial):
    sk = R.seed_key(seed)
    assert R.trial_key(sk, trial, 3) == int(mc_numba.trial_key(np.uint64(sk), trial, 3))


@given(st.floats(0.0, 400.0), st.integers(0, 2 ** 32))
def test_poisson_identical(mean, key):
    assert R.poisson(mean, key, R.S_COUNT) == mc_numba.poisson(mean, np.uint64(key), R.S_COUNT)


def test_uniforms_look_uniform():
    from scipy import stats
    u = R.uniforms(R.seed_key(1), R.S_POS, np.arange(100_000))
    assert stats.kstest(u, "uniform").pvalue > 0.01


def test_poisson_moments():
    key = R.seed_key(9)
    for mean in (3.0, 55.0):
        x = np.array([R.poisson(mean, R.trial_key(key, i), 1) for i in range(20_000)])
        assert abs(x.mean() - mean) < 4 * np.sqrt(mean / x.size)
        assert abs(x.var() / mean - 1) < 0.06


# ------------------------------------------------------------ quadrature kernels

def _direct_inputs(rng):
    n_r = 200
    r = np.sort(rng.uniform(1, 3000, n_r))
    return (rng.exponential(1e3, 17), r, rng.random(n_r), np.array([0, 40, 120, 199]),
            rng.random(n_r), rng.random(n_r), r ** -2.0, 0.1 * r ** -4.0, 3.0, 2.0)


def test_direct_suffix_backends_agree(rng):
    args = _direct_inputs(rng)
    a = numpy_impl.direct_suffix(*args)
    b = numba_impl.direct_suffix(*args)
    assert np.allclose(a, b, rtol=1e-12, atol=0)


def test_clutter_reflection_backends_agree(rng):
    kappa = rng.exponential(1.0, (5, 3))
    psi = rng.random((3, 4, 60))
    base = rng.random(60)
    w = rng.random(60)
    starts = np.array([0, 10, 30])
    e1w = rng.random((3, 4, 3))
    a = numpy_impl.clutter_reflection_sum(kappa, psi, base, w, starts, e1w, 0.7)
    b = numba_impl.clutter_reflection_sum(kappa, psi, base, w, starts, e1w, 0.7)
    assert np.allclose(a, b, rtol=1e-12)


def test_backend_switch():
    assert set(kernels.available()) == {"numpy", "numba"}
    with kernels.using("numpy"):
        assert kernels.backend() == "numpy"
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_env_flag_selects_numpy():
    env = dict(os.environ, ISACNET_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", "from isacnet import kernels; print(kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env = dict(os.environ, ISACNET_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from isacnet import kernels; print(kernels.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


# ------------------------------------------------------------ Monte Carlo kernel

@pytest.mark.parametrize("r1, links, tx_direct", [(20.0, 4, False), (None, 6, True)])
def test_trial_kernel_backends_agree(r1, links, tx_direct):
    cfg = SystemConfig(lambda_cl=0.03, weibull_k=1.5)
    opts = SimOptions(tx_direct=tx_direct)
    with kernels.using("numba"):
        a = simulate(cfg, 300, 11, links, r1, opts)
    with kernels.using("numpy"):
        b = simulate(cfg, 300, 11, links, r1, opts)
    assert np.allclose(a.comps, b.comps, rtol=1e-11, atol=0)
    assert np.allclose(a.comm, b.comm, rtol=1e-11, atol=0)
    assert np.array_equal(a.r1, b.r1) or np.allclose(a.r1, b.r1, rtol=1e-14)
    assert np.array_equal(a.rerolls, b.rerolls)


def test_pack_params_layout(cfg):
    p = pack_params(cfg, 3, 20.0)
    assert p.shape == (L.N_PARAMS,)
    assert p[L.P_R1] == 20.0 and p[L.P_NLINKS] == 3 and p[L.P_M] == 12
