"""Samplers of the point-process constructions behind the Laplace transforms.

The exact-geometry simulator answers "what happens in the network". These
samplers answer a narrower question: does the quadrature evaluate the
transform of the stated construction (protection radius, thinned PPP,
shared interference angle) correctly? They use numpy's Generator and share
no code with the analytic engine.
"""
from __future__ import annotations

import math

import numpy as np

from ..sysconfig import SPEED_OF_LIGHT, SystemConfig, derive


def _ppp_annulus(rng, n_trials, density, r_lo, r_hi):
    """Points of independent PPPs on annuli r_lo[i] < r < r_hi, one per trial.

    Returns (trial index, radius) arrays.
    """
    r_lo = np.broadcast_to(np.asarray(r_lo, float), (n_trials,))
    counts = rng.poisson(density * math.pi * np.maximum(r_hi ** 2 - r_lo ** 2, 0.0))
    owner = np.repeat(np.arange(n_trials), counts)
    lo2 = r_lo[owner] ** 2
    r = np.sqrt(lo2 + (r_hi ** 2 - lo2) * rng.random(owner.size))
    return owner, r


def _gamma_unit(rng, m, size):
    return rng.gamma(m, 1.0 / m, size)


def _chunked(fn, n_trials, chunk=5000):
    return np.concatenate([fn(min(chunk, n_trials - i)) for i in range(0, n_trials, chunk)])


def direct_interference(cfg: SystemConfig, n_trials: int, rng: np.random.Generator,
                        r_far: float = 2000.0) -> np.ndarray:
    """Aggregate direct interference at a sensing receiver.

    Protection radius from the nearest-neighbour law at the full BS density;
    interferers form a PPP of density lambda/M^2 beyond it with independent
    LoS states and Nakagami fading.
    """
    dp = derive(cfg)
    base = dp.p_comm * cfg.g_max ** 2

    def run(n):
        r_d = np.sqrt(rng.exponential(size=n) / (math.pi * cfg.lambda_bs))
        owner, r = _ppp_annulus(rng, n, dp.lambda_direct, r_d, r_far)
        los = rng.random(r.size) < np.exp(-cfg.gamma_blockage * r)
        p = np.where(los,
                     base * cfg.c_los * r ** -cfg.eta_los * _gamma_unit(rng, cfg.m_los, r.size),
                     base * cfg.c_nlos * r ** -cfg.eta_nlos * _gamma_unit(rng, cfg.m_nlos, r.size))
        return np.bincount(owner, weights=p, minlength=n)
    return _chunked(run, n_trials)


def inter_clutter(r1: float, cfg: SystemConfig, n_trials: int, rng: np.random.Generator,
                  cell_area: float | None = None, r_far: float = 1500.0) -> np.ndarray:
    """Normalised inter-clutter sum L_IC = sum_v cos(b/2) r_v^-eta (sigma_v + sum_q sigma_q).

    R_IC follows the second-nearest law given r1, the angle b is uniform on
    [0, pi] and shared by all interferers of a trial, interferers are LoS
    with density lambda/M, and each illuminates its own Poisson set of
    scatterers in a cell of area `cell_area` (monostatic cell by default).
    """
    if cell_area is None:
        cell_area = SPEED_OF_LIGHT * (2.0 * math.pi / cfg.m_beams) * r1 / (2.0 * cfg.bandwidth_hz)
    k = cfg.weibull_k
    scale = cfg.sigma_avg_clutter / math.gamma(1.0 + 1.0 / k)

    def run(n):
        r_ic = np.sqrt(r1 ** 2 + rng.exponential(size=n) / (math.pi * cfg.lambda_bs))
        cb = np.cos(0.5 * math.pi * rng.random(n))
        owner, r = _ppp_annulus(rng, n, cfg.lambda_bs / cfg.m_beams, r_ic, r_far)
        keep = rng.random(r.size) < np.exp(-cfg.gamma_blockage * r)
        owner, r = owner[keep], r[keep]
        sig_t = rng.exponential(cfg.sigma_avg_target, r.size)
        n_cl = rng.poisson(cfg.lambda_cl * cell_area, r.size)
        sig_cl = np.bincount(np.repeat(np.arange(r.size), n_cl),
                             weights=scale * rng.weibull(k, n_cl.sum()), minlength=r.size)
        return np.bincount(owner, weights=cb[owner] * r ** -cfg.eta_los * (sig_t + sig_cl),
                           minlength=n)
    return _chunked(run, n_trials)


def comm_interference(r_o: float, cfg: SystemConfig, n_trials: int, rng: np.random.Generator,
                      los: bool = True, r_far: float = 1000.0) -> np.ndarray:
    """Aggregate LoS (or NLoS) downlink interference beyond r_o.

    Interferers form a PPP of density lambda beyond r_o; each sees the user
    at a uniform angle off its boresight and radiates G(theta) inside the
    main lobe, nothing outside.
    """
    dp = derive(cfg)
    lobe = math.pi / cfg.d_spread

    def run(n):
        # only interferers whose main lobe covers the user (probability 1/d)
        owner, r = _ppp_annulus(rng, n, cfg.lambda_bs / cfg.d_spread, r_o, r_far)
        theta = rng.uniform(-lobe, lobe, r.size)
        g = cfg.g_max * np.cos(cfg.d_spread * theta / 2.0) ** 2
        is_los = rng.random(r.size) < np.exp(-cfg.gamma_blockage * r)
        if los:
            c, eta, m = cfg.c_los, cfg.eta_los, cfg.m_los
        else:
            c, eta, m = cfg.c_nlos, cfg.eta_nlos, cfg.m_nlos
        p = dp.p_comm * g * c * r ** -eta * _gamma_unit(rng, m, r.size)
        p = np.where(is_los == los, p, 0.0)
        return np.bincount(owner, weights=p, minlength=n)
    return _chunked(run, n_trials, chunk=2000)


def laplace_estimate(samples, s: float) -> tuple[float, float]:
    """Mean of exp(-s X) and its standard error."""
    e = np.exp(-s * np.asarray(samples))
    return float(e.mean()), float(e.std(ddof=1) / math.sqrt(e.size))
