"""Downlink communication coverage and rate under beam misalignment."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .. import kernels
from ..quadrature import ACCURATE, FAST, QuadratureSpec, exp_weight_rule, gauss_legendre, radial_grid
from ..sysconfig import SystemConfig, derive
from .laplace import far_radius
from .sensing import RateResult, integrate_rate


def alzer_k(m: int) -> float:
    """k = m (m!)^(-1/m) of the Gamma tail bound."""
    return m * math.factorial(m) ** (-1.0 / m)


def _interferer_angles(cfg: SystemConfig, spec: QuadratureSpec):
    """Nodes/weights for int_{-pi/d}^{pi/d} d(theta), folded onto [0, pi/d]."""
    th, w = gauss_legendre(0.0, math.pi / cfg.d_spread, spec.axis_nodes)
    g = cfg.g_max * np.cos(cfg.d_spread * th / 2.0) ** 2
    return g, 2.0 * w


def _misalignment_rule(cfg: SystemConfig, spec: QuadratureSpec):
    """Gain nodes and probabilities for the continuous part of the misaligned
    gain law, written in the angle variable (G = G_m cos^2(d theta / 2))."""
    top = min(cfg.misalign_max, math.pi / cfg.d_spread)
    th, w = gauss_legendre(0.0, top, spec.axis_nodes)
    a2 = cfg.misalign_var
    norm = math.erf(cfg.misalign_max / math.sqrt(2.0 * a2))
    dens = 2.0 * np.exp(-th ** 2 / (2.0 * a2)) / (math.sqrt(2.0 * math.pi * a2) * norm)
    return cfg.g_max * np.cos(cfg.d_spread * th / 2.0) ** 2, w * dens


@lru_cache(maxsize=32)
def _comm_setup(cfg: SystemConfig, spec: QuadratureSpec):
    u, w_ro = exp_weight_rule(spec.axis_nodes, spec)
    r_o = np.sqrt(u / (math.pi * cfg.lambda_bs))
    grid = radial_grid(r_o, spec, far=far_radius(cfg))
    r = grid.nodes
    plos = np.exp(-cfg.gamma_blockage * r)
    kl = r ** -cfg.eta_los / cfg.m_los
    kn = (cfg.c_nlos / cfg.c_los) * r ** -cfg.eta_nlos / cfg.m_nlos
    return r_o, w_ro, grid, plos * r, (1.0 - plos) * r, kl, kn


def _comm_lt_exponent(z, k_idx, cfg: SystemConfig, spec: QuadratureSpec):
    """lambda_BS * int dtheta_i int_{R_o[k]}^inf (...) r dr for normalised
    arguments z (any shape) and lower-limit indices k_idx (same shape).

    z multiplies G(theta_i) r^-eta / m inside the Nakagami kernels; the NLoS
    kernel carries the extra factor C_N/C_L.
    """
    r_o, w_ro, grid, wl, wn, kl, kn = _comm_setup(cfg, spec)
    g_i, w_i = _interferer_angles(cfg, spec)
    zg = (np.asarray(z)[..., None] * g_i).ravel()
    f = kernels.direct_suffix(zg, grid.nodes, grid.weights, grid.starts, wl, wn, kl, kn,
                              cfg.m_los, cfg.m_nlos)
    f = f.reshape(np.shape(z) + (len(g_i), len(r_o)))
    k_idx = np.broadcast_to(k_idx, np.shape(z))
    picked = np.take_along_axis(f, k_idx[..., None, None], axis=-1)[..., 0]
    return cfg.lambda_bs * picked @ w_i


def lt_comm(s, r_o: float, cfg: SystemConfig, spec: QuadratureSpec = ACCURATE, los: bool = True):
    """LT of the aggregate LoS (or NLoS) downlink interference beyond r_o."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("LT argument must be non-negative")
    dp = derive(cfg)
    grid = radial_grid([r_o], spec, far=far_radius(cfg))
    r = grid.nodes
    plos = np.exp(-cfg.gamma_blockage * r)
    g_i, w_i = _interferer_angles(cfg, spec)
    zg = (s.ravel()[:, None] * dp.p_comm * g_i).ravel()
    zero = np.zeros_like(r)
    if los:
        f = kernels.direct_suffix(zg, r, grid.weights, grid.starts, plos * r, zero,
                                  cfg.c_los * r ** -cfg.eta_los / cfg.m_los, zero, cfg.m_los, 1)
    else:
        f = kernels.direct_suffix(zg, r, grid.weights, grid.starts, zero, (1.0 - plos) * r,
                                  zero, cfg.c_nlos * r ** -cfg.eta_nlos / cfg.m_nlos, 1, cfg.m_nlos)
    expo = cfg.lambda_bs * f[:, 0].reshape(s.size, len(g_i)) @ w_i
    out = np.exp(-expo)
    return out.reshape(s.shape) if s.ndim else float(out[0])


def lt_comm_los(s, r_o: float, cfg: SystemConfig, spec: QuadratureSpec = ACCURATE):
    return lt_comm(s, r_o, cfg, spec, los=True)


def lt_comm_nlos(s, r_o: float, cfg: SystemConfig, spec: QuadratureSpec = ACCURATE):
    return lt_comm(s, r_o, cfg, spec, los=False)


def coverage_comm(phi_c: float, cfg: SystemConfig, spec: QuadratureSpec = ACCURATE) -> float:
    """Average downlink coverage via the Alzer expansion of the Gamma tail.

    Averages over the serving distance (nearest-BS law) and the continuous
    part of the misaligned gain; the zero-gain atom contributes nothing.
    """
    if phi_c <= 0:
        raise ValueError("threshold must be positive")
    dp = derive(cfg)
    if dp.p_comm <= 0:
        return 0.0
    r_o, w_ro = _comm_setup(cfg, spec)[:2]
    g_c, w_g = _misalignment_rule(cfg, spec)
    m = cfg.m_los
    k_l = alzer_k(m)
    n = np.arange(1, m + 1)
    coef = (-1.0) ** (n + 1) * np.array([math.comb(m, int(i)) for i in n])
    # z[k, n, j] = n k_L phi R_o^eta / G_c
    z = (n[None, :, None] * k_l * phi_c * r_o[:, None, None] ** cfg.eta_los
         / g_c[None, None, :])
    noise = np.exp(-z * dp.noise_w / (dp.p_comm * cfg.c_los))
    k_idx = np.broadcast_to(np.arange(len(r_o))[:, None, None], z.shape)
    lt = np.exp(-_comm_lt_exponent(z, k_idx, cfg, spec))
    per_ro = np.einsum("knj,n,j->k", noise * lt, coef, w_g)
    return float(np.clip(w_ro @ per_ro, 0.0, 1.0))


def rate_comm(cfg: SystemConfig, spec: QuadratureSpec = FAST, duty: float | None = None) -> RateResult:
    """M * duty * int_0^inf P_cov(e^t - 1) dt, nats/s/Hz.

    duty defaults to the share of the slot left after the sensing pulse.
    """
    dp = derive(cfg)
    if duty is None:
        duty = dp.duty_comm
    if dp.p_comm <= 0 or duty <= 0:
        return RateResult(0.0, 0.0, 0.0)
    total, err, t_max = integrate_rate(lambda t: coverage_comm(math.expm1(t), cfg, spec), spec)
    scale = cfg.m_beams * duty
    return RateResult(scale * total, scale * err, t_max)


def comm_only_config(cfg: SystemConfig) -> SystemConfig:
    """All energy of the slot on data: P_c = E_t / T_t, no sensing pulse."""
    dp = derive(cfg)
    if cfg.uses_energy_split:
        e_t = cfg.energy_per_slot if cfg.energy_per_slot is not None else cfg.avg_power_w * dp.t_slot
        avg = e_t / dp.t_slot
    else:
        avg = cfg.p_comm_w * dp.duty_comm + cfg.p_sense_w * dp.t_pulse / dp.t_slot
    return cfg.with_(p_sense_w=1.0, p_comm_w=avg, alpha_split=None,
                     energy_per_slot=None, avg_power_w=None)


def rate_comm_only(cfg: SystemConfig, spec: QuadratureSpec = FAST) -> RateResult:
    """Rate of a communication-only network with the same energy per slot."""
    return rate_comm(comm_only_config(cfg), spec, duty=1.0)
