"""Laplace transforms of the sensing interference terms.

Every transform is evaluated on structured grids: the outer distance laws use
fixed Gauss rules in the variable u = lambda*pi*(R^2 - R_ref^2), and every
inner radial integral from a lower limit R to infinity is read off one
suffix-summed composite rule whose panel edges include all lower limits.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .. import kernels
from ..quadrature import ACCURATE, QuadratureSpec, exp_weight_rule, gauss_legendre, radial_grid
from ..sysconfig import SPEED_OF_LIGHT, SystemConfig, derive

_CHUNK = 2048


def far_radius(cfg: SystemConfig) -> float:
    """Radius beyond which radial integrals switch to the mapped tail panel."""
    if cfg.gamma_blockage > 0:
        return max(3000.0, 40.0 / cfg.gamma_blockage)
    return 1e5


# ---------------------------------------------------------------- clutter law

def _weibull_psi_direct(y: np.ndarray, k: float) -> np.ndarray:
    """E[1 - exp(-y X)] for X ~ Weibull(k, 1), integrated in z = log x."""
    z = np.linspace(math.log(1e-14) / k, math.log(60.0) / k, 1601)
    dz = z[1] - z[0]
    ekz = np.exp(k * z)
    dens = k * ekz * np.exp(-ekz) * dz
    dens[[0, -1]] *= 0.5
    return -np.expm1(-np.outer(y, np.exp(z))) @ dens


@lru_cache(maxsize=16)
def _weibull_psi_spline(k: float):
    logy = np.linspace(-30.0, 30.0, 1201)
    vals = _weibull_psi_direct(np.exp(logy), k)
    return CubicSpline(logy, np.log(vals))


def clutter_psi(y, k: float = 1.0):
    """E[1 - exp(-y X)] for a unit-scale Weibull(k) cross-section X.

    k = 1 is the exponential case y/(1+y); other shapes use a cached spline in
    log-log coordinates of a direct quadrature.
    """
    y = np.asarray(y, dtype=float)
    if k == 1.0:
        return y / (1.0 + y)
    mean = math.gamma(1.0 + 1.0 / k)
    out = np.empty_like(y)
    ly = np.log(np.maximum(y, 1e-300))
    lo, hi = ly < -30.0, ly > 30.0
    mid = ~(lo | hi)
    out[lo] = y[lo] * mean
    out[hi] = 1.0
    out[mid] = np.exp(_weibull_psi_spline(float(k))(ly[mid]))
    return out


# ---------------------------------------------------------------- direct interference

@lru_cache(maxsize=32)
def _direct_setup(cfg: SystemConfig, spec: QuadratureSpec):
    dp = derive(cfg)
    u, w = exp_weight_rule(spec.axis_nodes, spec)
    rd = np.sqrt(u / (math.pi * cfg.lambda_bs))
    grid = radial_grid(rd, spec, far=far_radius(cfg))
    r = grid.nodes
    plos = np.exp(-cfg.gamma_blockage * r)
    base = dp.p_comm * cfg.g_max ** 2
    k_los = base * cfg.c_los * r ** -cfg.eta_los / cfg.m_los
    k_nlos = base * cfg.c_nlos * r ** -cfg.eta_nlos / cfg.m_nlos
    return grid, w, plos * r, (1.0 - plos) * r, k_los, k_nlos, 2.0 * math.pi * dp.lambda_direct


def lt_direct(s, cfg: SystemConfig, spec: QuadratureSpec = ACCURATE):
    """LT of the aggregate direct BS-to-BS interference at a sensing receiver.

    Outer expectation over the protection radius (nearest-neighbour law at
    the full BS intensity); inner LoS/NLoS Nakagami PGFL integrals at the
    doubly thinned intensity lambda_BS/M^2.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("LT argument must be non-negative")
    grid, w, wl, wn, kl, kn, scale = _direct_setup(cfg, spec)
    flat = s.ravel()
    out = np.empty(flat.size)
    for i in range(0, flat.size, _CHUNK):
        part = flat[i:i + _CHUNK]
        f = kernels.direct_suffix(part, grid.nodes, grid.weights, grid.starts,
                                  wl, wn, kl, kn, cfg.m_los, cfg.m_nlos)
        out[i:i + _CHUNK] = np.exp(-scale * f) @ w
    return out.reshape(s.shape) if s.ndim else float(out[0])


# ---------------------------------------------------------------- clutter terms

def lt_intra_clutter_area(phi_s, area, cfg: SystemConfig):
    """exp(-lambda_cl * area * E[1 - exp(-phi sigma_cl / sigma_t)])."""
    ratio = np.asarray(phi_s, dtype=float) * cfg.sigma_avg_clutter / cfg.sigma_avg_target
    return np.exp(-cfg.lambda_cl * np.asarray(area) * clutter_psi(ratio, cfg.weibull_k))


def monostatic_area(r1, cfg: SystemConfig):
    return SPEED_OF_LIGHT * (2.0 * math.pi / cfg.m_beams) * np.asarray(r1) / (2.0 * cfg.bandwidth_hz)


def bistatic_area(rn, beta, cfg: SystemConfig):
    cb = np.cos(np.asarray(beta) / 2.0)
    return monostatic_area(rn, cfg) / cb ** 2


def lt_intra_clutter_mono(phi_s, r1, cfg: SystemConfig):
    return lt_intra_clutter_area(phi_s, monostatic_area(r1, cfg), cfg)


def lt_intra_clutter_bi(phi_s, rn, beta, cfg: SystemConfig):
    beta = np.asarray(beta, dtype=float)
    if np.any((beta < 0) | (beta >= math.pi)):
        raise ValueError("bistatic angle must lie in [0, pi)")
    if np.ndim(beta) == 0 and beta == 0:
        return lt_intra_clutter_area(phi_s, monostatic_area(rn, cfg), cfg)
    return lt_intra_clutter_area(phi_s, bistatic_area(rn, beta, cfg), cfg)


@lru_cache(maxsize=64)
def _inter_setup(r1: float, cfg: SystemConfig, spec: QuadratureSpec):
    u, w_outer = exp_weight_rule(spec.axis_nodes, spec)
    r_ic = np.sqrt(r1 ** 2 + u / (math.pi * cfg.lambda_bs))
    beta_i, w_beta = gauss_legendre(0.0, math.pi, spec.axis_nodes)
    grid = radial_grid(r_ic, spec, far=far_radius(cfg))
    r = grid.nodes
    base = np.exp(-cfg.gamma_blockage * r) * r
    weights = np.outer(w_beta / math.pi, w_outer)  # (J, K)
    return grid, base, np.cos(beta_i / 2.0), weights


def inter_clutter_core(s, area, r1: float, cfg: SystemConfig, spec: QuadratureSpec = ACCURATE):
    """Product of the target-reflection and clutter-reflection LTs.

    ``s`` has shape (B,); ``area`` (resolution cell of the probed target)
    broadcasts to (V, B). Returns shape (V, B). The interferer bistatic angle
    and the interferer-to-target distance are averaged by the outer rules.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    area = np.broadcast_to(np.asarray(area, dtype=float), np.broadcast_shapes(np.shape(area), s.shape))
    area2 = area.reshape(-1, s.size)
    grid, base, cos_bi, weights = _inter_setup(float(r1), cfg, spec)
    r = grid.nodes
    scale = 2.0 * math.pi * cfg.lambda_bs / cfg.m_beams
    x = (s[:, None, None] * cos_bi[None, :, None]) * r[None, None, :] ** -cfg.eta_los  # (B, J, R)
    xt = x * cfg.sigma_avg_target
    f1 = grid.suffix(base * (xt / (1.0 + xt)))  # (B, J, K)
    e1w = np.exp(-scale * f1) * weights
    psi = clutter_psi(x * cfg.sigma_avg_clutter, cfg.weibull_k)
    out = kernels.clutter_reflection_sum(area2 * cfg.lambda_cl, psi, base, grid.weights,
                                         grid.starts, e1w, scale)
    return out.reshape(area.shape)


def lt_inter_clutter_mono(s, r1: float, cfg: SystemConfig, spec: QuadratureSpec = ACCURATE):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("LT argument must be non-negative")
    out = inter_clutter_core(s.ravel(), monostatic_area(r1, cfg), r1, cfg, spec)
    return out.reshape(s.shape) if s.ndim else float(out.ravel()[0])


def lt_inter_clutter_bi(s, r1: float, rn: float, beta: float, cfg: SystemConfig,
                        spec: QuadratureSpec = ACCURATE):
    if not rn >= r1 > 0:
        raise ValueError("need rn >= r1 > 0")
    if not 0 <= beta < math.pi:
        raise ValueError("bistatic angle must lie in [0, pi)")
    s = np.asarray(s, dtype=float)
    area = monostatic_area(rn, cfg) if beta == 0 else bistatic_area(rn, beta, cfg)
    out = inter_clutter_core(s.ravel(), area, r1, cfg, spec)
    return out.reshape(s.shape) if s.ndim else float(out.ravel()[0])
