"""Sensing coverage: monostatic and bistatic link coverage, selection-combining
fusion, averaging over the target distance, and the sensing rate."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..quadrature import (ACCURATE, FAST, QuadratureSpec, exp_weight_rule, gamma_weight_rule,
                          gauss_legendre, graded_exp_rule)
from ..sysconfig import SystemConfig, derive
from .laplace import (bistatic_area, inter_clutter_core, lt_direct, lt_intra_clutter_area,
                      monostatic_area)

MODES = ("dual", "mono", "multistatic")


@dataclass(frozen=True)
class CoverageResult:
    value: float
    est_error: float = float("nan")
    breakdown: dict = field(default_factory=dict)


def _radar_scale(cfg: SystemConfig) -> float:
    """(4 pi)^3 / (P_s G_m^2 lambda^2 sigma_t): converts R^2eta * phi to watts^-1."""
    dp = derive(cfg)
    return (4.0 * math.pi) ** 3 / (dp.p_sense * cfg.g_max ** 2 * dp.wavelength_m ** 2
                                   * cfg.sigma_avg_target)


def mono_factors(r1: float, phi_s: float, cfg: SystemConfig,
                 spec: QuadratureSpec = ACCURATE) -> dict:
    """The six multiplicative factors of the monostatic coverage."""
    if r1 <= 0 or phi_s <= 0:
        raise ValueError("need r1 > 0 and phi_s > 0")
    dp = derive(cfg)
    area = monostatic_area(r1, cfg)
    s_ic = phi_s * r1 ** cfg.eta_los / cfg.sigma_avg_target
    s_d = phi_s * _radar_scale(cfg) * r1 ** (2.0 * cfg.eta_los)
    return {
        "intra_clutter": float(lt_intra_clutter_area(phi_s, area, cfg)),
        "inter_clutter": float(inter_clutter_core([s_ic], area, r1, cfg, spec).ravel()[0]),
        "noise": math.exp(-s_d * dp.noise_w),
        "direct": float(lt_direct(s_d, cfg, spec)),
        "self_interference": math.exp(-s_d * dp.p_comm * cfg.zeta_sic),
    }


def coverage_mono(r1: float, phi_s: float, cfg: SystemConfig,
                  spec: QuadratureSpec = ACCURATE, error_estimate: bool = False) -> CoverageResult:
    factors = mono_factors(r1, phi_s, cfg, spec)
    value = float(np.prod(list(factors.values())))
    err = float("nan")
    if error_estimate:
        err = abs(value - float(np.prod(list(mono_factors(r1, phi_s, cfg, FAST).values()))))
    return CoverageResult(value, err, factors)


def bistatic_coverages(r1: float, phi_s: float, n_max: int, cfg: SystemConfig,
                       spec: QuadratureSpec = ACCURATE) -> np.ndarray:
    """Bistatic coverage at the n-th nearest BS for n = 2..n_max (one array).

    The integrand over (R_n, beta) does not depend on n; only the
    conditional distance law does, so all orders share one evaluation.
    """
    if n_max < 2:
        return np.zeros(0)
    if r1 <= 0 or phi_s <= 0:
        raise ValueError("need r1 > 0 and phi_s > 0")
    if cfg.m_beams == 1:
        return np.zeros(n_max - 1)
    dp = derive(cfg)
    v, w_rows = gamma_weight_rule(n_max - 1, 2 * spec.axis_nodes, spec)
    rn = np.sqrt(r1 ** 2 + v / (math.pi * cfg.lambda_bs))
    beta, w_beta = gauss_legendre(0.0, math.pi, spec.axis_nodes)
    cb = np.cos(beta / 2.0)

    area = bistatic_area(rn[:, None], beta[None, :], cfg)
    s_ic = phi_s * r1 ** cfg.eta_los / (cfg.sigma_avg_target * cb)
    s_d = (phi_s * _radar_scale(cfg) * r1 ** cfg.eta_los
           * rn[:, None] ** cfg.eta_los / cb[None, :])
    integrand = (np.exp(-cfg.gamma_blockage * rn)[:, None] * (cfg.m_beams - 1) / cfg.m_beams
                 * lt_intra_clutter_area(phi_s, area, cfg)
                 * inter_clutter_core(s_ic, area, r1, cfg, spec)
                 * np.exp(-s_d * dp.noise_w)
                 * lt_direct(s_d, cfg, spec))
    inner = integrand @ (w_beta / math.pi)
    return np.clip(w_rows @ inner, 0.0, 1.0)


def coverage_bistatic(n: int, r1: float, phi_s: float, cfg: SystemConfig,
                      spec: QuadratureSpec = ACCURATE, error_estimate: bool = False) -> CoverageResult:
    if n < 2:
        raise ValueError("bistatic order n must be >= 2")
    value = float(bistatic_coverages(r1, phi_s, n, cfg, spec)[-1])
    err = float("nan")
    if error_estimate:
        err = abs(value - float(bistatic_coverages(r1, phi_s, n, cfg, FAST)[-1]))
    return CoverageResult(value, err)


def fuse(p_mono: float, p_bistatic) -> float:
    """Selection combining over independent links: 1 - prod(1 - P)."""
    miss = (1.0 - p_mono) * np.prod(1.0 - np.asarray(p_bistatic, dtype=float))
    return float(1.0 - miss)


def _receivers(n_coop: int, mode: str) -> int:
    """Highest BS order n that receives echoes."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if n_coop < 1:
        raise ValueError("n_coop must be >= 1")
    if mode == "mono":
        return 1
    # multistatic-only: the serving BS transmits and n_coop other BSs receive
    return n_coop + 1 if mode == "multistatic" else n_coop


def networked_from_links(p_mono: float, p_bi, n_coop: int, mode: str) -> float:
    n_hi = _receivers(n_coop, mode)
    p_bi = np.asarray(p_bi)[: max(0, n_hi - 1)]
    if mode == "mono":
        return p_mono
    if mode == "multistatic":
        return fuse(0.0, p_bi)
    return fuse(p_mono, p_bi)


def coverage_networked(r1: float, phi_s: float, n_coop: int, cfg: SystemConfig,
                       spec: QuadratureSpec = ACCURATE, mode: str = "dual") -> float:
    """Networked coverage for a target at distance r1.

    mode 'dual' fuses the monostatic link with bistatic links n = 2..N;
    'mono' is the monostatic link alone; 'multistatic' disables the
    monostatic link and fuses N bistatic receivers n = 2..N+1.
    """
    n_hi = _receivers(n_coop, mode)
    p_m = 0.0 if mode == "multistatic" else coverage_mono(r1, phi_s, cfg, spec).value
    p_b = bistatic_coverages(r1, phi_s, n_hi, cfg, spec) if n_hi >= 2 else []
    return networked_from_links(p_m, p_b, n_coop, mode)


def _r1_rule(cfg: SystemConfig, spec: QuadratureSpec):
    u, w = exp_weight_rule(spec.axis_nodes, spec)
    return np.sqrt(u / (math.pi * cfg.lambda_bs)), w


def avg_coverage_networked(phi_s: float, n_coop: int, cfg: SystemConfig,
                           spec: QuadratureSpec = ACCURATE, mode: str = "dual") -> float:
    """Networked coverage averaged over the nearest-BS distance law."""
    r1, w = _r1_rule(cfg, spec)
    vals = [coverage_networked(float(r), phi_s, n_coop, cfg, spec, mode) for r in r1]
    return float(np.clip(np.dot(w, vals), 0.0, 1.0))


@dataclass(frozen=True)
class RateResult:
    value: float
    est_error: float
    t_max: float


def integrate_rate(coverage_of_t, spec: QuadratureSpec, floor: float = 1e-4,
                   panel: float = 2.0, t_cap: float = 60.0) -> tuple[float, float, float]:
    """int_0^inf P(e^t - 1) dt by Gauss-Legendre panels, stopping after the
    first panel whose last node drops below `floor`.

    Returns (integral, truncation error estimate, truncation point).
    """
    order = max(4, spec.t_nodes // 8)
    total, t0 = 0.0, 0.0
    last = 1.0
    while t0 < t_cap:
        t, w = gauss_legendre(t0, t0 + panel, order)
        vals = np.asarray([coverage_of_t(x) for x in t])
        total += float(w @ vals)
        t0 += panel
        last = float(vals[-1])
        if last < floor:
            break
    # coverage tails decay at least like exp(-t/2) in these models
    return total, 2.0 * last, t0


def rate_sensing_at(r1: float, n_coop: int, cfg: SystemConfig, spec: QuadratureSpec = FAST,
                    mode: str = "dual") -> tuple[float, float, float]:
    """int_0^inf P_net(r1, e^t - 1) dt for one target distance."""
    return integrate_rate(
        lambda t: coverage_networked(r1, math.expm1(t), n_coop, cfg, spec, mode), spec)


def rate_sensing(n_coop: int, cfg: SystemConfig, spec: QuadratureSpec = FAST,
                 mode: str = "dual") -> RateResult:
    """Average networked sensing rate M * E_R1[int P_net(e^t - 1) dt], nats/s/Hz."""
    u, w = graded_exp_rule(2 * spec.axis_nodes, spec)
    r1 = np.sqrt(u / (math.pi * cfg.lambda_bs))
    parts = [rate_sensing_at(float(r), n_coop, cfg, spec, mode) for r in r1]
    value = cfg.m_beams * float(np.dot(w, [p[0] for p in parts]))
    err = cfg.m_beams * float(np.dot(w, [p[1] for p in parts]))
    return RateResult(value, err, max(p[2] for p in parts))
