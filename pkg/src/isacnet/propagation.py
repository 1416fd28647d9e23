"""Pointwise physical models: beam pattern, misalignment, blockage, path loss,
fading and radar cross-section laws. Each law has an evaluator and a sampler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .sysconfig import SystemConfig


@dataclass(frozen=True)
class BeamPattern:
    g_max: float
    d_spread: int

    @property
    def edge(self) -> float:
        return math.pi / self.d_spread

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "BeamPattern":
        return cls(cfg.g_max, cfg.d_spread)


@dataclass(frozen=True)
class MisalignmentLaw:
    variance: float
    theta_max: float
    pattern: BeamPattern

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "MisalignmentLaw":
        return cls(cfg.misalign_var, cfg.misalign_max, BeamPattern.from_config(cfg))

    @property
    def _scale(self) -> float:
        return math.sqrt(2.0 * self.variance)

    @property
    def _norm(self) -> float:
        return math.erf(self.theta_max / self._scale)

    @property
    def support(self) -> tuple[float, float]:
        p = self.pattern
        if self.theta_max < p.edge:
            return p.g_max * math.cos(p.d_spread * self.theta_max / 2) ** 2, p.g_max
        return 0.0, p.g_max

    @property
    def zero_gain_mass(self) -> float:
        """Probability that the misalignment falls outside the main lobe."""
        edge = self.pattern.edge
        if self.theta_max <= edge:
            return 0.0
        return 1.0 - math.erf(edge / self._scale) / self._norm


@dataclass(frozen=True)
class RcsModel:
    sigma_avg_target: float
    sigma_avg_clutter: float
    weibull_k: float = 1.0

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "RcsModel":
        return cls(cfg.sigma_avg_target, cfg.sigma_avg_clutter, cfg.weibull_k)


def gain(pattern: BeamPattern, theta):
    """Cosine main-lobe gain, zero outside |theta| <= pi/d."""
    theta = np.abs(np.asarray(theta, dtype=float))
    g = pattern.g_max * np.cos(pattern.d_spread * theta / 2.0) ** 2
    return np.where(theta <= pattern.edge, g, 0.0)


def p_los(gamma: float, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be non-negative")
    return np.exp(-gamma * r)


def pathloss(r, los, cfg: SystemConfig):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("path loss is singular at r <= 0")
    return np.where(los, cfg.c_los * r ** -cfg.eta_los, cfg.c_nlos * r ** -cfg.eta_nlos)


def _theta_of_gain(law: MisalignmentLaw, g):
    p = law.pattern
    ratio = np.clip(np.asarray(g, dtype=float) / p.g_max, 0.0, 1.0)
    return 2.0 / p.d_spread * np.arccos(np.sqrt(ratio))


def misaligned_gain_pdf(law: MisalignmentLaw, g):
    """Density of the continuous part of the misaligned gain.

    When theta_max exceeds the lobe edge, the remaining mass
    ``law.zero_gain_mass`` sits in an atom at zero gain.
    """
    p = law.pattern
    g = np.asarray(g, dtype=float)
    lo, hi = law.support
    inside = (g > lo) & (g < hi)
    theta = _theta_of_gain(law, np.where(inside, g, 0.5 * (lo + hi)))
    ratio = np.where(inside, g, 0.5 * (lo + hi)) / p.g_max
    # |dG/dtheta| = G_m d sqrt(x(1-x)) with x = g/G_m, two symmetric roots
    jac = p.g_max * p.d_spread * np.sqrt(ratio * (1.0 - ratio))
    f_theta = np.exp(-theta ** 2 / (2.0 * law.variance)) / (
        math.sqrt(2.0 * math.pi * law.variance) * law._norm)
    return np.where(inside, 2.0 * f_theta / jac, 0.0)


def misaligned_gain_cdf(law: MisalignmentLaw, g):
    g = np.asarray(g, dtype=float)
    lo, hi = law.support
    theta = np.minimum(_theta_of_gain(law, g), law.theta_max)
    cdf = 1.0 - special.erf(theta / law._scale) / law._norm
    cdf = np.where(g < lo, 0.0, cdf)
    return np.where(g >= hi, 1.0, cdf)


def sample_truncated_gaussian(variance: float, bound: float, rng: np.random.Generator, size=None):
    """Zero-mean Gaussian conditioned on |x| <= bound, by rejection."""
    n = 1 if size is None else int(np.prod(size))
    out = np.empty(n)
    filled = 0
    sd = math.sqrt(variance)
    accept = math.erf(bound / (sd * math.sqrt(2.0)))
    if accept <= 0.0:
        raise ValueError("truncation interval has no mass")
    while filled < n:
        want = int(1.2 * (n - filled) / accept) + 16
        draw = rng.normal(0.0, sd, size=min(want, 1 << 22))
        draw = draw[np.abs(draw) <= bound][: n - filled]
        out[filled:filled + draw.size] = draw
        filled += draw.size
    return out[0] if size is None else out.reshape(size)


def sample_misaligned_gain(law: MisalignmentLaw, rng: np.random.Generator, size=None):
    theta = sample_truncated_gaussian(law.variance, law.theta_max, rng, size)
    g = gain(law.pattern, theta)
    return float(g) if size is None else g


def sample_nakagami_power(m: int, rng: np.random.Generator, size=None):
    """Unit-mean Gamma(m, 1/m) power gain."""
    if m < 1 or int(m) != m:
        raise ValueError("Nakagami shape must be a positive integer")
    return rng.gamma(m, 1.0 / m, size=size)


def sample_rcs_target(model: RcsModel, rng: np.random.Generator, size=None):
    return rng.exponential(model.sigma_avg_target, size=size)


def sample_rcs_clutter(model: RcsModel, rng: np.random.Generator, size=None):
    return model.sigma_avg_clutter * rng.weibull(model.weibull_k, size=size)


def bistatic_rcs(sigma_mono, beta):
    beta = np.asarray(beta, dtype=float)
    if np.any((beta < 0) | (beta > math.pi)):
        raise ValueError("bistatic angle must lie in [0, pi]")
    # cos(pi/2) is not exactly zero in floating point
    return np.asarray(sigma_mono, dtype=float) * np.where(beta == math.pi, 0.0, np.cos(beta / 2.0))
