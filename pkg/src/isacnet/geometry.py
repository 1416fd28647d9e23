"""Point processes, distance and angle laws, resolution cells and fusion
backhaul accounting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .sysconfig import SPEED_OF_LIGHT


@dataclass(frozen=True)
class Square:
    side: float
    center: tuple[float, float] = (0.0, 0.0)

    @property
    def area(self) -> float:
        return self.side ** 2

    def uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        half = self.side / 2.0
        return rng.uniform(-half, half, size=(n, 2)) + np.asarray(self.center)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = np.abs(np.asarray(pts) - np.asarray(self.center))
        return np.all(d <= self.side / 2.0, axis=-1)


@dataclass(frozen=True)
class Disk:
    radius: float
    center: tuple[float, float] = (0.0, 0.0)

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2

    def uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        r = self.radius * np.sqrt(rng.random(n))
        phi = rng.uniform(0.0, 2.0 * math.pi, n)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi)]) + np.asarray(self.center)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = np.asarray(pts) - np.asarray(self.center)
        return np.hypot(d[..., 0], d[..., 1]) <= self.radius


@dataclass(frozen=True)
class PointField:
    points: np.ndarray
    region: Square | Disk
    intensity: float

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SensingGeometry:
    r1: float
    rn: float
    beta: float
    baseline: float = float("nan")

    def __post_init__(self):
        if not 0 < self.r1 <= self.rn:
            raise ValueError("need 0 < r1 <= rn")
        if not 0 <= self.beta <= math.pi:
            raise ValueError("beta must lie in [0, pi]")


@dataclass(frozen=True)
class ResolutionCell:
    area: float
    kind: str


def sample_ppp(intensity: float, region, rng: np.random.Generator) -> PointField:
    if intensity < 0:
        raise ValueError("intensity must be non-negative")
    n = rng.poisson(intensity * region.area) if intensity > 0 else 0
    return PointField(region.uniform(rng, n), region, intensity)


def pdf_nearest(r1, lambda_bs: float):
    r1 = np.asarray(r1, dtype=float)
    dens = 2.0 * math.pi * lambda_bs * r1 * np.exp(-math.pi * lambda_bs * r1 ** 2)
    return np.where(r1 >= 0, dens, 0.0)


def pdf_nth_given_nearest(rn, r1: float, n: int, lambda_bs: float):
    """Density of the n-th nearest distance given the nearest one is r1."""
    if n < 2:
        raise ValueError("conditional law needs n >= 2")
    rn = np.asarray(rn, dtype=float)
    lp = math.pi * lambda_bs
    excess = np.maximum(rn ** 2 - r1 ** 2, 0.0)
    with np.errstate(divide="ignore"):
        log_pow = (n - 2) * np.log(excess) if n > 2 else 0.0
    log_dens = (math.log(2.0) + (n - 1) * math.log(lp) - gammaln(n - 1)
                + log_pow + np.log(np.maximum(rn, 1e-300)) - lp * excess)
    return np.where(rn >= r1, np.exp(log_dens), 0.0)


def pdf_beta(beta=None):
    if beta is None:
        return 1.0 / math.pi
    beta = np.asarray(beta, dtype=float)
    return np.where((beta >= 0) & (beta <= math.pi), 1.0 / math.pi, 0.0)


def bistatic_angle(tx, target, rx):
    """Interior angle at the target between the directions to tx and rx."""
    a = np.asarray(tx, dtype=float) - np.asarray(target, dtype=float)
    b = np.asarray(rx, dtype=float) - np.asarray(target, dtype=float)
    cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    dot = np.sum(a * b, axis=-1)
    return np.abs(np.arctan2(cross, dot))


def monostatic_cell_area(r1, theta_b, bandwidth):
    return SPEED_OF_LIGHT * theta_b * r1 / (2.0 * bandwidth)


def bistatic_cell_area(rn, theta_b, bandwidth, beta):
    return SPEED_OF_LIGHT * rn * theta_b / (2.0 * bandwidth * np.cos(beta / 2.0) ** 2)


def cell_monostatic(r1: float, theta_b: float, bandwidth: float) -> ResolutionCell:
    if min(r1, theta_b, bandwidth) <= 0:
        raise ValueError("cell arguments must be positive")
    return ResolutionCell(monostatic_cell_area(r1, theta_b, bandwidth), "monostatic")


def cell_bistatic(rn: float, theta_b: float, bandwidth: float, beta: float) -> ResolutionCell:
    if not 0 <= beta < math.pi:
        raise ValueError("bistatic cell diverges at beta = pi")
    if beta == 0:
        return ResolutionCell(monostatic_cell_area(rn, theta_b, bandwidth), "bistatic")
    return ResolutionCell(float(bistatic_cell_area(rn, theta_b, bandwidth, beta)), "bistatic")


def backhaul_overhead(n_coop: int, b_sc_bits: int) -> int:
    if n_coop < 1:
        raise ValueError("n_coop must be >= 1")
    return n_coop * b_sc_bits
