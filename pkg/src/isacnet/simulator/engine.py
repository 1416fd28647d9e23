"""System-level Monte Carlo: exact geometry, per-link SINR breakdowns,
coverage and rate estimators with 95% confidence intervals."""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..kernels import mc_layout as L
from ..kernels.rng import seed_key
from ..sysconfig import SystemConfig, derive

log = logging.getLogger(__name__)

MODES = ("dual", "mono", "multistatic")
METRICS = ("mono", "bistatic", "networked", "comm")
COMPONENTS = L.COMPONENT_NAMES


@dataclass(frozen=True)
class SimOptions:
    """Simulation knobs that are not system parameters.

    side_m: side of the square region, target and user at its centre.
    cull_m: interferers farther than this from a receiver are ignored.
    clutter_window_m: cap on the clutter disk drawn around the target.
    tx_direct: include the serving BS's own beam as direct interference at
        bistatic receivers (the analytic model leaves it out).
    disabled: interference components forced to zero (feature flags).
    """
    side_m: float = 5000.0
    cull_m: float = 600.0
    clutter_window_m: float = 300.0
    tx_direct: bool = False
    disabled: frozenset = frozenset()
    batch: int = 8192
    workers: int = 1

    def __post_init__(self):
        bad = set(self.disabled) - set(COMPONENTS) - {"inter_clutter"}
        if bad:
            raise ValueError(f"unknown components {sorted(bad)}; choose from {COMPONENTS}")
        if "desired" in self.disabled:
            raise ValueError("the desired signal cannot be disabled")


DEFAULT_OPTIONS = SimOptions()


def pack_params(cfg: SystemConfig, n_links: int, r1: float | None = None,
                opts: SimOptions = DEFAULT_OPTIONS) -> np.ndarray:
    if not 1 <= n_links <= L.MAX_LINKS:
        raise ValueError(f"n_links must be in [1, {L.MAX_LINKS}]")
    if max(cfg.m_los, cfg.m_nlos) > L.MAX_FADE:
        raise ValueError(f"Nakagami m above {L.MAX_FADE} unsupported")
    if r1 is not None and not 0 < r1 < min(opts.side_m / 2, opts.cull_m + L.RX_MARGIN):
        raise ValueError("r1 must lie inside the inner sampling disk")
    if opts.cull_m >= opts.side_m / 2:
        raise ValueError("cull radius must be smaller than half the region side")
    dp = derive(cfg)
    p = np.zeros(L.N_PARAMS)
    p[L.P_R1] = r1 or 0.0
    p[L.P_SIDE] = opts.side_m
    p[L.P_LAM_BS] = cfg.lambda_bs
    p[L.P_LAM_CL] = cfg.lambda_cl
    p[L.P_M] = cfg.m_beams
    p[L.P_D] = cfg.d_spread
    p[L.P_GM] = cfg.g_max
    p[L.P_CL] = cfg.c_los
    p[L.P_CN] = cfg.c_nlos
    p[L.P_ETA_L] = cfg.eta_los
    p[L.P_ETA_N] = cfg.eta_nlos
    p[L.P_M_L] = cfg.m_los
    p[L.P_M_N] = cfg.m_nlos
    p[L.P_GAMMA] = cfg.gamma_blockage
    p[L.P_BW] = cfg.bandwidth_hz
    p[L.P_SIG_T] = cfg.sigma_avg_target
    p[L.P_SIG_CL] = cfg.sigma_avg_clutter
    p[L.P_K_W] = cfg.weibull_k
    p[L.P_PS] = dp.p_sense
    p[L.P_PC] = dp.p_comm
    p[L.P_ZETA] = cfg.zeta_sic
    p[L.P_NOISE] = dp.noise_w
    p[L.P_WAVE] = dp.wavelength_m
    p[L.P_A2] = cfg.misalign_var
    p[L.P_THETA_M] = cfg.misalign_max
    p[L.P_NLINKS] = n_links
    p[L.P_RCUT] = opts.cull_m
    p[L.P_RWIN] = opts.clutter_window_m
    p[L.P_TX_DIRECT] = float(opts.tx_direct)
    return p


@dataclass
class TrialBatch:
    """Raw per-trial powers. comps[i, l] holds the eight sensing components
    of link l (l = 0 monostatic, l >= 1 bistatic with the (l+1)-th nearest
    BS); comm[i] the downlink desired/interference/noise powers."""
    comps: np.ndarray
    comm: np.ndarray
    r1: np.ndarray
    beta: np.ndarray
    rerolls: np.ndarray
    seed: int
    first: int = 0

    @property
    def n_trials(self) -> int:
        return len(self.r1)

    @property
    def n_links(self) -> int:
        return self.comps.shape[1]


def simulate(cfg: SystemConfig, n_trials: int, seed: int, n_links: int = 1,
             r1: float | None = None, opts: SimOptions = DEFAULT_OPTIONS,
             first: int = 0) -> TrialBatch:
    """Run trials first .. first+n_trials-1 for a master seed.

    Trial i only depends on (seed, i), so splitting the range into batches
    or over threads never changes any sample.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    par = pack_params(cfg, n_links, r1, opts)
    skey = seed_key(seed)
    comps = np.zeros((n_trials, n_links, L.N_COMP))
    comm = np.zeros((n_trials, L.N_COMM))
    r1_out = np.zeros(n_trials)
    beta = np.zeros((n_trials, n_links))
    rerolls = np.zeros(n_trials, dtype=np.int64)

    def work(lo):
        hi = min(lo + opts.batch, n_trials)
        kernels.run_trials(skey, first + lo, hi - lo, par, comps[lo:hi], comm[lo:hi],
                           r1_out[lo:hi], beta[lo:hi], rerolls[lo:hi])

    starts = range(0, n_trials, opts.batch)
    if opts.workers > 1:
        with ThreadPoolExecutor(opts.workers) as pool:
            list(pool.map(work, starts))
    else:
        for lo in starts:
            work(lo)
    n_re = int(rerolls.sum())
    if n_re:
        log.info("re-rolled %d empty realisations in %d trials", n_re, n_trials)
    return TrialBatch(comps, comm, r1_out, beta, rerolls, seed, first)


@dataclass(frozen=True)
class SinrBreakdown:
    desired: float
    direct_los: float
    direct_nlos: float
    intra_clutter: float
    inter_clutter: float
    residual_si: float
    noise: float

    @property
    def interference(self) -> float:
        return (self.direct_los + self.direct_nlos + self.intra_clutter + self.inter_clutter
                + self.residual_si + self.noise)

    @property
    def sinr(self) -> float:
        return self.desired / self.interference


@dataclass(frozen=True)
class TrialOutcome:
    sinr_mono: float
    sinr_bistatic: tuple
    sinr_networked: float
    sinr_comm: float
    breakdowns: tuple = field(default_factory=tuple)
    r1: float = float("nan")
    beta: tuple = ()


def _mask(disabled) -> np.ndarray:
    keep = np.ones(L.N_COMP)
    for name in disabled:
        if name == "inter_clutter":
            keep[[L.C_INTER_TARGET, L.C_INTER_CLUTTER]] = 0.0
        else:
            keep[COMPONENTS.index(name)] = 0.0
    return keep


def link_sinr(batch: TrialBatch, disabled=()) -> np.ndarray:
    """(n_trials, n_links) SINR; links without LoS or a receiver give 0."""
    keep = _mask(disabled)
    desired = batch.comps[..., L.C_DESIRED]
    den = batch.comps[..., L.C_DESIRED + 1:] @ keep[L.C_DESIRED + 1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(desired > 0, desired / den, 0.0)
    return out


def comm_sinr(batch: TrialBatch, disabled=()) -> np.ndarray:
    c = batch.comm
    los = 0.0 if "direct_los" in disabled else c[:, L.K_LOS]
    nlos = 0.0 if "direct_nlos" in disabled else c[:, L.K_NLOS]
    return c[:, L.K_DESIRED] / (los + nlos + c[:, L.K_NOISE])


def links_needed(metric: str, n_coop: int = 4, mode: str = "dual", order: int = 2) -> int:
    if metric == "mono" or metric == "comm":
        return 1
    if metric == "bistatic":
        if order < 2:
            raise ValueError("bistatic order must be >= 2")
        return order
    if metric == "networked":
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if n_coop < 1:
            raise ValueError("n_coop must be >= 1")
        return {"dual": n_coop, "mono": 1, "multistatic": n_coop + 1}[mode]
    raise ValueError(f"metric must be one of {METRICS}")


def select_sinr(batch: TrialBatch, metric: str, n_coop: int = 4, mode: str = "dual",
                order: int = 2, disabled=()) -> np.ndarray:
    """Per-trial SINR of the selected metric. Networked = max over links."""
    need = links_needed(metric, n_coop, mode, order)
    if metric == "comm":
        return comm_sinr(batch, disabled)
    if batch.n_links < need:
        raise ValueError(f"batch has {batch.n_links} links, metric needs {need}")
    s = link_sinr(batch, disabled)
    if metric == "mono":
        return s[:, 0]
    if metric == "bistatic":
        return s[:, order - 1]
    if mode == "mono":
        return s[:, 0]
    if mode == "multistatic":
        return s[:, 1:need].max(axis=1)
    return s[:, :need].max(axis=1)


def _breakdown(row) -> SinrBreakdown:
    return SinrBreakdown(row[L.C_DESIRED], row[L.C_DIRECT_LOS], row[L.C_DIRECT_NLOS],
                         row[L.C_INTRA], row[L.C_INTER_TARGET] + row[L.C_INTER_CLUTTER],
                         row[L.C_SI], row[L.C_NOISE])


def run_trial(cfg: SystemConfig, seed: int, trial: int = 0, n_coop: int = 4,
              r1: float | None = None, opts: SimOptions = DEFAULT_OPTIONS) -> TrialOutcome:
    """One realisation with all link breakdowns."""
    b = simulate(cfg, 1, seed, max(n_coop, 1), r1, opts, first=trial)
    s = link_sinr(b, opts.disabled)[0]
    return TrialOutcome(
        sinr_mono=float(s[0]),
        sinr_bistatic=tuple(float(x) for x in s[1:]),
        sinr_networked=float(s.max()),
        sinr_comm=float(comm_sinr(b, opts.disabled)[0]),
        breakdowns=tuple(_breakdown(b.comps[0, l]) for l in range(b.n_links)),
        r1=float(b.r1[0]),
        beta=tuple(float(x) for x in b.beta[0]),
    )


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width_95: float
    n_trials: int
    seed: int


def estimate_from_samples(x, seed: int) -> Estimate:
    """Sample mean with 1.96 * s / sqrt(n); fsum keeps it order independent."""
    x = np.asarray(x, dtype=float)
    n = x.size
    mean = math.fsum(x) / n
    if n > 1:
        var = math.fsum((x - mean) ** 2) / (n - 1)
    else:
        var = 0.0
    return Estimate(mean, 1.96 * math.sqrt(var / n), n, seed)


def _check_trials(n_trials: int):
    if n_trials < 1000:
        raise ValueError("need at least 1000 trials")


def estimate_coverage(cfg: SystemConfig, metric: str, threshold, n_trials: int, seed: int,
                      n_coop: int = 4, mode: str = "dual", order: int = 2,
                      r1: float | None = None, opts: SimOptions = DEFAULT_OPTIONS,
                      batch: TrialBatch | None = None):
    """P(SINR > threshold). An array of thresholds reuses one trial set and
    returns a list of estimates."""
    _check_trials(n_trials)
    if batch is None:
        batch = simulate(cfg, n_trials, seed, links_needed(metric, n_coop, mode, order), r1, opts)
    s = select_sinr(batch, metric, n_coop, mode, order, opts.disabled)
    th = np.atleast_1d(np.asarray(threshold, dtype=float))
    out = [estimate_from_samples(s > t, seed) for t in th]
    return out if np.ndim(threshold) else out[0]


def estimate_rate(cfg: SystemConfig, metric: str, n_trials: int, seed: int,
                  n_coop: int = 4, mode: str = "dual", order: int = 2,
                  r1: float | None = None, opts: SimOptions = DEFAULT_OPTIONS,
                  duty: float | None = None, batch: TrialBatch | None = None) -> Estimate:
    """Mean of M log(1 + SINR) in nats/s/Hz; the downlink carries the duty
    factor (T_t - T_s)/T_t unless `duty` overrides it."""
    _check_trials(n_trials)
    if batch is None:
        batch = simulate(cfg, n_trials, seed, links_needed(metric, n_coop, mode, order), r1, opts)
    s = select_sinr(batch, metric, n_coop, mode, order, opts.disabled)
    scale = float(cfg.m_beams)
    if metric == "comm":
        scale *= derive(cfg).duty_comm if duty is None else duty
    return estimate_from_samples(scale * np.log1p(s), seed)


def dump_trials(batch: TrialBatch, path) -> None:
    """One row per (trial, link) with every breakdown component."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "link", "r1", "beta", *COMPONENTS,
                    *(f"comm_{n}" for n in L.COMM_NAMES), "rerolls"])
        for i in range(batch.n_trials):
            for l in range(batch.n_links):
                w.writerow([batch.first + i, l, repr(float(batch.r1[i])),
                            repr(float(batch.beta[i, l])),
                            *(repr(v) for v in batch.comps[i, l].tolist()),
                            *(repr(v) for v in batch.comm[i].tolist()), int(batch.rerolls[i])])
