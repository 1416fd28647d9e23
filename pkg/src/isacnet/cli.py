"""Command-line front end: parameter sweeps on either engine, written as
plot-ready CSV or JSON lines.

dB and per-km^2 inputs are converted here; every engine call receives SI,
linear values. Exit codes: 0 success, 2 invalid input or failed validation,
1 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytic, simulator
from .geometry import backhaul_overhead
from .quadrature import ACCURATE, FAST, SWEEP, QuadratureSpec
from .sysconfig import FIELD_NAMES, SystemConfig, derive, load, parse_value, validate

METRICS = ("coverage_mono", "coverage_bistatic", "coverage_networked", "avg_coverage",
           "rate_sensing", "coverage_comm", "rate_comm", "rate_comm_only", "rate_total",
           "backhaul")
ENGINES = ("analytic", "montecarlo", "both")
QUAD = {"accurate": ACCURATE, "fast": FAST, "sweep": SWEEP}
PSEUDO = ("r1",)


class UsageError(Exception):
    """Bad flags or parameter names (exit code 2)."""


# ------------------------------------------------------------ unit handling

def to_si(name: str, value: float) -> tuple[str, float]:
    """Map a CLI parameter name/value to (field, SI linear value).

    Suffix ``_db`` converts 10 log10 units to linear, ``_per_km2`` converts a
    density to per square metre.
    """
    if name.endswith("_db"):
        return name[:-3], 10.0 ** (value / 10.0)
    if name.endswith("_per_km2"):
        return name[:-8], value * 1e-6
    return name, value


def check_name(name: str) -> str:
    base, _ = to_si(name, 1.0)
    if base not in FIELD_NAMES and base not in PSEUDO:
        raise UsageError(f"unknown parameter {name!r}; expected a config field, "
                         f"optionally with _db or _per_km2, or one of {PSEUDO}")
    return base


def apply(cfg: SystemConfig, name: str, value) -> SystemConfig:
    """Set one CLI parameter. Keeps M = 2d when either is changed and
    switches to energy entry when an energy-split field is set."""
    base, v = to_si(name, value) if isinstance(value, float) else (name, value)
    if base in ("m_beams", "d_spread", "m_los", "m_nlos", "n_coop", "b_sc_bits"):
        if float(v) != int(v):
            raise UsageError(f"{base} must be an integer")
        v = int(v)
    if base == "d_spread":
        return cfg.with_(d_spread=v, m_beams=2 * v)
    if base == "m_beams":
        if v % 2:
            raise UsageError("m_beams must be even (M = 2d)")
        return cfg.with_(m_beams=v, d_spread=v // 2)
    if base == "alpha_split" and not cfg.uses_energy_split:
        return cfg.with_energy_split(v, avg_power_w=1.0)
    if base in ("energy_per_slot", "avg_power_w") and cfg.uses_energy_split:
        other = "avg_power_w" if base == "energy_per_slot" else "energy_per_slot"
        return cfg.with_(**{base: v, other: None})
    return cfg.with_(**{base: v})


def parse_set(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
    key, text = (p.strip() for p in item.split("=", 1))
    base = check_name(key)
    if base != key or base in PSEUDO:
        return key, float(text)
    try:
        return key, parse_value(key, text)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None


@dataclass(frozen=True)
class Sweep:
    name: str
    start: float
    stop: float
    steps: int
    log: bool = False

    @classmethod
    def parse(cls, text: str) -> "Sweep":
        parts = text.split(":")
        if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] not in ("log", "lin")):
            raise UsageError(f"--sweep expects NAME:FROM:TO:STEPS[:log], got {text!r}")
        check_name(parts[0])
        try:
            start, stop, steps = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise UsageError(f"bad numbers in --sweep {text!r}") from None
        if steps < 2:
            raise UsageError("--sweep needs at least 2 steps")
        log = len(parts) == 5 and parts[4] == "log"
        if log and (start <= 0 or stop <= 0):
            raise UsageError("log sweeps need positive end points")
        return cls(parts[0], start, stop, steps, log)

    def grid(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


# ------------------------------------------------------------ evaluation

@dataclass(frozen=True)
class Request:
    metric: str
    engine: str = "analytic"
    order: int = 2
    mode: str = "dual"
    r1: float | None = None
    trials: int = 20000
    seed: int = 1
    quad: str = "auto"

    def spec(self) -> QuadratureSpec:
        if self.quad != "auto":
            return QUAD[self.quad]
        return FAST if self.metric.startswith("rate") else ACCURATE


def _avg_over_r1(fn, cfg: SystemConfig, spec: QuadratureSpec) -> float:
    u, w = analytic.sensing._r1_rule(cfg, spec)
    r = np.sqrt(u / (math.pi * cfg.lambda_bs))
    return float(np.clip(np.dot(w, [fn(float(x)) for x in r]), 0.0, 1.0))


def eval_analytic(req: Request, cfg: SystemConfig) -> tuple[float, float]:
    spec = req.spec()
    phi_s, n, m = cfg.threshold_sensing, cfg.n_coop, req.metric
    if m == "coverage_mono":
        f = lambda r: analytic.coverage_mono(r, phi_s, cfg, spec).value
        return (f(req.r1) if req.r1 else _avg_over_r1(f, cfg, spec)), math.nan
    if m == "coverage_bistatic":
        f = lambda r: float(analytic.bistatic_coverages(r, phi_s, req.order, cfg, spec)[-1])
        return (f(req.r1) if req.r1 else _avg_over_r1(f, cfg, spec)), math.nan
    if m == "coverage_networked" and req.r1:
        return analytic.coverage_networked(req.r1, phi_s, n, cfg, spec, req.mode), math.nan
    if m in ("coverage_networked", "avg_coverage"):
        return analytic.avg_coverage_networked(phi_s, n, cfg, spec, req.mode), math.nan
    if m == "coverage_comm":
        return analytic.coverage_comm(cfg.threshold_comm, cfg, spec), math.nan
    if m == "rate_sensing":
        r = analytic.rate_sensing(n, cfg, spec, req.mode)
        return r.value, r.est_error
    if m == "rate_comm":
        r = analytic.rate_comm(cfg, spec)
        return r.value, r.est_error
    if m == "rate_comm_only":
        r = analytic.rate_comm_only(cfg, spec)
        return r.value, r.est_error
    if m == "rate_total":
        a = analytic.rate_sensing(n, cfg, spec, req.mode)
        b = analytic.rate_comm(cfg, spec)
        return a.value + b.value, a.est_error + b.est_error
    if m == "backhaul":
        return float(backhaul_overhead(n, cfg.b_sc_bits)), 0.0
    raise UsageError(f"unknown metric {m!r}")


def eval_montecarlo(req: Request, cfg: SystemConfig) -> tuple[float, float]:
    m, n = req.metric, cfg.n_coop
    kw = dict(n_trials=req.trials, seed=req.seed, r1=req.r1)
    if m == "backhaul":
        return float(backhaul_overhead(n, cfg.b_sc_bits)), 0.0
    if m == "coverage_mono":
        e = simulator.estimate_coverage(cfg, "mono", cfg.threshold_sensing, **kw)
    elif m == "coverage_bistatic":
        e = simulator.estimate_coverage(cfg, "bistatic", cfg.threshold_sensing,
                                        order=req.order, **kw)
    elif m == "coverage_networked" or m == "avg_coverage":
        if m == "avg_coverage":
            kw["r1"] = None
        e = simulator.estimate_coverage(cfg, "networked", cfg.threshold_sensing, n_coop=n,
                                        mode=req.mode, **kw)
    elif m == "coverage_comm":
        e = simulator.estimate_coverage(cfg, "comm", cfg.threshold_comm, **kw)
    elif m == "rate_sensing":
        e = simulator.estimate_rate(cfg, "networked", n_coop=n, mode=req.mode, **kw)
    elif m == "rate_comm":
        e = simulator.estimate_rate(cfg, "comm", **kw)
    elif m == "rate_comm_only":
        e = simulator.estimate_rate(analytic.comm_only_config(cfg), "comm", duty=1.0, **kw)
    elif m == "rate_total":
        links = simulator.links_needed("networked", n, req.mode)
        batch = simulator.simulate(cfg, req.trials, req.seed, links, req.r1)
        s = simulator.select_sinr(batch, "networked", n, req.mode)
        c = simulator.comm_sinr(batch)
        per = cfg.m_beams * (np.log1p(s) + derive(cfg).duty_comm * np.log1p(c))
        e = simulator.estimate_from_samples(per, req.seed)
    else:
        raise UsageError(f"unknown metric {m!r}")
    return e.mean, e.half_width_95


def evaluate(req: Request, cfg: SystemConfig) -> dict:
    """One grid point. Returns the result columns of a row."""
    if req.engine == "analytic":
        v, hw = eval_analytic(req, cfg)
        return {"value": v, "ci_half_width": hw}
    if req.engine == "montecarlo":
        v, hw = eval_montecarlo(req, cfg)
        return {"value": v, "ci_half_width": hw}
    a, _ = eval_analytic(req, cfg)
    mc, hw = eval_montecarlo(req, cfg)
    return {"value_analytic": a, "value_montecarlo": mc, "ci_half_width": hw,
            "gap": abs(a - mc)}


def _point(args):
    req, cfg, name, x = args
    if name in PSEUDO:
        req = replace(req, **{name: float(x)})
    else:
        cfg = apply(cfg, name, float(x))
    problems = validate(cfg)
    if problems:
        raise UsageError("; ".join(problems))
    return evaluate(req, cfg)


def run_sweep(req: Request, cfg: SystemConfig, sweep: Sweep, workers: int = 1) -> list[dict]:
    """One row per grid value, in grid order whatever the worker schedule."""
    grid = sweep.grid()
    tasks = [(req, cfg, sweep.name, float(x)) for x in grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_point, tasks))
    else:
        results = [_point(t) for t in tasks]
    rows = []
    for x, res in zip(grid, results):
        row = {"parameter": float(x)}
        if "value" in res:
            row["value"] = res["value"]
            row["ci_half_width"] = res["ci_half_width"]
        else:
            row["value_analytic"] = res["value_analytic"]
            row["value_montecarlo"] = res["value_montecarlo"]
            row["ci_half_width"] = res["ci_half_width"]
        row["engine"] = req.engine
        row["metric"] = req.metric
        row["swept"] = sweep.name
        if "gap" in res:
            row["gap"] = res["gap"]
        rows.append(row)
    return rows


# ------------------------------------------------------------ output

def _cell(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(float(v))
    return str(v)


def emit(rows: list[dict], fmt: str = "csv") -> str:
    """Serialise rows. CSV has one header row; the column set is the union
    of row keys in first-seen order."""
    if not rows:
        raise ValueError("no rows to emit")
    if fmt == "json-lines":
        return "".join(json.dumps({k: (None if isinstance(v, float) and math.isnan(v) else v)
                                   for k, v in r.items()}) + "\n" for r in rows)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    cols: list[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in cols])
    return buf.getvalue()


def parse_rows(text: str, fmt: str = "csv") -> list[dict]:
    """Inverse of ``emit``; numeric cells come back as floats."""
    if fmt == "json-lines":
        out = []
        for line in text.splitlines():
            r = json.loads(line)
            out.append({k: (math.nan if v is None else v) for k, v in r.items()})
        return out
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for r in rows:
        d = {}
        for k, v in r.items():
            if v == "":
                continue
            try:
                d[k] = float(v)
            except ValueError:
                d[k] = v
        out.append(d)
    return out


def write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def find_crossings(x, y1, y2, log_x: bool = False) -> list[tuple[float, float]]:
    """Points where y1 - y2 changes sign, linearly interpolated (in log x
    when asked)."""
    x = np.asarray(x, float)
    d = np.asarray(y1, float) - np.asarray(y2, float)
    out = []
    for i in range(len(x) - 1):
        if d[i] == 0.0:
            out.append((float(x[i]), float(y1[i])))
        elif d[i] * d[i + 1] < 0:
            f = d[i] / (d[i] - d[i + 1])
            xi = (math.exp(math.log(x[i]) + f * (math.log(x[i + 1]) - math.log(x[i])))
                  if log_x else x[i] + f * (x[i + 1] - x[i]))
            out.append((float(xi), float(y1[i] + f * (y1[i + 1] - y1[i]))))
    return out


# ------------------------------------------------------------ families

def _family_threshold(args, cfg, base):
    sw = Sweep("threshold_sensing_db", -10.0, 10.0, args.steps or 21)
    return run_sweep(replace(base, metric="coverage_networked"), cfg, sw, args.workers)


def _family_density(args, cfg, base):
    sw = Sweep("lambda_bs_per_km2", 10.0, 1000.0, args.steps or 10, log=True)
    rows = []
    for m in ("rate_sensing", "rate_comm"):
        rows += run_sweep(replace(base, metric=m), cfg, sw, args.workers)
    return rows


def _family_sic(args, cfg, base):
    sw = Sweep("zeta_sic", 1e-14, 1e-6, args.steps or 17, log=True)
    r1 = base.r1 or 20.0
    mono = run_sweep(replace(base, metric="coverage_networked", mode="mono", r1=r1),
                     cfg, sw, args.workers)
    multi = run_sweep(replace(base, metric="coverage_networked", mode="multistatic", r1=r1),
                      cfg.with_(n_coop=args.n_multi), sw, args.workers)
    key = "value" if base.engine != "both" else "value_analytic"
    rows = mono + multi
    for x, y in find_crossings([r["parameter"] for r in mono], [r[key] for r in mono],
                               [r[key] for r in multi], log_x=True):
        rows.append({"parameter": x, key: y, "engine": base.engine, "metric": "crossing",
                     "swept": sw.name})
    return rows


def _family_beamwidth(args, cfg, base):
    sw = Sweep("d_spread", 2, 16, args.steps or 15)
    rows = []
    for m in ("coverage_comm", "avg_coverage"):
        rows += run_sweep(replace(base, metric=m), cfg, sw, args.workers)
    return rows


def _family_clutter(args, cfg, base):
    sw = Sweep("lambda_cl", 0.0, 0.1, args.steps or 6)
    rows = []
    for k in args.shapes:
        part = run_sweep(replace(base, metric="avg_coverage"), cfg.with_(weibull_k=k), sw,
                         args.workers)
        for r in part:
            r["metric"] = f"avg_coverage[k={k:g}]"
        rows += part
    return rows


def _family_alpha(args, cfg, base):
    sw = Sweep("alpha_split", 0.05, 0.95, args.steps or 10)
    rows = run_sweep(replace(base, metric="rate_total"), cfg, sw, args.workers)
    rows += run_sweep(replace(base, metric="rate_comm_only"), cfg, sw, args.workers)
    return rows


FAMILIES = {
    "threshold-sweep": (_family_threshold, "networked coverage vs sensing threshold (dB)"),
    "density-sweep": (_family_density, "sensing and communication rates vs BS density"),
    "sic-sweep": (_family_sic, "monostatic vs multistatic-only coverage vs residual SI"),
    "beamwidth-sweep": (_family_beamwidth, "comm and sensing coverage vs beam spread d"),
    "clutter-sweep": (_family_clutter, "avg coverage vs clutter density per Weibull shape"),
    "alpha-sweep": (_family_alpha, "total ISAC rate vs energy split, with comm-only baseline"),
}


# ------------------------------------------------------------ validate

def validation_grid():
    """Paired-engine checkpoints: (label, metric, r1, n_coop)."""
    pts = [("mono", "coverage_mono", 20.0, 1)]
    for r1 in (5.0, 35.0):
        for n in (2, 3, 4):
            pts.append((f"networked N={n}", "coverage_networked", r1, n))
    return pts


def run_validate(cfg: SystemConfig, trials: int, seed: int, tol: float,
                 thresholds_db=tuple(range(-10, 11, 2)), quad: str = "fast") -> list[dict]:
    """Gap report between the engines. Monte Carlo trials are shared by all
    thresholds and orders at one r1."""
    spec = QUAD[quad]
    phis = [10.0 ** (t / 10.0) for t in thresholds_db]
    batches = {}
    rows = []
    for label, metric, r1, n in validation_grid():
        if r1 not in batches:
            batches[r1] = simulator.simulate(cfg, trials, seed, 4, r1)
        sim_metric = "mono" if metric == "coverage_mono" else "networked"
        mc = simulator.estimate_coverage(cfg, sim_metric, phis, trials, seed, n_coop=n,
                                         r1=r1, batch=batches[r1])
        for t_db, phi, e in zip(thresholds_db, phis, mc):
            if metric == "coverage_mono":
                a = analytic.coverage_mono(r1, phi, cfg, spec).value
            else:
                a = analytic.coverage_networked(r1, phi, n, cfg, spec)
            gap = abs(a - e.mean)
            rows.append({"parameter": float(t_db), "value_analytic": a,
                         "value_montecarlo": e.mean, "ci_half_width": e.half_width_95,
                         "engine": "both", "metric": f"{metric}[r1={r1:g},N={n}]",
                         "swept": "threshold_sensing_db", "gap": gap,
                         "pass": gap <= tol})
    return rows


# ------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isacnet", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, engine_default="analytic"):
        sp.add_argument("--config", help="key = value file (SI units)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field; _db and _per_km2 suffixes convert")
        sp.add_argument("--engine", choices=ENGINES, default=engine_default)
        sp.add_argument("--trials", type=int, default=20000)
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--r1", type=float, help="condition on the nearest-BS distance (m)")
        sp.add_argument("--mode", choices=analytic.MODES, default="dual")
        sp.add_argument("--quad", choices=("auto",) + tuple(QUAD), default="auto",
                        help="quadrature preset for the analytic engine")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", default="-")
        sp.add_argument("--format", choices=("csv", "json-lines"), default="csv")

    sp = sub.add_parser("sweep", help="generic one-parameter sweep")
    common(sp)
    sp.add_argument("--metric", choices=METRICS, required=True)
    sp.add_argument("--sweep", required=True, metavar="NAME:FROM:TO:STEPS[:log]")
    sp.add_argument("--order", type=int, default=2, help="bistatic receiver order n")

    for name, (_, text) in FAMILIES.items():
        fp = sub.add_parser(name, help=text)
        common(fp)
        fp.add_argument("--steps", type=int)
        if name == "sic-sweep":
            fp.add_argument("--n-multi", type=int, default=6,
                            help="receivers of the multistatic-only baseline")
        if name == "clutter-sweep":
            fp.add_argument("--shapes", type=float, nargs="+", default=[0.7, 1.0, 1.5])

    vp = sub.add_parser("validate", help="analytic vs Monte Carlo gap report")
    common(vp, engine_default="both")
    vp.add_argument("--tol", type=float, default=0.02)
    return p


def load_config(args) -> SystemConfig:
    cfg = SystemConfig()
    if args.config:
        try:
            cfg = load(args.config)
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    for item in args.set:
        key, value = parse_set(item)
        if check_name(key) in PSEUDO:
            args.r1 = float(value)
            continue
        cfg = apply(cfg, key, value)
    problems = validate(cfg)
    if problems:
        raise UsageError("invalid configuration: " + "; ".join(problems))
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.trials < 1000 and args.engine != "analytic":
            raise UsageError("--trials must be >= 1000")
        base = Request(metric="coverage_networked", engine=args.engine, mode=args.mode,
                       r1=args.r1, trials=args.trials, seed=args.seed, quad=args.quad)
        if args.command == "sweep":
            req = replace(base, metric=args.metric, order=args.order)
            rows = run_sweep(req, cfg, Sweep.parse(args.sweep), args.workers)
        elif args.command == "validate":
            rows = run_validate(cfg, args.trials, args.seed, args.tol,
                                quad="fast" if args.quad == "auto" else args.quad)
            write(emit(rows, args.format), args.out)
            bad = [r for r in rows if not r["pass"]]
            print(f"{len(rows) - len(bad)}/{len(rows)} points within {args.tol}",
                  file=sys.stderr)
            return 2 if bad else 0
        else:
            rows = FAMILIES[args.command][0](args, cfg, base)
        write(emit(rows, args.format), args.out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # surfaced verbatim, runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
