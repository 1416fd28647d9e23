"""System parameters, derived quantities and validation.

All quantities are SI and linear (no dB). The defaults reproduce the
numerical parameter table of the reference model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

# conventional engineering value; the reference cell areas are computed with it
SPEED_OF_LIGHT = 3.0e8
BOLTZMANN = 1.380649e-23


@dataclass(frozen=True)
class SystemConfig:
    lambda_bs: float = 250e-6
    lambda_cl: float = 0.01
    m_beams: int = 12
    d_spread: int = 6
    g_max: float = 10.0
    c_los: float = 10 ** -6.14
    c_nlos: float = 10 ** -7.2
    eta_los: float = 2.0
    eta_nlos: float = 4.0
    m_los: int = 3
    m_nlos: int = 2
    gamma_blockage: float = 0.0149
    bandwidth_hz: float = 208e6
    sigma_avg_target: float = 1.0
    sigma_avg_clutter: float = 1.0
    weibull_k: float = 1.0
    # Power entry: either direct powers (p_sense_w, p_comm_w) or an energy
    # split (alpha_split with energy_per_slot or avg_power_w). Never both.
    p_sense_w: Optional[float] = 0.9
    p_comm_w: Optional[float] = 0.1
    alpha_split: Optional[float] = None
    energy_per_slot: Optional[float] = None
    avg_power_w: Optional[float] = None
    zeta_sic: float = 1e-12
    temperature_k: float = 300.0
    carrier_hz: float = 28e9
    n_coop: int = 4
    misalign_var: float = 1.0
    misalign_max: float = 0.2 * math.pi
    threshold_sensing: float = 1.0
    threshold_comm: float = 1.0
    b_sc_bits: int = 32

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    def with_energy_split(self, alpha: float, avg_power_w: float = 1.0) -> "SystemConfig":
        """Switch to energy entry: E_t = avg_power_w * T_t split by alpha."""
        return replace(self, p_sense_w=None, p_comm_w=None, alpha_split=alpha,
                       energy_per_slot=None, avg_power_w=avg_power_w)

    @property
    def uses_energy_split(self) -> bool:
        return self.alpha_split is not None


@dataclass(frozen=True)
class DerivedParams:
    t_slot: float
    t_pulse: float
    p_sense: float
    p_comm: float
    wavelength_m: float
    theta_b: float
    noise_w: float
    lambda_direct: float
    lambda_interclutter_base: float
    r_eff: float
    r_max: float

    @property
    def duty_comm(self) -> float:
        return (self.t_slot - self.t_pulse) / self.t_slot


_INT_FIELDS = {"m_beams", "d_spread", "m_los", "m_nlos", "n_coop", "b_sc_bits"}
_OPTIONAL_FIELDS = {"p_sense_w", "p_comm_w", "alpha_split", "energy_per_slot", "avg_power_w"}
FIELD_NAMES = tuple(f.name for f in fields(SystemConfig))


def _positive(cfg, names, out):
    for name in names:
        v = getattr(cfg, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            out.append(f"{name}: must be > 0 (got {v!r})")


def validate(cfg: SystemConfig) -> list[str]:
    """Return a list of human-readable violations; empty means valid."""
    out: list[str] = []
    for name in _INT_FIELDS:
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int):
            out.append(f"{name}: must be an integer (got {v!r})")
    if out:
        return out

    if cfg.m_beams < 1:
        out.append(f"m_beams: M >= 1 (got {cfg.m_beams})")
    if cfg.m_beams != 2 * cfg.d_spread:
        out.append(f"m_beams/d_spread: M = 2d violated ({cfg.m_beams} != 2*{cfg.d_spread})")
    _positive(cfg, ["lambda_bs", "g_max", "c_los", "c_nlos", "eta_los", "eta_nlos",
                    "bandwidth_hz", "sigma_avg_target", "sigma_avg_clutter", "weibull_k",
                    "temperature_k", "carrier_hz", "misalign_var",
                    "threshold_sensing", "threshold_comm"], out)
    if not cfg.lambda_cl >= 0:
        out.append(f"lambda_cl: must be >= 0 (got {cfg.lambda_cl})")
    if not cfg.gamma_blockage >= 0:
        out.append(f"gamma_blockage: must be >= 0 (got {cfg.gamma_blockage})")
    if cfg.m_los < 1 or cfg.m_nlos < 1:
        out.append("m_los/m_nlos: Nakagami shapes must be positive integers")
    if not 0.0 <= cfg.zeta_sic <= 1.0:
        out.append(f"zeta_sic: zeta in [0,1] (got {cfg.zeta_sic})")
    if not 0.0 < cfg.misalign_max < math.pi:
        out.append(f"misalign_max: 0 < theta_M < pi (got {cfg.misalign_max})")
    if cfg.n_coop < 1:
        out.append(f"n_coop: N >= 1 (got {cfg.n_coop})")
    if cfg.b_sc_bits < 0:
        out.append(f"b_sc_bits: must be >= 0 (got {cfg.b_sc_bits})")

    direct = cfg.p_sense_w is not None or cfg.p_comm_w is not None
    energy = (cfg.alpha_split is not None or cfg.energy_per_slot is not None
              or cfg.avg_power_w is not None)
    if direct and energy:
        out.append("power entry: direct powers (p_sense_w, p_comm_w) and energy split "
                   "(alpha_split, energy_per_slot/avg_power_w) must not be mixed")
    elif direct:
        if cfg.p_sense_w is None or cfg.p_comm_w is None:
            out.append("p_sense_w/p_comm_w: both direct powers are required")
        else:
            _positive(cfg, ["p_sense_w"], out)
            if not cfg.p_comm_w >= 0:
                out.append(f"p_comm_w: must be >= 0 (got {cfg.p_comm_w})")
    elif energy:
        if cfg.alpha_split is None:
            out.append("alpha_split: required with energy entry")
        elif not 0.0 <= cfg.alpha_split <= 1.0:
            out.append(f"alpha_split: alpha in [0,1] (got {cfg.alpha_split})")
        if (cfg.energy_per_slot is None) == (cfg.avg_power_w is None):
            out.append("energy_per_slot/avg_power_w: give exactly one")
        else:
            _positive(cfg, ["energy_per_slot" if cfg.energy_per_slot is not None
                            else "avg_power_w"], out)
    else:
        out.append("power entry: no transmit power given")

    if not out:
        t_pulse = 1.0 / cfg.bandwidth_hz
        t_slot = _slot_time(cfg.lambda_bs)
        if not t_pulse < t_slot:
            out.append(f"bandwidth_hz: pulse 1/W_b must be shorter than slot T_t ({t_slot:.3e} s)")
    return out


def _slot_time(lambda_bs: float) -> float:
    r_eff = math.sqrt(1.0 / (math.pi * lambda_bs))
    return 2.0 * 3.0 * r_eff / SPEED_OF_LIGHT


def derive(cfg: SystemConfig) -> DerivedParams:
    problems = validate(cfg)
    if problems:
        raise ValueError("invalid configuration: " + "; ".join(problems))
    r_eff = math.sqrt(1.0 / (math.pi * cfg.lambda_bs))
    r_max = 3.0 * r_eff
    t_slot = 2.0 * r_max / SPEED_OF_LIGHT
    t_pulse = 1.0 / cfg.bandwidth_hz
    if cfg.uses_energy_split:
        e_t = cfg.energy_per_slot if cfg.energy_per_slot is not None else cfg.avg_power_w * t_slot
        p_sense = cfg.alpha_split * e_t / t_pulse
        p_comm = (1.0 - cfg.alpha_split) * e_t / (t_slot - t_pulse)
    else:
        p_sense, p_comm = float(cfg.p_sense_w), float(cfg.p_comm_w)
    return DerivedParams(
        t_slot=t_slot,
        t_pulse=t_pulse,
        p_sense=p_sense,
        p_comm=p_comm,
        wavelength_m=SPEED_OF_LIGHT / cfg.carrier_hz,
        theta_b=2.0 * math.pi / cfg.m_beams,
        noise_w=BOLTZMANN * cfg.temperature_k * cfg.bandwidth_hz,
        lambda_direct=cfg.lambda_bs / cfg.m_beams ** 2,
        lambda_interclutter_base=cfg.lambda_bs / cfg.m_beams,
        r_eff=r_eff,
        r_max=r_max,
    )


def parse_value(name: str, text: str):
    """Parse one config value from text; 'none' clears optional fields."""
    if name not in FIELD_NAMES:
        raise KeyError(f"unknown config key {name!r}")
    text = text.strip()
    if text.lower() in ("none", "null", ""):
        if name in _OPTIONAL_FIELDS:
            return None
        raise ValueError(f"{name}: a value is required")
    if name in _INT_FIELDS:
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"{name}: expected an integer, got {text!r}")
        return int(value)
    return float(text)


def load(path: str | Path, base: SystemConfig | None = None) -> SystemConfig:
    """Read a flat ``key = value`` file. Unknown keys raise KeyError."""
    changes = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in changes:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            changes[key] = parse_value(key, value)
        except KeyError as exc:
            raise KeyError(f"{path}:{lineno}: {exc.args[0]}") from None
    return replace(base or SystemConfig(), **changes)


def dump(cfg: SystemConfig) -> str:
    return "".join(f"{f} = {getattr(cfg, f)!r}\n" for f in FIELD_NAMES)
