import math
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from isacnet import SystemConfig, derive, load, validate
from isacnet.sysconfig import SPEED_OF_LIGHT, dump


def test_defaults_are_valid(cfg):
    assert validate(cfg) == []


def test_pulse_duration():
    # independent evaluation: 1 / 208e6 = 4.80769...e-9
    assert derive(SystemConfig()).t_pulse == pytest.approx(4.8077e-9, rel=5e-5)


def test_beamwidth_and_direct_density(cfg):
    dp = derive(cfg)
    assert dp.theta_b == pytest.approx(math.pi / 6)
    assert dp.lambda_direct == pytest.approx(250e-6 / 144)
    assert dp.lambda_interclutter_base == pytest.approx(250e-6 / 12)


def test_slot_geometry(cfg):
    dp = derive(cfg)
    assert dp.r_eff == pytest.approx(math.sqrt(1 / (math.pi * 250e-6)))
    assert dp.r_max == pytest.approx(3 * dp.r_eff)
    assert dp.t_slot == pytest.approx(2 * dp.r_max / SPEED_OF_LIGHT)
    assert dp.t_pulse < dp.t_slot


def test_energy_split_powers(cfg):
    c = cfg.with_energy_split(0.9, avg_power_w=1.0)
    dp = derive(c)
    e_t = dp.t_slot
    assert dp.p_sense == pytest.approx(0.9 * e_t / dp.t_pulse)
    assert dp.p_comm == pytest.approx(0.1 * e_t / (dp.t_slot - dp.t_pulse))


def test_direct_powers_pass_through(cfg):
    dp = derive(cfg)
    assert (dp.p_sense, dp.p_comm) == (0.9, 0.1)


@pytest.mark.parametrize("change, fragment", [
    (dict(m_beams=11), "M = 2d"),
    (dict(alpha_split=1.2, p_sense_w=None, p_comm_w=None, avg_power_w=1.0), "alpha in [0,1]"),
    (dict(zeta_sic=1.5), "zeta"),
    (dict(misalign_max=4.0), "theta_M"),
    (dict(n_coop=0), "N >= 1"),
    (dict(lambda_bs=-1.0), "lambda_bs"),
    (dict(m_los=2.5), "integer"),
])
def test_violations_name_the_rule(cfg, change, fragment):
    problems = validate(replace(cfg, **change))
    assert any(fragment in p for p in problems), problems


def test_mixed_power_entry_rejected(cfg):
    assert validate(cfg.with_(alpha_split=0.5, avg_power_w=1.0))


def test_derive_rejects_invalid(cfg):
    with pytest.raises(ValueError):
        derive(cfg.with_(m_beams=11))


def test_derive_is_pure(cfg):
    assert derive(cfg) == derive(replace(cfg))


@given(st.floats(0.05, 20.0), st.floats(0.0, 1.0))
def test_power_split_linear_in_energy(scale, alpha):
    base = SystemConfig().with_energy_split(alpha, avg_power_w=1.0)
    a, b = derive(base), derive(base.with_(avg_power_w=scale))
    assert b.p_sense == pytest.approx(scale * a.p_sense, rel=1e-12, abs=1e-300)
    assert b.p_comm == pytest.approx(scale * a.p_comm, rel=1e-12, abs=1e-300)


def test_config_file_round_trip(tmp_path, cfg):
    path = tmp_path / "cfg.txt"
    path.write_text(dump(cfg.with_(lambda_bs=1e-4, weibull_k=1.5)))
    assert load(path) == cfg.with_(lambda_bs=1e-4, weibull_k=1.5)


def test_config_file_unknown_key(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("lambda_bs = 1e-4\nbogus = 3\n")
    with pytest.raises(KeyError):
        load(path)


def test_config_file_comments_and_none(tmp_path):
    path = tmp_path / "cfg.txt"
    path.write_text("# energy entry\np_sense_w = none\np_comm_w = none\n"
                    "alpha_split = 0.5  # half\navg_power_w = 1\n")
    c = load(path)
    assert c.uses_energy_split and validate(c) == []
