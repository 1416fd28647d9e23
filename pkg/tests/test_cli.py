import math

import numpy as np
import pytest

from isacnet import SystemConfig
from isacnet.cli import (Request, Sweep, UsageError, apply, emit, find_crossings, main,
                         parse_rows, run_sweep, to_si)

CFG = SystemConfig()


def _rows(n=3):
    return [{"parameter": float(i), "value": 0.1 * i + 1e-17, "ci_half_width": math.nan,
             "engine": "analytic", "metric": "coverage_mono", "swept": "threshold_sensing_db"}
            for i in range(n)]


# ------------------------------------------------------------ output

def test_three_rows_four_lines():
    text = emit(_rows(3))
    lines = text.splitlines()
    assert len(lines) == 4
    assert lines[0].split(",")[:5] == ["parameter", "value", "ci_half_width", "engine", "metric"]


@pytest.mark.parametrize("fmt", ["csv", "json-lines"])
def test_round_trip(fmt):
    rows = _rows(4)
    back = parse_rows(emit(rows, fmt), fmt)
    for a, b in zip(rows, back):
        for k, v in a.items():
            if isinstance(v, float) and math.isnan(v):
                assert k not in b or math.isnan(b[k])
            else:
                assert b[k] == v


def test_emit_rejects_empty():
    with pytest.raises(ValueError):
        emit([])


def test_numpy_scalars_serialise_plainly():
    row = {"parameter": np.float64(0.25), "value": np.float64(1 / 3)}
    assert "np." not in emit([row])


# ------------------------------------------------------------ parsing and units

def test_unit_conversion():
    assert to_si("threshold_sensing_db", 10.0) == ("threshold_sensing", 10.0)
    assert to_si("lambda_bs_per_km2", 250.0) == ("lambda_bs", pytest.approx(250e-6))
    assert to_si("zeta_sic", 1e-12) == ("zeta_sic", 1e-12)


def test_beam_coupling():
    c = apply(CFG, "d_spread", 4.0)
    assert (c.d_spread, c.m_beams) == (4, 8)
    c = apply(CFG, "m_beams", 16.0)
    assert (c.d_spread, c.m_beams) == (8, 16)
    with pytest.raises(UsageError):
        apply(CFG, "m_beams", 11.0)


def test_alpha_switches_to_energy_entry():
    c = apply(CFG, "alpha_split", 0.7)
    assert c.uses_energy_split and c.alpha_split == 0.7 and c.p_sense_w is None


@pytest.mark.parametrize("text", ["bogus:0:1:3", "zeta_sic:0:1", "zeta_sic:0:1:1",
                                  "zeta_sic:0:1:3:log", "zeta_sic:a:1:3"])
def test_bad_sweeps(text):
    with pytest.raises(UsageError):
        Sweep.parse(text)


def test_sweep_grids():
    assert np.allclose(Sweep.parse("lambda_bs_per_km2:10:1000:3:log").grid(), [10, 100, 1000])
    assert len(Sweep.parse("threshold_sensing_db:-10:10:21").grid()) == 21


def test_crossings():
    x = [1, 10, 100, 1000]
    assert find_crossings(x, [4, 3, 2, 1], [2.5, 2.5, 2.5, 2.5], log_x=True) == [
        (pytest.approx(10 ** 1.5), pytest.approx(2.5))]
    assert find_crossings(x, [4, 3, 2, 1], [0, 0, 0, 0]) == []


# ------------------------------------------------------------ sweeps

def test_threshold_sweep_rows():
    req = Request(metric="coverage_networked", r1=20.0, quad="fast")
    rows = run_sweep(req, CFG, Sweep.parse("threshold_sensing_db:-10:10:21"))
    assert len(rows) == 21
    vals = [r["value"] for r in rows]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_both_engines_gap_column():
    req = Request(metric="coverage_mono", engine="both", r1=20.0, trials=2000, seed=4,
                  quad="fast")
    rows = run_sweep(req, CFG, Sweep.parse("threshold_sensing_db:-10:10:3"))
    for r in rows:
        assert r["gap"] == abs(r["value_analytic"] - r["value_montecarlo"])
        assert r["ci_half_width"] > 0


def test_worker_pool_keeps_grid_order():
    req = Request(metric="coverage_mono", r1=20.0, quad="fast")
    sw = Sweep.parse("threshold_sensing_db:-10:10:4")
    assert emit(run_sweep(req, CFG, sw, workers=2)) == emit(run_sweep(req, CFG, sw))


# ------------------------------------------------------------ entry point

def test_byte_identical_reruns(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.csv"
        argv = ["sweep", "--metric", "coverage_networked", "--engine", "montecarlo",
                "--sweep", "threshold_sensing_db:-5:5:3", "--trials", "1000", "--seed", "3",
                "--r1", "20", "--out", str(path)]
        assert main(argv) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_config_file_and_set(tmp_path):
    cfgfile = tmp_path / "net.cfg"
    cfgfile.write_text("lambda_bs = 1e-4\n")
    out = tmp_path / "o.jsonl"
    argv = ["sweep", "--config", str(cfgfile), "--set", "n_coop=6", "--metric", "backhaul",
            "--sweep", "b_sc_bits:16:32:2", "--out", str(out), "--format", "json-lines"]
    assert main(argv) == 0
    rows = parse_rows(out.read_text(), "json-lines")
    assert [r["value"] for r in rows] == [96.0, 192.0]


def test_sic_family_reports_crossing(tmp_path):
    out = tmp_path / "sic.csv"
    assert main(["sic-sweep", "--steps", "9", "--quad", "fast", "--out", str(out)]) == 0
    rows = parse_rows(out.read_text())
    assert sum(r["metric"] == "crossing" for r in rows) == 1


def test_exit_codes(tmp_path, capsys):
    assert main(["sweep", "--metric", "backhaul", "--sweep", "nonsense:1:2:2"]) == 2
    assert main(["sweep", "--metric", "backhaul", "--sweep", "n_coop:1:2:2",
                 "--set", "m_beams=11"]) == 2
    assert main(["sweep", "--metric", "backhaul", "--sweep", "n_coop:1:2:2",
                 "--out", str(tmp_path / "missing" / "x.csv")]) == 1
    assert main(["validate", "--trials", "1000", "--tol", "0", "--out",
                 str(tmp_path / "v.csv")]) == 2
    assert "points within" in capsys.readouterr().err
