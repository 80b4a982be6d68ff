import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from heatfcs import HeatDistribution, finite_time_pdf, longtime_cumulants, mean_heat_power
from heatfcs.cli import main
from heatfcs.config import ConfigError, load_config, parse_config

ROOT = Path(__file__).resolve().parents[1]
TRANSVERSE = ROOT / "configs" / "transverse.cfg"
LONGITUDINAL = ROOT / "configs" / "longitudinal.cfg"
FAST = ["--set", "mc_samples=2000"]


def _csv(path):
    lines = path.read_text().splitlines()
    cols = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return cols, data


def test_golden_configs_parse():
    a, b = load_config(TRANSVERSE), load_config(LONGITUDINAL)
    assert a.coupling == "sigma_x" and a.detuning == 0.02 and a.kT == 0.1
    assert b.coupling == "sigma_z" and b.kT == 0.5 and b.sweep == "phi"


def test_flags_win_over_file(tmp_path):
    cfg = load_config(TRANSVERSE, ["g=0.2", "seed=5"])
    assert cfg.g == 0.2 and cfg.seed == 5
    assert main(["power", "--config", str(TRANSVERSE), "--seed", "17", "--out", str(tmp_path)]) == 0


def test_config_errors_name_line_and_key(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("g = 0.1\n# comment\ngrid = 100\n")
    with pytest.raises(ConfigError, match=r"bad.cfg:3: grid"):
        load_config(p)
    p.write_text("g = 0.1\nnonsense = 3\n")
    with pytest.raises(ConfigError, match=r"bad.cfg:2: unknown key"):
        load_config(p)
    with pytest.raises(ConfigError, match="--set coupling"):
        parse_config("", ["coupling=sigma_q"])
    with pytest.raises(ConfigError, match="not both"):
        parse_config("detuning = 0.1\ndrive_frequency = 0.9\n")
    with pytest.raises(ConfigError):
        parse_config("", ["g=-1"])
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")


def test_exit_code_config_error(tmp_path, capsys):
    assert main(["power", "--set", "grid=7", "--out", str(tmp_path)]) == 2
    assert "grid" in capsys.readouterr().err


def test_exit_code_numerical_failure(tmp_path):
    # a coupling that never connects the Floquet states leaves no relaxation gap
    code = main(["cumulants", "--set", "coupling=custom", "--set", "coupling_matrix=1 0; 0 1", "--out", str(tmp_path)])
    assert code == 3


def test_power_round_trip(tmp_path):
    assert main(["power", "--config", str(TRANSVERSE), "--out", str(tmp_path)]) == 0
    cols, data = _csv(tmp_path / "power.csv")
    assert cols == ["t", "t_over_tau", "rho11", "rho22", "power"]
    sol, table, init = load_config(TRANSVERSE).build()
    assert np.isinf(data[-1, 0])
    assert data[-1, 4] == mean_heat_power(table, init)
    assert np.all(data[:, 4] > 0)


def test_power_sigma_z_and_zero_coupling(tmp_path):
    assert main(["power", "--config", str(LONGITUDINAL), "--out", str(tmp_path / "z")]) == 0
    _, data = _csv(tmp_path / "z" / "power.csv")
    sol, table, _ = load_config(LONGITUDINAL).build()
    assert abs(data[-1, 4]) <= 1e-14 * sol.OmegaR * table.relaxation_rate
    args = ["power", "--set", "coupling=custom", "--set", "coupling_matrix=0 0; 0 0", "--set", "initial=floquet", "--out", str(tmp_path / "0")]
    assert main(args) == 0
    _, data = _csv(tmp_path / "0" / "power.csv")
    assert np.all(data[:, 4] == 0)


def test_cumulants_round_trip(tmp_path):
    args = ["cumulants", "--config", str(TRANSVERSE), "--set", "sweep_values=-0.1, 0, 0.1", "--set", "times_tau=700"]
    assert main(args + ["--out", str(tmp_path), "--threads", "3"]) == 0
    cols, data = _csv(tmp_path / "cumulants.csv")
    assert cols == ["detuning", "t", "t_over_tau", "mean", "variance", "skewness"]
    cfg = load_config(TRANSVERSE, ["detuning=0.1"])
    sol, table, _ = cfg.build()
    c = longtime_cumulants(table, 700 * sol.tau)
    assert np.allclose(data[2, 3:], [c.mean, c.variance, c.skewness], rtol=1e-12, atol=0)


def test_pdf_round_trip(tmp_path):
    assert main(["pdf", "--config", str(TRANSVERSE), "--set", "times_tau=0, 80", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "pdf.json").read_text())
    zero = HeatDistribution.from_dict(doc["finite_time"][0])
    assert list(zip(zero.n, zero.m, zero.weight)) == [(0, 0, 1.0)]
    d80 = HeatDistribution.from_dict(doc["finite_time"][1])
    sol, table, init = load_config(TRANSVERSE).build()
    ref = finite_time_pdf(table, init, 80 * sol.tau)
    assert np.array_equal(d80.weight, ref.weight) and np.array_equal(d80.n, ref.n)
    assert set(doc["finite_time"][1]) == {"omega_drive", "omega_rabi", "t", "atoms"}
    assert len(doc["longtime"]) == 1
    cols, env = _csv(tmp_path / "envelope.csv")
    assert cols == ["t", "Q", "w"] and np.all(env[:, 2] > 0)


def test_pdf_sigma_z_three_atoms(tmp_path):
    assert main(["pdf", "--config", str(LONGITUDINAL), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "pdf.json").read_text())
    assert all(len(d["atoms"]) <= 3 for d in doc["finite_time"])
    assert doc["longtime"] == []


def test_validate_passes_and_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["validate", "--config", str(TRANSVERSE), *FAST, "--out", str(a)]) == 0
    assert main(["validate", "--config", str(TRANSVERSE), *FAST, "--out", str(b), "--threads", "2"]) == 0
    assert (a / "validate.json").read_bytes() == (b / "validate.json").read_bytes()
    report = json.loads((a / "validate.json").read_text())
    assert report["passed"] and all(c["passed"] for c in report["checks"])


def test_validate_fails_on_corrupted_rate(tmp_path):
    code = main(["validate", "--config", str(TRANSVERSE), *FAST, "--set", "test_corrupt_rate=-1e-3", "--out", str(tmp_path)])
    assert code == 4
    report = json.loads((tmp_path / "validate.json").read_text())
    assert not report["passed"]


def test_console_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "heatfcs.cli", "power", "--config", str(TRANSVERSE), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "power.csv").exists()
