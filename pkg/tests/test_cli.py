import math
import subprocess
import sys

import pytest

from cogrelay import SystemConfig, outage_highsnr, outage_probability
from cogrelay.cli import ConfigError, build_spec, main, parse_config_file


def _run(tmp_path, *args):
    out = tmp_path / "out.csv"
    code = main([*args, "--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def _rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [l.split(",") for l in lines[1:]]


# ------------------------------------------------------------------ config handling

def test_config_file_parsing(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("# comment line\nM = 5\ngamma_p = 80  # inline comment\n"
                 "lambda_s = 0,0.1,0.2,0.1,0.15\ncase = nodirect\n")
    values = parse_config_file(str(p))
    assert values["M"] == 5
    assert values["gamma_p"] == 80.0
    assert values["lambda_s"] == (0.0, 0.1, 0.2, 0.1, 0.15)
    assert values["case"] == "nodirect"


def test_config_file_diagnostics(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("M = 4\n\nnot_a_key = 3\n")
    with pytest.raises(ConfigError) as ei:
        parse_config_file(str(p))
    assert ":3:" in str(ei.value) and "not_a_key" in str(ei.value)

    p2 = tmp_path / "bad2.cfg"
    p2.write_text("M 4\n")
    with pytest.raises(ConfigError) as ei:
        parse_config_file(str(p2))
    assert ":1:" in str(ei.value)

    p3 = tmp_path / "bad3.cfg"
    p3.write_text("gamma_p = fast\n")
    with pytest.raises(ConfigError) as ei:
        parse_config_file(str(p3))
    assert "gamma_p" in str(ei.value)


@pytest.mark.parametrize("args", [
    ["--experiment", "outage-curve", "--M", "not_int"],
    ["--experiment", "outage-curve", "--bogus", "3"],
    ["--experiment", "outage-curve", "--M"],                 # missing value
    ["--experiment", "outage-curve", "--case", "sideways"],
    ["--experiment", "outage-curve", "--gamma_min", "50", "--gamma_max", "10"],
    ["--experiment", "outage-curve", "--n_points", "1"],
    ["--experiment", "qos-sweep", "--M", "3", "--k", "7"],   # k beyond M
    ["--experiment", "outage-curve", "--M", "1"],            # rejected by the model
    ["--experiment", "outage-curve", "--trials", "0"],
    ["--experiment", "validate", "--config", "/nonexistent/path.cfg"],
])
def test_bad_inputs_exit_2(args, tmp_path, capsys):
    code = main([*args, "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "cogrelay:" in capsys.readouterr().err


def test_override_beats_config_file(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("M = 5\nR = 0.25\n")
    spec, values = build_spec(["--experiment", "outage-curve",
                               "--config", str(p), "--M", "6"])
    assert spec.cfg.M == 6          # CLI override wins
    assert spec.cfg.R == 0.25       # file survives where not overridden
    assert values["M"] == 6


# ------------------------------------------------------------------------ experiments

def test_outage_curve_csv(tmp_path):
    code, text = _run(tmp_path, "--experiment", "outage-curve", "--M", "3",
                      "--n_points", "6", "--seed", "4")
    assert code == 0
    stamp = text.splitlines()[0]
    assert stamp.startswith("# ")
    assert "experiment=outage-curve" in stamp and "seed=4" in stamp
    assert "trials=" in stamp and "M=3" in stamp
    assert "workers" not in stamp and "out=" not in stamp
    header, rows = _rows(text)
    assert header == ["gamma", "nu_closed", "nu_highsnr"]
    assert len(rows) == 6
    gammas = [float(r[0]) for r in rows]
    nus = [float(r[1]) for r in rows]
    assert gammas == sorted(gammas)
    assert all(a > b for a, b in zip(nus, nus[1:]))   # outage falls with SNR
    cfg = SystemConfig(M=3, gamma_p=gammas[-1], gamma_s=30.0, R=0.5)
    assert math.isclose(nus[-1], outage_probability(cfg).nu, rel_tol=1e-12)
    assert math.isclose(float(rows[-1][2]), outage_highsnr(cfg), rel_tol=1e-12)


def test_validate_passes_and_is_worker_invariant(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["--experiment", "validate", "--trials", "20000", "--seed", "9",
                 "--out", str(a)]) == 0
    assert main(["--experiment", "validate", "--trials", "20000", "--seed", "9",
                 "--workers", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header, rows = _rows(a.read_text())
    assert header[-1] == "z_score" and len(rows) == 27
    assert all(abs(float(r[-1])) <= 4.0 for r in rows)


def test_validate_statistical_failure_exits_1(tmp_path):
    # two slots per point: one unlucky outage on a rare-outage row blows
    # straight past |z| = 4, which is exactly what the exit code reports
    code, text = _run(tmp_path, "--experiment", "validate", "--trials", "2",
                      "--seed", "0")
    assert code == 1
    _, rows = _rows(text)
    assert any(abs(float(r[-1])) > 4.0 for r in rows)


def test_rerun_is_byte_identical(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    args = ["--experiment", "qos-sweep", "--M", "5", "--lambda_p", "0.1",
            "--lambda_s", "0,0.1,0.2,0.1,0.15", "--n_points", "7"]
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_qos_sweep_columns(tmp_path):
    code, text = _run(tmp_path, "--experiment", "qos-sweep", "--M", "4",
                      "--n_points", "5", "--R_max", "1.0")
    assert code == 0
    header, rows = _rows(text)
    assert header == ["R", "lambda_k_max", "feasible", "omega", "zeta"]
    assert float(rows[0][0]) == 0.0
    assert float(rows[0][1]) == 1.0          # no competing demands, f(0)=1
    assert rows[0][2] == "True"
    omega = [float(w) for w in rows[0][3].split(";")]
    assert len(omega) == 4 and math.isclose(sum(omega), 1.0, rel_tol=1e-12)


def test_dmt_csv(tmp_path):
    code, text = _run(tmp_path, "--experiment", "dmt", "--M", "4",
                      "--n_points", "3")
    assert code == 0
    header, rows = _rows(text)
    assert header == ["r", "d_analytic", "d_empirical"]
    assert float(rows[0][0]) == 0.0 and float(rows[0][1]) == 3.0
    assert abs(float(rows[0][2]) - 3.0) < 0.3


def test_fig1_preset_claims(tmp_path):
    code, text = _run(tmp_path, "--experiment", "fig1", "--n_points", "6")
    assert code == 0
    header, rows = _rows(text)
    assert header == ["M", "R", "lambda_k_max", "feasible", "omega", "zeta"]
    by_m = {m: [r for r in rows if r[0] == str(m)] for m in (4, 5, 6)}
    starts = {m: float(by_m[m][0][2]) for m in (4, 5, 6)}
    assert abs(starts[4] - 0.6) <= 1e-15
    assert abs(starts[5] - 0.45) <= 1e-15
    assert abs(starts[6] - 0.35) <= 1e-15
    for m in (4, 5, 6):
        vals = [float(r[2]) for r in by_m[m]]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
    for r4, r5, r6 in zip(by_m[4], by_m[5], by_m[6]):
        assert float(r4[2]) > float(r5[2]) > float(r6[2])


def test_fig2_structure(tmp_path):
    code, text = _run(tmp_path, "--experiment", "fig2", "--n_points", "4",
                      "--R_max", "0.9")
    assert code == 0
    header, rows = _rows(text)
    assert header[:3] == ["M", "R", "zeta_mode"]
    modes = {r[2] for r in rows}
    assert modes == {"best", "half"}
    assert {r[0] for r in rows if r[2] == "best"} == {"4", "5", "6"}
    assert {r[0] for r in rows if r[2] == "half"} == {"6"}
    for r in rows:
        if r[2] == "half":
            assert float(r[-1]) == 0.5
        elif r[4] == "True":
            assert 0.0 < float(r[-1]) < 1.0


def test_console_script_end_to_end(tmp_path):
    out = tmp_path / "cli.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "cogrelay.cli", "--experiment", "outage-curve",
         "--M", "3", "--n_points", "4", "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
    proc2 = subprocess.run(
        ["cogrelay", "--experiment", "outage-curve", "--M", "3",
         "--n_points", "4", "--out", str(tmp_path / "cli2.csv")],
        capture_output=True, text=True)
    assert proc2.returncode == 0, proc2.stderr
    assert (tmp_path / "cli2.csv").read_bytes() == out.read_bytes()
