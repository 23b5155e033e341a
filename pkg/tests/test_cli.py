import json
import math

import numpy as np
import pytest

from rtdeph import cli, engine


def read_rows(path):
    lines = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    assert lines[0] == cli.CSV_HEADER
    rows = []
    for line in lines[1:]:
        vt, g, ef, env, ef_mc, ef_mc_se = line.split(",")
        rows.append(
            {
                "vt": float(vt),
                "g": g,
                "ef": float(ef),
                "env": float(env),
                "ef_mc": float(ef_mc) if ef_mc else None,
                "ef_mc_se": float(ef_mc_se) if ef_mc_se else None,
            }
        )
    return rows


def test_figure_analytic_static_curve(tmp_path):
    out = tmp_path / "fig.csv"
    rc = cli.main(["--mode", "analytic", "--g", "inf", "--out", str(out), "--no-timestamp"])
    assert rc == 0
    rows = read_rows(out)
    # default grid has 601 points: step 2*pi/200 over [0, 6*pi]
    assert len(rows) == 601
    by_vt = {round(r["vt"], 12): r for r in rows}
    assert by_vt[0.0]["ef"] == pytest.approx(1.0, abs=1e-12)
    near_pi = rows[100]  # vt = 100 * 2*pi/200 = pi
    assert near_pi["ef"] == pytest.approx(0.0, abs=1e-9)
    near_2pi = rows[200]
    assert near_2pi["ef"] == pytest.approx(1.0, abs=1e-9)
    assert all(r["ef_mc"] is None for r in rows)
    assert all(r["env"] == 1.0 for r in rows)


def test_figure_analytic_strong_coupling_row(tmp_path):
    from _oracles import Q_ABS_G5_VT_2PI, mp_entanglement_of_formation

    out = tmp_path / "fig.csv"
    rc = cli.main(["--mode", "analytic", "--g", "5", "--out", str(out), "--no-timestamp"])
    assert rc == 0
    row = read_rows(out)[200]  # vt = 2*pi on the default grid
    assert row["vt"] == pytest.approx(2.0 * math.pi, abs=1e-12)
    assert row["ef"] == pytest.approx(mp_entanglement_of_formation(Q_ABS_G5_VT_2PI), abs=1e-9)


def test_figure_values_in_unit_interval(tmp_path):
    out = tmp_path / "fig.csv"
    rc = cli.main(
        ["--mode", "mc", "--g", "5,inf", "--vt-step", "0.9", "--vt-max", "9.0",
         "--n-traj", "200", "--seed", "3", "--out", str(out), "--no-timestamp"]
    )
    assert rc == 0
    rows = read_rows(out)
    assert {r["g"] for r in rows} == {"5.0", "inf"}
    for r in rows:
        assert 0.0 <= r["ef"] <= 1.0
        assert 0.0 <= r["env"] <= 1.0
        assert r["ef_mc"] is not None and 0.0 <= r["ef_mc"] <= 1.0
        assert r["ef_mc_se"] is not None and r["ef_mc_se"] >= 0.0


def test_figure_mc_envelope_relation(tmp_path):
    # the MC curve should roughly track the analytic one
    out = tmp_path / "fig.csv"
    rc = cli.main(
        ["--mode", "mc", "--g", "5", "--vt-step", "0.5", "--vt-max", "12.0",
         "--n-traj", "3000", "--seed", "0", "--out", str(out), "--no-timestamp"]
    )
    assert rc == 0
    rows = read_rows(out)
    worst = max(abs(r["ef"] - r["ef_mc"]) for r in rows)
    assert worst < 0.1


def test_csv_byte_identical_across_threads(tmp_path):
    args = ["--mode", "mc", "--g", "5,1", "--vt-step", "1.3", "--vt-max", "13.0",
            "--n-traj", "500", "--seed", "8", "--no-timestamp"]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--threads", "1", "--out", str(out1)]) == 0
    assert cli.main(args + ["--threads", "3", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_timestamp_toggle(tmp_path):
    args = ["--mode", "analytic", "--g", "inf", "--vt-step", "1.0", "--vt-max", "3.0"]
    stamped = tmp_path / "s.csv"
    bare = tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(stamped)]) == 0
    assert cli.main(args + ["--out", str(bare), "--no-timestamp"]) == 0
    assert any(l.startswith("# generated:") for l in stamped.read_text().splitlines())
    assert not any(l.startswith("# generated:") for l in bare.read_text().splitlines())


def test_compare_mode_passes_and_reports_schema(tmp_path):
    out = tmp_path / "cmp.json"
    rc = cli.main(
        ["--mode", "both", "--g", "5,inf", "--vt-step", "1.0", "--vt-max", "10.0",
         "--n-traj", "2000", "--seed", "1", "--out", str(out), "--no-timestamp"]
    )
    assert rc == 0
    report = json.loads(out.read_text())
    assert set(report) >= {"params", "max_abs_dev", "tolerance", "pass", "per_point"}
    assert report["pass"] is True
    assert report["max_abs_dev"] < 0.05
    point = report["per_point"][0]
    assert set(point) >= {"vt", "q_re", "q_im", "qhat_re", "qhat_im", "se_re", "se_im"}


def test_compare_mode_fail_path(tmp_path, monkeypatch):
    # negative control: corrupt the MC coherences and expect a failing report
    real_run = engine.run_ensemble

    def corrupted(config, n_threads=1):
        result = real_run(config, n_threads=n_threads)
        return engine.EnsembleResult(
            **{**result.__dict__, "q_mean": result.q_mean + 0.5}
        )

    monkeypatch.setattr(engine, "run_ensemble", corrupted)
    out = tmp_path / "cmp.json"
    rc = cli.main(
        ["--mode", "both", "--g", "5", "--vt-step", "1.0", "--vt-max", "6.0",
         "--n-traj", "300", "--seed", "1", "--out", str(out), "--no-timestamp"]
    )
    assert rc == 1
    report = json.loads(out.read_text())
    assert report["pass"] is False
    assert report["max_abs_dev"] > 0.05


def test_recovery_mode(tmp_path):
    out = tmp_path / "rec.json"
    rc = cli.main(
        ["--mode", "recovery", "--g", "5,inf", "--n-traj", "300", "--seed", "0",
         "--revival-n", "1", "--out", str(out), "--no-timestamp"]
    )
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["pass"] is True
    for entry in report["results"]:
        assert entry["concurrence_after"] == pytest.approx(1.0, abs=1e-9)
    finite = next(e for e in report["results"] if e["g"] == "5.0")
    assert finite["expected_uncorrected"] == pytest.approx(math.exp(-0.2 * math.pi), rel=1e-12)
    assert finite["concurrence_before"] < 0.7
    static = next(e for e in report["results"] if e["g"] == "inf")
    assert static["concurrence_before"] == pytest.approx(1.0, abs=1e-9)


def test_autocorr_mode(tmp_path):
    out = tmp_path / "ac.json"
    rc = cli.main(
        ["--mode", "autocorr", "--g", "2", "--n-traj", "20000", "--seed", "4",
         "--out", str(out), "--no-timestamp"]
    )
    assert rc == 0
    report = json.loads(out.read_text())
    section = report["results"][0]
    assert section["gamma"] == pytest.approx(0.5)
    lags = [row["lag"] for row in section["per_lag"]]
    assert lags == pytest.approx([1.0, 2.0, 4.0, 6.0])  # gamma*tau in {0.5,1,2,3}
    for row in section["per_lag"]:
        assert row["expected"] == pytest.approx(math.exp(-0.5 * row["lag"]), rel=1e-12)
        assert row["within_3se"]


def test_autocorr_custom_lags(tmp_path):
    out = tmp_path / "ac.json"
    rc = cli.main(
        ["--mode", "autocorr", "--g", "1", "--n-traj", "5000", "--seed", "4",
         "--lags", "0.25,1.5", "--out", str(out), "--no-timestamp"]
    )
    assert rc == 0
    report = json.loads(out.read_text())
    assert [row["lag"] for row in report["results"][0]["per_lag"]] == [0.25, 1.5]


def test_autocorr_rejects_static_limit():
    assert cli.main(["--mode", "autocorr", "--g", "inf", "--out", "-"]) == 2


def test_invalid_inputs_exit_2():
    assert cli.main(["--mode", "analytic", "--vt-step", "-1"]) == 2
    assert cli.main(["--mode", "analytic", "--g", "0"]) == 2
    assert cli.main(["--mode", "analytic", "--g", "-3"]) == 2
    assert cli.main(["--mode", "recovery", "--revival-n", "0"]) == 2
    assert cli.main(["--mode", "nonsense"]) == 2  # argparse usage error
    assert cli.main(["--config", "/nonexistent/config.txt"]) == 2


def test_unwritable_output_exits_3(tmp_path):
    rc = cli.main(
        ["--mode", "analytic", "--g", "inf", "--vt-step", "1.0", "--vt-max", "2.0",
         "--out", str(tmp_path / "missing_dir" / "x.csv")]
    )
    assert rc == 3


def test_stdout_output(capsys):
    rc = cli.main(["--mode", "analytic", "--g", "inf", "--vt-step", "1.0",
                   "--vt-max", "2.0", "--no-timestamp"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1].startswith("2.0,inf,")


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "sweep.cfg"
    config.write_text(
        "# sweep configuration\n"
        "g = inf\n"
        "vt_step = 1.0\n"
        "vt_max = 4.0   # inline comment\n"
        "mode = analytic\n"
        "no_timestamp = true\n"
    )
    out = tmp_path / "fig.csv"
    rc = cli.main(["--config", str(config), "--out", str(out)])
    assert rc == 0
    assert len(read_rows(out)) == 5

    # flags win over config keys
    rc = cli.main(["--config", str(config), "--vt-max", "2.0", "--out", str(out)])
    assert rc == 0
    assert len(read_rows(out)) == 3


def test_config_rejects_unknown_keys(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("volume = 11\n")
    assert cli.main(["--config", str(config)]) == 2


def test_effective_values_echoed_in_metadata(tmp_path):
    out = tmp_path / "fig.csv"
    rc = cli.main(
        ["--mode", "analytic", "--g", "7", "--vt-step", "1.0", "--vt-max", "2.0",
         "--seed", "42", "--out", str(out), "--no-timestamp"]
    )
    assert rc == 0
    header = [l for l in out.read_text().splitlines() if l.startswith("#")]
    joined = "\n".join(header)
    assert "# g: ['7.0']" in joined
    assert "# seed: 42" in joined
    assert "# backend:" in joined
