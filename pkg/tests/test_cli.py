"""End-to-end CLI tests through subprocess: exit codes, files, config."""

import subprocess
import sys


def run_cli(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "mtdlab", *[str(a) for a in args]],
        capture_output=True, text=True, cwd=cwd,
    )


def test_model_curve_smoke(tmp_path):
    out = tmp_path / "curve.csv"
    result = run_cli("model-curve", "--mode", "mobile", "--v", "20",
                     "--growth", "static", "--n", "7", "--td", "0.5",
                     "--out", out, cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    assert f"wrote {out}" in result.stdout
    lines = out.read_text().splitlines()
    assert lines[-1].split(",")[0] == "100"


def test_simulate_smoke_deterministic(tmp_path):
    args = ("simulate", "--mode", "static", "--v", "16", "--growth", "static",
            "--n", "3", "--t-max", "30", "--trials", "50", "--seed", "99")
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert run_cli(*args, "--out", first, cwd=tmp_path).returncode == 0
    assert run_cli(*args, "--out", second, cwd=tmp_path).returncode == 0
    assert first.read_bytes() == second.read_bytes()


def test_detect_train_run_pipeline(tmp_path):
    trace = tmp_path / "trace.txt"
    run_cli("gen-trace", "--alphabet", "12", "--length", "5000", "--seed", "4",
            "--out", trace, cwd=tmp_path)
    db = tmp_path / "model.db"
    assert run_cli("detect", "train", "--trace", trace, "--db", db,
                   cwd=tmp_path).returncode == 0
    report = tmp_path / "report.csv"
    result = run_cli("detect", "run", "--trace", trace, "--db", db,
                     "--out", report, cwd=tmp_path)
    assert result.returncode == 0
    assert "anomalous epochs: []" in report.read_text()


def test_policy_run_smoke(tmp_path):
    hosts = tmp_path / "hosts.txt"
    hosts.write_text("h1,a,b,c\nh2,d,e,f\n")
    out = tmp_path / "session.csv"
    result = run_cli("policy", "run", "--hosts", hosts, "--kind", "stateless",
                     "--anomalies", "0", "--out", out, cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "tick,container_id,action,source_host,dest_host,rollback_count,downtime_ms"
    assert rows[1].split(",")[2] == "Restart"


def test_figure_matches_golden(tmp_path, request):
    out = tmp_path / "fig8.csv"
    assert run_cli("figure", "fig8", "--out", out, cwd=tmp_path).returncode == 0
    golden = request.path.parent / "golden" / "fig8.csv"
    assert out.read_bytes() == golden.read_bytes()


def test_error_exit_nonzero_and_no_partial_file(tmp_path):
    out = tmp_path / "never.csv"
    result = run_cli("model-curve", "--mode", "static", "--v", "20",
                     "--growth", "static", "--n", "5", "--t-start", "1",
                     "--out", out, cwd=tmp_path)
    assert result.returncode == 1
    assert "t=1" in result.stderr
    assert not out.exists()
    assert not out.with_suffix(".csv.tmp").exists()


def test_missing_required_parameter_diagnostic(tmp_path):
    result = run_cli("simulate", "--mode", "static", "--out", "x.csv", cwd=tmp_path)
    assert result.returncode == 1
    assert "missing required" in result.stderr


def test_unreadable_trace_fails_cleanly(tmp_path):
    result = run_cli("detect", "train", "--trace", "no_such.txt",
                     "--db", tmp_path / "db", cwd=tmp_path)
    assert result.returncode == 1
    assert "no_such.txt" in result.stderr


def test_invalid_lattice_v_diagnostic(tmp_path):
    result = run_cli("simulate", "--mode", "static", "--v", "7", "--growth",
                     "static", "--n", "2", "--t-max", "10", "--trials", "5",
                     "--out", tmp_path / "x.csv", cwd=tmp_path)
    assert result.returncode == 1
    assert "aspect ratio" in result.stderr


def test_config_file_supplies_defaults(tmp_path):
    config = tmp_path / "lab.conf"
    config.write_text(
        "[simulate]\n"
        "mode = static\n"
        "v = 16\n"
        "growth = static\n"
        "n = 3\n"
        "t-max = 20\n"
        "trials = 25\n"
        "seed = 5\n"
    )
    out = tmp_path / "from_config.csv"
    result = run_cli("simulate", "--config", config, "--out", out, cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    assert "trials=25" in out.read_text()


def test_flags_override_config(tmp_path):
    config = tmp_path / "lab.conf"
    config.write_text("[simulate]\nmode = static\nv = 16\ngrowth = static\n"
                      "n = 3\nt-max = 20\ntrials = 25\nseed = 5\n")
    out = tmp_path / "override.csv"
    result = run_cli("simulate", "--config", config, "--trials", "10",
                     "--out", out, cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    assert "trials=10" in out.read_text()


def test_plot_flag_renders_png(tmp_path):
    out = tmp_path / "curve.csv"
    result = run_cli("model-curve", "--mode", "static", "--v", "20", "--growth",
                     "static", "--n", "5", "--plot", "--out", out, cwd=tmp_path)
    assert result.returncode == 0, result.stderr
    png = tmp_path / "curve.png"
    assert png.exists() and png.stat().st_size > 0
    assert f"wrote {png}" in result.stdout
