import subprocess
import sys

import pytest

from stattrials.cli import UsageError, fmt, parse_config_file, run

FAST = {
    "walk": ["--steps", "20", "--trials", "200"],
    "pendulum": ["--t-total", "5", "--burn-in", "1"],
    "scatter": ["--trials", "40"],
    "percolation": ["--size", "16", "--trials", "50", "--p-list", "0.5,0.6"],
    "process": ["--trials", "2000"],
    "arq": ["--frames", "300"],
    "arq-sweep": ["--frames", "300", "--bit-error-p", "0.05"],
    "capacity": ["--frames", "200", "--p-list", "0,0.1", "--d-max", "12"],
    "symbol-channel": ["--trials", "3000"],
}


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt_six_significant_digits():
    assert fmt(0.875) == "0.875"
    assert fmt(1 / 3) == "0.333333"
    assert fmt(19.10714285) == "19.1071"
    assert fmt(7) == "7" and fmt(True) == "1" and fmt(None) == "" and fmt("a1") == "a1"
    assert fmt(-0.0) == "0"


def test_noiseless_arq_row(capsys):
    code, out, _ = invoke(capsys, "arq", "--frame-len", "8", "--bit-error-p", "0", "--frames", "500")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "p,D,N_K,t,retransmissions,v"
    assert row == "0,8,500,4000,0,0.875"


def test_process_reports_analytic_mean(capsys):
    code, out, _ = invoke(capsys, "process")
    assert code == 0
    header, row = out.strip().splitlines()
    values = dict(zip(header.split(","), row.split(",")))
    assert values["analytic_mean"] == "19.1071"
    assert values["analytic_variance"] == "26.6813"


def test_walk_zero_steps(capsys):
    code, out, _ = invoke(capsys, "walk", "--steps", "0", "--trials", "10")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "trial,z" and len(lines) == 11
    assert all(line.endswith(",0") for line in lines[1:])


@pytest.mark.parametrize("command", sorted(FAST))
def test_every_command_is_byte_deterministic(capsys, command):
    argv = [command, *FAST[command]]
    c1, out1, _ = invoke(capsys, *argv)
    c2, out2, _ = invoke(capsys, *argv, "--threads", "8")
    assert c1 == c2 == 0
    assert out1 == out2
    assert out1.splitlines()[0].count(",") >= 1


@pytest.mark.parametrize("argv", [
    ["walk", "--table", "curve", "--steps-list", "5,10", "--trials", "100"],
    ["walk", "--table", "histogram", "--steps", "10", "--trials", "100", "--bins", "4"],
    ["pendulum", "--table", "trajectory", "--t-total", "0.1", "--burn-in", "0"],
    ["pendulum", "--table", "histogram", "--t-total", "5", "--burn-in", "1"],
    ["scatter", "--table", "histogram", "--trials", "20"],
    ["percolation", "--table", "grid", "--size", "5"],
    ["percolation", "--table", "labels", "--size", "5"],
    ["process", "--table", "trials", "--trials", "5"],
    ["symbol-channel", "--table", "running", "--trials", "1000", "--stride", "100"],
    ["symbol-channel", "--table", "confusion", "--trials", "1000"],
])
def test_alternate_tables(capsys, argv):
    code, out, _ = invoke(capsys, *argv)
    assert code == 0 and out


def test_confusion_table_names(capsys):
    _, out, _ = invoke(capsys, "symbol-channel", "--table", "confusion", "--trials", "100")
    lines = out.splitlines()
    assert lines[0] == "input,a1,a2,a3,b"
    assert [line.split(",")[0] for line in lines[1:]] == ["a1", "a2", "a3"]


def test_histogram_table_counts_everything(capsys):
    _, out, _ = invoke(capsys, "walk", "--table", "histogram", "--steps", "10", "--trials", "500")
    counts = [int(line.split(",")[2]) for line in out.splitlines()[1:]]
    assert sum(counts) == 500


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["arq", "--no-such-flag"],
    ["arq", "--frames", "0"],
    ["arq", "--frame-len", "10", "--bit-error-p", "0.2"],
    ["symbol-channel", "--matrix", "0.5,0.6;1,0"],
    ["walk", "--seed", "-1"],
])
def test_invalid_arguments_exit_2(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 2
    assert out == "" and err


def test_runaway_exits_3(capsys):
    code, _, err = invoke(capsys, "process", "--success-probs", "1e-9", "--durations", "1",
                          "--trials", "2")
    assert code == 3 and "simulation failed" in err
    code, _, err = invoke(capsys, "arq", "--frame-len", "2", "--bit-error-p", "0.49",
                          "--frames", "1000", "--max-attempts", "2")
    assert code == 3 and "simulation failed" in err


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nseed=7\n\ntrials=50  # trailing\n")
    assert parse_config_file(cfg) == {"seed": "7", "trials": "50"}
    _, from_file, _ = invoke(capsys, "walk", "--steps", "5", "--config", str(cfg))
    _, explicit, _ = invoke(capsys, "walk", "--steps", "5", "--trials", "50", "--seed", "7")
    assert from_file == explicit
    _, overridden, _ = invoke(capsys, "walk", "--steps", "5", "--config", str(cfg), "--seed", "9")
    _, explicit9, _ = invoke(capsys, "walk", "--steps", "5", "--trials", "50", "--seed", "9")
    assert overridden == explicit9 != from_file


def test_config_unknown_key_names_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sed=7\n")
    code, _, err = invoke(capsys, "walk", "--config", str(cfg))
    assert code == 2 and ":1:" in err and "sed" in err
    with pytest.raises(UsageError):
        parse_config_file(tmp_path / "missing.cfg")
    code, _, _ = invoke(capsys, "walk", "--config", str(tmp_path / "missing.cfg"))
    assert code == 2


@pytest.mark.parametrize("command", sorted(FAST))
def test_manifest_replay(tmp_path, capsys, command):
    out = tmp_path / "first.csv"
    assert run([command, *FAST[command], "--out", str(out)]) == 0
    manifest = tmp_path / "first.csv.manifest"
    text = manifest.read_text()
    assert f"# command={command}" in text and "seed=1" in text
    again = tmp_path / "second.csv"
    assert run([command, "--config", str(manifest), "--out", str(again)]) == 0
    assert again.read_bytes() == out.read_bytes()


def test_manifest_on_stderr_without_out(capsys):
    _, _, err = invoke(capsys, "arq", "--frames", "10")
    assert "# command=arq" in err and "frames=10" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stattrials.cli", "arq", "--bit-error-p", "0",
                           "--frames", "500"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].endswith(",0.875")
