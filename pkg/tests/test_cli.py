import csv
import io
import json
import math
import subprocess
import sys

import pytest

from bellphase import __version__
from bellphase.cli import main
from bellphase.verify import perturbed_closed_form, run_verify


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_smax_values(capsys):
    code, out, _ = run(["smax", "--phi", "0", str(math.pi / 2)], capsys)
    assert code == 0
    r = rows(out)
    assert float(r[0]["s_closed"]) == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert float(r[0]["s_numeric"]) == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    assert float(r[1]["s_closed"]) == pytest.approx(2.0, abs=1e-12)


def test_smax_grid_shape(tmp_path, capsys):
    out = tmp_path / "smax.csv"
    code, _, _ = run(["smax", "--phi-num", "181", "--out", str(out)], capsys)
    assert code == 0
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    r = rows(raw.decode())
    s = [float(x["s_closed"]) for x in r]
    assert len(s) == 181 and min(range(181), key=s.__getitem__) == 90
    assert all(a >= b for a, b in zip(s[:91], s[1:91]))
    assert all(a <= b for a, b in zip(s[90:], s[91:]))
    for x in r:
        for v in x.values():
            assert repr(float(v)) == v
    man = json.loads((tmp_path / "smax.manifest.json").read_text())
    assert man["version"] == __version__ and man["command"] == "smax"


def test_probs_degrees(capsys):
    _, deg, _ = run(["probs", "--degrees", "--phi", "90", "--a", "45", "--b", "45"], capsys)
    _, rad, _ = run(["probs", "--phi", str(math.pi / 2), "--a", str(math.pi / 4), "--b", str(math.pi / 4)], capsys)
    for key in ("p_pp", "p_pm", "p_mp", "p_mm"):
        assert float(rows(deg)[0][key]) == pytest.approx(0.25, abs=1e-15)
        assert float(rows(deg)[0][key]) == pytest.approx(float(rows(rad)[0][key]), abs=1e-15)


def test_optimize(capsys):
    code, out, _ = run(["optimize", "--phi", "1.0"], capsys)
    r = rows(out)[0]
    assert code == 0 and float(r["s_numeric"]) == pytest.approx(float(r["s_closed"]), abs=1e-9)


@pytest.mark.parametrize("argv", [
    ["--family", "phi", "--phi", "0.8", "--scheme", "fixed_pair"],
    ["--family", "phi", "--phi", "0", "--scheme", "rotating"],
    ["--family", "psi", "--phi", str(math.pi), "--scheme", "experimental"],
])
def test_compensate_exit_zero(argv, capsys):
    code, out, err = run(["compensate", *argv], capsys)
    assert code == 0
    assert float(rows(out)[0]["s"]) == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    assert "S = 2.828427" in err


def test_compensate_fixed_pair_setting(capsys):
    _, out, _ = run(["compensate", "--phi", "0.8", "--scheme", "fixed_pair"], capsys)
    assert float(rows(out)[0]["chi_1A"]) == pytest.approx(3.941593, abs=1e-6)


def test_compensate_domain_error(capsys):
    code, _, err = run(["compensate", "--scheme", "rotating", "--alpha-a", "0"], capsys)
    assert code == 2 and "error" in err


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"phi": 0.0, "a": 0.0, "b": 0.3}))
    _, from_file, _ = run(["probs", "--config", str(cfg)], capsys)
    assert float(rows(from_file)[0]["b"]) == 0.3
    _, flagged, _ = run(["probs", "--config", str(cfg), "--b", "0.1"], capsys)
    assert float(rows(flagged)[0]["b"]) == 0.1


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"phi": 0.0, "colour": "red"}))
    code, _, err = run(["probs", "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in err


def test_usage_errors(capsys):
    assert main(["probs", "--bogus"]) == 2
    assert main([]) == 2
    capsys.readouterr()


def test_unwritable_output(tmp_path, capsys):
    code, _, _ = run(["probs", "--out", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == 2


def test_scan_fit_fixed_pair(capsys):
    code, out, err = run(["scan-fit", "--scheme", "fixed_pair", "--family", "phi", "--phi", "1.0",
                          "--pair-rate", "1e4", "--seed", "42"], capsys)
    assert code == 0
    assert len(rows(out)) == 20
    phi_hat = float(err.split("phi_hat = ")[1].split()[0])
    assert abs(phi_hat - 1.0) <= 0.05


def test_scan_fit_zero_rate_is_low_visibility(capsys):
    code, out, err = run(["scan-fit", "--pair-rate", "0"], capsys)
    assert code == 1
    assert all(int(r[k]) == 0 for r in rows(out) for k in ("n_pp", "n_pm", "n_mp", "n_mm"))
    assert "phi_hat" in err and "visibility" in err


def test_scan_fit_rotating_domain(capsys):
    code, _, _ = run(["scan-fit", "--scheme", "rotating", "--grid-start", "0"], capsys)
    assert code == 2


def test_simulate_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run(["simulate", "--seed", "7", "--out", str(p)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.manifest.json").read_bytes() == (tmp_path / "b.manifest.json").read_bytes()
    man = json.loads((tmp_path / "a.manifest.json").read_text())
    assert man["inputs"]["seed"] == 7


def test_verify_fails_on_perturbed_closed_form():
    buf = io.StringIO()
    assert run_verify(perturbed_closed_form, stream=buf) is False
    text = buf.getvalue()
    assert "FAIL closed-form vs numeric" in text and "failing case: phi=" in text


@pytest.mark.slow
def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bellphase", "probs", "--phi", "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("phi,a,b,")
