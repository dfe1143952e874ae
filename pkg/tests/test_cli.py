import json
import math
import subprocess
import sys

import pytest

from sgspectral import cli
from sgspectral.errors import ConfigError


def _write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_bundled_buckingham_miller(tmp_path, capsys):
    out = tmp_path / "bm"
    assert cli.main(["spectrum", "buckingham_miller.cfg", "--out", str(out)]) == 0
    doc = json.loads((out / "spectrum.json").read_text())
    (pt,) = doc["spectral_points"]
    assert abs(complex(*pt["z"]) - 1j) < 1e-6
    assert doc["verification"]["passed"] and doc["count"]["exact_count"] == 1
    assert (out / "count.json").exists() and (out / "scatter.csv").exists()
    assert (out / "trajectories" / "point0_left.csv").exists()
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["status"] == "ok"


def test_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["spectrum", "buckingham_miller.cfg", "--out", str(a)])
    cli.main(["spectrum", "buckingham_miller.cfg", "--out", str(b)])
    for name in ("spectrum.json", "count.json", "scatter.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_floats_reload_losslessly(tmp_path):
    cli.main(["spectrum", "buckingham_miller.cfg", "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    I = doc["count"]["I"]
    assert float(repr(I)) == I and float(format(I, ".17g")) == I


def test_malformed_config(tmp_path, capsys):
    path = _write(tmp_path, "[potential\nfamily = zero\n")
    assert cli.main(["spectrum", str(path)]) == 1
    diag = json.loads(capsys.readouterr().err.strip())
    assert diag["error"] == "ConfigError" and diag["exit_code"] == 1


@pytest.mark.parametrize(
    "text",
    [
        "[potential]\nfamily = nonsense\n",
        "[potential]\nfamily = klaus_shaw_breather\n",
        "[potential]\nfamily = klaus_shaw_breather\npeak = 1\nwidth = 1\nI = 2\n",
        "[potential]\nfamily = monotone_kink\ncolour = red\n",
        "[potential]\nfamily = zero\n[tolerances]\nintegrator = -1\n",
        "[potential]\nfamily = zero\n[output]\nspectrum_json = maybe\n",
        "[potential]\nfamily = zero\n[mystery]\n",
        "[tolerances]\nintegrator = 1e-9\n",
        "[potential]\nfamily = compact_bump\npeak = abc\nhalf_width = 1\n",
    ],
)
def test_invalid_configs_raise(tmp_path, text):
    with pytest.raises(ConfigError):
        cli.load_config(_write(tmp_path, text))


def test_invalid_potential_exits_one(tmp_path, capsys):
    path = _write(tmp_path, f"[potential]\nfamily = klaus_shaw_breather\npeak = 4\nwidth = 1\n[output]\ndir = {tmp_path / 'o'}\n")
    assert cli.main(["count", str(path)]) == 1
    assert json.loads(capsys.readouterr().err.strip())["exit_code"] == 1


def test_over_pi_keys_and_region(tmp_path):
    path = _write(
        tmp_path,
        "[potential]\nfamily = klaus_shaw_breather\npeak_over_pi = 0.5\nI_over_pi = 1.5\n"
        "[region]\nr_min = 0.5\nr_max = 2\n[tolerances]\nintegrator = 1e-10\n",
    )
    (cfg,) = cli.load_config(path)
    assert cfg.params["peak"] == pytest.approx(math.pi / 2) and cfg.params["I"] == pytest.approx(1.5 * math.pi)
    assert cfg.tol == 1e-10 and math.exp(cfg.region.rho0) == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        cli.parse_region("2, 1, 0.1, 1")


def test_inline_comments(tmp_path):
    path = _write(
        tmp_path,
        "# header\n[potential]\nfamily = klaus_shaw_breather  # sech hump\npeak_over_pi = 0.5\nI_over_pi = 1.5\n"
        "[tolerances]\neigen_threshold = 1e-8   ; |W|/scale\n",
    )
    (cfg,) = cli.load_config(path)
    assert cfg.family == "klaus_shaw_breather" and cfg.threshold == 1e-8


def test_count_and_prufer_verbs(tmp_path):
    assert cli.main(["count", "buckingham_miller.cfg", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "count.json").read_text())["count"]["exact_count"] == 1
    assert cli.main(["prufer", "buckingham_miller.cfg", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "prufer.csv").read_text().splitlines()
    assert lines[0] == "theta,L_eta,mismatch" and len(lines) == 258


def test_verify_reuses_spectrum(tmp_path):
    cli.main(["spectrum", "buckingham_miller.cfg", "--out", str(tmp_path)])
    assert cli.main(["verify", "buckingham_miller.cfg", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "verification.json").read_text())["verification"]["passed"]


def test_verify_detects_bad_points(tmp_path):
    cli.main(["spectrum", "buckingham_miller.cfg", "--out", str(tmp_path)])
    path = tmp_path / "spectrum.json"
    doc = json.loads(path.read_text())
    doc["spectral_points"][0]["z"] = [0.5, 0.5]
    path.write_text(json.dumps(doc))
    assert cli.main(["verify", "buckingham_miller.cfg", "--out", str(tmp_path)]) == 2


def test_breather_suite(tmp_path):
    assert cli.main(["spectrum", "breather_suite.cfg", "--out", str(tmp_path)]) == 0
    counts = {}
    for d in sorted(tmp_path.iterdir()):
        doc = json.loads((d / "spectrum.json").read_text())
        assert doc["verification"]["passed"]
        counts[d.name] = sum(1 for q in doc["spectral_points"] if q["z"][0] > 0)
        assert (d / "prufer.csv").exists()
    assert sorted(counts.values()) == [0, 1, 1, 2]


def test_console_script(tmp_path):
    r = subprocess.run(
        [sys.executable, "-m", "sgspectral.cli", "count", "buckingham_miller.cfg", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and json.loads(r.stdout)["exact_count"] == 1
