"""Run configuration parsing, hashing, and the command-line front end."""

import json

import numpy as np
import pytest

from stsm.cli import main
from stsm.config import DESK, RunConfig
from stsm.container import load_arrays
from stsm.errors import ConfigError

GOOD_CFG = """
[run]
regime = low-gain
workers = 1

[grid]
n_q = 12
n_omega = 12
n_phi = 16

[pump]
w_p = 9e-6

[truncation]
l_max = 7
"""


def test_config_file_round_trip(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(GOOD_CFG)
    cfg = RunConfig.from_file(str(p))
    assert cfg.n_q == 12 and cfg.l_max == 7 and cfg.w_p == 9e-6
    assert cfg.lambda_p0 == DESK.lambda_p0  # untouched defaults


def test_unknown_key_is_hard_error(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("[grid]\nn_qq = 12\n")
    with pytest.raises(ConfigError):
        RunConfig.from_file(str(p))
    p.write_text("[gird]\nn_q = 12\n")
    with pytest.raises(ConfigError):
        RunConfig.from_file(str(p))


def test_bad_values_rejected(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("[grid]\nn_q = twelve\n")
    with pytest.raises(ConfigError):
        RunConfig.from_file(str(p))
    with pytest.raises(ConfigError):
        RunConfig(regime="mid-gain")
    with pytest.raises(ConfigError):
        RunConfig(axis="nope")


def test_config_hash_tracks_content(tmp_path):
    a = RunConfig()
    b = RunConfig(n_q=13)
    assert a.config_hash() != b.config_hash()
    assert a.config_hash() == RunConfig().config_hash()
    assert len(a.config_hash()) == 64


def test_sellmeier_from_config(tmp_path):
    p = tmp_path / "s.cfg"
    p.write_text(
        "[crystal]\nsellmeier_o = 2.7405, 0.0184, 0.0179, 0.0155\n"
        "sellmeier_e = 2.3730, 0.0128, 0.0156, 0.0044\nsellmeier_band = 0.22, 1.5\n"
    )
    cfg = RunConfig.from_file(str(p))
    crystal = cfg.make_crystal()
    assert crystal.sellmeier.ordinary == (2.7405, 0.0184, 0.0179, 0.0155)


# ------------------------------------------------------------------- CLI

def _cli(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def artifact_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("artifact")
    code = _cli("decompose", "-o", str(out))
    assert code == 0
    return out


def test_decompose_writes_artifacts(artifact_dir):
    assert (artifact_dir / "spectrum.csv").exists()
    assert (artifact_dir / "modes.stsm").exists()
    summary = json.loads((artifact_dir / "summary.json").read_text())
    assert summary["invariants"]["pass"] is True
    assert summary["K"] > 1.0
    assert abs(summary["sum_degeneracy_lambda"] - 1.0) < 1e-10
    assert summary["config_hash"] == RunConfig().config_hash()
    first = (artifact_dir / "spectrum.csv").read_text().splitlines()[0]
    assert first == f"# config_hash={RunConfig().config_hash()}"
    arrays = load_arrays(artifact_dir / "modes.stsm")
    assert len(arrays["nonseparability"]) == len(arrays["lambdas"])
    assert np.all(arrays["nonseparability"] >= 1.0 - 1e-12)


def test_decompose_reproducible(tmp_path, artifact_dir):
    out2 = tmp_path / "again"
    assert _cli("decompose", "-o", str(out2)) == 0
    for name in ("spectrum.csv", "modes.stsm", "summary.json"):
        assert (out2 / name).read_bytes() == (artifact_dir / name).read_bytes()


def test_decompose_separable_config_k_one(tmp_path):
    # windows so small that pump, phase matching and phase curvature are
    # all flat: the state factorises and K collapses to 1
    out = tmp_path / "sep"
    code = _cli(
        "decompose", "-o", str(out),
        "--grid.n_q", "6", "--grid.n_omega", "6", "--grid.n_phi", "8",
        "--grid.q_max", "2e4", "--grid.omega_half_width", "5e11",
        "--pump.w_p", "2e-6", "--pump.delta_lambda_p", "1e-9",
        "--truncation.l_max", "3",
    )
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["K"] == pytest.approx(1.0, rel=5e-3)


def test_highgain_decompose_and_k_ordering(tmp_path):
    outs = {}
    for g in ("1.0", "8.0"):
        out = tmp_path / f"hg{g}"
        code = _cli(
            "decompose", "-o", str(out),
            "--run.regime", "high-gain",
            "--grid.n_q", "6", "--grid.n_omega", "6", "--grid.n_phi", "12",
            "--grid.q_max", "1.5e5", "--grid.omega_half_width", "1.5e14",
            "--truncation.l_max", "5",
            "--highgain.g", g, "--highgain.n_rho", "48", "--highgain.n_t", "48",
        )
        assert code == 0
        outs[g] = json.loads((out / "summary.json").read_text())
    assert outs["8.0"]["K"] < outs["1.0"]["K"]
    assert outs["8.0"]["invariants"]["pass"] is True


def test_decompose_warns_on_truncating_window(tmp_path, capsys):
    assert _cli("decompose", "-o", str(tmp_path / "w"),
                "--grid.n_q", "8", "--grid.n_omega", "8") == 0
    assert "window boundary" in capsys.readouterr().err


def test_decompose_evanescent_window_is_domain_error(tmp_path):
    assert _cli("decompose", "-o", str(tmp_path / "e"), "--grid.q_max", "5e7") == 3


def test_validate_passes_on_desk_config(capsys):
    assert _cli("validate") == 0
    assert "PASS" in capsys.readouterr().out


def test_validate_corrupt_weights_fails(capsys):
    assert _cli("validate", "--corrupt-weights") == 5
    assert "FAIL" in capsys.readouterr().out


def test_validate_refuses_oversized_grid(capsys):
    assert _cli("validate", "--grid.n_q", "20") == 2
    assert "refuses" in capsys.readouterr().err


def test_sweep_writes_table(tmp_path):
    out = tmp_path / "sweep"
    code = _cli(
        "sweep", "-o", str(out),
        "--grid.n_q", "10", "--grid.n_omega", "10", "--grid.n_phi", "16",
        "--sweep.axis", "w_p",
        "--sweep.values", "6e-6, 9e-6, 12e-6",
    )
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[1] == "w_p,K"
    assert len(lines) == 5


def test_sweep_without_values_is_config_error():
    assert _cli("sweep") == 2


def test_gain_axis_sweep(tmp_path):
    out = tmp_path / "gsweep"
    code = _cli(
        "sweep", "-o", str(out),
        "--grid.n_q", "6", "--grid.n_omega", "6", "--grid.n_phi", "8",
        "--grid.q_max", "1.5e5", "--grid.omega_half_width", "1.5e14",
        "--highgain.n_rho", "48", "--highgain.n_t", "48",
        "--sweep.axis", "g", "--sweep.values", "1.0, 8.0",
    )
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[1] == "g,K"
    k1, k8 = (float(l.split(",")[1]) for l in lines[2:4])
    assert k8 < k1


def test_export_spectrum_and_mode(tmp_path, artifact_dir):
    spec = tmp_path / "spec.csv"
    assert _cli("export", "--artifact", str(artifact_dir), "--what", "spectrum",
                "--out", str(spec)) == 0
    lines = spec.read_text().splitlines()
    arrays = load_arrays(artifact_dir / "modes.stsm")
    assert len(lines) == 2 + len(arrays["lambdas"])

    mode_out = tmp_path / "mode.stsm"
    assert _cli("export", "--artifact", str(artifact_dir), "--what", "mode",
                "--l", "1", "--m", "0", "--out", str(mode_out)) == 0
    back = load_arrays(mode_out)
    k = int(np.flatnonzero((arrays["ls"] == 1) & (arrays["ms"] == 0))[0])
    assert np.array_equal(back["mode"], arrays["modes"][k])

    assert _cli("export", "--artifact", str(artifact_dir), "--what", "mode",
                "--l", "99", "--m", "0", "--out", str(tmp_path / "x.stsm")) == 2


def test_export_intensity_round_trip(tmp_path, artifact_dir):
    out = tmp_path / "intensity.stsm"
    assert _cli("export", "--artifact", str(artifact_dir), "--what", "intensity",
                "--out", str(out)) == 0
    arrays = load_arrays(out)
    ref = load_arrays(artifact_dir / "modes.stsm")
    assert np.array_equal(arrays["intensity"], ref["intensity"])


def test_export_missing_artifact_is_config_error(tmp_path):
    assert _cli("export", "--artifact", str(tmp_path), "--what", "spectrum",
                "--out", str(tmp_path / "s.csv")) == 2


def test_intensity_shows_anticorrelated_ridge(artifact_dir):
    # the marginal intensity ridge moves to larger q as the frequency
    # detunes from degeneracy (the radial cut of the X profile)
    arrays = load_arrays(artifact_dir / "modes.stsm")
    intensity = arrays["intensity"]
    n_w = intensity.shape[1]
    peaks = [int(np.argmax(intensity[:, j])) for j in range(n_w)]
    centre = n_w // 2
    assert peaks[0] > peaks[centre]
    assert peaks[-1] > peaks[centre]
    assert peaks[0] >= peaks[1] >= peaks[centre]
