from __future__ import annotations

import dataclasses
import subprocess
import sys

import numpy as np
import pytest

from frachum import ActuatorSpec, Region
from frachum.cli import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_UNREACHABLE,
    ConfigError,
    ProblemConfig,
    Profile,
    main,
    parse_config,
    preset,
)
from frachum.spectral import build_basis, evaluate_field

ZONE_TEXT = "alpha=0.7\nT=1.0\nactuator=zone:0.25,0.75\nregion=0.2,0.8\nz_T=mode:1"


def test_parse_zone_config():
    cfg = parse_config(ZONE_TEXT)
    assert cfg.alpha == 0.7 and cfg.T == 1.0
    assert cfg.actuator == ActuatorSpec.zone(0.25, 0.75)
    assert cfg.region == Region(0.2, 0.8)
    assert cfg.z_T == Profile("mode", (1.0,))
    assert cfg.explicit == {"alpha", "T", "actuator", "region", "z_T"}
    assert cfg.n_modes == 32 and cfg.epsilon == 1e-8


def test_parse_point_config_with_comments():
    text = """
        # Example with a pointwise actuator
        alpha = 0.7   # order
        actuator = point:0.3
        quad = 16x4
        z0 = coeffs:1,0,0.5
        z_T = bump:0.5,0.2
        n_modes = 12
    """
    cfg = parse_config(text)
    assert cfg.actuator == ActuatorSpec.pointwise(0.3)
    assert (cfg.quad.panels, cfg.quad.nodes_per_panel) == (16, 4)
    assert cfg.n_modes == 12
    basis = build_basis(12)
    assert np.array_equal(cfg.z0.field(basis).coeffs[:4], [1, 0, 0.5, 0])
    bump = cfg.z_T.field(basis)
    # symmetric about 0.5, so even modes vanish
    assert np.abs(bump.coeffs[1::2]).max() < 1e-14
    assert evaluate_field(bump, 0.5) == pytest.approx(1.0, abs=2e-2)


def test_alpha_out_of_range():
    with pytest.raises(ConfigError, match=r"alpha out of \(0,1\]"):
        parse_config("alpha=1.5\nactuator=point:0.3")


@pytest.mark.parametrize("text,needle", [
    ("alpha=0.7\nactuator=point:0.3\ncolour=red", "line 3: unknown key 'colour'"),
    ("alpha=0.7\nactuator=point:0.3\nalpha=0.6", "line 3: duplicate key 'alpha'"),
    ("alpha=0.7\n\nactuator=point:1.3", "line 3: bad value for 'actuator'"),
    ("alpha=0.7\nactuator=zone:0.5", "line 2: bad value for 'actuator'"),
    ("alpha=abc\nactuator=point:0.3", "line 1: bad value for 'alpha'"),
    ("alpha=0.7\nactuator=point:0.3\nquad=32", "line 3: bad value for 'quad'"),
    ("alpha=0.7\nactuator=point:0.3\nT=-1", "line 3: T must be positive"),
    ("alpha=0.7\nactuator point:0.3", "line 2: expected key = value"),
    ("alpha=0.7", "missing required key 'actuator'"),
])
def test_errors_name_key_and_line(text, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert needle in str(info.value)


def test_presets():
    ex41, ex42 = preset("example41"), preset("example42")
    assert ex41.actuator == ActuatorSpec.zone(0.25, 0.75)
    assert ex41.region == Region(0.3, 0.7) and ex41.z_T.describe() == "mode:2"
    assert ex42.actuator == ActuatorSpec.pointwise(0.3)
    assert ex42.region == Region(0.2, 0.8) and ex42.z_T.describe() == "mode:1"
    with pytest.raises(ConfigError):
        preset("example43")


def test_overrides_mark_keys_explicit():
    cfg = preset("example42").with_overrides(n_modes=8, epsilon=None)
    assert cfg.n_modes == 8 and "n_modes" in cfg.explicit and "epsilon" not in cfg.explicit
    with pytest.raises(Exception):
        dataclasses.replace(cfg, alpha=0.0)


def _run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--out-dir", str(out)])
    return code, out


def test_analyze_mode_lists_dead_modes(tmp_path):
    cfg = tmp_path / "full.cfg"
    cfg.write_text("alpha=0.7\nactuator=zone:0,1\nn_modes=6\n")
    code, out = _run(tmp_path, "a", "--config", str(cfg), "--mode", "analyze")
    assert code == EXIT_OK
    report = (out / "report.txt").read_text()
    assert "dead_modes: {2, 4, 6}" in report
    assert "live_modes: {1, 3, 5}" in report


def test_simulate_mode(tmp_path):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("alpha=0.7\nactuator=point:0.3\nz0=mode:1\nn_modes=4\n")
    code, out = _run(tmp_path, "s", "--config", str(cfg), "--mode", "simulate")
    assert code == EXIT_OK
    state = np.loadtxt(out / "state_T.csv", delimiter=",", skiprows=1)
    assert state.shape == (401, 3)
    # uncontrolled mode 1 relaxes by E_{0.7,1}(-pi^2)
    assert state[200, 2] == pytest.approx(np.sqrt(2) * 0.036687996509635396201, rel=1e-12)


def test_obstructed_target_exit_status(tmp_path):
    code, out = _run(tmp_path, "o", "--preset", "example41", "--modes", "8")
    assert code == EXIT_UNREACHABLE
    report = (out / "report.txt").read_text()
    assert "status: partial: obstructed target component" in report
    assert (out / "state_T.csv").exists() and (out / "control.csv").exists()


def test_no_live_modes_exit_status(tmp_path):
    cfg = tmp_path / "dead.cfg"
    cfg.write_text("alpha=0.7\nactuator=zone:0.4,0.4\nz_T=mode:1\nn_modes=4\n")
    code, out = _run(tmp_path, "d", "--config", str(cfg))
    assert code == EXIT_UNREACHABLE
    assert "target unreachable" in (out / "report.txt").read_text()


def test_bad_input_exit_status(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("alpha=1.5\nactuator=point:0.3\n")
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path / "b")]) == EXIT_ERROR
    assert "alpha out of (0,1]" in capsys.readouterr().err
    assert main(["--out-dir", str(tmp_path / "n")]) == EXIT_ERROR
    with pytest.raises(SystemExit) as info:
        main(["--preset", "example42", "--mode", "nonsense"])
    assert info.value.code == EXIT_ERROR


def test_config_file_overrides_preset(tmp_path):
    cfg = tmp_path / "over.cfg"
    cfg.write_text("z_T=mode:3\nn_modes=4\n")
    code, out = _run(tmp_path, "v", "--preset", "example42", "--config", str(cfg),
                     "--mode", "analyze")
    assert code == EXIT_OK
    report = (out / "report.txt").read_text()
    assert "z_T: mode:3\n" in report and "actuator: point:0.3\n" in report


def test_hum_needs_alpha_above_half(tmp_path):
    cfg = tmp_path / "half.cfg"
    cfg.write_text("alpha=0.4\nactuator=point:0.3\nz_T=mode:1\nn_modes=4\n")
    assert main(["--config", str(cfg), "--out-dir", str(tmp_path / "h")]) == EXIT_ERROR


def test_small_steering_run_is_reproducible(tmp_path):
    args = ("--preset", "example42", "--modes", "8", "--seed", "3")
    code1, out1 = _run(tmp_path, "r1", *args)
    code2, out2 = _run(tmp_path, "r2", *args)
    assert code1 == code2 == EXIT_OK
    for name in ("state_T.csv", "control.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    report = (out1 / "report.txt").read_text()
    # identical apart from the echoed output directory
    other = (out2 / "report.txt").read_text()
    assert report.replace(str(out1), "") == other.replace(str(out2), "")
    assert "n_modes: 8\n" in report and "epsilon: 1e-08  (default)" in report
    for key in ("alpha", "T", "actuator", "region", "z0", "z_T", "gain_tol", "quad", "seed",
                "minimality_trials", "out_dir"):
        assert f"  {key}: " in report


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "frachum", "--preset", "example41", "--mode", "analyze",
         "--modes", "4", "--out-dir", str(tmp_path / "m")],
        capture_output=True, text=True,
    )
    assert proc.returncode == EXIT_OK
    assert (tmp_path / "m" / "report.txt").exists()


def test_config_dataclass_validation():
    with pytest.raises(Exception, match="mode 9 outside"):
        ProblemConfig(0.7, ActuatorSpec.pointwise(0.3), n_modes=4, z_T=Profile("mode", (9.0,)))
