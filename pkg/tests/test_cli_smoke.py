import numpy as np
import pytest
from click.testing import CliRunner

from Harmonator.cli import EXIT_CONFIG, EXIT_NUMERICAL, build_app, run_command
from Harmonator.command_loader import load_all_commands
from Harmonator.commanding import Command, RunOpts, find_command
from Harmonator.config import load_settings
from Harmonator.errors import NumericalAbortError, SpectrumError
from Harmonator.manifest import MANIFEST_NAME, load_manifest, verify_output_hashes
from tests.helpers import table_header

MAP_CONFIG = """\
omega0 = 1.0
e0_values = [0.2, 0.8]
detuning_values = [-0.1, 0.0, 0.1]
"""

SIMULATE_CONFIG = """\
omega0 = 1.0
drive_strength = 0.5
tau_cycles = 2.0
n_modes = 12
omega_max_over_nu = 12.0
dt_per_cycle = 200
stride = 50
reference_harmonic = 1.0
"""

PHOTON_CONFIG = """\
omega0 = 1.0
drive_strength = 0.5
tau_cycles = 1.0
mode_frequencies = [1.0]
m_max = 6
atom_state = "excited"
"""


@pytest.fixture()
def fast_settings(isolated_tmpdir, monkeypatch):
    monkeypatch.setenv("FLOQUET__STEPS_PER_PERIOD", "500")
    monkeypatch.setenv("FLOQUET__SAMPLES_PER_PERIOD", "512")
    monkeypatch.setenv("LOGGING_CONSOLE", "NONE")
    return isolated_tmpdir


def _invoke(tmp, command: str, text: str, out: str, *extra: str):
    cfg = tmp / f"{out}.toml"
    cfg.write_text(text, encoding="utf-8")
    return CliRunner().invoke(
        build_app(), [command, "--config", str(cfg), "--out", str(tmp / out), *extra]
    )


@pytest.mark.smoke
def test_unknown_key_exits_2_without_outputs(fast_settings):
    result = _invoke(fast_settings, "floquet-map", MAP_CONFIG + "phase = 1.0\n", "bad")
    assert result.exit_code == EXIT_CONFIG
    assert not (fast_settings / "bad").exists()
    assert not [p for p in fast_settings.iterdir() if p.name.startswith(".bad.")]


@pytest.mark.smoke
def test_detuning_at_carrier_cutoff_exits_2(fast_settings):
    text = MAP_CONFIG.replace("[-0.1, 0.0, 0.1]", "[0.0, 1.0]")
    result = _invoke(fast_settings, "floquet-map", text, "cutoff")
    assert result.exit_code == EXIT_CONFIG
    assert "detuning_values" in result.output
    assert not (fast_settings / "cutoff").exists()


def test_downstream_parameter_error_exits_2_and_cleans_up(fast_settings):
    def reject(inv, opts):
        (inv.writer.root / "partial.txt").write_text("x", encoding="utf-8")
        raise SpectrumError("no power at the reference harmonic")

    cmd = Command("reject", "rejects its parameters", RunOpts, reject)
    out = fast_settings / "runs" / "reject"
    assert run_command(cmd, RunOpts(out=str(out)), load_settings()) == EXIT_CONFIG
    assert not out.exists()
    assert list(out.parent.iterdir()) == []


@pytest.mark.smoke
def test_config_and_preset_are_exclusive(fast_settings):
    result = _invoke(
        fast_settings, "floquet-map", MAP_CONFIG, "both", "--preset", "resonant_comb"
    )
    assert result.exit_code == EXIT_CONFIG


@pytest.mark.smoke
def test_floquet_map_writes_verified_run(fast_settings):
    result = _invoke(fast_settings, "floquet-map", MAP_CONFIG, "map")
    assert result.exit_code == 0, result.output
    out = fast_settings / "map"
    manifest = load_manifest(out / MANIFEST_NAME)
    assert manifest.command == "floquet-map"
    assert set(manifest.outputs) == {"delta_epsilon_map.txt"}
    assert verify_output_hashes(manifest, out) == []
    table = np.loadtxt(out / "delta_epsilon_map.txt")
    assert table.shape == (2, 4)
    np.testing.assert_allclose(table[:, 0], [0.2, 0.8])
    assert np.all((table[:, 1:] > 0.0) & (table[:, 1:] <= 0.5))
    header = table_header(out / "delta_epsilon_map.txt")
    assert header["oracle_blocks"] == "40"
    assert float(header["oracle_max_deviation"]) < 1e-4


@pytest.mark.smoke
def test_oracle_blocks_setting_is_used(fast_settings, monkeypatch):
    monkeypatch.setenv("FLOQUET__ORACLE_BLOCKS", "25")
    result = _invoke(fast_settings, "floquet-map", MAP_CONFIG, "blocks")
    assert result.exit_code == 0, result.output
    text = (fast_settings / "blocks" / "delta_epsilon_map.txt").read_text(encoding="utf-8")
    assert "# oracle_blocks: 25\n" in text


@pytest.mark.smoke
def test_thread_count_does_not_change_outputs(fast_settings):
    serial = _invoke(fast_settings, "floquet-map", MAP_CONFIG, "one", "--threads", "1")
    threaded = _invoke(fast_settings, "floquet-map", MAP_CONFIG, "three", "--threads", "3")
    assert serial.exit_code == threaded.exit_code == 0
    a = load_manifest(fast_settings / "one" / MANIFEST_NAME)
    b = load_manifest(fast_settings / "three" / MANIFEST_NAME)
    assert a.outputs == b.outputs
    assert a.reproducibility_hash() == b.reproducibility_hash()
    assert (a.threads, b.threads) == (1, 3)


@pytest.mark.smoke
def test_simulate_outputs(fast_settings):
    result = _invoke(fast_settings, "simulate", SIMULATE_CONFIG, "sim")
    assert result.exit_code == 0, result.output
    manifest = load_manifest(fast_settings / "sim" / MANIFEST_NAME)
    assert set(manifest.outputs) == {
        "trajectory.txt",
        "spectrogram.txt",
        "dipole.txt",
        "final_distribution.txt",
        "census.txt",
    }
    assert manifest.counters["meanfield.rk4.steps"] == 400
    final = np.loadtxt(fast_settings / "sim" / "final_distribution.txt")
    assert final.shape == (12, 2)
    assert np.all(final[:, 1] >= 0.0)


@pytest.mark.smoke
def test_spectrum_outputs(fast_settings):
    result = _invoke(fast_settings, "spectrum", SIMULATE_CONFIG, "spec")
    assert result.exit_code == 0, result.output
    out = fast_settings / "spec"
    manifest = load_manifest(out / MANIFEST_NAME)
    assert set(manifest.outputs) == {
        "power_spectrum.txt",
        "comparison.txt",
        "floquet_lines.txt",
    }
    lines = (out / "floquet_lines.txt").read_text(encoding="utf-8")
    assert "# sideband_offset/nu" in lines


@pytest.mark.smoke
def test_photon_stats_outputs(fast_settings):
    result = _invoke(fast_settings, "photon-stats", PHOTON_CONFIG, "stats")
    assert result.exit_code == 0, result.output
    table = np.loadtxt(fast_settings / "stats" / "stats_mode1.txt")
    assert table.shape[1] == 9
    assert table[0, 1] == 0.0
    assert table[-1, 1] > 0.0


@pytest.mark.smoke
def test_audit_writes_report(fast_settings):
    text = PHOTON_CONFIG.replace("[1.0]", "[2.0, 3.0]").replace("m_max = 6", "m_max = 4")
    result = _invoke(fast_settings, "audit", text, "audit")
    assert result.exit_code == 0, result.output
    out = fast_settings / "audit"
    manifest = load_manifest(out / MANIFEST_NAME)
    assert set(manifest.outputs) == {"audit.txt"}
    lines = (out / "audit.txt").read_text(encoding="utf-8").splitlines()
    assert "# t/T neglected kept ratio factorization_error" in lines
    assert lines[-1].startswith("# max_ratio ")
    assert 0.0 <= float(lines[-1].split()[-1]) < 1e-2
    assert "max_factorization_error" in table_header(out / "audit.txt")


@pytest.mark.smoke
def test_audit_needs_two_modes(fast_settings):
    result = _invoke(fast_settings, "audit", PHOTON_CONFIG, "one_mode")
    assert result.exit_code == EXIT_CONFIG
    assert not (fast_settings / "one_mode").exists()


def test_numerical_abort_exits_3_and_cleans_up(fast_settings):
    def explode(inv, opts):
        (inv.writer.root / "partial.txt").write_text("x", encoding="utf-8")
        raise NumericalAbortError("non-finite state", time=1.5, index=0)

    cmd = Command("boom", "always fails", RunOpts, explode)
    out = fast_settings / "runs" / "boom"
    code = run_command(cmd, RunOpts(out=str(out)), load_settings())
    assert code == EXIT_NUMERICAL
    assert not out.exists()
    assert list(out.parent.iterdir()) == []


def test_every_command_is_registered():
    load_all_commands()
    for name in ("simulate", "floquet-map", "spectrum", "photon-stats", "audit"):
        cmd = find_command(name)
        assert cmd is not None and cmd.option_model is RunOpts
    assert find_command("plot") is None
