import numpy as np
import pytest

from Harmonator.meanfield import MeanFieldState, Spectrogram, integrate, onset_times, spectrogram
from Harmonator.model import build_mode_grid
from tests.helpers import resonant_pulse


def _run(atom, stride: int, cycles: float = 1.0):
    pulse = resonant_pulse(1.0, cycles=cycles)
    grid = build_mode_grid(6, 6.0, 1e-2, 1.0)
    return integrate(
        MeanFieldState.initial(6), pulse, grid, atom, pulse.tau, pulse.period / 200, stride=stride
    )


def test_two_snapshots_give_two_rows(atom):
    traj = _run(atom, stride=10_000)
    spec = spectrogram(traj)
    assert spec.shape == (2, 6)
    np.testing.assert_allclose(spec.time_cycles, [0.0, 1.0])
    np.testing.assert_array_equal(spec.values[-1], traj.final_distribution())
    np.testing.assert_allclose(spec.frequency_over_nu, np.arange(1, 7))


def test_values_are_clamped_snapshots(atom):
    traj = _run(atom, stride=20)
    spec = spectrogram(traj)
    assert spec.shape == traj.photon_numbers.shape
    assert not np.any((spec.values < 0.0) & (spec.values >= -traj.tol_neg))


def test_single_snapshot_rejected(atom):
    pulse = resonant_pulse(1.0, cycles=1.0)
    traj = integrate(
        MeanFieldState.initial(1), pulse, build_mode_grid(1, 1.0, 1e-3, 1.0), atom, 0.0, 0.01
    )
    with pytest.raises(ValueError):
        spectrogram(traj)


class TestOnsets:
    def _spec(self) -> Spectrogram:
        t = np.linspace(0.0, 12.0, 13)
        values = np.column_stack(
            [
                np.clip(t / 4.0, 0.0, 1.0),  # harmonic 1: half reached at 2 cycles
                np.clip((t - 6.0) / 4.0, 0.0, 1.0),  # harmonic 3: half reached at 8 cycles
                np.zeros_like(t),  # harmonic 5 never populates
            ]
        )
        return Spectrogram(values, t, np.array([1.0, 3.0, 5.0]))

    def test_low_harmonics_first(self):
        onsets = onset_times(self._spec(), [1, 3, 5])
        assert onsets == {1: 2.0, 3: 8.0, 5: None}

    def test_column_lookup_uses_nearest_mode(self):
        assert self._spec().column(2.9) == 1

    def test_fraction_range(self):
        with pytest.raises(ValueError):
            onset_times(self._spec(), [1], fraction=0.0)
