import math

import numpy as np
import pytest

from Harmonator.errors import NumericalAbortError
from Harmonator.fitting import fit_cosine_frequency
from Harmonator.meanfield import MeanFieldState, integrate
from Harmonator.model import ModeGrid, PulseParams, build_mode_grid
from tests.helpers import resonant_pulse, single_mode


def _free(cycles: float) -> PulseParams:
    return PulseParams(e0_strength=0.0, nu=1.0, tau=cycles * 2 * math.pi)


def _energy(states: list[MeanFieldState], grid: ModeGrid, omega0: float) -> np.ndarray:
    return np.array(
        [
            0.5 * omega0 * s.w
            + float(np.sum(grid.frequencies * s.n_exp))
            + 0.5 * float(np.sum(grid.couplings * s.u_plus))
            for s in states
        ]
    )


class TestBasics:
    def test_snapshots_include_start_and_end(self, atom):
        pulse = resonant_pulse(0.5, cycles=1.0)
        traj = integrate(
            MeanFieldState.initial(2),
            pulse,
            build_mode_grid(2, 2.0, 1e-3, 1.0),
            atom,
            pulse.tau,
            pulse.period / 200,
            stride=60,
        )
        np.testing.assert_allclose(traj.times, np.r_[0.0, 60, 120, 180, 200] * traj.dt)
        assert traj.times[-1] == pulse.tau
        assert traj.photon_numbers.shape == (5, 2)
        assert traj.step_times.shape == (201,)
        assert traj.dipole_series.shape == traj.w_series.shape == (201,)

    def test_coarse_step_rejected(self, atom):
        pulse = resonant_pulse(0.5, cycles=1.0)
        with pytest.raises(ValueError):
            integrate(
                MeanFieldState.initial(1), pulse, single_mode(), atom, 1.0, pulse.period / 100
            )

    def test_stride_must_be_positive(self, atom):
        pulse = resonant_pulse(0.5, cycles=1.0)
        with pytest.raises(ValueError):
            integrate(
                MeanFieldState.initial(1), pulse, single_mode(), atom, 1.0, 0.01, stride=0
            )

    def test_non_finite_state_aborts_with_location(self, atom):
        pulse = resonant_pulse(0.5, cycles=1.0)
        bad = MeanFieldState.from_vector(np.r_[np.nan, 0.0, -1.0, np.zeros(7)], 1)
        with pytest.raises(NumericalAbortError) as excinfo:
            integrate(bad, pulse, single_mode(), atom, pulse.tau, pulse.period / 200)
        assert excinfo.value.index == 0
        assert excinfo.value.time == pytest.approx(pulse.period / 200)

    def test_full_snapshots_on_request(self, atom):
        pulse = resonant_pulse(0.5, cycles=1.0)
        traj = integrate(
            MeanFieldState.initial(1), pulse, single_mode(), atom, pulse.tau, pulse.period / 200
        )
        with pytest.raises(ValueError):
            _ = traj.states
        traj = integrate(
            MeanFieldState.initial(1),
            pulse,
            single_mode(),
            atom,
            pulse.tau,
            pulse.period / 200,
            keep_states=True,
        )
        np.testing.assert_array_equal(traj.states[-1].to_vector(), traj.final_state.to_vector())


class TestInvariants:
    def test_vacuum_stays_empty_without_drive(self, atom):
        pulse = _free(12.0)
        grid = build_mode_grid(50, 30.0, 1e-3, 1.0)
        traj = integrate(
            MeanFieldState.initial(50), pulse, grid, atom, pulse.tau, pulse.period / 400
        )
        assert np.max(np.abs(traj.photon_numbers)) < 1e-6

    def test_bloch_length_conserved_without_coupling(self, atom):
        pulse = resonant_pulse(0.5, cycles=10.0)
        traj = integrate(
            MeanFieldState.initial(1),
            pulse,
            single_mode(coupling=0.0),
            atom,
            pulse.tau,
            pulse.period / 1000,
            validity_monitor=False,
        )
        length_sq = np.sum(traj.bloch**2, axis=1)
        assert np.max(np.abs(length_sq - 1.0)) < 1e-10
        assert traj.max_validity_deviation is None

    @pytest.mark.slow
    def test_bloch_length_conserved_over_long_pulse(self, atom):
        pulse = resonant_pulse(0.5, cycles=100.0)
        traj = integrate(
            MeanFieldState.initial(1),
            pulse,
            single_mode(coupling=0.0),
            atom,
            pulse.tau,
            pulse.period / 2000,
            stride=500,
            validity_monitor=False,
        )
        assert traj.times[-1] == pytest.approx(pulse.tau)
        length_sq = np.sum(traj.bloch**2, axis=1)
        assert np.max(np.abs(length_sq - 1.0)) < 1e-10

    def test_validity_monitor_zero_without_coupling(self, atom):
        pulse = resonant_pulse(0.5, cycles=2.0)
        traj = integrate(
            MeanFieldState.initial(1),
            pulse,
            single_mode(coupling=0.0),
            atom,
            pulse.tau,
            pulse.period / 200,
        )
        assert traj.max_validity_deviation == 0.0

    def test_validity_monitor_sees_strong_coupling(self, atom):
        pulse = _free(20.0)
        traj = integrate(
            MeanFieldState.initial(1, excited=True),
            pulse,
            single_mode(coupling=0.05),
            atom,
            pulse.tau,
            pulse.period / 200,
        )
        assert traj.max_validity_deviation > 1e-3

    def test_energy_conserved_without_drive(self, atom):
        pulse = _free(20.0)
        grid = ModeGrid([0.8, 1.0, 1.3], [0.02, 0.03, 0.01])
        traj = integrate(
            MeanFieldState.initial(3, excited=True),
            pulse,
            grid,
            atom,
            pulse.tau,
            pulse.period / 400,
            keep_states=True,
        )
        energy = _energy(traj.states, grid, atom.omega0)
        assert np.max(np.abs(energy - energy[0])) < 1e-6
        # the atom really does hand energy to the modes
        assert traj.final_state.n_exp.sum() > 1e-3

    def test_photon_rate_identity(self, atom):
        pulse = resonant_pulse(1.0, cycles=4.0)
        grid = ModeGrid([1.0, 3.0], [0.02, 0.03])
        traj = integrate(
            MeanFieldState.initial(2),
            pulse,
            grid,
            atom,
            2 * pulse.period,
            pulse.period / 1000,
            stride=1,
            keep_states=True,
        )
        states = traj.states
        n = np.array([s.n_exp for s in states])
        u_minus = np.array([s.u_minus for s in states])
        rate = np.gradient(n, traj.times, axis=0)[1:-1]
        expected = (0.5 * grid.couplings * u_minus)[1:-1]
        scale = np.max(np.abs(expected))
        assert scale > 0
        np.testing.assert_allclose(rate, expected, atol=1e-3 * scale)


class TestAccuracy:
    def test_fourth_order_convergence(self, atom):
        pulse = resonant_pulse(1.0, cycles=4.0)
        grid = ModeGrid([1.0, 2.0, 3.0], [0.05, 0.05, 0.05])
        t_end = 2 * pulse.period
        finals = [
            integrate(
                MeanFieldState.initial(3),
                pulse,
                grid,
                atom,
                t_end,
                pulse.period / steps,
                validity_monitor=False,
            ).final_state.to_vector()
            for steps in (400, 800, 1600)
        ]
        coarse = np.linalg.norm(finals[0] - finals[1])
        fine = np.linalg.norm(finals[1] - finals[2])
        assert coarse / fine == pytest.approx(16.0, abs=2.0)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_early_rabi_frequency(self, atom, n):
        coupling = 1e-3
        rabi = coupling * math.sqrt(n + 1)
        window = 0.2 / rabi
        pulse = _free(1.0)
        traj = integrate(
            MeanFieldState.initial(1, excited=True, seed_index=0, seed_photons=float(n)),
            pulse,
            single_mode(1.0, coupling),
            atom,
            window,
            pulse.period / 200,
            stride=10,
            validity_monitor=False,
        )
        fitted = fit_cosine_frequency(traj.times, traj.bloch[:, 2], rabi)
        assert fitted == pytest.approx(rabi, rel=1e-2)
