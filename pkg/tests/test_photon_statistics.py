import math

import numpy as np
import pytest

from Harmonator.fock import (
    FockState,
    cross_term_audit,
    evolve,
    g2_equal_time,
    mandel_summary,
    photon_statistics,
)
from Harmonator.fock.solver import default_step, max_step
from Harmonator.fock.state import coherent_amplitudes
from Harmonator.meanfield import MeanFieldState, integrate
from Harmonator.model import ModeGrid, coupling_law
from Harmonator.runconfig import load_preset
from tests.helpers import resonant_pulse


def _two_mode(**kwargs) -> FockState:
    return FockState.product(
        m_max=kwargs.pop("m_max", 4),
        mode_frequencies=kwargs.pop("mode_frequencies", [7.0, 8.0]),
        mode_couplings=kwargs.pop("mode_couplings", [0.02, 0.02]),
        **kwargs,
    )


class TestPhotonStatistics:
    def test_vacuum_has_undefined_q(self):
        stats = photon_statistics(_two_mode(), 0)
        assert stats.mean == 0.0
        assert stats.mandel_q is None
        assert stats.distribution[0] == pytest.approx(1.0)

    def test_number_state_is_sub_poissonian(self):
        stats = photon_statistics(_two_mode(photons=(3, 1)), 0)
        assert stats.mean == pytest.approx(3.0)
        assert stats.variance == pytest.approx(0.0, abs=1e-12)
        assert stats.mandel_q == pytest.approx(-1.0)

    def test_coherent_state_is_poissonian(self):
        s = FockState.coherent(0.5, m_max=15, mode_frequencies=1.0, mode_couplings=0.01)
        stats = photon_statistics(s, 0)
        assert stats.mean == pytest.approx(0.25, rel=1e-10)
        assert stats.mandel_q == pytest.approx(0.0, abs=1e-10)

    def test_marginal_traces_other_mode(self):
        amps = np.zeros((2, 3, 3), dtype=complex)
        amps[0, 1, 0] = math.sqrt(0.5)
        amps[1, 2, 2] = math.sqrt(0.5)
        s = FockState(amps, 2, (1.0, 2.0), (0.1, 0.1))
        np.testing.assert_allclose(photon_statistics(s, 0).distribution, [0.0, 0.5, 0.5])
        np.testing.assert_allclose(photon_statistics(s, 1).distribution, [0.5, 0.0, 0.5])

    def test_bad_mode_index(self):
        with pytest.raises(IndexError):
            photon_statistics(_two_mode(), 2)

    def test_coherent_amplitudes_normalized(self):
        c = coherent_amplitudes(1.0 + 1.0j, 6)
        assert np.linalg.norm(c) == pytest.approx(1.0)
        assert np.angle(c[1]) == pytest.approx(math.pi / 4)
        np.testing.assert_array_equal(coherent_amplitudes(0.0, 3), [1.0, 0.0, 0.0, 0.0])


class TestG2:
    def test_coherent_product(self):
        s = FockState.coherent(
            [0.5, 0.5], m_max=15, mode_frequencies=[1.0, 2.0], mode_couplings=[0.1, 0.1]
        )
        same = g2_equal_time(s, 0, 0)
        assert same.value == pytest.approx(1.0, rel=1e-8)
        assert same.literal == pytest.approx(1.0 + 1.0 / 0.25, rel=1e-8)
        cross = g2_equal_time(s, 0, 1)
        assert cross.value == pytest.approx(1.0, rel=1e-8)

    def test_number_state(self):
        g2 = g2_equal_time(_two_mode(photons=(3, 1)), 0, 0)
        assert g2.value == pytest.approx(6.0 / 9.0)

    def test_empty_mode_is_undefined(self):
        g2 = g2_equal_time(_two_mode(photons=(2, 0)), 0, 1)
        assert g2.value is None and g2.literal is None

    def test_needs_two_modes(self):
        s = FockState.product(m_max=2, mode_frequencies=1.0, mode_couplings=0.1)
        with pytest.raises(ValueError):
            g2_equal_time(s, 0, 0)


class TestMandelSummary:
    def test_windows(self):
        t = np.arange(11.0)
        q = [None, -0.1, -0.3, 0.2, -0.05, 0.4, 0.1, -0.2, 0.3, 9.0, 9.0]
        summary = mandel_summary(t, q, tau=5.0, period=1.0, average_cycles=3.0)
        assert summary.min_during == pytest.approx(-0.3)
        assert summary.max_during == pytest.approx(0.2)
        assert summary.min_after == pytest.approx(-0.2)
        assert summary.mean_after == pytest.approx(0.15)
        assert summary.positive_fraction_after == pytest.approx(0.75)

    def test_undefined_everywhere(self):
        summary = mandel_summary([0.0, 1.0, 2.0], [None, float("nan"), None], 1.0, 1.0)
        assert summary.min_during is None
        assert summary.mean_after is None


class TestCrossTermAudit:
    def _history(self, atom, frequencies, couplings):
        s = _two_mode(mode_frequencies=frequencies, mode_couplings=couplings, excited=True)
        pulse = resonant_pulse(0.5, cycles=1.0)
        dt = max_step(pulse, tuple(frequencies))
        return evolve(s, pulse, atom, 2.0, dt, sample_every=40)

    def test_zero_coupling_keeps_vacuum_and_zero_terms(self, atom):
        hist = self._history(atom, [7.0, 8.0], [0.0, 0.0])
        for state in hist.states():
            for mode in (0, 1):
                stats = photon_statistics(state, mode)
                assert stats.mean == 0.0
                assert stats.second_moment == 0.0
        report = cross_term_audit(hist)
        assert not np.any(report.neglected)
        assert not np.any(report.kept)
        assert report.max_ratio == 0.0

    def test_weak_coupling_keeps_ratios_small(self, atom):
        hist = self._history(atom, [7.0, 8.0], [0.02, 0.02])
        report = cross_term_audit(hist)
        assert report.times.shape == hist.times.shape
        assert not report.degenerate
        assert 0.0 <= report.max_ratio < 1e-2
        # the initial product state factorizes exactly
        assert report.factorization_error[0] == 0.0

    def test_degenerate_modes_warn(self, atom):
        hist = self._history(atom, [7.0, 7.0], [0.02, 0.02])
        report = cross_term_audit(hist)
        assert report.degenerate
        assert report.warnings
        assert "# warning degenerate" in report.to_text()

    def test_coupling_count_checked(self, atom):
        hist = self._history(atom, [7.0, 8.0], [0.02, 0.02])
        with pytest.raises(ValueError):
            cross_term_audit(hist, couplings=[0.1])

    def test_text_rows(self, atom):
        hist = self._history(atom, [7.0, 8.0], [0.02, 0.02])
        text = cross_term_audit(hist).to_text(period=2 * math.pi)
        lines = text.splitlines()
        assert lines[0].startswith("# t/T")
        assert len(lines) == 1 + len(hist) + 1
        assert lines[-1].startswith("# max_ratio")

    def test_seeded_modes_factorize(self, atom):
        freqs = [7.0, 8.0]
        s = FockState.product(
            m_max=4,
            mode_frequencies=freqs,
            mode_couplings=coupling_law(freqs, 1e-3, atom.omega0),
            photons=(1, 1),
        )
        pulse = resonant_pulse(0.05, cycles=4.0)
        dt = default_step(pulse, s.mode_frequencies)
        hist = evolve(s, pulse, atom, pulse.tau, dt, sample_every=80)
        for state in hist.states():
            assert photon_statistics(state, 0).mean == pytest.approx(1.0, rel=1e-3)
        assert cross_term_audit(hist).max_factorization_error < 1e-2


def _mode_run(cfg, frequencies_over_nu):
    pulse = cfg.pulse()
    freqs = np.asarray(frequencies_over_nu, dtype=float) * pulse.nu
    initial = FockState.product(
        m_max=cfg.m_max,
        mode_frequencies=freqs,
        mode_couplings=coupling_law(freqs, cfg.coupling_scale, cfg.omega0),
    )
    dt = default_step(pulse, initial.mode_frequencies)
    return pulse, dt, initial


@pytest.fixture(scope="module")
def audit_run():
    cfg = load_preset("audit")
    pulse, dt, initial = _mode_run(cfg, cfg.mode_frequencies)
    every = max(1, round(pulse.period / dt / 20))
    return cfg, evolve(initial, pulse, cfg.atom(), cfg.t_end(pulse), dt, sample_every=every)


@pytest.mark.slow
class TestVacuumStart:
    def test_neglected_terms_three_orders_below_kept(self, audit_run):
        _, hist = audit_run
        report = cross_term_audit(hist)
        assert not report.degenerate
        assert report.max_ratio <= 1e-3
        assert np.all(report.kept[1:] > 0.0)

    def test_driven_modes_are_bunched(self, audit_run):
        _, hist = audit_run
        final = hist.final
        for i, j in [(0, 0), (1, 1), (0, 1)]:
            g2 = g2_equal_time(final, i, j)
            assert g2.value is not None and g2.value > 1.0, (i, j)

    def test_single_mode_photon_number_matches_mean_field(self):
        cfg = load_preset("mandel_resonant")
        pulse, dt, initial = _mode_run(cfg, cfg.mode_frequencies)
        atom = cfg.atom()
        stride = 16
        hist = evolve(initial, pulse, atom, pulse.tau, dt, sample_every=stride)
        exact = np.array([photon_statistics(s, 0).mean for s in hist.states()])
        grid = ModeGrid(list(initial.mode_frequencies), list(initial.mode_couplings))
        traj = integrate(MeanFieldState.initial(1), pulse, grid, atom, pulse.tau, dt, stride)
        closure = traj.photon_numbers[:, 0]
        assert np.max(exact) > 0.0
        assert np.max(closure) == pytest.approx(np.max(exact), rel=0.05)
        assert cross_term_audit(hist).max_ratio < 1e-3
