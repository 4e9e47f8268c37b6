"""Helpers shared by the simulation commands."""

from __future__ import annotations

from typing import Any

import numpy as np

from Harmonator.commanding import Invocation
from Harmonator.fock import FockHistory, FockState, evolve
from Harmonator.fock.solver import default_step
from Harmonator.meanfield import MeanFieldState, Trajectory, integrate
from Harmonator.model import PulseParams, coupling_law
from Harmonator.runconfig import RunConfig


def carrier_label(cfg: RunConfig, nu_over_omega0: float) -> str:
    """File-name prefix for one carrier; empty for single-carrier runs."""
    if len(cfg.carriers()) == 1:
        return ""
    return f"nu{nu_over_omega0:.6g}_"


def run_meanfield(inv: Invocation, nu_over_omega0: float | None = None) -> Trajectory:
    """Integrate the configured mean-field problem for one carrier."""
    cfg = inv.run_config
    settings = inv.settings.integrator
    pulse = cfg.pulse(nu_over_omega0)
    grid = cfg.mode_grid(nu_over_omega0)
    seed = None
    if cfg.seed_photons > 0:
        target = (cfg.seed_mode_frequency or 1.0) * cfg.omega0
        seed = grid.nearest(target)
    initial = MeanFieldState.initial(
        grid.size,
        excited=cfg.atom_state == "excited",
        seed_index=seed,
        seed_photons=cfg.seed_photons,
    )
    steps_per_cycle = cfg.dt_per_cycle or settings.dt_per_cycle
    stride = cfg.stride or settings.stride
    return integrate(
        initial,
        pulse,
        grid,
        cfg.atom(),
        cfg.t_end(pulse),
        pulse.period / steps_per_cycle,
        stride,
        validity_monitor=settings.validity_monitor,
        validity_threshold=settings.validity_threshold,
        tol_bloch=settings.tol_bloch,
        tol_neg=settings.tol_neg,
    )


def units_meta(pulse: PulseParams, **extra: Any) -> dict[str, Any]:
    return {
        "units": "time t/T, frequency omega/nu",
        "nu": repr(pulse.nu),
        "period": repr(pulse.period),
        **extra,
    }


def harmonic_orders(max_frequency_over_nu: float) -> list[int]:
    return list(range(1, int(np.floor(max_frequency_over_nu)) + 1))


def run_fock(inv: Invocation, mode_frequencies_over_nu: list[float]) -> FockHistory:
    """Exact propagation for one or two modes given in units of nu."""
    cfg = inv.run_config
    fock = inv.settings.fock
    pulse = cfg.pulse()
    freqs = np.asarray(mode_frequencies_over_nu, dtype=float) * pulse.nu
    couplings = coupling_law(freqs, cfg.coupling_scale, cfg.omega0)
    m_max = cfg.m_max or fock.m_max
    excited = cfg.atom_state == "excited"
    if cfg.coherent_amplitudes:
        initial = FockState.coherent(
            cfg.coherent_amplitudes,
            m_max=m_max,
            mode_frequencies=freqs,
            mode_couplings=couplings,
            excited=excited,
        )
    else:
        initial = FockState.product(
            m_max=m_max, mode_frequencies=freqs, mode_couplings=couplings, excited=excited
        )
    dt = default_step(pulse, initial.mode_frequencies, fock.min_steps_per_cycle)
    if cfg.dt_per_cycle:
        dt = min(dt, pulse.period / cfg.dt_per_cycle)
    # About twenty samples per carrier cycle
    sample_every = max(1, int(round(pulse.period / (20.0 * dt))))
    return evolve(
        initial,
        pulse,
        cfg.atom(),
        cfg.t_end(pulse),
        dt,
        sample_every=sample_every,
        edge_warn=fock.edge_warn,
        edge_abort=fock.edge_abort,
    )
