# fock/solver.py

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import structlog
from numpy.typing import NDArray

from Harmonator.errors import TruncationError
from Harmonator.fock.hamiltonian import FockHamiltonian
from Harmonator.fock.state import FockState, edge_population
from Harmonator.metrics import inc_counter
from Harmonator.model import AtomParams, PulseParams, evaluate_pulse
from Harmonator.rk4 import rk4_step, step_count

log = structlog.get_logger()

MIN_STEPS_PER_PERIOD = 200
DEFAULT_STEPS_PER_CYCLE = 800


@dataclass(frozen=True)
class FockHistory:
    """Sampled amplitudes of one propagation, first sample at t = 0."""

    times: NDArray[np.float64]
    amplitudes: NDArray[np.complex128]
    template: FockState
    dt: float
    steps: int
    max_norm_drift: float
    max_edge_population: float

    def __len__(self) -> int:
        return int(self.times.size)

    def state(self, k: int) -> FockState:
        return self.template.with_amplitudes(self.amplitudes[k])

    def states(self) -> list[FockState]:
        return [self.state(k) for k in range(len(self))]

    @property
    def final(self) -> FockState:
        return self.state(len(self) - 1)


def max_step(pulse: PulseParams, mode_frequencies: tuple[float, ...]) -> float:
    """Coarsest allowed step: min(T, 2 pi / max mode frequency) / 200."""
    shortest = min(pulse.period, 2.0 * math.pi / max(mode_frequencies))
    return shortest / MIN_STEPS_PER_PERIOD


def default_step(
    pulse: PulseParams,
    mode_frequencies: tuple[float, ...],
    steps_per_cycle: int = DEFAULT_STEPS_PER_CYCLE,
) -> float:
    """Step used by the commands: ``max_step`` but no coarser than T / ``steps_per_cycle``.

    At T/800 the norm of a few-cycle run with drives up to omega0 drifts by less than 1e-8;
    ``max_step`` alone only guarantees stability.
    """
    return min(max_step(pulse, mode_frequencies), pulse.period / steps_per_cycle)


def evolve(
    initial: FockState,
    pulse: PulseParams,
    atom: AtomParams,
    t_end: float,
    dt: float,
    *,
    sample_every: int = 1,
    edge_warn: float = 1e-10,
    edge_abort: float = 1e-6,
) -> FockHistory:
    """RK4 Schroedinger propagation without renormalization.

    Norm drift and edge population are checked after every step; amplitudes are stored
    every ``sample_every`` steps and at the last step. Edge population above ``edge_abort``
    raises.
    """
    if abs(initial.norm - 1.0) > 1e-8:
        raise ValueError(f"initial state not normalized (norm {initial.norm:.12g})")
    limit = max_step(pulse, initial.mode_frequencies)
    if dt > limit * (1.0 + 1e-12):
        raise ValueError(f"dt={dt:g} exceeds the allowed step {limit:g}")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")

    ham = FockHamiltonian(
        atom.omega0, initial.m_max, initial.mode_frequencies, initial.mode_couplings
    )

    def rhs(t: float, psi: NDArray[np.complex128]) -> NDArray[np.complex128]:
        return -1j * ham.apply(psi, float(evaluate_pulse(pulse, t)))

    n_steps, h = step_count(t_end, dt)
    sample_idx = sorted(set(range(0, n_steps + 1, sample_every)) | {n_steps})
    times = np.empty(len(sample_idx))
    amps = np.empty((len(sample_idx), *initial.amplitudes.shape), dtype=complex)

    psi = initial.amplitudes.copy()
    max_drift = 0.0
    max_edge = 0.0
    warned = False
    row = 0
    log.info(
        "fock.evolve.start",
        modes=initial.n_modes,
        m_max=initial.m_max,
        dimension=initial.dimension,
        steps=n_steps,
        dt=h,
    )
    for k in range(n_steps + 1):
        if k > 0:
            psi = rk4_step(rhs, (k - 1) * h, psi, h)
        t = t_end if k == n_steps else k * h
        # every step, so a spill between samples still aborts
        edge = edge_population(psi)
        max_edge = max(max_edge, edge)
        max_drift = max(max_drift, abs(math.sqrt(float(np.vdot(psi, psi).real)) - 1.0))
        if edge > edge_abort:
            inc_counter("fock.aborts")
            log.error("fock.truncation.abort", time=t, edge_population=edge, m_max=initial.m_max)
            raise TruncationError(
                f"population {edge:.3e} at photon number {initial.m_max}; increase m_max",
                time=t,
            )
        if edge > edge_warn and not warned:
            warned = True
            log.warning("fock.truncation.edge", time=t, edge_population=edge, m_max=initial.m_max)
        if k == sample_idx[row]:
            times[row] = t
            amps[row] = psi
            row += 1

    inc_counter("fock.propagations")
    inc_counter("fock.rk4.steps", n_steps)
    log.info(
        "fock.evolve.completed",
        steps=n_steps,
        samples=len(sample_idx),
        norm_drift=max_drift,
        edge_population=max_edge,
    )
    return FockHistory(
        times=times,
        amplitudes=amps,
        template=initial,
        dt=h,
        steps=n_steps,
        max_norm_drift=max_drift,
        max_edge_population=max_edge,
    )
