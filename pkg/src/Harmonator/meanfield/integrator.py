# meanfield/integrator.py

from __future__ import annotations

import numpy as np
import structlog
from numpy.typing import NDArray

from Harmonator.errors import NumericalAbortError
from Harmonator.meanfield.equations import flat_rhs, free_bloch_rhs, pairwise_sum
from Harmonator.meanfield.state import MeanFieldState, Trajectory, variable_name
from Harmonator.metrics import inc_counter
from Harmonator.model import AtomParams, ModeGrid, PulseParams, evaluate_pulse
from Harmonator.rk4 import rk4_step, step_count

log = structlog.get_logger()

# Coarsest step accepted relative to the carrier period
MIN_STEPS_PER_CYCLE = 200


def integrate(
    initial: MeanFieldState,
    pulse: PulseParams,
    grid: ModeGrid,
    atom: AtomParams,
    t_end: float,
    dt: float,
    stride: int = 50,
    *,
    validity_monitor: bool = True,
    validity_threshold: float = 1e-3,
    tol_bloch: float = 1e-6,
    tol_neg: float = 1e-12,
    keep_states: bool = False,
) -> Trajectory:
    """Advance ``initial`` to ``t_end`` with fixed-step RK4.

    The step is shrunk so the last step lands on ``t_end`` exactly. Snapshots are taken at
    t = 0, every ``stride`` steps and at the final step; u, w and the coupling sum are
    recorded at every step. With ``validity_monitor`` a zero-coupling Bloch vector is
    carried along and the largest |w - w_free| is stored on the trajectory.
    """
    initial.check_grid(grid)
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if dt > pulse.period / MIN_STEPS_PER_CYCLE * (1.0 + 1e-12):
        raise ValueError(
            f"dt={dt:g} is coarser than T/{MIN_STEPS_PER_CYCLE} for carrier period {pulse.period:g}"
        )
    n_steps, h = step_count(t_end, dt)
    n_modes = grid.size
    dim = 7 * n_modes + 3
    freqs = np.asarray(grid.frequencies)
    coup = np.asarray(grid.couplings)
    omega0 = atom.omega0

    def rhs(t: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
        drive = float(evaluate_pulse(pulse, t))
        core = flat_rhs(
            t, y[:dim], drive=drive, omega0=omega0, frequencies=freqs, couplings=coup
        )
        if not validity_monitor:
            return core
        return np.concatenate([core, free_bloch_rhs(drive, omega0, y[dim:])])

    y = initial.to_vector()
    if validity_monitor:
        y = np.concatenate([y, y[:3]])

    snap_idx = sorted(set(range(0, n_steps + 1, stride)) | {n_steps})
    snap_set = set(snap_idx)
    times = np.empty(len(snap_idx))
    bloch = np.empty((len(snap_idx), 3))
    photons = np.empty((len(snap_idx), n_modes))
    full = np.empty((len(snap_idx), dim)) if keep_states else None

    step_times = np.arange(n_steps + 1) * h
    if n_steps:
        step_times[-1] = t_end
    u_series = np.empty(n_steps + 1)
    w_series = np.empty(n_steps + 1)
    csum_series = np.empty(n_steps + 1)

    max_dev = 0.0
    breached = False
    bloch_warned = False
    row = 0
    log.info(
        "meanfield.integrate.start",
        n_modes=n_modes,
        steps=n_steps,
        dt=h,
        t_end=t_end,
        stride=stride,
    )

    def record(k: int, t: float) -> None:
        nonlocal row, max_dev, breached, bloch_warned
        u_series[k] = y[0]
        w_series[k] = y[2]
        csum_series[k] = pairwise_sum(coup * y[3 + 4 * n_modes : 3 + 5 * n_modes])
        if validity_monitor:
            dev = abs(y[2] - y[dim + 2])
            if dev > max_dev:
                max_dev = dev
            if dev > validity_threshold and not breached:
                breached = True
                log.warning(
                    "meanfield.validity.breach",
                    time=t,
                    cycles=t / pulse.period,
                    deviation=dev,
                    threshold=validity_threshold,
                )
        if not bloch_warned:
            length_sq = y[0] ** 2 + y[1] ** 2 + y[2] ** 2
            if length_sq > (1.0 + tol_bloch) ** 2:
                bloch_warned = True
                log.warning("meanfield.bloch.excess", time=t, length=float(np.sqrt(length_sq)))
        if k in snap_set:
            times[row] = t
            bloch[row] = y[:3]
            photons[row] = y[3 + 6 * n_modes : dim]
            if full is not None:
                full[row] = y[:dim]
            row += 1

    record(0, 0.0)
    for k in range(1, n_steps + 1):
        t0 = (k - 1) * h
        y = rk4_step(rhs, t0, y, h)
        if not np.all(np.isfinite(y)):
            bad = int(np.flatnonzero(~np.isfinite(y))[0])
            name = variable_name(bad, n_modes)
            inc_counter("meanfield.aborts")
            log.error("meanfield.integrate.aborted", time=step_times[k], index=bad, variable=name)
            raise NumericalAbortError(
                f"non-finite value in {name} at t={step_times[k]:.6g}",
                time=float(step_times[k]),
                index=bad,
            )
        record(k, float(step_times[k]))

    inc_counter("meanfield.rk4.steps", n_steps)
    inc_counter("meanfield.derivative.evals", 4 * n_steps)
    final = MeanFieldState.from_vector(y[:dim], n_modes)
    log.info(
        "meanfield.integrate.completed",
        steps=n_steps,
        snapshots=len(snap_idx),
        max_photons=float(np.max(final.n_exp)),
        max_validity_deviation=max_dev if validity_monitor else None,
    )
    return Trajectory(
        times=times,
        bloch=bloch,
        photon_numbers=photons,
        step_times=step_times,
        dipole_series=u_series,
        w_series=w_series,
        coupling_sum_series=csum_series,
        final_state=final,
        pulse=pulse,
        grid=grid,
        atom=atom,
        dt=h,
        steps=n_steps,
        full_snapshots=full,
        max_validity_deviation=max_dev if validity_monitor else None,
        tol_neg=tol_neg,
    )
