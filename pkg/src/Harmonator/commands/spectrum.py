# src/Harmonator/commands/spectrum.py
import numpy as np
import structlog

from Harmonator.commanding import Invocation, RunOpts, sim_command
from Harmonator.commands.common import run_meanfield, units_meta
from Harmonator.floquet import GROUND_STATE, floquet_line_spectrum
from Harmonator.spectra import (
    compare_spectra,
    dipole_acceleration,
    distribution_spectrum,
    harmonic_census,
    power_spectrum,
)

log = structlog.get_logger()


@sim_command(
    name="spectrum",
    description="Dipole-acceleration power spectrum, Floquet lines and comparison report.",
)
def spectrum(inv: Invocation, opts: RunOpts) -> None:
    cfg = inv.run_config
    settings = inv.settings
    traj = run_meanfield(inv)
    pulse = traj.pulse
    nu = pulse.nu
    meta = units_meta(pulse)

    acc = dipole_acceleration(traj)
    power = power_spectrum(
        acc,
        traj.dt,
        cfg.window or settings.spectra.window,
        pad_factor=settings.spectra.pad_factor,
        nu=nu,
    )
    keep = power.frequencies <= cfg.omega_max_over_nu * nu
    inv.writer.table(
        "power_spectrum.txt",
        ["omega/nu", "power"],
        np.column_stack([power.frequencies[keep] / nu, power.power[keep]]),
        {**meta, "window": power.window.value if power.window else "none"},
    )

    distribution = distribution_spectrum(traj.grid, traj.final_state.n_exp, nu, traj.tol_neg)
    ref = cfg.reference_harmonic * nu
    report = compare_spectra(distribution, power, ref, settings.spectra.peak_threshold)
    inv.writer.text("comparison.txt", report.to_text(nu), meta)

    lines = floquet_line_spectrum(
        cfg.atom(),
        pulse.e0_strength,
        nu,
        GROUND_STATE,
        steps=settings.floquet.steps_per_period,
        samples=settings.floquet.samples_per_period,
        max_order=int(np.floor(cfg.omega_max_over_nu)),
    )
    if lines.weights[lines.nearest(ref)] > 0:
        lines = lines.normalized(ref)
    body = ["# omega/nu weight label"]
    body += [
        f"{f / nu!r} {w!r} {label}"
        for f, w, label in zip(lines.frequencies, lines.weights, lines.labels)
    ]
    body.append(f"# delta_epsilon/nu {lines.delta_epsilon / nu!r}")
    body.append(f"# sideband_offset/nu {lines.sideband_offset / nu!r}")
    inv.writer.text("floquet_lines.txt", "\n".join(body) + "\n", meta)

    census = harmonic_census(
        power.frequencies[keep] / nu, power.power[keep], 1.0, settings.spectra.peak_threshold
    )
    log.info(
        "spectrum.completed",
        cutoff_order=census.cutoff_order,
        max_peak_offset=report.max_abs_offset / nu,
        delta_epsilon=lines.delta_epsilon / nu,
    )
