# src/Harmonator/commands/simulate.py
import numpy as np
import structlog

from Harmonator.commanding import Invocation, RunOpts, sim_command
from Harmonator.commands.common import carrier_label, harmonic_orders, run_meanfield, units_meta
from Harmonator.meanfield import onset_times, spectrogram
from Harmonator.spectra import harmonic_census
from Harmonator.sweeps import run_ordered

log = structlog.get_logger()


@sim_command(
    name="simulate",
    description="Mean-field run: trajectory, spectrogram and final photon distribution.",
)
def simulate(inv: Invocation, opts: RunOpts) -> None:
    cfg = inv.run_config
    threshold = inv.settings.spectra.peak_threshold

    def one_carrier(nu_over_omega0: float) -> None:
        traj = run_meanfield(inv, nu_over_omega0)
        prefix = carrier_label(cfg, nu_over_omega0)
        pulse = traj.pulse
        meta = units_meta(pulse, nu_over_omega0=repr(nu_over_omega0))
        freq_nu = np.asarray(traj.grid.frequencies) / pulse.nu
        mode_cols = [f"{x:.10g}" for x in freq_nu]
        cycles = traj.times / pulse.period
        photons = traj.clamped_photon_numbers()

        inv.writer.table(
            f"{prefix}trajectory.txt",
            ["t/T", "u", "v", "w", *mode_cols],
            np.column_stack([cycles, traj.bloch, photons]),
            meta,
        )
        spec = spectrogram(traj)
        inv.writer.table(
            f"{prefix}spectrogram.txt",
            ["t/T", *mode_cols],
            np.column_stack([spec.time_cycles, spec.values]),
            meta,
        )
        inv.writer.table(
            f"{prefix}dipole.txt",
            ["t", "u"],
            np.column_stack([traj.step_times, traj.dipole_series]),
            meta,
        )
        final = traj.final_distribution()
        inv.writer.table(
            f"{prefix}final_distribution.txt",
            ["omega/nu", "N"],
            np.column_stack([freq_nu, final]),
            meta,
        )

        census = harmonic_census(freq_nu, final, 1.0, threshold)
        onsets = onset_times(spec, harmonic_orders(freq_nu[-1]))
        lines = ["# order frequency/nu offset/nu height fwhm/nu onset_cycles"]
        for p in census.peaks:
            onset = onsets.get(p.order)
            lines.append(
                f"{p.order} {p.frequency!r} {p.offset!r} {p.height!r} {p.fwhm!r} "
                f"{'nan' if onset is None else repr(onset)}"
            )
        lines.append(f"# cutoff_order {census.cutoff_order}")
        lines.append(f"# odd_even_width_ratio {census.odd_even_width_ratio!r}")
        lines.append(f"# max_validity_deviation {traj.max_validity_deviation!r}")
        inv.writer.text(f"{prefix}census.txt", "\n".join(lines) + "\n", meta)
        log.info(
            "simulate.carrier.completed",
            nu_over_omega0=nu_over_omega0,
            cutoff_order=census.cutoff_order,
            peak_photons=float(np.max(final)),
        )

    run_ordered(one_carrier, cfg.carriers(), inv.threads)
