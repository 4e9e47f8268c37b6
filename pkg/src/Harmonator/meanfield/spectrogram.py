# meanfield/spectrogram.py

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from Harmonator.meanfield.state import Trajectory


@dataclass(frozen=True)
class Spectrogram:
    """Photon numbers per snapshot (rows) and mode (columns) with axes in T and nu."""

    values: NDArray[np.float64]
    time_cycles: NDArray[np.float64]
    frequency_over_nu: NDArray[np.float64]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    def column(self, harmonic: float) -> int:
        """Mode column nearest to ``harmonic`` (in units of nu)."""
        return int(np.argmin(np.abs(self.frequency_over_nu - harmonic)))


def spectrogram(traj: Trajectory) -> Spectrogram:
    if traj.times.size < 2:
        raise ValueError("spectrogram needs at least two snapshots")
    return Spectrogram(
        values=traj.clamped_photon_numbers(),
        time_cycles=traj.times / traj.pulse.period,
        frequency_over_nu=np.asarray(traj.grid.frequencies) / traj.pulse.nu,
    )


def onset_times(
    spec: Spectrogram, harmonics: list[int] | NDArray, fraction: float = 0.5
) -> dict[int, float | None]:
    """First snapshot time (in cycles) at which each harmonic's mode reaches ``fraction``
    of its final photon number; None for modes that never populate."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    out: dict[int, float | None] = {}
    for m in harmonics:
        col = spec.values[:, spec.column(float(m))]
        final = col[-1]
        if final <= 0.0:
            out[int(m)] = None
            continue
        reached = np.flatnonzero(col >= fraction * final)
        out[int(m)] = float(spec.time_cycles[reached[0]])
    return out
