"""Physical parameters, the classical drive and the quantized-mode grid.

Units: hbar = 1 and frequencies are angular. The drive enters only through
Omega(t) = d E(t) / hbar and each mode only through its coupling Omega_n, so the dipole
matrix element, field amplitude and quantization volume never appear on their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

log = structlog.get_logger()


class Envelope(str, Enum):
    SIN2 = "sin2"
    FLAT_TOP = "flat_top"
    PURE_SINE = "pure_sine"


class AtomParams(BaseModel):
    """Two-level atom; the dipole matrix element lives inside the drive and couplings."""

    omega0: float = Field(gt=0, description="Transition angular frequency")

    model_config = ConfigDict(extra="forbid", frozen=True)


class PulseParams(BaseModel):
    """Classical drive.

    - ``SIN2``: Omega0 sin^2(pi t / tau) cos(nu t)
    - ``FLAT_TOP``: Omega0 f(t) sin(nu t), f rising as sin^2 over ``ramp_cycles`` cycles,
      one on the plateau and falling symmetrically at the end
    - ``PURE_SINE``: Omega0 sin(nu t)

    All envelopes vanish outside (0, tau).
    """

    e0_strength: float = Field(description="Peak drive d E0 / hbar (angular frequency)")
    nu: float = Field(gt=0, description="Carrier angular frequency")
    tau: float = Field(gt=0, description="Total pulse duration")
    envelope: Envelope = Envelope.SIN2
    ramp_cycles: float = Field(default=5.0, ge=0)

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _ramps_fit(self) -> PulseParams:
        if self.envelope is Envelope.FLAT_TOP:
            if 2.0 * self.ramp_cycles * self.period > self.tau * (1.0 + 1e-12):
                raise ValueError("flat-top ramps longer than the pulse: 2*ramp_cycles*T > tau")
        return self

    @property
    def period(self) -> float:
        return cycle_period(self.nu)

    @property
    def tau_cycles(self) -> float:
        return self.tau / self.period


def cycle_period(nu: float) -> float:
    """T = 2 pi / nu."""
    return 2.0 * math.pi / nu


def evaluate_pulse(p: PulseParams, t: ArrayLike) -> float | NDArray[np.float64]:
    """Drive strength Omega(t) for scalar or array ``t``; exactly zero outside (0, tau)."""
    tt = np.asarray(t, dtype=float)
    inside = (tt > 0.0) & (tt < p.tau)
    if p.envelope is Envelope.SIN2:
        shape = np.sin(np.pi * tt / p.tau) ** 2 * np.cos(p.nu * tt)
    elif p.envelope is Envelope.PURE_SINE:
        shape = np.sin(p.nu * tt)
    else:
        ramp = p.ramp_cycles * p.period
        env = np.ones_like(tt)
        if ramp > 0:
            rising = tt < ramp
            falling = tt > p.tau - ramp
            env = np.where(rising, np.sin(0.5 * np.pi * tt / ramp) ** 2, env)
            env = np.where(falling, np.sin(0.5 * np.pi * (p.tau - tt) / ramp) ** 2, env)
        shape = env * np.sin(p.nu * tt)
    out = np.where(inside, p.e0_strength * shape, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ModeGrid:
    """Quantized-mode frequencies and couplings Omega_n (read-only arrays)."""

    frequencies: NDArray[np.float64]
    couplings: NDArray[np.float64]
    spacing: float = field(default=0.0)

    def __post_init__(self) -> None:
        freqs = np.array(self.frequencies, dtype=float).ravel()
        coup = np.array(self.couplings, dtype=float).ravel()
        if freqs.size == 0:
            raise ValueError("mode grid must contain at least one mode")
        if coup.shape != freqs.shape:
            raise ValueError(
                f"couplings length {coup.size} != frequencies length {freqs.size}"
            )
        if np.any(freqs <= 0):
            raise ValueError("mode frequencies must be > 0")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ValueError("mode frequencies must be strictly increasing")
        if np.any(coup < 0):
            raise ValueError("couplings must be >= 0")
        freqs.setflags(write=False)
        coup.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "couplings", coup)
        if self.spacing == 0.0:
            spacing = float(freqs[1] - freqs[0]) if freqs.size > 1 else float(freqs[0])
            object.__setattr__(self, "spacing", spacing)

    @property
    def size(self) -> int:
        return int(self.frequencies.size)

    def nearest(self, omega: float) -> int:
        """Index of the mode closest to ``omega``."""
        return int(np.argmin(np.abs(self.frequencies - omega)))

    def subset(self, indices: list[int]) -> ModeGrid:
        idx = sorted(set(indices))
        return ModeGrid(self.frequencies[idx], self.couplings[idx], spacing=self.spacing)


def coupling_law(frequencies: ArrayLike, coupling_scale: float, omega0: float) -> NDArray:
    """Omega_n = coupling_scale * omega0 * sqrt(omega_n / omega0)."""
    w = np.asarray(frequencies, dtype=float)
    return coupling_scale * omega0 * np.sqrt(w / omega0)


def build_mode_grid(
    n_modes: int, omega_max: float, coupling_scale: float, omega0: float
) -> ModeGrid:
    """Uniform grid on (0, omega_max]; the first mode sits one spacing above zero."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if omega_max <= 0:
        raise ValueError("omega_max must be > 0")
    if coupling_scale < 0:
        raise ValueError("coupling_scale must be >= 0")
    spacing = omega_max / n_modes
    freqs = spacing * np.arange(1, n_modes + 1, dtype=float)
    grid = ModeGrid(freqs, coupling_law(freqs, coupling_scale, omega0), spacing=spacing)
    log.debug(
        "model.mode_grid.built",
        n_modes=n_modes,
        omega_max=omega_max,
        spacing=spacing,
        coupling_scale=coupling_scale,
    )
    return grid
