# fock/state.py

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from Harmonator.errors import DimensionMismatchError

GROUND, EXCITED = 0, 1


@dataclass(frozen=True)
class FockState:
    """Atom plus one or two truncated modes.

    ``amplitudes`` has shape (2, M+1) or (2, M+1, M+1): axis 0 is the atomic level
    (0 = g, 1 = e), the remaining axes are photon numbers 0..M of each mode.
    """

    amplitudes: NDArray[np.complex128]
    m_max: int
    mode_frequencies: tuple[float, ...]
    mode_couplings: tuple[float, ...]

    def __post_init__(self) -> None:
        n_modes = len(self.mode_frequencies)
        if n_modes not in (1, 2):
            raise DimensionMismatchError("a Fock state carries one or two modes")
        if len(self.mode_couplings) != n_modes:
            raise DimensionMismatchError("one coupling per mode is required")
        expected = (2,) + (self.m_max + 1,) * n_modes
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != expected:
            raise DimensionMismatchError(f"amplitudes shape {amps.shape} != {expected}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_modes(self) -> int:
        return len(self.mode_frequencies)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amplitudes: NDArray[np.complex128]) -> FockState:
        return FockState(amplitudes, self.m_max, self.mode_frequencies, self.mode_couplings)

    def edge_population(self) -> float:
        return edge_population(self.amplitudes)

    @classmethod
    def product(
        cls,
        *,
        m_max: int,
        mode_frequencies: ArrayLike,
        mode_couplings: ArrayLike,
        excited: bool = False,
        photons: tuple[int, ...] | None = None,
    ) -> FockState:
        """|n_1 (, n_2), a> with the atom in g or e."""
        freqs = tuple(float(x) for x in np.atleast_1d(mode_frequencies))
        coups = tuple(float(x) for x in np.atleast_1d(mode_couplings))
        occ = photons if photons is not None else (0,) * len(freqs)
        if len(occ) != len(freqs):
            raise DimensionMismatchError("one photon number per mode is required")
        if any(n < 0 or n > m_max for n in occ):
            raise ValueError(f"photon numbers {occ} outside 0..{m_max}")
        amps = np.zeros((2,) + (m_max + 1,) * len(freqs), dtype=complex)
        amps[(EXCITED if excited else GROUND, *occ)] = 1.0
        return cls(amps, m_max, freqs, coups)

    @classmethod
    def coherent(
        cls,
        alphas: ArrayLike,
        *,
        m_max: int,
        mode_frequencies: ArrayLike,
        mode_couplings: ArrayLike,
        excited: bool = False,
    ) -> FockState:
        """Atom in an eigenstate times a product of truncated, renormalized coherent states."""
        alist = [complex(a) for a in np.atleast_1d(alphas)]
        freqs = tuple(float(x) for x in np.atleast_1d(mode_frequencies))
        if len(alist) != len(freqs):
            raise DimensionMismatchError("one coherent amplitude per mode is required")
        factors = [coherent_amplitudes(a, m_max) for a in alist]
        field = factors[0] if len(factors) == 1 else np.outer(factors[0], factors[1])
        amps = np.zeros((2,) + field.shape, dtype=complex)
        amps[EXCITED if excited else GROUND] = field
        coups = tuple(float(x) for x in np.atleast_1d(mode_couplings))
        return cls(amps, m_max, freqs, coups)


def coherent_amplitudes(alpha: complex, m_max: int) -> NDArray[np.complex128]:
    n = np.arange(m_max + 1)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    mag = abs(alpha)
    if mag == 0.0:
        out = np.zeros(m_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    c = np.exp(-0.5 * mag**2 + n * np.log(mag) - 0.5 * log_fact) * np.exp(1j * n * np.angle(alpha))
    return c / np.linalg.norm(c)


def edge_population(amplitudes: NDArray[np.complex128]) -> float:
    """Largest population over modes at the truncation edge (last index of each mode axis)."""
    probs = np.abs(amplitudes) ** 2
    worst = 0.0
    for axis in range(1, probs.ndim):
        worst = max(worst, float(np.take(probs, -1, axis=axis).sum()))
    return worst
