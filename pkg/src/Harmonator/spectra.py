"""Dipole-acceleration power spectra and cross-method spectrum comparison."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from scipy import signal

from Harmonator.errors import SpectrumError
from Harmonator.meanfield.state import Trajectory, clamp_photon_numbers
from Harmonator.model import ModeGrid, evaluate_pulse

log = structlog.get_logger()


class Window(str, Enum):
    RECT = "rect"
    HANN = "hann"


@dataclass(frozen=True)
class PowerSpectrum:
    """One-sided spectrum on increasing angular frequencies.

    For ``RECT`` the bins sum to the time-domain sum of squares of the input.
    """

    frequencies: NDArray[np.float64]
    power: NDArray[np.float64]
    window: Window | None = None
    nu: float | None = None
    reference: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        f = np.asarray(self.frequencies, dtype=float)
        p = np.asarray(self.power, dtype=float)
        if f.shape != p.shape:
            raise ValueError("frequencies and power differ in shape")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be increasing")
        if np.any(p < 0):
            raise ValueError("power must be >= 0")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "power", p)

    @property
    def in_units_of_nu(self) -> NDArray[np.float64]:
        if self.nu is None:
            raise ValueError("spectrum carries no carrier frequency")
        return self.frequencies / self.nu

    def bin_of(self, frequency: float) -> int:
        return int(np.argmin(np.abs(self.frequencies - frequency)))

    def covers(self, frequency: float) -> bool:
        return bool(self.frequencies[0] <= frequency <= self.frequencies[-1])

    def normalized(self, ref_frequency: float, value: float = 1.0) -> PowerSpectrum:
        ref = self.power[self.bin_of(ref_frequency)]
        if ref <= 0.0:
            raise SpectrumError(f"zero power at reference frequency {ref_frequency:g}")
        return replace(self, power=self.power * (value / ref), reference=(ref_frequency, value))


def dipole_acceleration(traj: Trajectory) -> NDArray[np.float64]:
    """d^2u/dt^2 = omega0 (-omega0 u + Omega(t) w + sum_n Omega_n W+_n) at every step."""
    u = np.asarray(traj.dipole_series)
    n = traj.step_times.size
    if u.size != n or traj.w_series.size != n or traj.coupling_sum_series.size != n:
        raise SpectrumError("trajectory lacks full-resolution dipole, inversion or coupling series")
    omega0 = traj.atom.omega0
    drive = evaluate_pulse(traj.pulse, traj.step_times)
    return omega0 * (-omega0 * u + drive * traj.w_series + traj.coupling_sum_series)


def _padded_length(n: int, pad_factor: int) -> int:
    target = max(n * pad_factor, 2)
    return 1 << (target - 1).bit_length()


def power_spectrum(
    series: ArrayLike,
    dt: float,
    window: Window | str = Window.HANN,
    *,
    pad_factor: int = 4,
    nu: float | None = None,
) -> PowerSpectrum:
    """Windowed, zero-padded periodogram of a real series sampled every ``dt``."""
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("series needs at least two samples")
    if dt <= 0:
        raise ValueError("dt must be > 0")
    win = Window(window)
    if win is Window.HANN:
        x = x * signal.get_window("hann", x.size, fftbins=False)
    n_pad = _padded_length(x.size, pad_factor)
    spec = np.fft.rfft(x, n=n_pad)
    power = np.abs(spec) ** 2 / n_pad
    # Fold the negative frequencies onto the positive bins
    power[1 : (n_pad + 1) // 2] *= 2.0
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n_pad, d=dt)
    return PowerSpectrum(frequencies=freqs, power=power, window=win, nu=nu)


def distribution_spectrum(
    grid: ModeGrid, photon_numbers: ArrayLike, nu: float | None = None, tol_neg: float = 1e-12
) -> PowerSpectrum:
    """Final photon-number distribution viewed as a spectrum over the mode frequencies."""
    values = clamp_photon_numbers(np.asarray(photon_numbers, dtype=float), tol_neg)
    return PowerSpectrum(
        frequencies=np.asarray(grid.frequencies), power=np.clip(values, 0.0, None), nu=nu
    )


def _peak_indices(power: NDArray[np.float64], threshold: float) -> NDArray[np.int64]:
    top = float(np.max(power)) if power.size else 0.0
    if top <= 0.0:
        return np.array([], dtype=int)
    peaks, _ = signal.find_peaks(power, height=threshold * top)
    return peaks


@dataclass(frozen=True)
class PeakMatch:
    frequency: float
    matched_frequency: float | None
    offset: float | None
    height: float
    ratio: float | None


@dataclass(frozen=True)
class ComparisonReport:
    ref_frequency: float
    scale: float
    peaks: list[PeakMatch] = field(default_factory=list)

    @property
    def max_abs_offset(self) -> float:
        offsets = [abs(p.offset) for p in self.peaks if p.offset is not None]
        return max(offsets) if offsets else 0.0

    def to_text(self, nu: float | None = None) -> str:
        unit = nu or 1.0
        lines = [
            f"# reference_frequency {self.ref_frequency / unit!r}",
            f"# scale {self.scale!r}",
            "# frequency matched_frequency offset height ratio",
        ]
        for p in self.peaks:
            mf = "nan" if p.matched_frequency is None else repr(p.matched_frequency / unit)
            off = "nan" if p.offset is None else repr(p.offset / unit)
            ratio = "nan" if p.ratio is None else repr(p.ratio)
            lines.append(f"{p.frequency / unit!r} {mf} {off} {p.height!r} {ratio}")
        lines.append(f"# max_abs_offset {self.max_abs_offset / unit!r}")
        return "\n".join(lines) + "\n"


def compare_spectra(
    a: PowerSpectrum, b: PowerSpectrum, ref_frequency: float, threshold: float = 1e-6
) -> ComparisonReport:
    """Scale ``b`` to match ``a`` at ``ref_frequency`` and pair every peak of ``a`` with the
    nearest peak of ``b``."""
    if not (a.covers(ref_frequency) and b.covers(ref_frequency)):
        raise SpectrumError(f"reference {ref_frequency:g} outside one of the spectra")
    ref_a = a.power[a.bin_of(ref_frequency)]
    ref_b = b.power[b.bin_of(ref_frequency)]
    if ref_a <= 0.0 or ref_b <= 0.0:
        raise SpectrumError(f"zero power at reference frequency {ref_frequency:g}")
    scale = float(ref_a / ref_b)
    b_power = b.power * scale

    peaks_a = _peak_indices(a.power, threshold)
    peaks_b = _peak_indices(b_power, threshold)
    fb = b.frequencies[peaks_b]
    matches: list[PeakMatch] = []
    for i in peaks_a:
        fa = float(a.frequencies[i])
        height = float(a.power[i])
        if fb.size == 0:
            matches.append(PeakMatch(fa, None, None, height, None))
            continue
        j = int(np.argmin(np.abs(fb - fa)))
        other = float(fb[j])
        matches.append(
            PeakMatch(fa, other, other - fa, height, float(b_power[peaks_b[j]] / height))
        )
    log.debug("spectra.compare.completed", peaks=len(matches), scale=scale)
    return ComparisonReport(ref_frequency=ref_frequency, scale=scale, peaks=matches)


@dataclass(frozen=True)
class HarmonicPeak:
    order: int
    frequency: float
    offset: float
    height: float
    fwhm: float


@dataclass(frozen=True)
class HarmonicCensus:
    peaks: list[HarmonicPeak]
    cutoff_order: int | None
    odd_even_width_ratio: float | None

    def orders(self) -> list[int]:
        return [p.order for p in self.peaks]


def harmonic_census(
    frequencies: ArrayLike, values: ArrayLike, nu: float, threshold: float = 1e-6
) -> HarmonicCensus:
    """Local maxima above ``threshold`` of the largest value, assigned to the nearest
    harmonic order, with FWHM on the frequency axis."""
    f = np.asarray(frequencies, dtype=float)
    v = np.clip(np.asarray(values, dtype=float), 0.0, None)
    peaks = _peak_indices(v, threshold)
    if peaks.size == 0:
        return HarmonicCensus(peaks=[], cutoff_order=None, odd_even_width_ratio=None)
    widths, _, left, right = signal.peak_widths(v, peaks, rel_height=0.5)
    index = np.arange(f.size)
    f_left = np.interp(left, index, f)
    f_right = np.interp(right, index, f)

    found: list[HarmonicPeak] = []
    for k, i in enumerate(peaks):
        order = int(round(f[i] / nu))
        if order < 1:
            continue
        found.append(
            HarmonicPeak(
                order=order,
                frequency=float(f[i]),
                offset=float(f[i] - order * nu),
                height=float(v[i]),
                fwhm=float(f_right[k] - f_left[k]),
            )
        )
    odd = [p.fwhm for p in found if p.order % 2 == 1]
    even = [p.fwhm for p in found if p.order % 2 == 0]
    ratio = float(np.mean(odd) / np.mean(even)) if odd and even and np.mean(even) > 0 else None
    return HarmonicCensus(
        peaks=found,
        cutoff_order=max((p.order for p in found), default=None),
        odd_even_width_ratio=ratio,
    )
