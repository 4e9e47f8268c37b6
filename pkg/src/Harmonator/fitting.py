"""Oscillation-frequency fits used to check Rabi flopping."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import curve_fit


def fit_cosine_frequency(times: ArrayLike, values: ArrayLike, guess: float) -> float:
    """Frequency of ``values ~ cos(omega t)`` (unit amplitude, zero phase and offset).

    Suited to short windows starting at an extremum where a free fit is ill-conditioned.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)

    def model(tt, omega):
        return np.cos(omega * tt)

    popt, _ = curve_fit(model, t, y, p0=[guess])
    return float(abs(popt[0]))


def fit_oscillation_frequency(times: ArrayLike, values: ArrayLike, guess: float) -> float:
    """Frequency of ``values ~ offset + amplitude cos(omega t + phase)``."""
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    amp0 = 0.5 * (float(np.max(y)) - float(np.min(y)))
    off0 = 0.5 * (float(np.max(y)) + float(np.min(y)))
    phase0 = float(np.arccos(np.clip((y[0] - off0) / amp0, -1.0, 1.0))) if amp0 > 0 else 0.0

    def model(tt, omega, amplitude, offset, phase):
        return offset + amplitude * np.cos(omega * tt + phase)

    popt, _ = curve_fit(model, t, y, p0=[guess, amp0, off0, phase0], maxfev=20000)
    return float(abs(popt[0]))
