# meanfield/equations.py

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from Harmonator.errors import DimensionMismatchError
from Harmonator.meanfield.state import MeanFieldState
from Harmonator.model import AtomParams, ModeGrid, PulseParams, evaluate_pulse


def pairwise_sum(values: NDArray[np.float64]) -> float:
    """Fixed-order pairwise reduction.

    The association order depends only on the length, so the result does not change with
    how the per-mode terms were produced.
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    while x.size > 1:
        if x.size % 2:
            x = np.append(x, 0.0)
        x = x[0::2] + x[1::2]
    return float(x[0])


def flat_rhs(
    t: float,
    y: NDArray[np.float64],
    *,
    drive: float,
    omega0: float,
    frequencies: NDArray[np.float64],
    couplings: NDArray[np.float64],
) -> NDArray[np.float64]:
    """Right-hand side on the flat layout [u, v, w, U+, U-, V+, V-, W+, W-, N]."""
    n = frequencies.size
    u, v, w = y[0], y[1], y[2]
    up, um, vp, vm, wp, wm, ne = (y[3 + k * n : 3 + (k + 1) * n] for k in range(7))
    wt = frequencies
    c = couplings
    pump = c * (2.0 * ne + 1.0)

    out = np.empty_like(y)
    out[0] = omega0 * v
    out[1] = -omega0 * u + drive * w + pairwise_sum(c * wp)
    out[2] = -drive * v - pairwise_sum(c * vp)
    blocks = (
        omega0 * vp - wt * um,
        omega0 * vm + wt * up + c,
        -omega0 * up - wt * vm + drive * wp + w * pump,
        -omega0 * um + wt * vp + drive * wm,
        -wt * wm - drive * vp - v * pump,
        wt * wp - drive * vm,
        0.5 * c * um,
    )
    for k, block in enumerate(blocks):
        out[3 + k * n : 3 + (k + 1) * n] = block
    return out


def make_rhs(
    pulse: PulseParams, grid: ModeGrid, atom: AtomParams
) -> Callable[[float, NDArray[np.float64]], NDArray[np.float64]]:
    """Bind pulse, grid and atom into an ``f(t, y)`` suitable for RK4."""
    freqs = np.asarray(grid.frequencies)
    coup = np.asarray(grid.couplings)
    omega0 = atom.omega0
    expected = 7 * grid.size + 3

    def rhs(t: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
        if y.size != expected:
            raise DimensionMismatchError(
                f"state vector has {y.size} entries, grid needs {expected}"
            )
        return flat_rhs(
            t,
            y,
            drive=float(evaluate_pulse(pulse, t)),
            omega0=omega0,
            frequencies=freqs,
            couplings=coup,
        )

    return rhs


def derivatives(
    s: MeanFieldState, t: float, pulse: PulseParams, grid: ModeGrid, atom: AtomParams
) -> MeanFieldState:
    """Time derivative of every mean-field variable at ``t``, returned as a state."""
    s.check_grid(grid)
    dy = make_rhs(pulse, grid, atom)(t, s.to_vector())
    return MeanFieldState.from_vector(dy, grid.size)


def free_bloch_rhs(drive: float, omega0: float, y: NDArray[np.float64]) -> NDArray[np.float64]:
    """Zero-coupling Bloch equations for the validity reference (u, v, w)."""
    return np.array([omega0 * y[1], -omega0 * y[0] + drive * y[2], -drive * y[1]])


def coupling_sums(
    y: NDArray[np.float64], couplings: NDArray[np.float64]
) -> tuple[float, float]:
    """(sum Omega_n W+_n, sum Omega_n V+_n) from a flat state vector."""
    n = couplings.size
    vp = y[3 + 2 * n : 3 + 3 * n]
    wp = y[3 + 4 * n : 3 + 5 * n]
    return pairwise_sum(couplings * wp), pairwise_sum(couplings * vp)
