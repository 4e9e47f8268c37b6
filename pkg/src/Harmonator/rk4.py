"""Classic fixed-step fourth-order Runge-Kutta stepping shared by all solvers."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

Derivative = Callable[[float, NDArray], NDArray]


def rk4_step(f: Derivative, t: float, y: NDArray, dt: float) -> NDArray:
    """Advance ``y`` from ``t`` to ``t + dt``; works for real or complex arrays of any shape."""
    half = 0.5 * dt
    k1 = f(t, y)
    k2 = f(t + half, y + half * k1)
    k3 = f(t + half, y + half * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def step_count(t_end: float, dt: float) -> tuple[int, float]:
    """Number of steps covering [0, t_end] and the step that lands exactly on t_end.

    The returned step never exceeds ``dt``.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if t_end == 0:
        return 0, dt
    n = int(np.ceil(t_end / dt - 1e-9))
    return n, t_end / n
