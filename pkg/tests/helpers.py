"""Small builders shared by the numerical tests."""

import math
from pathlib import Path

from Harmonator.model import ModeGrid, PulseParams


def resonant_pulse(e0: float = 1.0, cycles: float = 12.0, **kwargs) -> PulseParams:
    nu = kwargs.pop("nu", 1.0)
    return PulseParams(e0_strength=e0, nu=nu, tau=cycles * 2.0 * math.pi / nu, **kwargs)


def single_mode(omega: float = 1.0, coupling: float = 1e-3) -> ModeGrid:
    return ModeGrid([omega], [coupling])


def table_header(path: Path) -> dict[str, str]:
    """``# key: value`` lines written above a results table."""
    return dict(
        line[2:].split(": ", 1)
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.startswith("# ") and ": " in line
    )
