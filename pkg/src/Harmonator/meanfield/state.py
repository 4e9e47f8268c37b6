# meanfield/state.py

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from Harmonator.errors import DimensionMismatchError
from Harmonator.model import AtomParams, ModeGrid, PulseParams

# Per-mode blocks in the order they are laid out after (u, v, w) in the flat vector
MODE_FIELDS = ("u_plus", "u_minus", "v_plus", "v_minus", "w_plus", "w_minus", "n_exp")
BLOCH_FIELDS = ("u", "v", "w")


@dataclass(frozen=True)
class MeanFieldState:
    """Bloch components plus the mode-assisted variables U±, V±, W± and <N_n>.

    Total dimension 7N + 3.
    """

    u: float
    v: float
    w: float
    u_plus: NDArray[np.float64]
    u_minus: NDArray[np.float64]
    v_plus: NDArray[np.float64]
    v_minus: NDArray[np.float64]
    w_plus: NDArray[np.float64]
    w_minus: NDArray[np.float64]
    n_exp: NDArray[np.float64]

    def __post_init__(self) -> None:
        sizes = {name: np.asarray(getattr(self, name)).size for name in MODE_FIELDS}
        if len(set(sizes.values())) != 1:
            raise DimensionMismatchError(f"mode arrays differ in length: {sizes}")

    @property
    def n_modes(self) -> int:
        return int(np.asarray(self.n_exp).size)

    @property
    def dimension(self) -> int:
        return 7 * self.n_modes + 3

    @property
    def bloch_length_sq(self) -> float:
        return self.u * self.u + self.v * self.v + self.w * self.w

    def to_vector(self) -> NDArray[np.float64]:
        parts = [np.array([self.u, self.v, self.w], dtype=float)]
        parts += [np.asarray(getattr(self, name), dtype=float).ravel() for name in MODE_FIELDS]
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, y: NDArray[np.float64], n_modes: int) -> MeanFieldState:
        y = np.asarray(y, dtype=float)
        if y.size != 7 * n_modes + 3:
            raise DimensionMismatchError(
                f"state vector has {y.size} entries, expected {7 * n_modes + 3} for {n_modes} modes"
            )
        blocks = {
            name: y[3 + k * n_modes : 3 + (k + 1) * n_modes].copy()
            for k, name in enumerate(MODE_FIELDS)
        }
        return cls(u=float(y[0]), v=float(y[1]), w=float(y[2]), **blocks)

    @classmethod
    def initial(
        cls,
        n_modes: int,
        *,
        excited: bool = False,
        seed_index: int | None = None,
        seed_photons: float = 0.0,
    ) -> MeanFieldState:
        """Product of an atomic eigenstate and the mode vacuum (optionally one Fock-seeded mode)."""
        zeros = {name: np.zeros(n_modes) for name in MODE_FIELDS}
        if seed_index is not None and seed_photons > 0:
            if not 0 <= seed_index < n_modes:
                raise DimensionMismatchError(f"seed mode {seed_index} outside grid of {n_modes}")
            zeros["n_exp"][seed_index] = seed_photons
        return cls(u=0.0, v=0.0, w=1.0 if excited else -1.0, **zeros)

    def check_grid(self, grid: ModeGrid) -> None:
        if self.n_modes != grid.size:
            raise DimensionMismatchError(
                f"state has {self.n_modes} modes but the grid has {grid.size}"
            )


def variable_name(index: int, n_modes: int) -> str:
    """Human-readable name of entry ``index`` of the flat state vector."""
    if index < 3:
        return BLOCH_FIELDS[index]
    block, mode = divmod(index - 3, n_modes)
    if block < len(MODE_FIELDS):
        return f"{MODE_FIELDS[block]}[{mode}]"
    return f"reference[{index - 3 - 7 * n_modes}]"


def clamp_photon_numbers(values: NDArray[np.float64], tol_neg: float) -> NDArray[np.float64]:
    """Copy of ``values`` with entries in [-tol_neg, 0) set to zero."""
    out = np.array(values, dtype=float, copy=True)
    out[(out < 0.0) & (out >= -tol_neg)] = 0.0
    return out


@dataclass(frozen=True)
class Trajectory:
    """Recorded mean-field run.

    Snapshots (every ``stride`` steps plus the final step) hold the Bloch vector and the
    photon numbers; the full state vectors are kept only when requested. Series recorded at
    every step (index 0 is t = 0) carry what the dipole acceleration needs.
    """

    times: NDArray[np.float64]
    bloch: NDArray[np.float64]
    photon_numbers: NDArray[np.float64]
    step_times: NDArray[np.float64]
    dipole_series: NDArray[np.float64]
    w_series: NDArray[np.float64]
    coupling_sum_series: NDArray[np.float64]
    final_state: MeanFieldState
    pulse: PulseParams
    grid: ModeGrid
    atom: AtomParams
    dt: float
    steps: int
    full_snapshots: NDArray[np.float64] | None = None
    max_validity_deviation: float | None = None
    tol_neg: float = 1e-12
    metadata: dict = field(default_factory=dict)

    @property
    def states(self) -> list[MeanFieldState]:
        if self.full_snapshots is None:
            raise ValueError("trajectory was recorded without full state snapshots")
        return [MeanFieldState.from_vector(row, self.grid.size) for row in self.full_snapshots]

    @property
    def period(self) -> float:
        return self.pulse.period

    def clamped_photon_numbers(self) -> NDArray[np.float64]:
        return clamp_photon_numbers(self.photon_numbers, self.tol_neg)

    def final_distribution(self) -> NDArray[np.float64]:
        return clamp_photon_numbers(self.final_state.n_exp, self.tol_neg)
