"""Floquet analysis of the two-level atom under a monochromatic sine drive.

The quantized modes are left out here. The drive is Omega'(t) = e0 sin(nu t) and
H'(t) = (omega0/2) sigma_z - (Omega'(t)/2) sigma_x. Quasi-energies follow the convention
psi_k(t) = exp(-i eps_k t) phi_k(t) with phi_k periodic, so the monodromy eigenvalues are
exp(-i eps_k T). Amplitudes are ordered (|e>, |g>), so sigma_z = diag(1, -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from Harmonator.errors import FloquetError, SpectrumError
from Harmonator.metrics import inc_counter
from Harmonator.model import AtomParams, cycle_period
from Harmonator.rk4 import rk4_step
from Harmonator.sweeps import run_ordered

log = structlog.get_logger()

UNITARITY_TOL = 1e-8
DEGENERATE_FRACTION = 1e-9

EXCITED_STATE = np.array([1.0, 0.0], dtype=complex)
GROUND_STATE = np.array([0.0, 1.0], dtype=complex)


def fold_quasienergy(eps: float | NDArray, nu: float) -> float | NDArray:
    """Fold into (-nu/2, nu/2]."""
    return 0.5 * nu - np.mod(0.5 * nu - np.asarray(eps, dtype=float), nu)


def smallest_splitting(eps1: float, eps2: float, nu: float) -> float:
    """Smallest difference between two quasi-energies taken modulo nu."""
    d = float(np.mod(abs(eps1 - eps2), nu))
    return min(d, nu - d)


def _two_level_rhs(omega0: float, e0: NDArray[np.float64], nu: float):
    half_w = 0.5 * omega0
    half_e = 0.5 * e0[:, None]

    def rhs(t: float, u: NDArray[np.complex128]) -> NDArray[np.complex128]:
        drive = half_e * math.sin(nu * t)
        out = np.empty_like(u)
        out[:, 0, :] = -1j * (half_w * u[:, 0, :] - drive * u[:, 1, :])
        out[:, 1, :] = -1j * (-drive * u[:, 0, :] - half_w * u[:, 1, :])
        return out

    return rhs


def _propagate(
    omega0: float,
    e0: NDArray[np.float64],
    nu: float,
    u0: NDArray[np.complex128],
    steps: int,
    *,
    record: bool = False,
) -> tuple[NDArray[np.complex128], NDArray[np.complex128] | None]:
    """RK4 over one period for a batch of drive strengths; ``u0`` has shape (B, 2, k)."""
    rhs = _two_level_rhs(omega0, e0, nu)
    dt = cycle_period(nu) / steps
    u = np.array(u0, dtype=complex)
    history = np.empty((steps + 1, *u.shape), dtype=complex) if record else None
    if history is not None:
        history[0] = u
    for k in range(steps):
        u = rk4_step(rhs, k * dt, u, dt)
        if history is not None:
            history[k + 1] = u
    return u, history


def monodromy_batch(
    atom: AtomParams, e0_values: ArrayLike, nu: float, steps: int = 4000
) -> NDArray[np.complex128]:
    """One-period propagators, shape (B, 2, 2), for several drive strengths at one carrier."""
    if nu <= 0:
        raise ValueError("nu must be > 0")
    e0 = np.atleast_1d(np.asarray(e0_values, dtype=float))
    eye = np.broadcast_to(np.eye(2, dtype=complex), (e0.size, 2, 2))
    m, _ = _propagate(atom.omega0, e0, nu, eye, steps)
    inc_counter("floquet.monodromy.solves", e0.size)
    return m


def monodromy(
    atom: AtomParams, e0_strength: float, nu: float, steps: int = 4000
) -> NDArray[np.complex128]:
    """Propagator over one period T = 2 pi / nu starting from the identity at t = 0."""
    return monodromy_batch(atom, [e0_strength], nu, steps)[0]


@dataclass(frozen=True)
class FloquetResult:
    monodromy: NDArray[np.complex128]
    nu: float
    quasi_energies: tuple[float, float]
    delta_epsilon: float
    zone_splitting: float
    floquet_states_t0: NDArray[np.complex128]  # columns are |phi_1(0)>, |phi_2(0)>

    @property
    def period(self) -> float:
        return cycle_period(self.nu)

    @property
    def degenerate(self) -> bool:
        return self.delta_epsilon < DEGENERATE_FRACTION * self.nu

    def shifted(self, m1: int, m2: int) -> FloquetResult:
        """Same states with eps_k moved to another member of its equivalence class."""
        e1, e2 = self.quasi_energies
        return replace(self, quasi_energies=(e1 + m1 * self.nu, e2 + m2 * self.nu))


def quasienergies(m: NDArray[np.complex128], nu: float) -> FloquetResult:
    """Quasi-energies, splitting and t = 0 Floquet states from a monodromy matrix.

    States are ordered by ascending folded quasi-energy.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise FloquetError(f"monodromy must be 2x2, got {m.shape}")
    defect = float(np.linalg.norm(m.conj().T @ m - np.eye(2)))
    if not np.isfinite(defect) or defect > UNITARITY_TOL:
        raise FloquetError(f"monodromy is not unitary (defect {defect:.3e})")
    try:
        lam, vecs = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise FloquetError(f"eigen-decomposition failed: {exc}") from exc

    period = cycle_period(nu)
    eps = fold_quasienergy(-np.angle(lam) / period, nu)
    order = np.argsort(eps)
    eps = eps[order]
    vecs = vecs[:, order]

    # Degenerate eigenvalues leave eig free to return non-orthogonal vectors
    v1 = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    v2 = vecs[:, 1] - np.vdot(v1, vecs[:, 1]) * v1
    v2 = v2 / np.linalg.norm(v2)
    states = np.column_stack([v1, v2])

    e1, e2 = float(eps[0]), float(eps[1])
    return FloquetResult(
        monodromy=m,
        nu=nu,
        quasi_energies=(e1, e2),
        delta_epsilon=smallest_splitting(e1, e2, nu),
        zone_splitting=abs(e1 - e2),
        floquet_states_t0=states,
    )


def floquet_analysis(
    atom: AtomParams, e0_strength: float, nu: float, steps: int = 4000
) -> FloquetResult:
    return quasienergies(monodromy(atom, e0_strength, nu, steps), nu)


def delta_epsilon_map(
    atom: AtomParams,
    e0_range: ArrayLike,
    detuning_range: ArrayLike,
    *,
    steps: int = 4000,
    threads: int = 1,
) -> NDArray[np.float64]:
    """delta_eps / nu with rows over drive strength and columns over detuning omega0 - nu."""
    e0 = np.asarray(e0_range, dtype=float).ravel()
    det = np.asarray(detuning_range, dtype=float).ravel()
    if e0.size == 0 or det.size == 0:
        raise ValueError("drive and detuning ranges must be nonempty")
    if np.any(atom.omega0 - det <= 0):
        raise ValueError("detuning leaves a non-positive carrier frequency")

    def column(delta: float) -> NDArray[np.float64]:
        nu = atom.omega0 - delta
        mats = monodromy_batch(atom, e0, nu, steps)
        return np.array([quasienergies(mm, nu).delta_epsilon / nu for mm in mats])

    cols = run_ordered(column, list(det), threads)
    out = np.column_stack(cols)
    log.info("floquet.map.completed", rows=e0.size, columns=det.size, threads=threads)
    return out


def extended_floquet_quasienergies(
    atom: AtomParams, e0_strength: float, nu: float, blocks: int = 40
) -> tuple[float, float, float]:
    """Central-zone quasi-energies from the truncated extended (Shirley) Floquet matrix.

    Independent of time stepping; returns (eps_1, eps_2, delta_eps).
    """
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    h0 = np.diag([0.5 * atom.omega0, -0.5 * atom.omega0]).astype(complex)
    h_up = 0.25j * e0_strength * sx  # couples block n to n - 1
    size = 2 * (2 * blocks + 1)
    hf = np.zeros((size, size), dtype=complex)
    for k, n in enumerate(range(-blocks, blocks + 1)):
        s = slice(2 * k, 2 * k + 2)
        hf[s, s] = h0 + n * nu * np.eye(2)
        if k > 0:
            prev = slice(2 * k - 2, 2 * k)
            hf[s, prev] = h_up
            hf[prev, s] = h_up.conj().T
    vals = linalg.eigh(hf, eigvals_only=True)
    # One member of each family lies in the central zone; edge artefacts sit near +-blocks*nu
    pick = np.argsort(np.abs(vals))[:2]
    eps = np.sort(fold_quasienergy(vals[pick], nu))
    e1, e2 = float(eps[0]), float(eps[1])
    return e1, e2, smallest_splitting(e1, e2, nu)


def extended_delta_epsilon_map(
    atom: AtomParams,
    e0_range: ArrayLike,
    detuning_range: ArrayLike,
    *,
    blocks: int = 40,
    threads: int = 1,
) -> NDArray[np.float64]:
    """Same grid as ``delta_epsilon_map`` from the extended matrix instead of the monodromy."""
    e0 = np.asarray(e0_range, dtype=float).ravel()
    det = np.asarray(detuning_range, dtype=float).ravel()
    if np.any(atom.omega0 - det <= 0):
        raise ValueError("detuning leaves a non-positive carrier frequency")

    def column(delta: float) -> NDArray[np.float64]:
        nu = atom.omega0 - delta
        return np.array(
            [extended_floquet_quasienergies(atom, float(s), nu, blocks)[2] / nu for s in e0]
        )

    return np.column_stack(run_ordered(column, list(det), threads))


@dataclass(frozen=True)
class LineLabel:
    kind: str  # "odd" or "sideband"
    order: int
    sign: int = 0
    merged: bool = False

    def __str__(self) -> str:
        if self.kind == "odd":
            return f"odd {self.order}"
        mark = "~" if self.merged else ("+" if self.sign > 0 else "-")
        return f"sideband {self.order}{mark}"


@dataclass(frozen=True)
class LineSpectrum:
    frequencies: NDArray[np.float64]
    weights: NDArray[np.float64]
    labels: list[LineLabel]
    nu: float
    delta_epsilon: float
    sideband_offset: float
    alpha: complex
    beta: complex
    diagonal_coefficients: NDArray[np.complex128] = field(repr=False)

    def nearest(self, frequency: float) -> int:
        return int(np.argmin(np.abs(self.frequencies - frequency)))

    def normalized(self, ref_frequency: float, value: float = 1.0) -> LineSpectrum:
        """Rescale so the line nearest ``ref_frequency`` carries ``value``."""
        ref = self.weights[self.nearest(ref_frequency)]
        if ref <= 0.0:
            raise SpectrumError(f"no weight at reference frequency {ref_frequency:g}")
        return replace(self, weights=self.weights * (value / ref))


def _sideband_label(freq: float, nu: float, offset: float, merged: bool) -> LineLabel:
    """Label m nu +- offset with m even; lines of the suppressed class get the nearest order."""
    lo = math.floor(freq / nu)
    tol = 1e-6 * nu
    fits = [m for m in (lo - 1, lo, lo + 1, lo + 2) if abs(abs(freq - m * nu) - offset) < tol]
    even = [m for m in fits if m % 2 == 0]
    order = even[0] if even else int(round(freq / nu))
    sign = 1 if freq - order * nu > 0 else -1
    return LineLabel(kind="sideband", order=order, sign=sign, merged=merged)


def line_spectrum_from_result(
    result: FloquetResult,
    atom: AtomParams,
    e0_strength: float,
    initial_atomic_state: ArrayLike,
    *,
    samples: int = 4096,
    max_order: int = 40,
) -> LineSpectrum:
    """Dipole lines of the atom started in ``initial_atomic_state`` at t = 0.

    Weights are |coefficient of exp(i omega t)|^2 omega^4 in <sigma_x>(t).
    """
    psi0 = np.asarray(initial_atomic_state, dtype=complex).ravel()
    if psi0.shape != (2,) or abs(np.linalg.norm(psi0) - 1.0) > 1e-8:
        raise ValueError("initial atomic state must be a normalized 2-vector")
    nu = result.nu
    period = result.period
    phi0 = result.floquet_states_t0
    alpha = complex(np.vdot(phi0[:, 0], psi0))
    beta = complex(np.vdot(phi0[:, 1], psi0))

    _, hist = _propagate(
        atom.omega0, np.array([e0_strength]), nu, phi0[None, :, :], samples, record=True
    )
    assert hist is not None
    psi = hist[:samples, 0]  # (K, 2, 2); columns are psi_1(t), psi_2(t)
    t = np.arange(samples) * (period / samples)
    a1, b1 = psi[:, 0, 0], psi[:, 1, 0]
    a2, b2 = psi[:, 0, 1], psi[:, 1, 1]
    d11 = 2.0 * np.real(np.conj(a1) * b1)
    d22 = 2.0 * np.real(np.conj(a2) * b2)
    d12 = np.conj(a1) * b2 + np.conj(b1) * a2
    e1, e2 = result.quasi_energies
    shift = e1 - e2
    p12 = np.exp(-1j * shift * t) * d12

    c11 = np.fft.fft(d11) / samples
    c22 = np.fft.fft(d22) / samples
    c12 = np.fft.fft(p12) / samples
    orders = np.fft.fftfreq(samples, d=1.0 / samples).astype(int)

    freqs: list[float] = []
    weights: list[float] = []
    labels: list[LineLabel] = []
    pa, pb = abs(alpha) ** 2, abs(beta) ** 2
    for m in range(1, max_order + 1, 2):
        coef = pa * c11[m] + pb * c22[m]
        freqs.append(m * nu)
        weights.append(float(abs(coef) ** 2 * (m * nu) ** 4))
        labels.append(LineLabel(kind="odd", order=m))

    cross = np.conj(alpha) * beta
    limit = max_order * nu + 1e-9 * nu
    side_f: list[float] = []
    side_w: list[float] = []
    for idx, m in enumerate(orders):
        f = abs(m * nu + shift)
        if f == 0.0 or f > limit:
            continue
        side_f.append(f)
        side_w.append(float(abs(cross * c12[idx]) ** 2 * f**4))

    # Doublets sit around even harmonics; the strongest line fixes their half-spacing
    offset = result.delta_epsilon
    if side_w and max(side_w) > 0.0:
        f_star = side_f[int(np.argmax(side_w))]
        offset = abs(f_star - 2.0 * nu * round(f_star / (2.0 * nu)))
    merged = result.degenerate
    freqs += side_f
    weights += side_w
    labels += [_sideband_label(f, nu, offset, merged) for f in side_f]

    order = np.argsort(freqs, kind="stable")
    log.debug(
        "floquet.lines.built",
        lines=len(freqs),
        delta_epsilon=result.delta_epsilon,
        alpha_sq=pa,
        beta_sq=pb,
    )
    return LineSpectrum(
        frequencies=np.asarray(freqs)[order],
        weights=np.asarray(weights)[order],
        labels=[labels[i] for i in order],
        nu=nu,
        delta_epsilon=result.delta_epsilon,
        sideband_offset=offset,
        alpha=alpha,
        beta=beta,
        diagonal_coefficients=np.vstack([c11, c22]),
    )


def floquet_line_spectrum(
    atom: AtomParams,
    e0_strength: float,
    nu: float,
    initial_atomic_state: ArrayLike,
    *,
    steps: int = 4000,
    samples: int = 4096,
    max_order: int = 40,
) -> LineSpectrum:
    result = floquet_analysis(atom, e0_strength, nu, steps)
    return line_spectrum_from_result(
        result, atom, e0_strength, initial_atomic_state, samples=samples, max_order=max_order
    )


def propagate_floquet_states(
    result: FloquetResult, atom: AtomParams, e0_strength: float, steps: int = 4000
) -> NDArray[np.complex128]:
    """Floquet states after one full period (columns as in ``floquet_states_t0``)."""
    u, _ = _propagate(
        atom.omega0, np.array([e0_strength]), result.nu, result.floquet_states_t0[None], steps
    )
    return u[0]
