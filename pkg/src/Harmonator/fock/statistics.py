"""Photon statistics, Mandel Q, equal-time g2 and the factorization audit."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from Harmonator.fock.hamiltonian import lower, number_diagonal, raise_, sigma_x, sigma_y, sigma_z
from Harmonator.fock.solver import FockHistory
from Harmonator.fock.state import FockState

log = structlog.get_logger()

Q_FLOOR = 1e-12
PAULI = {"x": sigma_x, "y": sigma_y, "z": sigma_z}


@dataclass(frozen=True)
class PhotonStatistics:
    distribution: NDArray[np.float64]
    mean: float
    second_moment: float
    mandel_q: float | None

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2


def _check_mode(state: FockState, mode_index: int) -> int:
    if not 0 <= mode_index < state.n_modes:
        raise IndexError(f"mode index {mode_index} outside 0..{state.n_modes - 1}")
    return mode_index + 1


def _expect(psi: NDArray[np.complex128], op_psi: NDArray[np.complex128]) -> complex:
    return complex(np.vdot(psi, op_psi))


def photon_statistics(
    state: FockState, mode_index: int, q_floor: float = Q_FLOOR
) -> PhotonStatistics:
    """Marginal photon distribution of one mode, traced over the atom and the other mode."""
    axis = _check_mode(state, mode_index)
    probs = np.abs(state.amplitudes) ** 2
    others = tuple(a for a in range(probs.ndim) if a != axis)
    dist = probs.sum(axis=others)
    n = np.arange(dist.size, dtype=float)
    mean = float(np.dot(n, dist))
    second = float(np.dot(n * n, dist))
    q = (second - mean**2) / mean - 1.0 if mean > q_floor else None
    return PhotonStatistics(distribution=dist, mean=mean, second_moment=second, mandel_q=q)


@dataclass(frozen=True)
class G2Value:
    value: float | None  # normal-ordered <a+ a+ a a>/<N>^2 on the diagonal
    literal: float | None  # <N_i N_j>/(<N_i><N_j>) for every pair


def g2_equal_time(state: FockState, i: int, j: int, q_floor: float = Q_FLOOR) -> G2Value:
    if state.n_modes != 2:
        raise ValueError("g2 needs a two-mode state")
    ai, aj = _check_mode(state, i), _check_mode(state, j)
    probs = np.abs(state.amplitudes) ** 2
    ni = number_diagonal(probs.shape, ai)
    nj = number_diagonal(probs.shape, aj)
    mean_i = float(np.sum(ni * probs))
    mean_j = float(np.sum(nj * probs))
    if mean_i <= q_floor or mean_j <= q_floor:
        return G2Value(value=None, literal=None)
    both = float(np.sum(ni * nj * probs))
    literal = both / (mean_i * mean_j)
    if ai == aj:
        value = float(np.sum(ni * (ni - 1.0) * probs)) / mean_i**2
    else:
        value = literal
    return G2Value(value=value, literal=literal)


@dataclass(frozen=True)
class AuditReport:
    times: NDArray[np.float64]
    neglected: NDArray[np.float64]
    kept: NDArray[np.float64]
    factorization_error: NDArray[np.float64]
    degenerate: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def ratios(self) -> NDArray[np.float64]:
        out = np.zeros_like(self.neglected)
        mask = self.kept > 0
        out[mask] = self.neglected[mask] / self.kept[mask]
        return out

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if self.ratios.size else 0.0

    @property
    def max_factorization_error(self) -> float:
        return float(np.max(self.factorization_error)) if self.factorization_error.size else 0.0

    def to_text(self, period: float = 1.0) -> str:
        lines = ["# t/T neglected kept ratio factorization_error"]
        for t, n, k, r, f in zip(
            self.times, self.neglected, self.kept, self.ratios, self.factorization_error
        ):
            lines.append(f"{t / period!r} {n!r} {k!r} {r!r} {f!r}")
        for w in self.warnings:
            lines.append(f"# warning {w}")
        lines.append(f"# max_ratio {self.max_ratio!r}")
        return "\n".join(lines) + "\n"


def _audit_sample(
    psi: NDArray[np.complex128], couplings: tuple[float, ...]
) -> tuple[float, float, float]:
    """Largest coupling-weighted neglected correlation, kept term and factorization error."""
    n_modes = len(couplings)
    axes = [i + 1 for i in range(n_modes)]
    norm_sq = float(np.vdot(psi, psi).real)
    neglected = 0.0
    kept = 0.0
    fact_err = 0.0
    fact_ref = 0.0
    for name, pauli in PAULI.items():
        a_psi = pauli(psi)
        mean_a = _expect(psi, a_psi).real / norm_sq
        for i, ax_i in enumerate(axes):
            n_i = number_diagonal(psi.shape, ax_i)
            mean_n = float(np.sum(n_i * np.abs(psi) ** 2)) / norm_sq
            a_n = _expect(psi, pauli(n_i * psi)).real / norm_sq
            kept = max(kept, couplings[i] * abs(2.0 * a_n + mean_a))
            if name == "z":
                fact_err = max(fact_err, abs(a_n - mean_a * mean_n))
                fact_ref = max(fact_ref, abs(mean_a * mean_n))
            for j, ax_j in enumerate(axes):
                w = couplings[j]
                aa = _expect(psi, pauli(lower(lower(psi, ax_j), ax_i)))
                dd = _expect(psi, pauli(raise_(raise_(psi, ax_j), ax_i)))
                terms = [abs(aa), abs(dd)]
                if i != j:
                    terms.append(abs(_expect(psi, pauli(raise_(lower(psi, ax_j), ax_i)))))
                neglected = max(neglected, w * max(terms) / norm_sq)
    rel = fact_err / fact_ref if fact_ref > 0 else 0.0
    return neglected, kept, rel


def cross_term_audit(history: FockHistory, couplings: ArrayLike | None = None) -> AuditReport:
    """Compare the correlations dropped by the mean-field closure with the kept terms.

    Neglected: |<A a_i a_j>|, |<A a_i^+ a_j^+>| and, for i != j, |<A a_i^+ a_j>|; kept:
    |<A (2 N_i + 1)>|; A runs over sigma_x, sigma_y, sigma_z and each term is weighted by the
    coupling it enters the equations with.
    """
    tmpl = history.template
    coups = tuple(float(c) for c in (couplings if couplings is not None else tmpl.mode_couplings))
    if len(coups) != tmpl.n_modes:
        raise ValueError("one coupling per mode is required")
    warnings: list[str] = []
    degenerate = tmpl.n_modes == 2 and tmpl.mode_frequencies[0] == tmpl.mode_frequencies[1]
    if degenerate:
        msg = "degenerate mode frequencies; cross terms are not expected to be small"
        warnings.append(msg)
        log.warning("fock.audit.degenerate", frequencies=list(tmpl.mode_frequencies))
    rows = [_audit_sample(history.amplitudes[k], coups) for k in range(len(history))]
    arr = np.array(rows, dtype=float).reshape(len(rows), 3)
    report = AuditReport(
        times=history.times.copy(),
        neglected=arr[:, 0],
        kept=arr[:, 1],
        factorization_error=arr[:, 2],
        degenerate=degenerate,
        warnings=warnings,
    )
    log.info(
        "fock.audit.completed",
        samples=len(rows),
        max_ratio=report.max_ratio,
        max_factorization_error=report.max_factorization_error,
    )
    return report


@dataclass(frozen=True)
class MandelSummary:
    min_during: float | None
    max_during: float | None
    min_after: float | None
    mean_after: float | None
    positive_fraction_after: float | None


def mandel_summary(
    times: ArrayLike,
    q_values: ArrayLike,
    tau: float,
    period: float,
    average_cycles: float = 20.0,
) -> MandelSummary:
    """Q_M extremes during the pulse and its statistics over [tau, tau + average_cycles T].

    Undefined samples (None or NaN) are skipped.
    """
    t = np.asarray(times, dtype=float)
    q = np.array([np.nan if v is None else float(v) for v in q_values], dtype=float)
    ok = np.isfinite(q)
    during = ok & (t > 0.0) & (t < tau)
    after = ok & (t >= tau) & (t <= tau + average_cycles * period)

    def _pick(mask: NDArray[np.bool_], fn) -> float | None:
        return float(fn(q[mask])) if mask.any() else None

    return MandelSummary(
        min_during=_pick(during, np.min),
        max_during=_pick(during, np.max),
        min_after=_pick(after, np.min),
        mean_after=_pick(after, np.mean),
        positive_fraction_after=_pick(after, lambda x: np.mean(x > 0.0)),
    )
