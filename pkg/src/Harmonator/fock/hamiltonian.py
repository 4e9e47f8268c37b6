"""Matrix-free Hamiltonian of the atom coupled to one or two truncated modes.

H = (omega0/2) sigma_z + sum_i w_i a_i^+ a_i + sum_i (Omega_i/2)(a_i + a_i^+) sigma_x
    - (Omega(t)/2) sigma_x, with no rotating-wave approximation.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

DENSE_LIMIT = 15


def lower(psi: NDArray[np.complex128], axis: int) -> NDArray[np.complex128]:
    """a along ``axis``: (a psi)[n] = sqrt(n+1) psi[n+1]."""
    out = np.zeros_like(psi)
    m = psi.shape[axis]
    src = [slice(None)] * psi.ndim
    dst = [slice(None)] * psi.ndim
    src[axis] = slice(1, m)
    dst[axis] = slice(0, m - 1)
    shape = [1] * psi.ndim
    shape[axis] = m - 1
    out[tuple(dst)] = np.sqrt(np.arange(1, m)).reshape(shape) * psi[tuple(src)]
    return out


def raise_(psi: NDArray[np.complex128], axis: int) -> NDArray[np.complex128]:
    """a^+ along ``axis``, truncated at M: (a^+ psi)[n] = sqrt(n) psi[n-1]."""
    out = np.zeros_like(psi)
    m = psi.shape[axis]
    src = [slice(None)] * psi.ndim
    dst = [slice(None)] * psi.ndim
    src[axis] = slice(0, m - 1)
    dst[axis] = slice(1, m)
    shape = [1] * psi.ndim
    shape[axis] = m - 1
    out[tuple(dst)] = np.sqrt(np.arange(1, m)).reshape(shape) * psi[tuple(src)]
    return out


def number_diagonal(shape: tuple[int, ...], axis: int) -> NDArray[np.float64]:
    view = [1] * len(shape)
    view[axis] = shape[axis]
    return np.arange(shape[axis], dtype=float).reshape(view)


def sigma_x(psi: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return psi[::-1]


def sigma_y(psi: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # index 0 is |g>: sigma_y |g> = -i|e>, sigma_y |e> = i|g>, so sigma_x sigma_y = i sigma_z
    out = np.empty_like(psi)
    out[0] = 1j * psi[1]
    out[1] = -1j * psi[0]
    return out


def sigma_z(psi: NDArray[np.complex128]) -> NDArray[np.complex128]:
    out = psi.copy()
    out[0] *= -1.0
    return out


class FockHamiltonian:
    """Applies H(t) to amplitude tensors of a fixed shape."""

    def __init__(
        self,
        omega0: float,
        m_max: int,
        mode_frequencies: tuple[float, ...],
        mode_couplings: tuple[float, ...],
    ) -> None:
        self.omega0 = omega0
        self.m_max = m_max
        self.mode_frequencies = tuple(mode_frequencies)
        self.mode_couplings = tuple(mode_couplings)
        self.shape = (2,) + (m_max + 1,) * len(self.mode_frequencies)
        diag = np.zeros(self.shape)
        diag[0] -= 0.5 * omega0
        diag[1] += 0.5 * omega0
        for i, w in enumerate(self.mode_frequencies):
            diag = diag + w * number_diagonal(self.shape, i + 1)
        self._diag = diag

    def apply(self, psi: NDArray[np.complex128], drive: float = 0.0) -> NDArray[np.complex128]:
        out = self._diag * psi
        flipped = sigma_x(psi)
        if drive != 0.0:
            out = out - 0.5 * drive * flipped
        for i, c in enumerate(self.mode_couplings):
            if c != 0.0:
                out = out + 0.5 * c * (lower(flipped, i + 1) + raise_(flipped, i + 1))
        return out

    def dense(self, drive: float = 0.0) -> NDArray[np.complex128]:
        """Explicit matrix in the flattened (C-order) basis, built from Kronecker products."""
        if self.m_max > DENSE_LIMIT:
            raise ValueError(f"dense Hamiltonian limited to m_max <= {DENSE_LIMIT}")
        dim = self.m_max + 1
        a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
        num = np.diag(np.arange(dim, dtype=float)).astype(complex)
        eye_m = np.eye(dim, dtype=complex)
        sz = np.diag([-1.0, 1.0]).astype(complex)
        sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        eye_a = np.eye(2, dtype=complex)
        n_modes = len(self.mode_frequencies)

        def on_mode(op: NDArray[np.complex128], i: int) -> NDArray[np.complex128]:
            factors = [op if k == i else eye_m for k in range(n_modes)]
            out = factors[0]
            for f in factors[1:]:
                out = np.kron(out, f)
            return out

        field_eye = on_mode(eye_m, 0)
        h = 0.5 * self.omega0 * np.kron(sz, field_eye) - 0.5 * drive * np.kron(sx, field_eye)
        for i, (w, c) in enumerate(zip(self.mode_frequencies, self.mode_couplings)):
            h = h + w * np.kron(eye_a, on_mode(num, i))
            h = h + 0.5 * c * np.kron(sx, on_mode(a + a.conj().T, i))
        return h
