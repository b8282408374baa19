"""Dense complex matrix kernel for small bipartite systems.

Joint indices are A-major: the basis state ``|a>|b>`` sits at ``a * d_B + b``,
which is the ordering produced by :func:`numpy.kron`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
MAX_DIM = 16


class StateError(ValueError):
    """Base class for invalid density-matrix input."""


class NotHermitian(StateError):
    pass


class TraceNotOne(StateError):
    pass


class NegativeEigenvalue(StateError):
    pass


class DimMismatch(StateError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated bipartite state ``rho_AB`` with subsystem dimensions ``(d_A, d_B)``.

    Build instances through :func:`validate_density_matrix`; the constructor
    itself does no checking.
    """

    dims: tuple[int, int]
    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def swap(self) -> "DensityMatrix":
        """Same state with the roles of A and B exchanged."""
        da, db = self.dims
        t = self.mat.reshape(da, db, da, db).transpose(1, 0, 3, 2)
        return DensityMatrix((db, da), t.reshape(da * db, da * db))


class EigResult(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def tensor_product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))


def _check_dims(mat: np.ndarray, dims) -> tuple[int, int]:
    da, db = (int(d) for d in dims)
    if da < 1 or db < 1:
        raise DimMismatch(f"subsystem dimensions must be positive, got {dims}")
    if da * db > MAX_DIM:
        raise DimMismatch(f"total dimension {da * db} exceeds {MAX_DIM}")
    if mat.ndim != 2 or mat.shape != (da * db, da * db):
        raise DimMismatch(f"matrix shape {mat.shape} does not match dims {dims}")
    return da, db


def partial_trace(rho: DensityMatrix, keep: str = "A") -> np.ndarray:
    """Reduced state of subsystem ``keep`` ('A' or 'B')."""
    da, db = _check_dims(rho.mat, rho.dims)
    t = rho.mat.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ajbj->ab", t)
    if keep == "B":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return h.shape[0] == h.shape[1] and np.max(np.abs(h - h.conj().T), initial=0.0) <= tol


def hermitian_eig(h: np.ndarray) -> EigResult:
    """Eigendecomposition with eigenvalues in descending order."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or not is_hermitian(h):
        raise NotHermitian("matrix is not Hermitian within 1e-10")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return EigResult(w[::-1].copy(), v[:, ::-1].copy())


def validate_density_matrix(mat, dims) -> DensityMatrix:
    """Check and lightly repair a candidate density matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as numerical noise: they are
    clipped to zero and the matrix is renormalized. Anything more negative is
    rejected.
    """
    mat = np.array(mat, dtype=complex)
    dims = _check_dims(mat, dims)
    if not np.all(np.isfinite(mat)):
        raise StateError("matrix has non-finite entries")
    if not is_hermitian(mat):
        dev = np.max(np.abs(mat - mat.conj().T))
        raise NotHermitian(f"max |rho - rho^dagger| = {dev:.3g} exceeds {HERMITIAN_TOL}")
    tr = np.trace(mat).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceNotOne(f"trace = {tr:.12g}, expected 1 within {TRACE_TOL}")
    mat = 0.5 * (mat + mat.conj().T)
    w, v = np.linalg.eigh(mat)
    if w[0] < -PSD_TOL:
        raise NegativeEigenvalue(f"smallest eigenvalue {w[0]:.3g} below -{PSD_TOL}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        mat = (v * w) @ v.conj().T
    return DensityMatrix(dims, mat)
