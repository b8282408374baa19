"""Classical and quantum entropic quantities, in bits."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .qmat import DensityMatrix, hermitian_eig, partial_trace

ZERO_PROB = 1e-14
PROB_TOL = 1e-9
SUPPORT_TOL = 1e-10


class SupportViolation(ValueError):
    """Relative entropy is infinite: the first argument is not supported on the second."""


def xlog2x(p):
    """Elementwise ``p * log2(p)`` with ``0 log 0 = 0``; entries below 1e-14 count as zero."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > ZERO_PROB, p, 1.0)
    return np.where(p > ZERO_PROB, p * np.log2(safe), 0.0)


def binary_entropy(x):
    x = np.asarray(x, dtype=float)
    return -(xlog2x(x) + xlog2x(1.0 - x))


def check_probs(p, tol: float = PROB_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be a non-empty finite array")
    if np.any(p < -tol) or np.any(p > 1 + tol):
        raise ValueError("probabilities must lie in [0, 1]")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    return np.clip(p, 0.0, 1.0)


def shannon_entropy(p) -> float:
    p = check_probs(p)
    return float(-np.sum(xlog2x(p))) + 0.0  # no signed zero


def spectrum(rho) -> np.ndarray:
    """Eigenvalues of a density operator, clipped at zero, descending."""
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return np.clip(hermitian_eig(mat).eigenvalues, 0.0, None)


def von_neumann_entropy(rho) -> float:
    return float(-np.sum(xlog2x(spectrum(rho)))) + 0.0


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint outcome table ``p[a, b]`` for local measurements on A and B."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim != 2:
            raise ValueError("joint distribution must be a 2-D table")
        check_probs(t.ravel())
        object.__setattr__(self, "table", np.clip(t, 0.0, 1.0))

    @cached_property
    def p_a(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @cached_property
    def p_b(self) -> np.ndarray:
        return self.table.sum(axis=0)

    def b_given_a(self) -> np.ndarray:
        """Rows ``p(b|a)``; rows with ``p_a = 0`` are left at zero."""
        pa = self.p_a[:, None]
        return np.divide(self.table, pa, out=np.zeros_like(self.table), where=pa > ZERO_PROB)

    def a_given_b(self) -> np.ndarray:
        pb = self.p_b[None, :]
        return np.divide(self.table, pb, out=np.zeros_like(self.table), where=pb > ZERO_PROB)


@dataclass(frozen=True)
class ClassicalInfoTable:
    H_A: float
    H_B: float
    H_AB: float
    H_BgA: float
    H_AgB: float
    H_AcolonB: float


@dataclass(frozen=True)
class QuantumInfoTable:
    S_A: float
    S_B: float
    S_AB: float
    S_BgA: float
    S_AgB: float
    S_AcolonB: float


def classical_info_table(p: JointDistribution) -> ClassicalInfoTable:
    if not isinstance(p, JointDistribution):
        p = JointDistribution(p)
    h_ab = float(-np.sum(xlog2x(p.table)))
    h_a = float(-np.sum(xlog2x(p.p_a)))
    h_b = float(-np.sum(xlog2x(p.p_b)))
    return ClassicalInfoTable(
        H_A=h_a,
        H_B=h_b,
        H_AB=h_ab,
        H_BgA=h_ab - h_a,
        H_AgB=h_ab - h_b,
        H_AcolonB=h_a + h_b - h_ab,
    )


def quantum_info_table(rho: DensityMatrix) -> QuantumInfoTable:
    s_ab = von_neumann_entropy(rho.mat)
    s_a = von_neumann_entropy(partial_trace(rho, "A"))
    s_b = von_neumann_entropy(partial_trace(rho, "B"))
    return QuantumInfoTable(
        S_A=s_a,
        S_B=s_b,
        S_AB=s_ab,
        S_BgA=s_ab - s_a,
        S_AgB=s_ab - s_b,
        S_AcolonB=s_a + s_b - s_ab,
    )


def quantum_relative_entropy(rho, sigma) -> float:
    """``S(rho || sigma) = -S(rho) - tr(rho log sigma)`` in bits.

    Raises :class:`SupportViolation` if ``rho`` has weight outside the
    support of ``sigma``.
    """
    rho = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    sigma = sigma.mat if isinstance(sigma, DensityMatrix) else np.asarray(sigma, dtype=complex)
    ws, vs = hermitian_eig(sigma)
    in_support = ws > SUPPORT_TOL
    # weight of rho on each eigenvector of sigma
    diag = np.einsum("ia,ij,ja->a", vs.conj(), rho, vs).real
    if np.any(diag[~in_support] > SUPPORT_TOL):
        raise SupportViolation("rho is not supported on the support of sigma")
    cross = float(np.sum(diag[in_support] * np.log2(ws[in_support])))
    return -von_neumann_entropy(rho) - cross


def classical_relative_information(p, q) -> float:
    """``H(p || q) = sum_j p_j log2(p_j / q_j)``."""
    p = check_probs(np.ravel(p))
    q = check_probs(np.ravel(q))
    if p.shape != q.shape:
        raise ValueError("distributions have different lengths")
    live = p > ZERO_PROB
    if np.any(q[live] <= ZERO_PROB):
        raise SupportViolation("p has weight where q vanishes")
    return float(np.sum(p[live] * np.log2(p[live] / q[live])))
