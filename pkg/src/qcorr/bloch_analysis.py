"""Correlation-matrix SVD and the alignment of optimal measurements with singular vectors.

For a two-qubit state in Bloch form, ``c m_j = lambda_j n_j`` relates the
right singular vectors ``m_j`` (B side) to the left ones ``n_j`` (A side).
This module compares the measurement axes found by the optimizers with the
maximal singular pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meas import angle_axis
from .measures import Direction, classical_entropies, joint_probs, m2b, m3b, wpm
from .optim import OptimConfig, angle_grid
from .qmat import DensityMatrix
from .states import fig5_family, to_bloch

ZERO_C = 1e-12
DEGENERATE_GAP = 1e-9
FLAT_SPREAD = 1e-9


def correlation_svd(c):
    """Singular values (descending), left vectors ``n_j`` and right vectors ``m_j`` as rows.

    The returned vectors satisfy ``c @ m_j = lambda_j * n_j``.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (3, 3):
        raise ValueError("correlation matrix must be 3x3")
    u, s, vt = np.linalg.svd(c)
    return s, u.T.copy(), vt.copy()


@dataclass(frozen=True, eq=False)
class SvdAlignment:
    singular_values: np.ndarray
    left: np.ndarray
    right: np.ndarray
    cos_A: float
    cos_B: float
    value: float
    angles: np.ndarray
    degenerate: bool


def _max_block(s: np.ndarray) -> int:
    """Number of singular values tied with the largest."""
    return int(np.sum(s >= s[0] - DEGENERATE_GAP))


def subspace_cosine(axis, vectors) -> float:
    """``|cos|`` of the angle between ``axis`` and the span of orthonormal ``vectors``."""
    axis = np.asarray(axis, dtype=float)
    proj = np.atleast_2d(vectors) @ axis
    return float(min(1.0, np.linalg.norm(proj) / np.linalg.norm(axis)))


_OBJECTIVES = {
    "wpm": lambda h: h[0] + h[1] - h[2],
    "m2b": lambda h: h[2] - h[0],
    "m3b": lambda h: h[2],
}


def objective_spread(rho: DensityMatrix, measure: str, config: OptimConfig | None = None) -> float:
    """Range of the classical objective over the 4-angle grid; ~0 means no preferred measurement."""
    bf = to_bloch(rho)
    pts, _ = angle_grid(4, config or OptimConfig())
    vals = _OBJECTIVES[measure](classical_entropies(joint_probs(bf, pts)))
    return float(np.ptp(vals))


def svd_alignment(rho: DensityMatrix, measure: str = "wpm", config: OptimConfig | None = None) -> SvdAlignment:
    """Optimize ``measure`` and compare its A/B measurement axes with the maximal singular vectors.

    Cosines are absolute values since a projective pair does not distinguish
    ``m`` from ``-m``. When the largest singular value is degenerate the
    cosine is taken against the whole degenerate subspace. ``degenerate`` is
    set when ``c`` vanishes, the top singular value is tied, or the
    objective is flat so no optimal axis is singled out.
    """
    if measure == "wpm":
        res = wpm(rho, config)
    elif measure == "m2b":
        res = m2b(rho, Direction.AtoB, config)
    elif measure == "m3b":
        res = m3b(rho, config)
    else:
        raise ValueError(f"unknown measure {measure!r}")
    s, left, right = correlation_svd(to_bloch(rho).c)
    axes = angle_axis(np.asarray(res.angles).reshape(2, 2))
    k = _max_block(s)
    flat = objective_spread(rho, measure, config) < FLAT_SPREAD
    degenerate = bool(s[0] < ZERO_C or k > 1 or flat)
    return SvdAlignment(
        s,
        left,
        right,
        subspace_cosine(axes[0], left[:k]),
        subspace_cosine(axes[1], right[:k]),
        float(res.value),
        np.asarray(res.angles),
        degenerate,
    )


def fig5_sweep(eps_values=None, measure: str = "wpm", config: OptimConfig | None = None) -> list[dict]:
    """Rows ``{eps, <measure>, cos_A, cos_B, degenerate}`` along the product-to-Bell-diagonal family."""
    eps_values = np.linspace(0.0, 1.0, 101) if eps_values is None else np.asarray(eps_values, dtype=float)
    rows = []
    for eps in eps_values:
        al = svd_alignment(fig5_family(float(eps)), measure, config)
        rows.append(
            {"eps": float(eps), measure: al.value, "cos_A": al.cos_A, "cos_B": al.cos_B, "degenerate": al.degenerate}
        )
    return rows
