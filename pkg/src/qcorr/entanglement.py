"""Wootters concurrence and entanglement of formation for two qubits."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .entropy import ZERO_PROB, binary_entropy
from .qmat import DensityMatrix

_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


class EntanglementPair(NamedTuple):
    concurrence: float
    eof: float


def _check(rho: DensityMatrix):
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"concurrence is defined here for two qubits only, got dims {rho.dims}")


def concurrence(rho: DensityMatrix) -> float:
    """``max(0, l1 - l2 - l3 - l4)`` with ``l_j`` the square roots of the eigenvalues of ``rho rho~``.

    The ``l_j`` are taken as the singular values of ``W^T (Y x Y) W`` where
    ``rho = W W^dagger``; this avoids square roots of round-off in the
    eigenvalues of ``rho rho~``. Eigencomponents of ``rho`` below 1e-14 are
    treated as zero.
    """
    _check(rho)
    w, v = np.linalg.eigh(rho.mat)
    keep = w > ZERO_PROB
    wm = v[:, keep] * np.sqrt(w[keep])
    lam = np.zeros(4)
    if wm.shape[1]:
        sv = np.linalg.svd(wm.T @ _YY @ wm, compute_uv=False)
        lam[: len(sv)] = sv
    lam = np.sort(lam)[::-1]
    return float(np.clip(lam[0] - lam[1:].sum(), 0.0, 1.0))


def eof_from_concurrence(c: float) -> float:
    c = float(np.clip(c, 0.0, 1.0))
    return float(binary_entropy(0.5 * (1 + np.sqrt(1 - c * c))))


def entanglement_of_formation(rho: DensityMatrix) -> float:
    return eof_from_concurrence(concurrence(rho))


def entanglement_pair(rho: DensityMatrix) -> EntanglementPair:
    c = concurrence(rho)
    return EntanglementPair(c, eof_from_concurrence(c))
