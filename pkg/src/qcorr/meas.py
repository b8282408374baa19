"""Local measurements: rank-one POVMs, qubit projective pairs, conditioned strategies.

A POVM argument may be a :class:`RankOnePovm` or any sequence of positive
operators summing to the identity (used for coarse measurements).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, NamedTuple, Sequence

import numpy as np

from .entropy import JointDistribution
from .qmat import DensityMatrix, DimMismatch, hermitian_eig

COMPLETENESS_TOL = 1e-9
DROP_PROB = 1e-12
DEGENERACY_TOL = 1e-9

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True, eq=False)
class RankOnePovm:
    """Elements ``E_a = weights[a] * |kets[a]><kets[a]|``."""

    weights: np.ndarray
    kets: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        k = np.atleast_2d(np.asarray(self.kets, dtype=complex))
        if w.ndim != 1 or k.shape[0] != w.shape[0]:
            raise ValueError("need one weight per ket")
        if np.any(w <= 0) or np.any(w > 1 + COMPLETENESS_TOL):
            raise ValueError("weights must lie in (0, 1]")
        if not np.allclose(np.linalg.norm(k, axis=1), 1.0, atol=1e-9):
            raise ValueError("kets must be unit vectors")
        total = np.einsum("a,ai,aj->ij", w, k, k.conj())
        if np.max(np.abs(total - np.eye(k.shape[1]))) > COMPLETENESS_TOL:
            raise ValueError("POVM elements do not sum to the identity")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kets", k)

    @property
    def dim(self) -> int:
        return self.kets.shape[1]

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def operators(self) -> np.ndarray:
        return np.einsum("a,ai,aj->aij", self.weights, self.kets, self.kets.conj())


def as_operators(povm) -> np.ndarray:
    if isinstance(povm, RankOnePovm):
        return povm.operators
    ops = np.asarray(povm, dtype=complex)
    if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
        raise ValueError("POVM must be a stack of square matrices")
    return ops


def check_povm(ops, tol: float = COMPLETENESS_TOL) -> np.ndarray:
    ops = as_operators(ops)
    d = ops.shape[1]
    if np.max(np.abs(ops.sum(axis=0) - np.eye(d))) > tol:
        raise ValueError("POVM elements do not sum to the identity")
    for e in ops:
        if np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0] < -tol:
            raise ValueError("POVM element is not positive")
    return ops


def bloch_ket(n) -> np.ndarray:
    """Pure qubit state whose Bloch vector is the unit vector ``n``."""
    n = np.asarray(n, dtype=float)
    theta = np.arccos(np.clip(n[2], -1.0, 1.0))
    phi = np.arctan2(n[1], n[0])
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def angle_axis(angles):
    """Bloch axis of ``|e_0>`` for (theta, phi) pairs; works on ``(..., 2)`` arrays."""
    angles = np.asarray(angles, dtype=float)
    t2 = 2.0 * angles[..., 0]
    ph = angles[..., 1]
    return np.stack([np.sin(t2) * np.cos(ph), np.sin(t2) * np.sin(ph), np.cos(t2)], axis=-1)


def projective_pair_povm(theta: float, phi: float) -> RankOnePovm:
    """``|e0> = cos t |0> + e^{i phi} sin t |1>``, ``|e1> = -sin t |0> + e^{i phi} cos t |1>``."""
    c, s, ph = np.cos(theta), np.sin(theta), np.exp(1j * phi)
    kets = np.array([[c, ph * s], [-s, ph * c]])
    return RankOnePovm(np.ones(2), kets)


def marginal_eigenbasis_povm(rho_marg, degeneracy_tol: float = DEGENERACY_TOL):
    """Projectors onto the eigenvectors of a marginal state.

    Returns ``(povm, degenerate)``; ``degenerate`` is set when two
    eigenvalues are closer than ``degeneracy_tol``, in which case the basis
    is not unique.
    """
    w, v = hermitian_eig(rho_marg)
    degenerate = bool(len(w) > 1 and np.min(-np.diff(w)) < degeneracy_tol)
    return RankOnePovm(np.ones(len(w)), v.T.copy()), degenerate


def _blocks(rho: DensityMatrix) -> np.ndarray:
    da, db = rho.dims
    return rho.mat.reshape(da, db, da, db)


def joint_distribution_unconditioned(rho: DensityMatrix, e, f) -> JointDistribution:
    """``p[a, b] = tr(E_a (x) F_b rho)``."""
    E, F = as_operators(e), as_operators(f)
    da, db = rho.dims
    if E.shape[1] != da or F.shape[1] != db:
        raise DimMismatch(f"POVM dimensions ({E.shape[1]}, {F.shape[1]}) vs state dims {rho.dims}")
    p = np.einsum("aij,bkl,jlik->ab", E, F, _blocks(rho)).real
    return JointDistribution(np.clip(p, 0.0, None))


class ConditionalStateB(NamedTuple):
    outcome: int
    p_a: float
    rho_B_given_a: np.ndarray


def unnormalized_b_states(rho: DensityMatrix, e) -> np.ndarray:
    """``tr_A(E_a rho_AB)`` for every outcome ``a``."""
    E = as_operators(e)
    if E.shape[1] != rho.dims[0]:
        raise DimMismatch(f"POVM on dimension {E.shape[1]} vs d_A = {rho.dims[0]}")
    return np.einsum("aij,jkil->akl", E, _blocks(rho))


def conditional_states_B(rho: DensityMatrix, e) -> list[ConditionalStateB]:
    """Ensemble ``{p_a, rho_B|a}`` steered onto B by measuring ``e`` on A.

    Outcomes with ``p_a < 1e-12`` are omitted.
    """
    out = []
    for a, m in enumerate(unnormalized_b_states(rho, e)):
        pa = float(np.trace(m).real)
        if pa < DROP_PROB:
            continue
        out.append(ConditionalStateB(a, pa, m / pa))
    return out


@dataclass(frozen=True, eq=False)
class ConditionedStrategy:
    """A measures ``a_povm``, announces ``c_of_a[a]``, B measures ``b_povms[c]``."""

    a_povm: object
    c_of_a: Sequence[Hashable]
    b_povms: Mapping[Hashable, object]

    def __post_init__(self):
        n_a = len(as_operators(self.a_povm))
        if len(self.c_of_a) != n_a:
            raise ValueError("c_of_a must label every A outcome")
        missing = set(self.c_of_a) - set(self.b_povms)
        if missing:
            raise ValueError(f"no B measurement for labels {sorted(map(str, missing))}")

    def b_offsets(self) -> dict:
        """Column offset of each label's outcome block in the B alphabet."""
        offsets, pos = {}, 0
        for c, f in self.b_povms.items():
            offsets[c] = pos
            pos += len(as_operators(f))
        return offsets

    @property
    def n_b(self) -> int:
        return sum(len(as_operators(f)) for f in self.b_povms.values())


def joint_distribution_conditioned(rho: DensityMatrix, s: ConditionedStrategy) -> JointDistribution:
    """Joint table over A outcomes and the disjoint union of the B alphabets.

    ``p[a, b]`` is zero unless ``b`` belongs to the block of measurement ``c(a)``.
    """
    E = as_operators(s.a_povm)
    if E.shape[1] != rho.dims[0]:
        raise DimMismatch(f"A POVM on dimension {E.shape[1]} vs d_A = {rho.dims[0]}")
    sub = unnormalized_b_states(rho, E)
    offsets = s.b_offsets()
    p = np.zeros((len(E), s.n_b))
    for a, c in enumerate(s.c_of_a):
        F = as_operators(s.b_povms[c])
        if F.shape[1] != rho.dims[1]:
            raise DimMismatch(f"B POVM on dimension {F.shape[1]} vs d_B = {rho.dims[1]}")
        block = np.einsum("bkl,lk->b", F, sub[a]).real
        p[a, offsets[c] : offsets[c] + len(F)] = block
    return JointDistribution(np.clip(p, 0.0, None))


def eigenbasis_conditioned_strategy(rho: DensityMatrix, e) -> ConditionedStrategy:
    """Extreme strategy: a separate label per A outcome, B measured in the eigenbasis of ``rho_B|a``."""
    E = as_operators(e)
    db = rho.dims[1]
    b_povms = {}
    for a, m in enumerate(unnormalized_b_states(rho, E)):
        pa = np.trace(m).real
        if pa < DROP_PROB:
            b_povms[a] = RankOnePovm(np.ones(db), np.eye(db, dtype=complex))
        else:
            b_povms[a] = marginal_eigenbasis_povm(m / pa)[0]
    return ConditionedStrategy(E, list(range(len(E))), b_povms)


def symmetric_qubit_povm(kind: str, orientation=None) -> RankOnePovm:
    """Trine (3 outcomes, weight 2/3) or tetrahedron (4 outcomes, weight 1/2) qubit POVM.

    ``orientation`` is an orthogonal 3x3 matrix applied to the reference
    Bloch vectors. Pass ``-np.eye(3)`` for the inverted (dual) figure.
    """
    from .states import TETRAHEDRON_VECTORS, TRIANGLE_VECTORS

    if kind == "trine":
        vecs = TRIANGLE_VECTORS
    elif kind == "tetrahedron":
        vecs = TETRAHEDRON_VECTORS
    else:
        raise ValueError(f"unknown symmetric POVM {kind!r}")
    if orientation is not None:
        rot = np.asarray(orientation, dtype=float)
        if not np.allclose(rot @ rot.T, np.eye(3), atol=1e-12):
            raise ValueError("orientation must be an orthogonal matrix")
        vecs = vecs @ rot.T
    return povm_from_bloch(np.full(len(vecs), 1.0 / len(vecs)), vecs)


def povm_from_bloch(q, m) -> RankOnePovm:
    """Qubit POVM ``E_a = q_a (I + sigma . m_a)``; requires ``sum q_a m_a = 0``."""
    q = np.asarray(q, dtype=float)
    m = np.asarray(m, dtype=float)
    return RankOnePovm(2 * q, np.array([bloch_ket(v) for v in m]))


def povm_bloch_vectors(povm: RankOnePovm) -> np.ndarray:
    """Bloch vectors ``m_a`` of a qubit rank-one POVM."""
    if povm.dim != 2:
        raise DimMismatch("Bloch vectors are defined for qubit POVMs only")
    k = povm.kets
    return np.einsum("ai,sij,aj->as", k.conj(), PAULI, k).real


def random_rank_one_povm(dim: int, n_outcomes: int, rng: np.random.Generator) -> RankOnePovm:
    """Rank-one POVM from the rows of a Haar-like random isometry."""
    if n_outcomes < dim:
        raise ValueError("a rank-one POVM needs at least dim outcomes")
    g = rng.standard_normal((n_outcomes, dim)) + 1j * rng.standard_normal((n_outcomes, dim))
    q, _ = np.linalg.qr(g)
    rows = q.conj()
    w = np.sum(np.abs(rows) ** 2, axis=1)
    return RankOnePovm(w, rows / np.sqrt(w)[:, None])


def random_povm(dim: int, n_outcomes: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Generic (typically full-rank) POVM ``E_a = S^{-1/2} G_a S^{-1/2}``."""
    rank = dim if rank is None else rank
    if rank * n_outcomes < dim:
        raise ValueError("rank * n_outcomes must be at least dim for the elements to span the space")
    g = rng.standard_normal((n_outcomes, dim, rank)) + 1j * rng.standard_normal((n_outcomes, dim, rank))
    pos = g @ g.conj().transpose(0, 2, 1)
    w, v = np.linalg.eigh(pos.sum(axis=0))
    s_inv = (v / np.sqrt(w)) @ v.conj().T
    ops = s_inv @ pos @ s_inv
    return 0.5 * (ops + ops.conj().transpose(0, 2, 1))


def fine_grain(povm, tol: float = 1e-12):
    """Split each element into weighted rank-one pieces via its eigendecomposition.

    Returns ``(rank_one_povm, parent)`` where ``parent[k]`` is the coarse
    outcome the ``k``-th piece came from.
    """
    weights, kets, parent = [], [], []
    for a, e in enumerate(as_operators(povm)):
        w, v = np.linalg.eigh(0.5 * (e + e.conj().T))
        for lam, vec in zip(w, v.T):
            if lam > tol:
                weights.append(lam)
                kets.append(vec)
                parent.append(a)
    return RankOnePovm(np.array(weights), np.array(kets)), np.array(parent)
