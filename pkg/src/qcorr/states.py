"""State factories, two-qubit Bloch form, and state JSON I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .meas import PAULI, bloch_ket
from .qmat import DensityMatrix, StateError, validate_density_matrix

_S3 = np.sqrt(3.0)

# Equilateral triangle in the x-z plane, first vertex at +z.
TRIANGLE_VECTORS = np.array(
    [
        [0.0, 0.0, 1.0],
        [_S3 / 2, 0.0, -0.5],
        [-_S3 / 2, 0.0, -0.5],
    ]
)

TETRAHEDRON_VECTORS = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ]
) / _S3

_PAULI4 = np.concatenate([np.eye(2, dtype=complex)[None], PAULI])


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def density_from_kets(weights, kets, dims) -> DensityMatrix:
    kets = np.asarray(kets, dtype=complex)
    mat = np.einsum("j,ji,jk->ik", np.asarray(weights, dtype=float), kets, kets.conj())
    return validate_density_matrix(mat, dims)


def random_density(dims=(2, 2), rank: int | None = None, seed=None) -> DensityMatrix:
    """Hilbert-Schmidt (Ginibre) random state ``G G^dagger / tr(G G^dagger)``."""
    rng = as_rng(seed)
    d = dims[0] * dims[1]
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in [1, {d}], got {rank}")
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return validate_density_matrix(m / np.trace(m).real, dims)


def random_pure(dims=(2, 2), seed=None) -> DensityMatrix:
    return random_density(dims, rank=1, seed=seed)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    rng = as_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_probs(n: int, seed=None) -> np.ndarray:
    return as_rng(seed).dirichlet(np.ones(n))


def product_basis_diagonal(dims=(2, 2), seed=None) -> DensityMatrix:
    """Random state diagonal in a random product basis ``|e_a>|f_b>``."""
    rng = as_rng(seed)
    da, db = dims
    u = np.kron(random_unitary(da, rng), random_unitary(db, rng))
    p = random_probs(da * db, rng)
    return density_from_kets(p, u.T, dims)


def conditional_product_state(dims=(2, 2), seed=None, classical: str = "A", rank: int | None = None) -> DensityMatrix:
    """Random ``sum_j p_j |e_j><e_j| (x) rho_j`` (classical side A) or its mirror.

    With ``classical="A"`` the state is diagonal in a conditional product
    basis pointing from A to B; with ``classical="B"`` the roles flip.
    ``rank`` sets the rank of the conditional states ``rho_j`` (full by default).
    """
    rng = as_rng(seed)
    da, db = dims
    if classical not in ("A", "B"):
        raise ValueError("classical must be 'A' or 'B'")
    d_cl, d_q = (da, db) if classical == "A" else (db, da)
    basis = random_unitary(d_cl, rng)
    p = random_probs(d_cl, rng)
    mat = np.zeros((da * db, da * db), dtype=complex)
    for j in range(d_cl):
        proj = np.outer(basis[:, j], basis[:, j].conj())
        rho_j = random_density((d_q, 1), rank=rank, seed=rng).mat
        mat += p[j] * (np.kron(proj, rho_j) if classical == "A" else np.kron(rho_j, proj))
    return validate_density_matrix(mat, dims)


BELL_KETS = {
    "phi+": np.array([1, 0, 0, 1]) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1]) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0]) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0]) / np.sqrt(2),
}


def bell_state(which: str = "phi+") -> DensityMatrix:
    key = which.lower().replace("φ", "phi").replace("Φ", "phi").replace("ψ", "psi").replace("Ψ", "psi")
    key = key.replace("⁺", "+").replace("⁻", "-")
    if key not in BELL_KETS:
        raise ValueError(f"unknown Bell state {which!r}")
    return density_from_kets([1.0], [BELL_KETS[key]], (2, 2))


@dataclass(frozen=True, eq=False)
class BlochForm:
    """``rho = (I + a.sigma (x) I + I (x) b.sigma + sum c_jk sigma_j (x) sigma_k) / 4``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def swap(self) -> "BlochForm":
        return BlochForm(self.b, self.a, self.c.T)


def to_bloch(rho: DensityMatrix) -> BlochForm:
    if tuple(rho.dims) != (2, 2):
        raise StateError("Bloch form needs a two-qubit state")
    # T[m, n] = tr(sigma_m (x) sigma_n rho), sigma_0 = I
    t = np.einsum("mij,nkl,jlik->mn", _PAULI4, _PAULI4, rho.mat.reshape(2, 2, 2, 2)).real
    return BlochForm(t[1:, 0].copy(), t[0, 1:].copy(), t[1:, 1:].copy())


def bloch_matrix(bf: BlochForm) -> np.ndarray:
    t = np.zeros((4, 4))
    t[0, 0] = 1.0
    t[1:, 0] = bf.a
    t[0, 1:] = bf.b
    t[1:, 1:] = bf.c
    return np.einsum("mn,mij,nkl->ikjl", t, _PAULI4, _PAULI4).reshape(4, 4) / 4


def from_bloch(bf: BlochForm) -> DensityMatrix:
    return validate_density_matrix(bloch_matrix(bf), (2, 2))


FIG5_A = np.array([1.0, 0.0, 0.0])
FIG5_B = np.array([1 / np.sqrt(2), -0.5, 0.5])
FIG5_C = np.diag([-0.9, -0.8, -0.7])


def fig5_family(eps: float) -> DensityMatrix:
    """``(1 - eps) rho_product + eps rho_bell_diagonal`` from the alignment experiment."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    prod = bloch_matrix(BlochForm(FIG5_A, FIG5_B, np.outer(FIG5_A, FIG5_B)))
    bd = bloch_matrix(BlochForm(np.zeros(3), np.zeros(3), FIG5_C))
    return validate_density_matrix((1 - eps) * prod + eps * bd, (2, 2))


@dataclass(frozen=True, eq=False)
class CqEnsemble:
    """Pure qubit states with Bloch vectors ``n_j`` sent with probabilities ``p_j``."""

    probs: np.ndarray
    bloch_vectors: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        n = np.atleast_2d(np.asarray(self.bloch_vectors, dtype=float))
        if len(p) != len(n) or abs(p.sum() - 1) > 1e-9 or np.any(p < 0):
            raise ValueError("invalid ensemble probabilities")
        if not np.allclose(np.linalg.norm(n, axis=1), 1.0, atol=1e-12):
            raise ValueError("ensemble Bloch vectors must be unit vectors")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "bloch_vectors", n)

    @property
    def d_B(self) -> int:
        return len(self.probs)

    def centroid(self) -> np.ndarray:
        return self.probs @ self.bloch_vectors


def triangle_ensemble() -> CqEnsemble:
    return CqEnsemble(np.full(3, 1 / 3), TRIANGLE_VECTORS)


def tetrahedron_ensemble() -> CqEnsemble:
    return CqEnsemble(np.full(4, 1 / 4), TETRAHEDRON_VECTORS)


def cq_state(ens: CqEnsemble) -> DensityMatrix:
    """``sum_j p_j rho_j (x) |j><j|`` with ``rho_j`` the pure qubit state along ``n_j``."""
    d = ens.d_B
    mat = np.zeros((2 * d, 2 * d), dtype=complex)
    for j, (p, n) in enumerate(zip(ens.probs, ens.bloch_vectors)):
        k = bloch_ket(n)
        proj = np.zeros((d, d))
        proj[j, j] = 1.0
        mat += p * np.kron(np.outer(k, k.conj()), proj)
    return validate_density_matrix(mat, (2, d))


def state_to_json(rho: DensityMatrix) -> str:
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in rho.mat]
    return json.dumps({"dims": list(rho.dims), "matrix": rows})


def state_from_json(text: str) -> DensityMatrix:
    """Parse ``{"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}``."""
    obj = json.loads(text)
    if not isinstance(obj, dict) or "dims" not in obj or "matrix" not in obj:
        raise ValueError("state JSON needs 'dims' and 'matrix' keys")
    dims = obj["dims"]
    if len(dims) != 2:
        raise ValueError("'dims' must have two entries")
    try:
        mat = np.array([[complex(re, im) for re, im in row] for row in obj["matrix"]])
    except (TypeError, ValueError) as exc:
        raise ValueError("matrix entries must be [re, im] pairs") from exc
    return validate_density_matrix(mat, (int(dims[0]), int(dims[1])))
