import json

import numpy as np
import pytest

from qcorr.entropy import quantum_info_table, shannon_entropy, von_neumann_entropy
from qcorr.qmat import NegativeEigenvalue, StateError, partial_trace, validate_density_matrix
from qcorr.states import (
    FIG5_C,
    TETRAHEDRON_VECTORS,
    TRIANGLE_VECTORS,
    BlochForm,
    CqEnsemble,
    bell_state,
    bloch_matrix,
    conditional_product_state,
    cq_state,
    fig5_family,
    from_bloch,
    product_basis_diagonal,
    random_density,
    random_pure,
    random_unitary,
    state_from_json,
    state_to_json,
    tetrahedron_ensemble,
    to_bloch,
    triangle_ensemble,
)

# Bell-diagonal spectrum (1 +- c1 +- c2 +- c3)/4 for c = diag(-0.9, -0.8, -0.7)
FIG5_BD_SPECTRUM = [0.85, 0.1, 0.05, 0.0]


def test_random_density_reproducible():
    a = random_density((2, 2), seed=11)
    b = random_density((2, 2), seed=11)
    c = random_density((2, 2), seed=12)
    assert np.array_equal(a.mat, b.mat)
    assert not np.allclose(a.mat, c.mat)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_random_density_rank(rank):
    rho = random_density((2, 2), rank=rank, seed=rank)
    w = np.linalg.eigvalsh(rho.mat)
    assert np.sum(w > 1e-12) == rank


def test_random_pure_entropy():
    assert quantum_info_table(random_pure((2, 2), seed=1)).S_AB < 1e-9


@pytest.mark.parametrize("rank", [0, 5])
def test_random_density_bad_rank(rank):
    with pytest.raises(ValueError):
        random_density((2, 2), rank=rank)


def test_hilbert_schmidt_mean_purity():
    rng = np.random.default_rng(0)
    vals = []
    for _ in range(10_000):
        r = random_density((2, 2), seed=rng).mat
        vals.append(np.trace(r @ r).real)
    assert abs(np.mean(vals) - 8 / 17) < 0.01


def test_random_unitary(rng):
    u = random_unitary(3, rng)
    assert np.abs(u.conj().T @ u - np.eye(3)).max() < 1e-12


def test_bell_states():
    for which in ["phi+", "phi-", "psi+", "psi-", "Φ⁺"]:
        rho = bell_state(which)
        assert np.allclose(partial_trace(rho, "A"), np.eye(2) / 2)
        t = quantum_info_table(rho)
        assert abs(t.S_AB) < 1e-12 and abs(t.S_AcolonB - 2) < 1e-12
    with pytest.raises(ValueError):
        bell_state("chi")


def test_bloch_identity():
    assert np.allclose(bloch_matrix(BlochForm(np.zeros(3), np.zeros(3), np.zeros((3, 3)))), np.eye(4) / 4)


def test_bloch_bell():
    rho = from_bloch(BlochForm(np.zeros(3), np.zeros(3), np.diag([1.0, -1.0, 1.0])))
    assert np.allclose(rho.mat, bell_state("phi+").mat, atol=1e-15)


def test_bloch_diagonal_spectrum():
    rho = from_bloch(BlochForm(np.zeros(3), np.zeros(3), FIG5_C))
    assert np.allclose(np.sort(np.linalg.eigvalsh(rho.mat))[::-1], FIG5_BD_SPECTRUM, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_bloch_roundtrip(seed):
    rho = random_density((2, 2), seed=seed)
    bf = to_bloch(rho)
    assert np.abs(from_bloch(bf).mat - rho.mat).max() < 1e-12
    bf2 = to_bloch(from_bloch(bf))
    for x, y in [(bf.a, bf2.a), (bf.b, bf2.b), (bf.c, bf2.c)]:
        assert np.abs(x - y).max() < 1e-12
    assert np.linalg.norm(bf.a) <= 1 and np.linalg.norm(bf.b) <= 1


def test_bloch_swap(rng):
    rho = random_density((2, 2), seed=rng)
    s1, s2 = to_bloch(rho.swap()), to_bloch(rho).swap()
    assert np.allclose(s1.a, s2.a) and np.allclose(s1.b, s2.b) and np.allclose(s1.c, s2.c)


def test_bloch_unphysical():
    with pytest.raises(NegativeEigenvalue):
        from_bloch(BlochForm(np.zeros(3), np.zeros(3), np.eye(3)))


def test_bloch_needs_qubits():
    with pytest.raises(StateError):
        to_bloch(random_density((2, 3), seed=0))


def test_fig5_endpoints():
    bf0 = to_bloch(fig5_family(0.0))
    assert np.allclose(bf0.c, np.outer(bf0.a, bf0.b), atol=1e-12)
    assert abs(quantum_info_table(fig5_family(0.0)).S_AcolonB) < 1e-10
    bf1 = to_bloch(fig5_family(1.0))
    assert np.allclose(bf1.c, FIG5_C, atol=1e-12)
    assert np.allclose(bf1.a, 0, atol=1e-12) and np.allclose(bf1.b, 0, atol=1e-12)


def test_fig5_grid_valid():
    for eps in np.linspace(0, 1, 101):
        assert np.linalg.eigvalsh(fig5_family(eps).mat).min() >= -1e-10


@pytest.mark.parametrize("eps", [-0.1, 1.5])
def test_fig5_range(eps):
    with pytest.raises(ValueError):
        fig5_family(eps)


def test_polygon_geometry():
    tri = TRIANGLE_VECTORS @ TRIANGLE_VECTORS.T
    tet = TETRAHEDRON_VECTORS @ TETRAHEDRON_VECTORS.T
    off3, off4 = ~np.eye(3, dtype=bool), ~np.eye(4, dtype=bool)
    assert np.abs(tri[off3] + 0.5).max() < 1e-15
    assert np.abs(tet[off4] + 1 / 3).max() < 1e-15
    assert np.abs(triangle_ensemble().centroid()).max() < 1e-15
    assert np.abs(tetrahedron_ensemble().centroid()).max() < 1e-15


@pytest.mark.parametrize("ens", [triangle_ensemble(), tetrahedron_ensemble()])
def test_cq_state(ens):
    rho = cq_state(ens)
    assert rho.dims == (2, ens.d_B)
    assert np.abs(partial_trace(rho, "A") - np.eye(2) / 2).max() < 1e-12
    assert abs(von_neumann_entropy(rho.mat) - shannon_entropy(ens.probs)) < 1e-12


def test_cq_single_member_is_product():
    rho = cq_state(CqEnsemble([1.0], [[0, 0, 1]]))
    assert abs(quantum_info_table(rho).S_AcolonB) < 1e-12


def test_cq_rejects_non_unit():
    with pytest.raises(ValueError):
        CqEnsemble([0.5, 0.5], [[0, 0, 1], [0, 0, -0.5]])


@pytest.mark.parametrize("seed", range(5))
def test_zero_class_factories(seed):
    p = product_basis_diagonal((2, 2), seed)
    q = conditional_product_state((2, 3), seed, "A")
    r = conditional_product_state((3, 2), seed, "B")
    for rho in (p, q, r):
        validate_density_matrix(rho.mat, rho.dims)


def test_json_roundtrip(rng):
    rho = random_density((2, 3), seed=rng)
    back = state_from_json(state_to_json(rho))
    assert back.dims == (2, 3)
    assert np.array_equal(back.mat, rho.mat)


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        json.dumps({"dims": [2, 2]}),
        json.dumps({"dims": [2], "matrix": []}),
        json.dumps({"dims": [2, 1], "matrix": [[1, 0], [0, 0]]}),
    ],
)
def test_json_errors(text):
    with pytest.raises(ValueError):
        state_from_json(text)
