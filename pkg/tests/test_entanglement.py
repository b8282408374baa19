import numpy as np
import pytest
from scipy.linalg import sqrtm

from qcorr.entanglement import (
    concurrence,
    entanglement_of_formation,
    entanglement_pair,
    eof_from_concurrence,
)
from qcorr.entropy import quantum_info_table
from qcorr.qmat import validate_density_matrix
from qcorr.states import bell_state, random_density, random_pure, random_unitary

EOF_AT_07 = 0.5918574071706773  # h((1 + sqrt(0.51)) / 2)

YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def concurrence_oracle(rho):
    """Wootters via the Hermitian form sqrt(sqrt(rho) rho~ sqrt(rho))."""
    s = sqrtm(rho)
    r = sqrtm(s @ YY @ rho.conj() @ YY @ s)
    lam = np.sort(np.linalg.eigvalsh(0.5 * (r + r.conj().T)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def werner(p):
    return validate_density_matrix(p * bell_state("phi+").mat + (1 - p) * np.eye(4) / 4, (2, 2))


@pytest.mark.parametrize("which", ["phi+", "phi-", "psi+", "psi-"])
def test_bell(which):
    c, e = entanglement_pair(bell_state(which))
    assert abs(c - 1) < 1e-10 and abs(e - 1) < 1e-10


def test_product_states(rng):
    for _ in range(5):
        ra = random_density((2, 1), seed=rng).mat
        rb = random_density((2, 1), seed=rng).mat
        rho = validate_density_matrix(np.kron(ra, rb), (2, 2))
        assert concurrence(rho) < 1e-10
        assert entanglement_of_formation(rho) < 1e-10


def test_werner():
    rho = werner(0.8)
    assert abs(concurrence(rho) - 0.7) < 1e-9
    assert abs(concurrence_oracle(rho.mat) - 0.7) < 1e-9
    assert abs(entanglement_of_formation(rho) - EOF_AT_07) < 1e-12


@pytest.mark.parametrize("seed", range(8))
def test_matches_oracle(seed):
    rho = random_density((2, 2), rank=1 + seed % 4, seed=seed)
    assert abs(concurrence(rho) - concurrence_oracle(rho.mat)) < 1e-7


@pytest.mark.parametrize("c, expected", [(1.0, 1.0), (0.0, 0.0), (0.7, EOF_AT_07)])
def test_eof_formula(c, expected):
    assert abs(eof_from_concurrence(c) - expected) < 1e-12


def test_eof_monotone():
    vals = [eof_from_concurrence(c) for c in np.linspace(0, 1, 201)]
    assert np.all(np.diff(vals) >= 0)


@pytest.mark.parametrize("seed", range(5))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = random_density((2, 2), seed=rng)
    u = np.kron(random_unitary(2, rng), random_unitary(2, rng))
    rot = validate_density_matrix(u @ rho.mat @ u.conj().T, (2, 2))
    assert abs(concurrence(rho) - concurrence(rot)) < 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_pure_state_eof_is_entanglement_entropy(seed):
    rho = random_pure((2, 2), seed=seed)
    assert abs(entanglement_of_formation(rho) - quantum_info_table(rho).S_A) < 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_zero_iff(seed):
    rho = random_density((2, 2), seed=seed)
    c, e = entanglement_pair(rho)
    assert (c < 1e-10) == (e < 1e-10)


def test_wrong_dims():
    with pytest.raises(ValueError):
        concurrence(random_density((2, 3), seed=0))
