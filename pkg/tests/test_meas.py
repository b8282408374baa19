import numpy as np
import pytest

from qcorr.entropy import classical_info_table, shannon_entropy, von_neumann_entropy
from qcorr.meas import (
    PAULI,
    ConditionedStrategy,
    RankOnePovm,
    angle_axis,
    as_operators,
    check_povm,
    conditional_states_B,
    eigenbasis_conditioned_strategy,
    fine_grain,
    joint_distribution_conditioned,
    joint_distribution_unconditioned,
    marginal_eigenbasis_povm,
    povm_bloch_vectors,
    povm_from_bloch,
    projective_pair_povm,
    random_povm,
    random_rank_one_povm,
    symmetric_qubit_povm,
)
from qcorr.qmat import DimMismatch, partial_trace, tensor_product, validate_density_matrix
from qcorr.states import bell_state, random_density, random_unitary


def _trace_oracle(rho, E, F):
    """p_ab by explicit tr[(E_a (x) F_b) rho]."""
    return np.array([[np.trace(np.kron(e, f) @ rho.mat).real for f in F] for e in E])


def test_projective_pair_z():
    ops = projective_pair_povm(0.0, 0.0).operators
    assert np.allclose(ops, [np.diag([1, 0]), np.diag([0, 1])])


def test_projective_pair_x():
    ops = projective_pair_povm(np.pi / 4, 0.0).operators
    assert np.allclose(ops[0], 0.5 * np.array([[1, 1], [1, 1]]))
    assert np.allclose(ops[1], 0.5 * np.array([[1, -1], [-1, 1]]))


@pytest.mark.parametrize("seed", range(6))
def test_projective_pair_completeness_and_axis(seed):
    rng = np.random.default_rng(seed)
    t, p = rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi)
    povm = projective_pair_povm(t, p)
    assert np.abs(povm.operators.sum(0) - np.eye(2)).max() < 1e-12
    m = povm_bloch_vectors(povm)
    assert np.allclose(m[0], angle_axis([t, p]), atol=1e-12)
    assert np.allclose(m[1], -m[0], atol=1e-12)


def test_rank_one_rejects_incomplete():
    with pytest.raises(ValueError):
        RankOnePovm(np.ones(1), np.array([[1.0, 0.0]]))


def test_rank_one_weight_sum(rng):
    for d, n in [(2, 2), (2, 5), (3, 4), (4, 7)]:
        povm = random_rank_one_povm(d, n, rng)
        assert abs(povm.weights.sum() - d) < 1e-9
        assert np.all((povm.weights > 0) & (povm.weights <= 1 + 1e-12))
        check_povm(povm)


def test_marginal_eigenbasis():
    povm, deg = marginal_eigenbasis_povm(np.diag([0.7, 0.3]))
    assert not deg
    assert np.allclose(povm.operators, [np.diag([1, 0]), np.diag([0, 1])])
    _, deg = marginal_eigenbasis_povm(np.eye(2) / 2)
    assert deg


def test_marginal_eigenbasis_commutes(rng):
    r = random_density((3, 1), seed=rng).mat
    povm, deg = marginal_eigenbasis_povm(r)
    assert not deg
    for e in povm.operators:
        assert np.abs(e @ r - r @ e).max() < 1e-10


def test_joint_bell_z():
    z = projective_pair_povm(0, 0)
    p = joint_distribution_unconditioned(bell_state(), z, z).table
    assert np.allclose(p, [[0.5, 0], [0, 0.5]], atol=1e-15)


def test_joint_product(rng):
    ra = random_density((2, 1), seed=rng).mat
    rb = random_density((3, 1), seed=rng).mat
    rho = validate_density_matrix(tensor_product(ra, rb), (2, 3))
    e, f = random_rank_one_povm(2, 3, rng), random_rank_one_povm(3, 4, rng)
    jd = joint_distribution_unconditioned(rho, e, f)
    assert np.allclose(jd.table, np.outer(jd.p_a, jd.p_b), atol=1e-14)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_joint_matches_trace_oracle(rng, dims):
    rho = random_density(dims, seed=rng)
    E = random_povm(dims[0], 3, rng)
    F = random_rank_one_povm(dims[1], 4, rng)
    jd = joint_distribution_unconditioned(rho, E, F)
    assert np.allclose(jd.table, _trace_oracle(rho, E, as_operators(F)), atol=1e-14)
    assert abs(jd.table.sum() - 1) < 1e-10


def test_joint_dim_mismatch():
    with pytest.raises(DimMismatch):
        joint_distribution_unconditioned(bell_state(), projective_pair_povm(0, 0), np.eye(3)[None])


def test_conditional_states_bell():
    cs = conditional_states_B(bell_state("phi+"), projective_pair_povm(0, 0))
    assert [c.outcome for c in cs] == [0, 1]
    assert abs(cs[0].p_a - 0.5) < 1e-15
    assert np.allclose(cs[0].rho_B_given_a, np.diag([1, 0]))


def test_conditional_states_product(rng):
    rb = random_density((2, 1), seed=rng).mat
    rho = validate_density_matrix(np.kron(np.diag([0.6, 0.4]), rb), (2, 2))
    for c in conditional_states_B(rho, random_rank_one_povm(2, 3, rng)):
        assert np.allclose(c.rho_B_given_a, rb, atol=1e-12)


def test_conditional_states_drop_zero():
    rho = validate_density_matrix(np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2), (2, 2))
    cs = conditional_states_B(rho, projective_pair_povm(0, 0))
    assert [c.outcome for c in cs] == [0]


@pytest.mark.parametrize("dims", [(2, 2), (3, 2), (2, 4)])
def test_conditional_ensemble_average(rng, dims):
    rho = random_density(dims, seed=rng)
    cs = conditional_states_B(rho, random_povm(dims[0], 3, rng))
    avg = sum(c.p_a * c.rho_B_given_a for c in cs)
    assert np.abs(avg - partial_trace(rho, "B")).max() < 1e-9


def test_single_label_strategy_matches_unconditioned(rng):
    rho = random_density((2, 3), seed=rng)
    e, f = random_rank_one_povm(2, 3, rng), random_rank_one_povm(3, 3, rng)
    s = ConditionedStrategy(e, ["x"] * 3, {"x": f})
    assert np.allclose(
        joint_distribution_conditioned(rho, s).table, joint_distribution_unconditioned(rho, e, f).table, atol=1e-15
    )


def test_conditioned_block_structure(rng):
    rho = random_density((2, 2), seed=rng)
    e = random_rank_one_povm(2, 3, rng)
    s = ConditionedStrategy(e, [0, 1, 0], {0: projective_pair_povm(0, 0), 1: random_rank_one_povm(2, 3, rng)})
    p = joint_distribution_conditioned(rho, s).table
    assert p.shape == (3, 5)
    assert np.all(p[[0, 2], 2:] == 0) and np.all(p[1, :2] == 0)
    assert abs(p.sum() - 1) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_eigenbasis_strategy_attains_bound(seed):
    rng = np.random.default_rng(seed)
    rho = random_density((2, 3), seed=rng)
    e = random_rank_one_povm(2, 3, rng)
    s = eigenbasis_conditioned_strategy(rho, e)
    t = classical_info_table(joint_distribution_conditioned(rho, s))
    bound = sum(c.p_a * von_neumann_entropy(c.rho_B_given_a) for c in conditional_states_B(rho, e))
    assert abs(t.H_BgA - bound) < 1e-9
    # disjoint B alphabets reveal a, so H(A:B) reaches H(A)
    assert abs(t.H_AcolonB - t.H_A) < 1e-9
    # and beats the unconditioned strategy with the same A measurement
    f = random_rank_one_povm(3, 3, rng)
    assert t.H_AcolonB >= classical_info_table(joint_distribution_unconditioned(rho, e, f)).H_AcolonB - 1e-12


def test_extreme_conditioning_exceeds_quantum_mi():
    # why the fully conditioned classical mutual information is not a valid measure
    rho = validate_density_matrix(np.eye(4) / 4, (2, 2))
    s = eigenbasis_conditioned_strategy(rho, projective_pair_povm(0, 0))
    assert classical_info_table(joint_distribution_conditioned(rho, s)).H_AcolonB == pytest.approx(1.0)


def test_trine():
    t = symmetric_qubit_povm("trine")
    assert np.abs(t.operators.sum(0) - np.eye(2)).max() < 1e-12
    m = povm_bloch_vectors(t)
    assert np.abs(m.sum(0)).max() < 1e-12
    assert np.allclose(t.weights, 2 / 3)


def test_tetrahedron():
    t = symmetric_qubit_povm("tetrahedron")
    m = povm_bloch_vectors(t)
    dots = m @ m.T
    assert np.abs(dots[~np.eye(4, dtype=bool)] + 1 / 3).max() < 1e-12
    assert np.abs(t.operators.sum(0) - np.eye(2)).max() < 1e-12


def test_dual_orientation():
    m = povm_bloch_vectors(symmetric_qubit_povm("trine", -np.eye(3)))
    assert np.allclose(m, -povm_bloch_vectors(symmetric_qubit_povm("trine")), atol=1e-12)


def test_povm_from_bloch_elements():
    q = np.full(3, 1 / 3)
    m = povm_bloch_vectors(symmetric_qubit_povm("trine"))
    ops = povm_from_bloch(q, m).operators
    expected = [qa * (np.eye(2) + np.einsum("s,sij->ij", ma, PAULI)) for qa, ma in zip(q, m)]
    assert np.allclose(ops, expected, atol=1e-12)


def test_fine_grain_roundtrip(rng):
    ops = random_povm(3, 2, rng)
    fine, parent = fine_grain(ops)
    regrouped = [fine.operators[parent == a].sum(0) for a in range(2)]
    assert np.allclose(regrouped, ops, atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_fine_graining_monotone(seed):
    rng = np.random.default_rng(seed)
    rho = random_density((2, 3), seed=rng)
    e, f = random_povm(2, 2, rng), random_povm(3, 3, rng, rank=2)
    coarse = classical_info_table(joint_distribution_unconditioned(rho, e, f)).H_AcolonB
    fine = classical_info_table(joint_distribution_unconditioned(rho, fine_grain(e)[0], fine_grain(f)[0])).H_AcolonB
    assert fine >= coarse - 1e-10


@pytest.mark.parametrize("seed", range(20))
def test_povm_inequality_rank_one(seed):
    rng = np.random.default_rng(seed)
    d = 2 + seed % 3
    rho = random_density((d, 1), seed=rng).mat
    povm = random_rank_one_povm(d, d + 2, rng)
    p = np.einsum("aij,ji->a", povm.operators, rho).real
    s = von_neumann_entropy(rho)
    middle = s - p @ np.log2(povm.weights)
    assert shannon_entropy(p) >= middle - 1e-9
    assert middle >= s - 1e-9


def test_random_povm_rank_guard(rng):
    with pytest.raises(ValueError):
        random_povm(4, 2, rng, rank=1)


def test_local_unitary_covariance(rng):
    rho = random_density((2, 2), seed=rng)
    u = random_unitary(2, rng)
    e = random_rank_one_povm(2, 3, rng)
    rot = validate_density_matrix(np.kron(u, np.eye(2)) @ rho.mat @ np.kron(u, np.eye(2)).conj().T, (2, 2))
    e_rot = [u @ x @ u.conj().T for x in e.operators]
    z = projective_pair_povm(0, 0)
    assert np.allclose(
        joint_distribution_unconditioned(rho, e, z).table,
        joint_distribution_unconditioned(rot, np.array(e_rot), z).table,
        atol=1e-12,
    )
