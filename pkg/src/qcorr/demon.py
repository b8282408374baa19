"""Work accounting for local demons that measure, communicate, extract work and erase.

Post-measurement states use the Kraus operator ``sqrt(E)`` for a POVM
element ``E``. Work is in units of ``k_B T ln 2`` (bits).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .entropy import classical_info_table, quantum_info_table, von_neumann_entropy, xlog2x
from .meas import ConditionedStrategy, RankOnePovm, as_operators, joint_distribution_conditioned, unnormalized_b_states
from .qmat import DensityMatrix, DimMismatch, partial_trace

DROP_PROB = 1e-12


@dataclass(frozen=True)
class WorkLedger:
    """Extractable work, erasure cost and the entropy terms behind them."""

    w_plus: float
    w_minus: float
    w_net: float
    log_dim: float
    joint_record: float
    residual_a: float = 0.0
    residual_b: float = 0.0
    refinement_a: float = 0.0
    refinement_b: float = 0.0


class Refinement(NamedTuple):
    povm: RankOnePovm
    parent: np.ndarray
    records: list


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _as_strategy(e, strategy) -> ConditionedStrategy:
    if isinstance(strategy, ConditionedStrategy):
        if e is not None and not np.allclose(as_operators(e), as_operators(strategy.a_povm)):
            raise ValueError("A POVM disagrees with the conditioned strategy")
        return strategy
    n_a = len(as_operators(e))
    return ConditionedStrategy(as_operators(e), [0] * n_a, {0: strategy})


class _Branches(NamedTuple):
    p_a: np.ndarray
    post_a: list  # rho_A|a, None where p_a = 0
    rho_b_given_a: list
    p_b_given_a: list  # per a: array over the outcomes of B_c(a)
    post_b: list  # per a: list of rho_B|ab (None where p = 0)


def _branches(rho: DensityMatrix, s: ConditionedStrategy) -> _Branches:
    E = as_operators(s.a_povm)
    da, db = rho.dims
    if E.shape[1] != da:
        raise DimMismatch(f"A POVM on dimension {E.shape[1]} vs d_A = {da}")
    rho_a = partial_trace(rho, "A")
    sub = unnormalized_b_states(rho, E)
    p_a, post_a, cond_b, p_ba, post_b = [], [], [], [], []
    for a, ea in enumerate(E):
        k = psd_sqrt(ea)
        pa = float(np.trace(ea @ rho_a).real)
        p_a.append(pa)
        F = as_operators(s.b_povms[s.c_of_a[a]])
        if F.shape[1] != db:
            raise DimMismatch(f"B POVM on dimension {F.shape[1]} vs d_B = {db}")
        if pa < DROP_PROB:
            post_a.append(None)
            cond_b.append(None)
            p_ba.append(np.zeros(len(F)))
            post_b.append([None] * len(F))
            continue
        post_a.append(k @ rho_a @ k / pa)
        rb = sub[a] / pa
        cond_b.append(rb)
        probs, states = [], []
        for fb in F:
            kb = psd_sqrt(fb)
            pb = float(np.trace(fb @ rb).real)
            probs.append(pb)
            states.append(kb @ rb @ kb / pb if pb >= DROP_PROB else None)
        p_ba.append(np.array(probs))
        post_b.append(states)
    return _Branches(np.array(p_a), post_a, cond_b, p_ba, post_b)


def _weighted_entropy(weights, states) -> float:
    return float(sum(w * von_neumann_entropy(st) for w, st in zip(weights, states) if st is not None))


def net_classical_work(rho: DensityMatrix, e, strategy) -> WorkLedger:
    """Net work ``W+ - W-`` for local demons with communication.

    ``strategy`` is a POVM on B (no conditioning) or a
    :class:`ConditionedStrategy`, in which case ``e`` may be None. POVMs
    need not be rank-one; leftover entropy in the post-measurement states
    reduces the extractable work.
    """
    s = _as_strategy(e, strategy)
    br = _branches(rho, s)
    h_ab = classical_info_table(joint_distribution_conditioned(rho, s)).H_AB
    log_dim = float(np.log2(rho.dims[0] * rho.dims[1]))
    res_a = _weighted_entropy(br.p_a, br.post_a)
    res_b = sum(pa * _weighted_entropy(pb, st) for pa, pb, st in zip(br.p_a, br.p_b_given_a, br.post_b))
    w_plus = log_dim - res_a - res_b
    return WorkLedger(w_plus, h_ab, w_plus - h_ab, log_dim, h_ab, res_a, float(res_b))


def refine_to_rank_one(e, conditionals) -> Refinement:
    """Follow each outcome ``a`` with a measurement in the eigenbasis of its post-measurement state.

    The composite elements ``sqrt(E_a) |v><v| sqrt(E_a)`` are rank-one and sum
    to ``E_a``. ``conditionals[a]`` may be None for outcomes that never
    occur; the computational basis is used there. ``records[a]`` holds the
    eigenvalues ``lambda_{alpha|a}``.
    """
    E = as_operators(e)
    d = E.shape[1]
    weights, kets, parent, records = [], [], [], []
    for a, ea in enumerate(E):
        k = psd_sqrt(ea)
        st = conditionals[a]
        if st is None:
            lam, vecs = np.zeros(d), np.eye(d, dtype=complex)
        else:
            lam, vecs = np.linalg.eigh(0.5 * (st + st.conj().T))
            lam = np.clip(lam, 0.0, None)
        records.append(lam)
        for v in vecs.T:
            w = k @ v
            nrm = float(np.vdot(w, w).real)
            if nrm > 1e-14:
                weights.append(nrm)
                kets.append(w / np.sqrt(nrm))
                parent.append(a)
    return Refinement(RankOnePovm(np.array(weights), np.array(kets)), np.array(parent), records)


def _record_entropy(ref: Refinement, rho_in: np.ndarray, p_parent: np.ndarray) -> float:
    """``sum_a p_a H(lambda_{.|a})`` with the records read off the refined measurement statistics."""
    probs = np.einsum("ai,ij,aj->a", ref.povm.kets.conj(), rho_in, ref.povm.kets).real * ref.povm.weights
    total = 0.0
    for a, pa in enumerate(p_parent):
        if pa < DROP_PROB:
            continue
        lam = probs[ref.parent == a] / pa
        total += pa * float(-np.sum(xlog2x(np.clip(lam, 0.0, None))))
    return total


def _rank_one_residual(ref: Refinement, rho_in: np.ndarray) -> float:
    """Average entropy left after the refined measurement; Kraus ``|v><v| sqrt(E_a)``."""
    total = 0.0
    for w, ket in zip(ref.povm.weights, ref.povm.kets):
        k = np.sqrt(w) * ket
        kraus = np.outer(ket, k.conj())
        post = kraus @ rho_in @ kraus.conj().T
        p = float(np.trace(post).real)
        if p >= DROP_PROB:
            total += p * von_neumann_entropy(post / p)
    return total


def refined_net_classical_work(rho: DensityMatrix, e, strategy) -> WorkLedger:
    """Ledger after refining both local measurements to rank one.

    Erasure now covers the refinement records separately:
    ``W- = H(A,B) + sum_a p_a H(lambda_{.|a}) + sum_ab p_ab H(lambda_{.|ab})``.
    Correlations among refinement records are not exploited.
    """
    s = _as_strategy(e, strategy)
    br = _branches(rho, s)
    h_ab = classical_info_table(joint_distribution_conditioned(rho, s)).H_AB
    log_dim = float(np.log2(rho.dims[0] * rho.dims[1]))
    rho_a = partial_trace(rho, "A")

    ref_a = refine_to_rank_one(s.a_povm, br.post_a)
    rec_a = _record_entropy(ref_a, rho_a, br.p_a)
    residual = _rank_one_residual(ref_a, rho_a)

    rec_b = 0.0
    for a, pa in enumerate(br.p_a):
        if pa < DROP_PROB:
            continue
        F = s.b_povms[s.c_of_a[a]]
        ref_b = refine_to_rank_one(F, br.post_b[a])
        rb = br.rho_b_given_a[a]
        rec_b += pa * _record_entropy(ref_b, rb, br.p_b_given_a[a])
        residual += pa * _rank_one_residual(ref_b, rb)

    w_plus = log_dim - residual
    w_minus = h_ab + rec_a + rec_b
    return WorkLedger(w_plus, w_minus, w_plus - w_minus, log_dim, h_ab, refinement_a=rec_a, refinement_b=rec_b)


def work_deficit_no_comm(rho: DensityMatrix) -> float:
    """``W_q - W_c`` when the local demons cannot communicate."""
    qi = quantum_info_table(rho)
    log_dim = float(np.log2(rho.dims[0] * rho.dims[1]))
    w_q = log_dim - qi.S_AB
    w_c = log_dim - qi.S_A - qi.S_B
    return w_q - w_c


def work_deficit_comm(rho: DensityMatrix, e, strategy) -> float:
    """``W_q - W_c`` for communicating demons using the given measurements."""
    led = net_classical_work(rho, e, strategy)
    w_q = led.log_dim - von_neumann_entropy(rho.mat)
    return w_q - led.w_net

