"""Entropic measures of nonclassical correlations for bipartite states.

Every measure is a quantum entropic quantity minus its classical counterpart
obtained from local measurements:

============  =======================================  ======================
measure       classical side                           strategy
============  =======================================  ======================
mutual_info   none (work deficit without comm.)        --
mid           H(A:B) in the marginal eigenbases        eigenbases
wpm           max H(A:B)                               unconditioned
m2b           min H(B|A)                               unconditioned
m3b           min H(A,B)                               unconditioned
discord       min sum_a p_a S(rho_B|a)                 conditioned
demon disc.   min H(A) + sum_a p_a S(rho_B|a)          conditioned
============  =======================================  ======================

The optimized two-qubit measures search orthogonal projective pairs only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .entropy import binary_entropy, classical_info_table, quantum_info_table, xlog2x
from .meas import (
    RankOnePovm,
    angle_axis,
    joint_distribution_unconditioned,
    marginal_eigenbasis_povm,
    povm_bloch_vectors,
    projective_pair_povm,
)
from .optim import OptimConfig, canonical_from_axis, maximize_over_sphere, optimize_angles
from .qmat import DensityMatrix, partial_trace
from .states import BlochForm, CqEnsemble, to_bloch

EPS_OPT = 1e-4
DEGENERACY_TOL = 1e-9


class Direction(str, Enum):
    AtoB = "AtoB"
    BtoA = "BtoA"


class MeasureResult(NamedTuple):
    value: float
    angles: np.ndarray


def _direction(d) -> Direction:
    return d if isinstance(d, Direction) else Direction(d)


def _require_two_qubits(rho: DensityMatrix):
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"optimized measures need a two-qubit state, got dims {rho.dims}")


# ---------------------------------------------------------------------------
# vectorized classical quantities on the Bloch form

_SIGNS = np.array([1.0, -1.0])


def joint_probs(bf: BlochForm, angles) -> np.ndarray:
    """``p[n, s, t]`` for projective pairs on both qubits, ``angles`` of shape ``(N, 4)``."""
    angles = np.atleast_2d(angles)
    u = angle_axis(angles[:, :2])
    v = angle_axis(angles[:, 2:])
    au = u @ bf.a
    bv = v @ bf.b
    ucv = np.einsum("ni,ij,nj->n", u, bf.c, v)
    s = _SIGNS[None, :, None]
    t = _SIGNS[None, None, :]
    return 0.25 * (1 + s * au[:, None, None] + t * bv[:, None, None] + s * t * ucv[:, None, None])


def classical_entropies(p: np.ndarray):
    """``(H_A, H_B, H_AB)`` for a batch of 2x2 joint tables."""
    h_ab = -xlog2x(p).sum(axis=(1, 2))
    h_a = -xlog2x(p.sum(axis=2)).sum(axis=1)
    h_b = -xlog2x(p.sum(axis=1)).sum(axis=1)
    return h_a, h_b, h_ab


def steered_entropy(bf: BlochForm, angles) -> tuple[np.ndarray, np.ndarray]:
    """``(H(A), sum_a p_a S(rho_B|a))`` for a projective pair on A, ``angles`` of shape ``(N, 2)``.

    Outcome ``s = +-1`` has ``p_s = (1 + s a.u)/2`` and leaves B with Bloch
    vector ``(b + s c^T u) / (1 + s a.u)``.
    """
    u = angle_axis(np.atleast_2d(angles))
    au = u @ bf.a
    cu = u @ bf.c
    h_a = np.zeros(len(u))
    cond = np.zeros(len(u))
    for s in _SIGNS:
        p = 0.5 * (1 + s * au)
        vec = np.linalg.norm(bf.b[None, :] + s * cu, axis=1)
        live = p > 1e-14
        r = np.where(live, vec / np.where(live, 2 * p, 1.0), 0.0)
        r = np.clip(r, 0.0, 1.0)
        cond += np.where(live, p * binary_entropy(0.5 * (1 + r)), 0.0)
        h_a -= xlog2x(p)
    return h_a, cond


# ---------------------------------------------------------------------------
# measures


def quantum_mutual_information(rho: DensityMatrix) -> float:
    return quantum_info_table(rho).S_AcolonB


def _eigen_axis(r: np.ndarray, tol: float = DEGENERACY_TOL):
    """Measurement axis of a qubit marginal's eigenbasis, or None when degenerate."""
    n = np.linalg.norm(r)
    return None if n < tol else r / n


def _eigen_starts(bf: BlochForm):
    ua, ub = _eigen_axis(bf.a), _eigen_axis(bf.b)
    if ua is None or ub is None:
        return []
    return [np.concatenate([canonical_from_axis(ua), canonical_from_axis(ub)])]


def _mid(rho: DensityMatrix, config: OptimConfig | None):
    qi = quantum_info_table(rho)
    ea, deg_a = marginal_eigenbasis_povm(partial_trace(rho, "A"), DEGENERACY_TOL)
    eb, deg_b = marginal_eigenbasis_povm(partial_trace(rho, "B"), DEGENERACY_TOL)
    if not (deg_a or deg_b):
        h = classical_info_table(joint_distribution_unconditioned(rho, ea, eb)).H_AcolonB
        return qi.S_AcolonB - h, None
    if tuple(rho.dims) != (2, 2):
        raise ValueError("degenerate marginals are only handled for two qubits")
    bf = to_bloch(rho)
    # a nondegenerate qubit marginal pins that side's axis
    fixed_a = None if deg_a else canonical_from_axis(bf.a)
    fixed_b = None if deg_b else canonical_from_axis(bf.b)

    def full(x):
        x = np.atleast_2d(x)
        if fixed_a is not None:
            return np.concatenate([np.broadcast_to(fixed_a, x.shape), x], axis=1)
        if fixed_b is not None:
            return np.concatenate([x, np.broadcast_to(fixed_b, x.shape)], axis=1)
        return x

    def info(x):
        h_a, h_b, h_ab = classical_entropies(joint_probs(bf, full(x)))
        return h_a + h_b - h_ab

    n = 4 if (deg_a and deg_b) else 2
    res = optimize_angles(info, n, "max", config)
    return qi.S_AcolonB - res.best_value, full(res.best_angles)[0]


def mid(rho: DensityMatrix, config: OptimConfig | None = None) -> float:
    """Measurement-induced disturbance.

    Marginals are measured in their eigenbases. A degenerate qubit marginal
    has no preferred basis, so H(A:B) is maximized over that qubit's
    projective pairs.
    """
    return _mid(rho, config)[0]


def wpm(rho: DensityMatrix, config: OptimConfig | None = None) -> MeasureResult:
    """``S(A:B) - max H(A:B)`` over projective pairs on both qubits."""
    _require_two_qubits(rho)
    bf = to_bloch(rho)

    def info(x):
        h_a, h_b, h_ab = classical_entropies(joint_probs(bf, x))
        return h_a + h_b - h_ab

    res = optimize_angles(info, 4, "max", config, extra_starts=_eigen_starts(bf))
    return MeasureResult(quantum_mutual_information(rho) - res.best_value, res.best_angles)


def _swap_angles(x: np.ndarray) -> np.ndarray:
    return np.concatenate([x[2:], x[:2]])


def m2b(rho: DensityMatrix, direction="AtoB", config: OptimConfig | None = None) -> MeasureResult:
    """``min H(B|A) - S(B|A)`` over projective pairs (AtoB); BtoA conditions on B instead.

    Angles are always reported in (A, B) order.
    """
    _require_two_qubits(rho)
    d = _direction(direction)
    work = rho.swap() if d is Direction.BtoA else rho
    bf = to_bloch(work)

    def cond(x):
        h_a, _, h_ab = classical_entropies(joint_probs(bf, x))
        return h_ab - h_a

    res = optimize_angles(cond, 4, "min", config, extra_starts=_eigen_starts(bf))
    angles = _swap_angles(res.best_angles) if d is Direction.BtoA else res.best_angles
    return MeasureResult(res.best_value - quantum_info_table(work).S_BgA, angles)


def m3b(rho: DensityMatrix, config: OptimConfig | None = None) -> MeasureResult:
    """``min H(A,B) - S(A,B)`` over projective pairs on both qubits."""
    _require_two_qubits(rho)
    bf = to_bloch(rho)

    def joint(x):
        return classical_entropies(joint_probs(bf, x))[2]

    res = optimize_angles(joint, 4, "min", config, extra_starts=_eigen_starts(bf))
    return MeasureResult(res.best_value - quantum_info_table(rho).S_AB, res.best_angles)


def discord(rho: DensityMatrix, direction="AtoB", config: OptimConfig | None = None) -> MeasureResult:
    """Quantum discord ``D(A -> B)``; the angles are those of the measured (conditioning) qubit."""
    _require_two_qubits(rho)
    d = _direction(direction)
    work = rho.swap() if d is Direction.BtoA else rho
    bf = to_bloch(work)
    res = optimize_angles(lambda x: steered_entropy(bf, x)[1], 2, "min", config)
    return MeasureResult(res.best_value - quantum_info_table(work).S_BgA, res.best_angles)


def demon_discord(rho: DensityMatrix, direction="AtoB", config: OptimConfig | None = None) -> MeasureResult:
    """``min [H(A) + sum_a p_a S(rho_B|a)] - S(A,B)`` over projective pairs on the conditioning qubit."""
    _require_two_qubits(rho)
    d = _direction(direction)
    work = rho.swap() if d is Direction.BtoA else rho
    bf = to_bloch(work)

    def joint(x):
        h_a, cond = steered_entropy(bf, x)
        return h_a + cond

    res = optimize_angles(joint, 2, "min", config)
    return MeasureResult(res.best_value - quantum_info_table(work).S_AB, res.best_angles)


# ---------------------------------------------------------------------------
# report

MEASURE_NAMES = (
    "mutual_info",
    "mid",
    "wpm",
    "m2b_ab",
    "m2b_ba",
    "discord_ab",
    "discord_ba",
    "m3b",
    "dd_ab",
    "dd_ba",
)


def ordering_pairs(suffix: str) -> list[tuple[str, str]]:
    """``(larger, smaller)`` pairs of the ordering array for one direction."""
    m2, di, dd = f"m2b_{suffix}", f"discord_{suffix}", f"dd_{suffix}"
    return [
        ("mutual_info", "mid"),
        ("mid", "wpm"),
        ("mid", m2),
        (m2, di),
        ("mid", "m3b"),
        ("m3b", dd),
        ("m3b", m2),
        (m2, "wpm"),
        (dd, di),
        ("wpm", di),
    ]


ORDERING_PAIRS = list(dict.fromkeys(ordering_pairs("ab") + ordering_pairs("ba")))


@dataclass
class MeasureReport:
    mutual_info: float = math.nan
    mid: float = math.nan
    wpm: float = math.nan
    m2b_ab: float = math.nan
    m2b_ba: float = math.nan
    discord_ab: float = math.nan
    discord_ba: float = math.nan
    m3b: float = math.nan
    dd_ab: float = math.nan
    dd_ba: float = math.nan
    angles: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def values(self) -> dict:
        return {k: getattr(self, k) for k in MEASURE_NAMES}

    def as_dict(self) -> dict:
        out = self.values()
        out["angles"] = {k: [float(x) for x in v] for k, v in self.angles.items()}
        out["violations"] = list(self.violations)
        return out


def ordering_violations(values: dict, eps: float = EPS_OPT) -> list[str]:
    """Names of violated ordering relations; NaN entries are skipped."""
    out = []
    for big, small in ORDERING_PAIRS:
        x, y = values.get(big, math.nan), values.get(small, math.nan)
        if not (math.isnan(x) or math.isnan(y)) and x < y - eps:
            out.append(f"{big}>={small}")
    for k in MEASURE_NAMES:
        v = values.get(k, math.nan)
        if not math.isnan(v) and v < -eps:
            out.append(f"{k}>=0")
    return out


def measure_report(
    rho: DensityMatrix,
    config: OptimConfig | None = None,
    measures=None,
    eps: float = EPS_OPT,
) -> MeasureReport:
    """All measures for a two-qubit state, with ordering checks.

    ``measures`` optionally restricts which entries are computed; the rest
    stay NaN. Ordering violations are recorded, never clamped.
    """
    _require_two_qubits(rho)
    wanted = set(MEASURE_NAMES if measures is None else measures)
    unknown = wanted - set(MEASURE_NAMES)
    if unknown:
        raise ValueError(f"unknown measures {sorted(unknown)}")
    rep = MeasureReport()
    if "mutual_info" in wanted:
        rep.mutual_info = quantum_mutual_information(rho)
    if "mid" in wanted:
        rep.mid, ang = _mid(rho, config)
        if ang is not None:
            rep.angles["mid"] = ang
    jobs = {
        "wpm": lambda: wpm(rho, config),
        "m2b_ab": lambda: m2b(rho, Direction.AtoB, config),
        "m2b_ba": lambda: m2b(rho, Direction.BtoA, config),
        "discord_ab": lambda: discord(rho, Direction.AtoB, config),
        "discord_ba": lambda: discord(rho, Direction.BtoA, config),
        "m3b": lambda: m3b(rho, config),
        "dd_ab": lambda: demon_discord(rho, Direction.AtoB, config),
        "dd_ba": lambda: demon_discord(rho, Direction.BtoA, config),
    }
    for name, job in jobs.items():
        if name in wanted:
            r = job()
            setattr(rep, name, r.value)
            rep.angles[name] = r.angles
    rep.violations = ordering_violations(rep.values(), eps)
    return rep


# ---------------------------------------------------------------------------
# classical-quantum states with a qubit on A


def ensemble_F(ensemble: CqEnsemble, m) -> np.ndarray | float:
    """``F(m) = sum_j p_j (1 + n_j.m) log2(1 + n_j.m)``; ``m`` is one or ``(N, 3)`` unit vectors."""
    m = np.asarray(m, dtype=float)
    x = 1.0 + np.atleast_2d(m) @ ensemble.bloch_vectors.T
    vals = xlog2x(np.clip(x, 0.0, None)) @ ensemble.probs
    return float(vals[0]) if m.ndim == 1 else vals


def _check_symmetric(ensemble: CqEnsemble, tol: float = 1e-9):
    if np.linalg.norm(ensemble.centroid()) > tol:
        raise ValueError("ensemble is not balanced: sum_j p_j n_j != 0, so rho_A != I/2")


def cq_discord_closed_form(ensemble: CqEnsemble, dual_povm: RankOnePovm) -> float:
    """``1 - sum_a q_a F(m_a)``: discord (A->B) and WPM of the cq state for a qubit POVM ``q_a (I + sigma.m_a)``."""
    _check_symmetric(ensemble)
    q = dual_povm.weights / 2
    m = povm_bloch_vectors(dual_povm)
    if np.linalg.norm(q @ m) > 1e-9:
        raise ValueError("POVM violates sum_a q_a m_a = 0")
    return 1.0 - float(q @ ensemble_F(ensemble, m))


def symmetry_axes(ensemble: CqEnsemble) -> np.ndarray:
    """Candidate extremal directions: vertices, edge midpoints, edge and face normals, both signs."""
    n = ensemble.bloch_vectors
    cands = list(n)
    for i in range(len(n)):
        for j in range(i + 1, len(n)):
            cands += [n[i] + n[j], n[i] - n[j], np.cross(n[i], n[j])]
    cands = [c / np.linalg.norm(c) for c in cands if np.linalg.norm(c) > 1e-9]
    return np.array(cands + [-c for c in cands])


def max_F(ensemble: CqEnsemble, config: OptimConfig | None = None):
    """Sphere search for ``max_m F(m)``; returns ``(value, argmax)``."""
    return maximize_over_sphere(lambda m: ensemble_F(ensemble, m), config)


def cq_discord_sphere_search(ensemble: CqEnsemble, config: OptimConfig | None = None) -> float:
    """Discord = WPM = ``1 - max_m F(m)``, by direct numerical search over the sphere."""
    _check_symmetric(ensemble)
    return 1.0 - max_F(ensemble, config)[0]


def best_projective_information(ensemble: CqEnsemble, config: OptimConfig | None = None):
    """Best classical information ``(F(m) + F(-m))/2`` over projective pairs on A.

    Symmetry axes of the ensemble are scored exactly and also seed the
    sphere search. Returns ``(value, axis)``.
    """
    _check_symmetric(ensemble)

    def pair_info(m):
        return 0.5 * (ensemble_F(ensemble, m) + ensemble_F(ensemble, -m))

    axes = symmetry_axes(ensemble)
    exact = pair_info(axes)
    k = int(np.argmax(exact))
    val, arg = maximize_over_sphere(pair_info, config, extra_points=axes[exact >= exact[k] - 1e-12])
    if exact[k] >= val:
        return float(exact[k]), axes[k]
    return val, arg


def cq_demon_discord_candidates(ensemble: CqEnsemble, config: OptimConfig | None = None) -> dict:
    """Demon discord ``H(q_a) - sum_a q_a F(m_a)`` for the dual symmetric POVM and the best projective pair."""
    _check_symmetric(ensemble)
    dual = -ensemble.bloch_vectors
    q = ensemble.probs
    dual_val = float(-np.sum(xlog2x(q)) - q @ ensemble_F(ensemble, dual))
    proj_val = 1.0 - best_projective_information(ensemble, config)[0]
    return {"dual": dual_val, "projective": proj_val}


def cq_demon_discord_projective(ensemble: CqEnsemble, config: OptimConfig | None = None) -> float:
    """Demon discord of the cq state: the smaller of the dual-POVM and projective candidates."""
    return min(cq_demon_discord_candidates(ensemble, config).values())


def projective_pair_from_axis(m) -> RankOnePovm:
    t, p = canonical_from_axis(m)
    return projective_pair_povm(t, p)
