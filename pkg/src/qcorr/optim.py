"""Grid search plus Nelder-Mead refinement over qubit measurement angles.

Angle vectors are ``(theta_A, phi_A[, theta_B, phi_B])`` with each pair
naming the projective measurement ``|e0> = cos t|0> + e^{i phi} sin t|1>``.
Objectives must depend on the angles only through the measurement axes, so
results can be folded back into ``theta in [0, pi/2]``, ``phi in [0, 2 pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .meas import angle_axis


class NonFiniteObjective(ValueError):
    pass


@dataclass(frozen=True)
class OptimConfig:
    grid_theta: int = 13
    grid_phi: int = 25
    max_grid: int = 10_000
    n_best: int = 3
    restarts: int = 2
    tol: float = 1e-9
    max_iter: int = 500
    seed: int = 0

    def with_(self, **kw) -> "OptimConfig":
        return replace(self, **kw)


@dataclass(frozen=True, eq=False)
class OptimResult:
    best_value: float
    best_angles: np.ndarray
    evaluations: int
    converged: bool
    grid_spread: float = np.nan


def canonical_angles(angles) -> np.ndarray:
    """Fold each (theta, phi) pair into the box via its Bloch axis."""
    a = np.asarray(angles, dtype=float).reshape(-1, 2)
    n = angle_axis(a)
    theta = 0.5 * np.arccos(np.clip(n[:, 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(n[:, 1], n[:, 0]), 2 * np.pi)
    phi = np.where(phi >= 2 * np.pi, 0.0, phi)
    return np.stack([theta, phi], axis=1).ravel()


def _pair_grid(n_theta: int, n_phi: int) -> np.ndarray:
    th = np.linspace(0.0, np.pi / 2, n_theta)
    ph = 2 * np.pi * np.arange(n_phi) / n_phi
    return np.array([(t, p) for t in th for p in ph])


def angle_grid(n_angles: int, config: OptimConfig) -> tuple[np.ndarray, tuple[float, float]]:
    """Cartesian grid over all qubits, shrunk per qubit to stay under ``max_grid`` points.

    Also returns the (theta, phi) spacings used for the initial simplex.
    """
    n_pairs = n_angles // 2
    nt, nph = config.grid_theta, config.grid_phi
    per_pair = config.max_grid ** (1.0 / n_pairs)
    if nt * nph > per_pair:
        s = np.sqrt(per_pair / (nt * nph))
        nt, nph = max(2, int(nt * s)), max(2, int(nph * s))
    g = _pair_grid(nt, nph)
    if n_pairs == 1:
        pts = g
    else:
        idx = np.indices((len(g),) * n_pairs).reshape(n_pairs, -1)
        pts = np.concatenate([g[i] for i in idx], axis=1)
    return pts, ((np.pi / 2) / (nt - 1), 2 * np.pi / nph)


def _evaluate(f, pts: np.ndarray, vectorized: bool) -> np.ndarray:
    vals = np.asarray(f(pts), dtype=float) if vectorized else np.array([float(f(p)) for p in pts])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteObjective("objective returned a non-finite value")
    return vals


def optimize_angles(
    objective: Callable,
    n_angles: int,
    sense: str = "max",
    config: OptimConfig | None = None,
    *,
    vectorized: bool = True,
    extra_starts=(),
) -> OptimResult:
    """Maximize or minimize ``objective`` over 2 or 4 measurement angles.

    With ``vectorized=True`` the objective maps an ``(N, n_angles)`` array to
    ``N`` values. A coarse grid is scanned first; Nelder-Mead then refines
    from the best ``n_best`` grid points, any ``extra_starts``, and
    ``restarts`` seeded random points. Ties in the grid go to the lowest
    grid index.
    """
    if n_angles not in (2, 4):
        raise ValueError("n_angles must be 2 or 4")
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    config = config or OptimConfig()
    sign = 1.0 if sense == "max" else -1.0

    def batch(x):
        x = np.atleast_2d(x)
        return sign * _evaluate(objective, x, vectorized)

    pts, (dt, dp) = angle_grid(n_angles, config)
    vals = batch(pts)
    n_evals = len(pts)
    order = np.argsort(-vals, kind="stable")
    starts = [pts[i] for i in order[: config.n_best]]
    starts += [np.asarray(s, dtype=float).ravel() for s in extra_starts]
    rng = np.random.default_rng(config.seed)
    for _ in range(config.restarts):
        r = rng.uniform(size=n_angles)
        r[0::2] *= np.pi / 2
        r[1::2] *= 2 * np.pi
        starts.append(r)

    steps = np.tile([0.5 * dt, 0.5 * dp], n_angles // 2)
    best_x, best_f, converged = pts[order[0]], vals[order[0]], True
    for x0 in starts:
        simplex = np.vstack([x0, x0 + np.diag(steps)])
        res = minimize(
            lambda x: -batch(x)[0],
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "maxiter": config.max_iter,
                "xatol": np.inf,
                "fatol": config.tol,
            },
        )
        n_evals += int(res.nfev)
        if -res.fun > best_f:
            best_x, best_f, converged = res.x, -res.fun, bool(res.success)

    angles = canonical_angles(best_x)
    value = float(batch(angles)[0]) * sign
    return OptimResult(value, angles, n_evals + 1, converged, float(np.ptp(vals)))


def maximize_over_sphere(f: Callable, config: OptimConfig | None = None, *, vectorized: bool = True, extra_points=()):
    """Maximize ``f`` over unit 3-vectors; returns ``(value, argmax)``.

    ``f`` takes an ``(N, 3)`` array of unit vectors when ``vectorized``.
    ``extra_points`` are unit vectors used as additional refinement starts.
    """
    g = (lambda a: f(angle_axis(a))) if vectorized else (lambda a: f(angle_axis(np.asarray(a))))
    starts = [canonical_from_axis(m) for m in extra_points]
    res = optimize_angles(g, 2, "max", config, vectorized=vectorized, extra_starts=starts)
    return res.best_value, angle_axis(res.best_angles)


def canonical_from_axis(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    m = m / np.linalg.norm(m)
    return np.array([0.5 * np.arccos(np.clip(m[2], -1, 1)), np.mod(np.arctan2(m[1], m[0]), 2 * np.pi)])
