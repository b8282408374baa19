"""Command-line entry point: ``qcorr measure|scan|family|check``.

Exit codes: 0 ok, 1 property or ordering violation, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from .bloch_analysis import fig5_sweep
from .demon import net_classical_work, refined_net_classical_work
from .entanglement import entanglement_pair
from .entropy import classical_info_table, quantum_info_table, shannon_entropy, von_neumann_entropy
from .meas import (
    ConditionedStrategy,
    fine_grain,
    joint_distribution_unconditioned,
    marginal_eigenbasis_povm,
    random_povm,
    random_rank_one_povm,
    symmetric_qubit_povm,
)
from .measures import (
    EPS_OPT,
    MEASURE_NAMES,
    cq_demon_discord_candidates,
    cq_discord_closed_form,
    cq_discord_sphere_search,
    measure_report,
)
from .optim import OptimConfig
from .qmat import partial_trace
from .states import (
    bell_state,
    random_density,
    random_probs,
    state_from_json,
    tetrahedron_ensemble,
    triangle_ensemble,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

SCAN_COLUMNS = ("index", "seed", "purity", "S_AB") + MEASURE_NAMES + ("concurrence", "eof", "violations")

POVM_TOL = 1e-9
FINE_GRAIN_TOL = 1e-10
DEMON_TOL = 1e-9
RANK_ONE_TOL = 1e-10


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(rows, columns, out, header: str = ""):
    lines = []
    if header:
        lines.append(f"# {header}")
    lines.append(",".join(columns))
    lines += [",".join(fmt(r[c]) for c in columns) for r in rows]
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def config_from_args(args) -> OptimConfig:
    return OptimConfig(
        grid_theta=args.grid_theta,
        grid_phi=args.grid_phi,
        restarts=args.restarts,
        tol=args.tol,
        seed=args.seed,
    )


def parse_measures(text):
    if text in (None, "", "all"):
        return None
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in MEASURE_NAMES]
    if bad:
        raise ValueError(f"unknown measures {bad}; choose from {','.join(MEASURE_NAMES)}")
    return names


# ---------------------------------------------------------------------------
# scan


def state_seed(seed: int, index: int) -> int:
    return int(seed) ^ int(index)


def scan_row(index: int, seed: int, rank, config: OptimConfig, measures) -> dict:
    s = state_seed(seed, index)
    rho = random_density((2, 2), rank=rank, seed=s)
    rep = measure_report(rho, config, measures)
    ent = entanglement_pair(rho)
    row = {
        "index": index,
        "seed": s,
        "purity": float(np.trace(rho.mat @ rho.mat).real),
        "S_AB": von_neumann_entropy(rho.mat),
        "concurrence": ent.concurrence,
        "eof": ent.eof,
        "violations": ";".join(rep.violations),
    }
    row.update(rep.values())
    return row


def _scan_chunk(task):
    indices, seed, rank, config, measures = task
    return [scan_row(i, seed, rank, config, measures) for i in indices]


def run_scan(n: int, seed: int, rank=None, config: OptimConfig | None = None, measures=None, threads: int = 1) -> list:
    """Rows for ``n`` random states; output is sorted by index whatever the worker count."""
    if n < 1:
        raise ValueError("n must be at least 1")
    config = config or OptimConfig()
    if threads <= 1:
        rows = _scan_chunk((range(n), seed, rank, config, measures))
    else:
        chunks = [list(range(n))[k::threads] for k in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(_scan_chunk, [(c, seed, rank, config, measures) for c in chunks])
            rows = [r for part in parts for r in part]
    return sorted(rows, key=lambda r: r["index"])


# ---------------------------------------------------------------------------
# property suites


def _random_state(rng, dims, rank=None):
    return random_density(dims, rank=rank, seed=rng)


def _random_coarse_povm(rng, d: int):
    n = int(rng.integers(2, 4))
    rank = int(rng.integers(-(-d // n), d + 1))
    return random_povm(d, n, rng, rank=rank)


def check_povm_inequality(trials: int, seed: int) -> dict:
    """Rank-one form ``H(p) >= S - sum p log mu >= S`` and general form ``H(p) + sum p log tr E >= S``."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    bad = 0
    for _ in range(trials):
        d = int(rng.integers(2, 5))
        rho = _random_state(rng, (d, 1), rank=int(rng.integers(1, d + 1))).mat
        s = von_neumann_entropy(rho)
        povm = random_rank_one_povm(d, int(rng.integers(d, 2 * d + 2)), rng)
        p = np.clip(np.einsum("a,ai,ij,aj->a", povm.weights, povm.kets.conj(), rho, povm.kets).real, 0, None)
        bound = s - p @ np.log2(povm.weights)
        gaps = [shannon_entropy(p) - bound, bound - s]
        ops = _random_coarse_povm(rng, d)
        q = np.clip(np.einsum("aij,ji->a", ops, rho).real, 0, None)
        tr = np.einsum("aii->a", ops).real
        gaps.append(shannon_entropy(q) + q @ np.log2(tr) - s)
        g = min(gaps)
        worst = min(worst, g)
        bad += g < -POVM_TOL
    return {"suite": "povm-ineq", "trials": trials, "violations": int(bad), "worst_gap": worst, "tol": POVM_TOL}


def check_ensemble_inequality(trials: int, seed: int) -> dict:
    """``H(q) >= S(sum q_j rho_j) - sum q_j S(rho_j)``."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    bad = 0
    for _ in range(trials):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(2, 6))
        q = random_probs(n, rng)
        states = [_random_state(rng, (d, 1), rank=int(rng.integers(1, d + 1))).mat for _ in range(n)]
        avg = np.einsum("j,jik->ik", q, np.array(states))
        chi = von_neumann_entropy(avg) - sum(qj * von_neumann_entropy(r) for qj, r in zip(q, states))
        g = shannon_entropy(q) - chi
        worst = min(worst, g)
        bad += g < -POVM_TOL
    return {"suite": "ensemble-ineq", "trials": trials, "violations": int(bad), "worst_gap": worst, "tol": POVM_TOL}


def check_fine_graining(trials: int, seed: int) -> dict:
    """Splitting coarse POVMs into rank-one pieces never lowers ``H(A:B)``."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    bad = 0
    for _ in range(trials):
        dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        rho = _random_state(rng, dims)
        e = _random_coarse_povm(rng, dims[0])
        f = _random_coarse_povm(rng, dims[1])
        coarse = classical_info_table(joint_distribution_unconditioned(rho, e, f)).H_AcolonB
        fine = classical_info_table(joint_distribution_unconditioned(rho, fine_grain(e)[0], fine_grain(f)[0])).H_AcolonB
        g = fine - coarse
        worst = min(worst, g)
        bad += g < -FINE_GRAIN_TOL
    return {"suite": "fine-grain", "trials": trials, "violations": int(bad), "worst_gap": worst, "tol": FINE_GRAIN_TOL}


def random_demon_case(rng):
    """Random state with a coarse A POVM and a B strategy (plain or conditioned)."""
    dims = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
    rho = _random_state(rng, dims, rank=int(rng.integers(1, dims[0] * dims[1] + 1)))
    e = _random_coarse_povm(rng, dims[0])
    if rng.random() < 0.5:
        strategy = _random_coarse_povm(rng, dims[1])
    else:
        labels = [int(x) for x in rng.integers(0, 2, size=len(e))]
        b_povms = {c: _random_coarse_povm(rng, dims[1]) for c in set(labels)}
        strategy = ConditionedStrategy(e, labels, b_povms)
    return rho, e, strategy


def check_demon(trials: int, seed: int) -> dict:
    """Coarse and rank-one-refined ledgers give the same net work; rank-one net work is ``log d - H(A,B)``."""
    rng = np.random.default_rng(seed)
    worst_inv = worst_r1 = 0.0
    bad = 0
    for _ in range(trials):
        rho, e, strategy = random_demon_case(rng)
        diff = abs(net_classical_work(rho, e, strategy).w_net - refined_net_classical_work(rho, e, strategy).w_net)
        worst_inv = max(worst_inv, diff)
        e1 = random_rank_one_povm(rho.dims[0], int(rng.integers(rho.dims[0], rho.dims[0] + 3)), rng)
        f1 = random_rank_one_povm(rho.dims[1], int(rng.integers(rho.dims[1], rho.dims[1] + 3)), rng)
        led = net_classical_work(rho, e1, f1)
        r1 = abs(led.log_dim - led.w_net - led.joint_record)
        worst_r1 = max(worst_r1, r1)
        bad += (diff > DEMON_TOL) + (r1 > RANK_ONE_TOL)
    return {
        "suite": "demon",
        "trials": trials,
        "violations": int(bad),
        "max_refinement_gap": worst_inv,
        "max_rank_one_gap": worst_r1,
        "tol": DEMON_TOL,
    }


def check_orderings(trials: int, seed: int, config: OptimConfig | None = None) -> dict:
    rows = run_scan(trials, seed, None, config)
    bad = [r for r in rows if r["violations"]]
    return {
        "suite": "orderings",
        "trials": trials,
        "violations": len(bad),
        "violating_indices": [r["index"] for r in bad],
        "tol": EPS_OPT,
    }


SUITES = {
    "povm-ineq": check_povm_inequality,
    "ensemble-ineq": check_ensemble_inequality,
    "fine-grain": check_fine_graining,
    "demon": check_demon,
    "orderings": check_orderings,
}

DEFAULT_TRIALS = {"povm-ineq": 1000, "ensemble-ineq": 1000, "fine-grain": 500, "demon": 200, "orderings": 500}


# ---------------------------------------------------------------------------
# families


def family_rows(name: str, n_points: int = 101, config: OptimConfig | None = None):
    """``(columns, rows)`` for a named family."""
    if name == "fig5":
        rows = fig5_sweep(np.linspace(0.0, 1.0, n_points), "wpm", config)
        return ("eps", "wpm", "cos_A", "cos_B", "degenerate"), rows
    if name == "bell":
        rep = measure_report(bell_state("phi+"), config)
        return MEASURE_NAMES, [rep.values()]
    if name in ("cq-triangle", "cq-tetrahedron"):
        tri = name == "cq-triangle"
        ens = triangle_ensemble() if tri else tetrahedron_ensemble()
        dual = symmetric_qubit_povm("trine" if tri else "tetrahedron", -np.eye(3))
        exact_d = np.log2(4 / 3) if tri else np.log2(3 / 2)
        cands = cq_demon_discord_candidates(ens, config)
        rows = [
            {
                "quantity": "discord_ab=wpm",
                "analytic": exact_d,
                "closed_form": cq_discord_closed_form(ens, dual),
                "numeric": cq_discord_sphere_search(ens, config),
            },
            {
                "quantity": "dd_ab",
                "analytic": (4 / 3 - 0.5 * np.log2(3)) if tri else math.nan,
                "closed_form": cands["dual"],
                "numeric": min(cands.values()),
            },
        ]
        return ("quantity", "analytic", "closed_form", "numeric"), rows
    raise ValueError(f"unknown family {name!r}")


# ---------------------------------------------------------------------------
# measure


def measure_document(rho, config: OptimConfig | None = None) -> dict:
    ea, _ = marginal_eigenbasis_povm(partial_trace(rho, "A"))
    eb, _ = marginal_eigenbasis_povm(partial_trace(rho, "B"))
    doc = {
        "dims": list(rho.dims),
        "quantum": asdict(quantum_info_table(rho)),
        "classical_eigenbasis": asdict(classical_info_table(joint_distribution_unconditioned(rho, ea, eb))),
    }
    if tuple(rho.dims) == (2, 2):
        doc["report"] = measure_report(rho, config).as_dict()
        ent = entanglement_pair(rho)
        doc["concurrence"], doc["eof"] = ent.concurrence, ent.eof
    return doc


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid-theta", type=int, default=13)
    common.add_argument("--grid-phi", type=int, default=25)
    common.add_argument("--restarts", type=int, default=2)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="qcorr", description="Entropic measures of nonclassical correlations.")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[common], help="full report for one state JSON file")
    m.add_argument("state", help="state JSON file, or - for stdin")

    s = sub.add_parser("scan", parents=[common], help="random two-qubit states to CSV")
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--rank", type=int, default=None)
    s.add_argument("--measures", default="all", help="comma-separated subset of measure columns")

    f = sub.add_parser("family", parents=[common], help="named state families")
    f.add_argument("name", choices=["fig5", "bell", "cq-triangle", "cq-tetrahedron"])
    f.add_argument("--n", type=int, default=101, help="number of eps points (fig5)")

    c = sub.add_parser("check", parents=[common], help="property suites")
    c.add_argument("suite", choices=sorted(SUITES))
    c.add_argument("--n", type=int, default=None, help="trials")
    return p


def _run(args) -> int:
    config = config_from_args(args)
    if args.command == "measure":
        text = sys.stdin.read() if args.state == "-" else open(args.state).read()
        doc = measure_document(state_from_json(text), config)
        out = json.dumps(doc, indent=2)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(out + "\n")
        else:
            print(out)
        return EXIT_VIOLATION if doc.get("report", {}).get("violations") else EXIT_OK

    if args.command == "scan":
        measures = parse_measures(args.measures)
        rows = run_scan(args.n, args.seed, args.rank, config, measures, args.threads)
        header = (
            f"qcorr scan n={args.n} seed={args.seed} rank={args.rank or 'full'} measures={args.measures} "
            f"grid_theta={config.grid_theta} grid_phi={config.grid_phi} restarts={config.restarts} "
            f"tol={config.tol:g} eps_opt={EPS_OPT:g}"
        )
        write_csv(rows, SCAN_COLUMNS, args.out, header)
        return EXIT_VIOLATION if any(r["violations"] for r in rows) else EXIT_OK

    if args.command == "family":
        cols, rows = family_rows(args.name, args.n, config)
        write_csv(rows, cols, args.out, f"qcorr family {args.name} n={args.n}")
        return EXIT_OK

    trials = args.n or DEFAULT_TRIALS[args.suite]
    if args.suite == "orderings":
        res = check_orderings(trials, args.seed, config)
    else:
        res = SUITES[args.suite](trials, args.seed)
    res["status"] = "PASS" if res["violations"] == 0 else "FAIL"
    out = json.dumps(res)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    print(out)
    return EXIT_OK if res["violations"] == 0 else EXIT_VIOLATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (json.JSONDecodeError, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"qcorr: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
