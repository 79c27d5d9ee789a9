"""Command-line harness: generate instances, solve them, audit invariants.

Subcommands
  gen    write a benchmark instance as JSON (bit-identical per seed)
  solve  run one splitting solver on an instance, tracing every iteration
  check  run a named invariant suite and report worst-case slack
  bench  run every applicable solver on one instance and tabulate

Exit codes: 0 success, 2 usage or validation failure (always before any
numerical work), 3 a solver that diverged or failed to converge, or a check
suite that failed.

Flags --seed, --tol, --max-iter, --out fall back to the environment
variables PROXKIT_SEED, PROXKIT_TOL, PROXKIT_MAX_ITER, PROXKIT_OUT when the
flag is absent.  Trace CSV files are byte-identical across runs except for
the wall-time column.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, functionals, problems
from .functionals import (
    BoxIndicator,
    BoxSupport,
    InfBallIndicator,
    L1,
    L2BallIndicator,
    L2Norm,
    Quadratic,
    SeparableSum,
    SquaredL2,
    Zero,
    moreau_envelope,
    prox_conjugate,
    scale,
    shift,
    tilt,
    yosida,
)
from .linalg import LinearOperator, norm, op_norm
from .newton import l1_ssn, superlinear_diagnostic
from .splitting import (
    CompositeProblem,
    SolverConfig,
    douglas_rachford,
    dr_as_pdhg_check,
    fista,
    primal_dual,
    prox_gradient,
    proximal_point,
)

PROBLEM_KINDS = ("lasso", "boxqp", "control", "huber")
SOLVERS = ("pg", "pg-ls", "fista", "dr", "pdhg")
SUITES = ("moreau", "envelope", "rate", "fejer", "superlinear", "drpdhg", "all")


class UsageError(Exception):
    """Bad arguments or inconsistent inputs; maps to exit code 2."""


def _env_default(var: str, cast, fallback):
    raw = os.environ.get(var)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {var}: {raw!r}") from exc


def _add_common(p: argparse.ArgumentParser):
    p.add_argument(
        "--seed",
        type=int,
        default=_env_default("PROXKIT_SEED", int, 0),
        help="rng seed (env PROXKIT_SEED)",
    )
    p.add_argument(
        "--tol",
        type=float,
        default=_env_default("PROXKIT_TOL", float, 1e-8),
        help="stopping tolerance (env PROXKIT_TOL)",
    )
    p.add_argument(
        "--max-iter",
        type=int,
        default=_env_default("PROXKIT_MAX_ITER", int, 5000),
        help="iteration cap (env PROXKIT_MAX_ITER)",
    )
    p.add_argument(
        "--out",
        default=_env_default("PROXKIT_OUT", str, None),
        help="output directory, created atomically (env PROXKIT_OUT)",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="proxkit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"proxkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a benchmark instance")
    g.add_argument("--problem", choices=PROBLEM_KINDS, required=True)
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--m", type=int, default=None)
    _add_common(g)

    s = sub.add_parser("solve", help="solve an instance with one splitting solver")
    s.add_argument("--solver", choices=SOLVERS, required=True)
    s.add_argument("--problem-file", help="instance JSON written by gen")
    s.add_argument("--problem", choices=PROBLEM_KINDS, help="generate inline instead")
    s.add_argument("--n", type=int, default=8)
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--gamma", type=float, default=None, help="prox step override")
    s.add_argument("--tau", type=float, default=None, help="primal step (pdhg)")
    s.add_argument("--sigma", type=float, default=None, help="dual step (pdhg)")
    _add_common(s)

    c = sub.add_parser("check", help="run an invariant suite")
    c.add_argument("--suite", choices=SUITES, required=True)
    _add_common(c)

    b = sub.add_parser("bench", help="run all applicable solvers on one instance")
    b.add_argument("--problem", choices=PROBLEM_KINDS, required=True)
    b.add_argument("--n", type=int, default=8)
    b.add_argument("--m", type=int, default=None)
    _add_common(b)
    return ap


# --- output helpers -----------------------------------------------------------


def _stage_out_dir(out: str):
    """Reserve a staging directory that will be renamed onto `out` when done.

    The rename is the atomic publish step; a crash mid-write leaves only a
    .partial directory behind, never a half-filled `out`.
    """
    out = os.path.abspath(out)
    if os.path.exists(out):
        raise UsageError(f"output directory already exists: {out}")
    parent = os.path.dirname(out) or "."
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=os.path.basename(out) + ".partial-", dir=parent)
    return tmp, out


def _publish(tmp: str, out: str):
    os.rename(tmp, out)


def _write_json(path: str, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- gen ------------------------------------------------------------------------


def _generate(kind: str, n: int, m, seed: int):
    if kind == "lasso":
        return problems.gen_lasso(n, m, seed=seed)
    if kind == "boxqp":
        return problems.gen_boxqp(n, seed=seed)
    if kind == "control":
        return problems.gen_control(n, m, seed=seed)
    return problems.gen_huber(n, seed=seed)


def cmd_gen(args) -> int:
    spec = _generate(args.problem, args.n, args.m, args.seed)
    doc = problems.problem_to_json(spec)
    if args.out is None:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return 0
    tmp, out = _stage_out_dir(args.out)
    _write_json(os.path.join(tmp, "problem.json"), doc)
    _write_json(
        os.path.join(tmp, "manifest.json"),
        {
            "command": "gen",
            "version": __version__,
            "problem": args.problem,
            "n": args.n,
            "m": args.m,
            "seed": args.seed,
            "outputs": {"problem": "problem.json"},
        },
    )
    _publish(tmp, out)
    print(f"wrote {out}/problem.json")
    return 0


# --- solve ------------------------------------------------------------------------


def _load_spec(args):
    if args.problem_file and args.problem:
        raise UsageError("give either --problem-file or --problem, not both")
    if args.problem_file:
        with open(args.problem_file) as fh:
            return problems.problem_from_json(json.load(fh)), args.problem_file
    if args.problem:
        return _generate(args.problem, args.n, args.m, args.seed), "generated"
    raise UsageError("need --problem-file or --problem")


def _kind_of(spec) -> str:
    return {
        problems.LassoSpec: "lasso",
        problems.BoxQPSpec: "boxqp",
        problems.ControlSpec: "control",
        problems.HuberSpec: "huber",
    }[type(spec)]


def _run_solver(spec, solver: str, args):
    """Dispatch (spec, solver) to a configured run; UsageError before any work
    when the pairing makes no sense."""
    kind = _kind_of(spec)
    n = spec.n
    x0 = np.zeros(n)
    if kind == "huber" and solver in ("dr", "pdhg"):
        raise UsageError(f"solver {solver} does not apply to the huber problem")

    if solver in ("pg", "pg-ls", "fista"):
        comp = {
            "lasso": problems.lasso_composite_smooth,
            "boxqp": problems.boxqp_composite,
            "control": problems.control_composite,
            "huber": problems.huber_composite,
        }[kind](spec)
        cfg = SolverConfig(gamma=args.gamma, tol=args.tol, max_iter=args.max_iter)
        if solver == "fista":
            x, trace = fista(comp, x0, cfg)
        else:
            x, trace = prox_gradient(comp, x0, cfg, line_search=(solver == "pg-ls"))
        return x, trace

    if solver == "dr":
        comp = {
            "lasso": problems.lasso_dr_pair,
            "boxqp": problems.boxqp_dr_pair,
            "control": lambda s: problems.boxqp_dr_pair(problems.control_as_boxqp(s)),
        }[kind](spec)
        gamma = 1.0 if args.gamma is None else args.gamma
        cfg = SolverConfig(gamma=gamma, tol=args.tol, max_iter=args.max_iter)
        x, trace = douglas_rachford(comp, x0, cfg)
        return x, trace

    # pdhg
    if kind == "lasso":
        comp = problems.lasso_composite_split(spec)
        y0 = np.zeros(spec.a.shape[0])
        anorm = op_norm(comp.a)
    else:
        # box side as f so the returned primal iterate is feasible
        qp = spec if kind == "boxqp" else problems.control_as_boxqp(spec)
        comp = CompositeProblem(
            f=BoxIndicator(qp.lo, qp.hi), g=Quadratic(qp.q, qp.c)
        )
        y0 = np.zeros(n)
        anorm = 1.0
    tau = args.tau if args.tau is not None else 0.9 / max(anorm, 1e-12)
    sigma = args.sigma if args.sigma is not None else 0.9 / max(anorm, 1e-12)
    cfg = SolverConfig(tau=tau, sigma=sigma, tol=args.tol, max_iter=args.max_iter)
    x, _y, trace = primal_dual(comp, x0, y0, cfg)
    return x, trace


def cmd_solve(args) -> int:
    spec, source = _load_spec(args)
    x, trace = _run_solver(spec, args.solver, args)
    obj = spec.objective(x)
    kkt = problems.kkt_residual(spec, x)
    status = "converged" if trace.converged else "did not converge"
    print(
        f"{args.solver} on {_kind_of(spec)} n={spec.n}: {status} "
        f"after {trace.n_iter} iterations, objective {obj:.12g}, "
        f"optimality {kkt:.3e}"
    )
    if args.out is not None:
        tmp, out = _stage_out_dir(args.out)
        trace.write_csv(os.path.join(tmp, "trace.csv"))
        _write_json(
            os.path.join(tmp, "solution.json"),
            {
                "x": [float(v) for v in x],
                "objective": obj,
                "kkt_residual": kkt,
                "converged": trace.converged,
                "iterations": trace.n_iter,
            },
        )
        _write_json(
            os.path.join(tmp, "manifest.json"),
            {
                "command": "solve",
                "version": __version__,
                "problem": {"kind": _kind_of(spec), "n": spec.n, "source": source},
                "solver": args.solver,
                "seed": args.seed,
                "tol": args.tol,
                "max_iter": args.max_iter,
                "gamma": args.gamma,
                "tau": args.tau,
                "sigma": args.sigma,
                "converged": trace.converged,
                "iterations": trace.n_iter,
                "objective": obj,
                "kkt_residual": kkt,
                "outputs": {"trace": "trace.csv", "solution": "solution.json"},
            },
        )
        _publish(tmp, out)
        print(f"wrote {out}/trace.csv")
    return 0 if trace.converged else 3


# --- check ------------------------------------------------------------------------


def _sample_functionals(rng, n):
    """A spread of catalog entries for identity audits."""
    x0 = rng.standard_normal(n)
    v = rng.standard_normal(n)
    lo = -np.abs(rng.standard_normal(n)) - 0.2
    hi = np.abs(rng.standard_normal(n)) + 0.2
    bmat = rng.standard_normal((n, n))
    q = bmat @ bmat.T / n + 0.3 * np.eye(n)
    return [
        Zero(),
        SquaredL2(),
        L1(),
        L2Norm(),
        BoxIndicator(lo, hi),
        BoxSupport(lo, hi),
        InfBallIndicator(0.8),
        L2BallIndicator(1.3),
        scale(L1(), 0.7),
        scale(SquaredL2(), 2.5),
        shift(SquaredL2(), x0),
        tilt(L1(), v),
        SeparableSum([L1() if i % 2 else SquaredL2() for i in range(n)]),
        Quadratic(q, rng.standard_normal(n)),
    ]


def _suite_moreau(seed: int):
    rng = np.random.default_rng(seed)
    n = 7
    worst = 0.0
    for f in _sample_functionals(rng, n):
        for _ in range(25):
            x = 3.0 * rng.standard_normal(n)
            p = f.prox(1.0, x)
            q = prox_conjugate(f, 1.0, x)
            worst = max(worst, float(np.max(np.abs(x - (p + q)))))
    return "decomposition x = prox(x) + prox*(x)", worst, 1e-12


def _suite_envelope(seed: int):
    rng = np.random.default_rng(seed)
    n = 6
    h = 1e-6
    worst = 0.0
    for f in (L1(), L2Norm(), SquaredL2(), scale(L1(), 0.7), InfBallIndicator(0.8)):
        for gamma in (0.1, 1.0, 10.0):
            for _ in range(10):
                x = 2.0 * rng.standard_normal(n)
                grad = yosida(f, gamma, x)
                fd = np.empty(n)
                for i in range(n):
                    e = np.zeros(n)
                    e[i] = h
                    fd[i] = (
                        moreau_envelope(f, gamma, x + e)
                        - moreau_envelope(f, gamma, x - e)
                    ) / (2 * h)
                worst = max(worst, norm(fd - grad) / (1.0 + norm(grad)))
    return "envelope gradient vs yosida map", worst, 1e-5


def _suite_rate(seed: int):
    spec = problems.gen_lasso(20, 40, seed=seed)
    comp = problems.lasso_composite_smooth(spec)
    gamma = 1.0 / comp.smooth.lipschitz
    ref = l1_ssn(
        comp.smooth.gradient, spec.a.T @ spec.a, spec.alpha, gamma,
        np.zeros(20), tol=1e-13, max_iter=100,
    )
    jstar = spec.objective(ref.x)
    x0 = np.zeros(20)
    cfg = SolverConfig(gamma=gamma, tol=1e-16, max_iter=500, store_iterates=True)
    _, trace = prox_gradient(comp, x0, cfg)
    d0 = norm(x0 - ref.x) ** 2
    worst = -math.inf
    for k in range(1, len(trace.objective)):
        bound = d0 / (2.0 * gamma * k) + 1e-10 * (1.0 + abs(jstar))
        worst = max(worst, trace.objective[k] - jstar - bound)
    return "sublinear objective bound margin", worst, 0.0


def _suite_fejer(seed: int):
    spec = problems.gen_boxqp(8, seed=seed)
    xstar = problems.oracle_boxqp(spec)
    comp = problems.boxqp_composite(spec)
    cfg = SolverConfig(
        gamma=1.0 / comp.smooth.lipschitz, tol=1e-14, max_iter=2000
    )
    _, trace = prox_gradient(comp, np.zeros(8), cfg, x_ref=xstar)
    worst = 0.0
    for a, b in zip(trace.fejer, trace.fejer[1:]):
        worst = max(worst, b - a)
    quad = Quadratic(spec.q, spec.c)
    xq = np.linalg.solve(spec.q, -spec.c)
    _, tr2 = proximal_point(
        quad, np.zeros(8), SolverConfig(gamma=0.5, tol=1e-14, max_iter=2000),
        x_ref=xq,
    )
    for a, b in zip(tr2.fejer, tr2.fejer[1:]):
        worst = max(worst, b - a)
    return "monotone distance to the solution", worst, 1e-12


def _suite_superlinear(seed: int):
    spec = problems.gen_lasso(30, 60, seed=seed)
    comp = problems.lasso_composite_smooth(spec)
    gamma = 1.0 / comp.smooth.lipschitz
    result = l1_ssn(
        comp.smooth.gradient, spec.a.T @ spec.a, spec.alpha, gamma,
        np.zeros(30), tol=1e-13, max_iter=100,
    )
    if not result.converged:
        return "final error contraction ratio", math.inf, 0.1
    _, ratios = superlinear_diagnostic(result.iterates, result.x)
    worst = ratios[-1] if ratios else 0.0
    return "final error contraction ratio", worst, 0.1


def _suite_drpdhg(seed: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(5):
        n = int(rng.integers(3, 9))
        bmat = rng.standard_normal((n, n))
        f = Quadratic(bmat @ bmat.T / n + 0.4 * np.eye(n), rng.standard_normal(n))
        g = scale(L1(), 0.5 + float(rng.uniform()))
        gamma = float(2.0 ** rng.integers(-2, 3))
        dev = dr_as_pdhg_check(f, g, rng.standard_normal(n), gamma, n_iter=50)
        worst = max(worst, dev)
    return "splitting equivalence deviation", worst, 1e-10


_SUITE_FNS = {
    "moreau": _suite_moreau,
    "envelope": _suite_envelope,
    "rate": _suite_rate,
    "fejer": _suite_fejer,
    "superlinear": _suite_superlinear,
    "drpdhg": _suite_drpdhg,
}


def cmd_check(args) -> int:
    names = list(_SUITE_FNS) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        label, worst, tol = _SUITE_FNS[name](args.seed)
        ok = worst <= tol
        failed = failed or not ok
        print(
            f"{name}: worst {label} = {worst:.3e} "
            f"(allowed {tol:.1e}) {'PASS' if ok else 'FAIL'}"
        )
    return 3 if failed else 0


# --- bench ------------------------------------------------------------------------


def cmd_bench(args) -> int:
    spec = _generate(args.problem, args.n, args.m, args.seed)
    solvers = [s for s in SOLVERS if not (args.problem == "huber" and s in ("dr", "pdhg"))]
    rows = []
    tmp = out = None
    if args.out is not None:
        tmp, out = _stage_out_dir(args.out)
    ns = argparse.Namespace(**vars(args), gamma=None, tau=None, sigma=None)
    for solver in solvers:
        x, trace = _run_solver(spec, solver, ns)
        rows.append(
            (
                solver,
                trace.n_iter,
                "yes" if trace.converged else "NO",
                spec.objective(x),
                problems.kkt_residual(spec, x),
                trace.ms[-1] if trace.ms else 0.0,
            )
        )
        if tmp is not None:
            trace.write_csv(os.path.join(tmp, f"trace_{solver}.csv"))
    print(f"{'solver':8} {'iters':>6} {'conv':>5} {'objective':>20} {'optimality':>12} {'ms':>9}")
    for r in rows:
        print(f"{r[0]:8} {r[1]:>6d} {r[2]:>5} {r[3]:>20.12g} {r[4]:>12.3e} {r[5]:>9.2f}")
    if tmp is not None:
        _write_json(
            os.path.join(tmp, "manifest.json"),
            {
                "command": "bench",
                "version": __version__,
                "problem": args.problem,
                "n": args.n,
                "m": args.m,
                "seed": args.seed,
                "tol": args.tol,
                "max_iter": args.max_iter,
                "solvers": solvers,
                "outputs": {s: f"trace_{s}.csv" for s in solvers},
            },
        )
        _publish(tmp, out)
        print(f"wrote {out}/")
    return 0


# --- entry ------------------------------------------------------------------------


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "solve": cmd_solve,
        "check": cmd_check,
        "bench": cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
