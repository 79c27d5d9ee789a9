"""Benchmark problem family: generators, exact oracles, and optimality measures.

Four problem kinds, each a dataclass with JSON round-trip, a seeded
generator that is bit-identical per seed, an independent oracle that does
not share code with any iterative solver, and a scalar optimality measure:

  lasso    1/2||Ax-b||^2 + alpha*||x||_1, planted sparse ground truth
  boxqp    1/2 x'Qx + c'x over a box, Q symmetric positive definite
  control  1/2||Su-z||^2 + alpha/2||u||^2 over a box
  huber    alpha*sum huber_gamma(x_i) + 1/2||x-b||^2, unconstrained

The lasso and boxqp oracles enumerate all 3^N sign or bound patterns and
certify the KKT conditions of the winner, so they are exact up to one linear
solve; they exist to judge the iterative solvers and are deliberately
exponential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functionals import (
    BoxIndicator,
    L1,
    Quadratic,
    SquaredL2,
    Zero,
    fenchel_young_gap,
    scale,
    shift,
)
from .linalg import LinearOperator, as_vector, norm, op_norm
from .splitting import CompositeProblem, SmoothFn, duality_gap

__all__ = [
    "LassoSpec",
    "BoxQPSpec",
    "ControlSpec",
    "HuberSpec",
    "gen_lasso",
    "gen_boxqp",
    "gen_control",
    "gen_huber",
    "oracle_lasso",
    "oracle_boxqp",
    "oracle_control",
    "oracle_huber",
    "kkt_residual",
    "lasso_duality_gap",
    "control_as_boxqp",
    "lasso_composite_smooth",
    "lasso_composite_split",
    "lasso_dr_pair",
    "boxqp_composite",
    "boxqp_dr_pair",
    "control_composite",
    "huber_composite",
    "problem_to_json",
    "problem_from_json",
]

_ENUM_CAP = 12  # 3^12 is half a million linear solves; beyond that, refuse


def _mat(a) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError("expected a matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


@dataclass
class LassoSpec:
    """min 1/2||Ax - b||^2 + alpha*||x||_1; x_true is the planted signal, if any."""

    a: np.ndarray
    b: np.ndarray
    alpha: float
    x_true: np.ndarray | None = None

    def __post_init__(self):
        self.a = _mat(self.a)
        self.b = as_vector(self.b)
        if self.b.size != self.a.shape[0]:
            raise ValueError("b does not match A")
        if not (self.alpha > 0):
            raise ValueError("alpha must be positive")
        if self.x_true is not None:
            self.x_true = as_vector(self.x_true)

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def objective(self, x) -> float:
        x = as_vector(x)
        r = self.a @ x - self.b
        return 0.5 * float(r @ r) + self.alpha * float(np.sum(np.abs(x)))

    def to_json(self) -> dict:
        p = {
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "alpha": self.alpha,
        }
        if self.x_true is not None:
            p["x_true"] = self.x_true.tolist()
        return {"kind": "lasso", "params": p}


@dataclass
class BoxQPSpec:
    """min 1/2 x'Qx + c'x subject to lo <= x <= hi, Q symmetric positive definite."""

    q: np.ndarray
    c: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.q = _mat(self.q)
        self.c = as_vector(self.c)
        n = self.c.size
        if self.q.shape != (n, n):
            raise ValueError("Q does not match c")
        self.lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (n,)).copy()
        self.hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (n,)).copy()
        if np.any(self.lo > self.hi):
            raise ValueError("need lo <= hi")

    @property
    def n(self) -> int:
        return self.c.size

    def objective(self, x) -> float:
        x = as_vector(x)
        box = BoxIndicator(self.lo, self.hi)
        return 0.5 * float(x @ (self.q @ x)) + float(self.c @ x) + box.value(x)

    def to_json(self) -> dict:
        return {
            "kind": "boxqp",
            "params": {
                "q": self.q.tolist(),
                "c": self.c.tolist(),
                "lo": self.lo.tolist(),
                "hi": self.hi.tolist(),
            },
        }


@dataclass
class ControlSpec:
    """min 1/2||Su - z||^2 + alpha/2||u||^2 subject to lo <= u <= hi."""

    s: np.ndarray
    z: np.ndarray
    alpha: float
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.s = _mat(self.s)
        self.z = as_vector(self.z)
        if self.z.size != self.s.shape[0]:
            raise ValueError("z does not match S")
        if not (self.alpha > 0):
            raise ValueError("alpha must be positive")
        n = self.s.shape[1]
        self.lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (n,)).copy()
        self.hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (n,)).copy()
        if np.any(self.lo > self.hi):
            raise ValueError("need lo <= hi")

    @property
    def n(self) -> int:
        return self.s.shape[1]

    def objective(self, u) -> float:
        u = as_vector(u)
        r = self.s @ u - self.z
        box = BoxIndicator(self.lo, self.hi)
        return 0.5 * float(r @ r) + 0.5 * self.alpha * float(u @ u) + box.value(u)

    def to_json(self) -> dict:
        return {
            "kind": "control",
            "params": {
                "s": self.s.tolist(),
                "z": self.z.tolist(),
                "alpha": self.alpha,
                "lo": self.lo.tolist(),
                "hi": self.hi.tolist(),
            },
        }


@dataclass
class HuberSpec:
    """min alpha*sum_i huber_gamma(x_i) + 1/2||x - b||^2.

    huber_gamma(t) = t^2/(2 gamma) for |t| <= gamma, |t| - gamma/2 beyond;
    smooth everywhere, solvable coordinatewise in closed form.
    """

    b: np.ndarray
    alpha: float
    gamma: float

    def __post_init__(self):
        self.b = as_vector(self.b)
        if not (self.alpha > 0 and self.gamma > 0):
            raise ValueError("alpha and gamma must be positive")

    @property
    def n(self) -> int:
        return self.b.size

    def huber(self, x) -> float:
        x = as_vector(x)
        ax = np.abs(x)
        inside = ax <= self.gamma
        vals = np.where(inside, x * x / (2.0 * self.gamma), ax - self.gamma / 2.0)
        return float(np.sum(vals))

    def huber_grad(self, x) -> np.ndarray:
        return np.clip(as_vector(x) / self.gamma, -1.0, 1.0)

    def objective(self, x) -> float:
        x = as_vector(x)
        d = x - self.b
        return self.alpha * self.huber(x) + 0.5 * float(d @ d)

    def to_json(self) -> dict:
        return {
            "kind": "huber",
            "params": {"b": self.b.tolist(), "alpha": self.alpha, "gamma": self.gamma},
        }


# --- generators (bit-identical per seed) -----------------------------------


def gen_lasso(
    n: int,
    m: int | None = None,
    seed: int = 0,
    density: float = 0.1,
    noise: float = 0.01,
    alpha_scale: float = 0.1,
) -> LassoSpec:
    """Planted sparse regression instance.

    Columns of A are near unit norm, the signal has ceil(density*n) nonzero
    entries of unit scale, b = A x_true + noise * standard normal, and
    alpha = alpha_scale * ||A'b||_inf so the planted support survives.
    """
    if m is None:
        m = 2 * n
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, n)) / np.sqrt(m)
    k = max(1, int(round(density * n)))
    support = rng.choice(n, size=k, replace=False)
    x_true = np.zeros(n)
    x_true[support] = rng.standard_normal(k) + np.sign(rng.standard_normal(k))
    b = a @ x_true + noise * rng.standard_normal(m)
    alpha = alpha_scale * float(np.max(np.abs(a.T @ b)))
    return LassoSpec(a, b, alpha, x_true)


def gen_boxqp(n: int, seed: int = 0, cond_shift: float = 0.5) -> BoxQPSpec:
    """Random SPD quadratic over a random box.

    Q = B B'/n + cond_shift * I, verified SPD by an explicit Cholesky
    factorization before the spec is returned.
    """
    rng = np.random.default_rng(seed)
    bmat = rng.standard_normal((n, n))
    q = bmat @ bmat.T / n + cond_shift * np.eye(n)
    try:
        np.linalg.cholesky(q)
    except np.linalg.LinAlgError as exc:
        raise ValueError("generated Q failed its Cholesky SPD check") from exc
    c = rng.standard_normal(n)
    lo = -rng.uniform(0.5, 1.5, size=n)
    hi = rng.uniform(0.5, 1.5, size=n)
    return BoxQPSpec(q, c, lo, hi)


def gen_control(
    n: int,
    m: int | None = None,
    seed: int = 0,
    alpha: float = 0.1,
    bound: float = 1.0,
) -> ControlSpec:
    """Tikhonov-regularized box-constrained least squares instance.

    The target z is built from a control that violates the box on a few
    coordinates, so the constraint is genuinely active at the solution.
    """
    if m is None:
        m = 2 * n
    rng = np.random.default_rng(seed)
    s = rng.standard_normal((m, n)) / np.sqrt(m)
    u_free = 2.0 * bound * rng.standard_normal(n)
    z = s @ u_free + 0.05 * rng.standard_normal(m)
    return ControlSpec(s, z, alpha, -bound * np.ones(n), bound * np.ones(n))


def gen_huber(
    n: int, seed: int = 0, alpha: float = 1.0, gamma: float = 0.5
) -> HuberSpec:
    """Coordinatewise huber shrinkage instance with b straddling both branches."""
    rng = np.random.default_rng(seed)
    b = 3.0 * rng.standard_normal(n)
    return HuberSpec(b, alpha, gamma)


# --- exact oracles ----------------------------------------------------------


def _check_enum_size(n: int, name: str):
    if n > _ENUM_CAP:
        raise ValueError(f"{name}: 3^{n} patterns is past the enumeration cap")


def oracle_lasso(spec: LassoSpec, zero_tol: float = 1e-10) -> np.ndarray:
    """Exact lasso solution by enumerating all 3^n sign patterns.

    For each pattern s, solves the stationarity system on the support,
    then keeps the candidate whose signs match strictly and whose inactive
    coordinates satisfy |A'(Ax - b)| <= alpha + zero_tol.
    """
    _check_enum_size(spec.n, "oracle_lasso")
    a, b, alpha, n = spec.a, spec.b, spec.alpha, spec.n
    gram = a.T @ a
    atb = a.T @ b
    best = None
    best_obj = np.inf
    for code in range(3**n):
        s = np.zeros(n)
        c = code
        for i in range(n):
            s[i] = (c % 3) - 1
            c //= 3
        supp = np.flatnonzero(s)
        x = np.zeros(n)
        if supp.size:
            try:
                x[supp] = np.linalg.solve(
                    gram[np.ix_(supp, supp)], atb[supp] - alpha * s[supp]
                )
            except np.linalg.LinAlgError:
                continue
            if not np.all(s[supp] * x[supp] > 0):
                continue
        g = a.T @ (a @ x - b)
        off = np.setdiff1d(np.arange(n), supp)
        if off.size and np.any(np.abs(g[off]) > alpha + zero_tol):
            continue
        obj = spec.objective(x)
        if obj < best_obj:
            best, best_obj = x, obj
    if best is None:
        raise RuntimeError("oracle_lasso: no sign pattern satisfied the KKT system")
    return best


def oracle_boxqp(spec: BoxQPSpec, mult_tol: float = 1e-10) -> np.ndarray:
    """Exact box QP solution by enumerating lower/free/upper partitions.

    Fixes the bound coordinates, solves the free block, and keeps the
    candidate whose multipliers g = Qx + c have the right signs: g >= 0 on
    the lower set, g <= 0 on the upper set.
    """
    _check_enum_size(spec.n, "oracle_boxqp")
    q, c, lo, hi, n = spec.q, spec.c, spec.lo, spec.hi, spec.n
    best = None
    best_obj = np.inf
    for code in range(3**n):
        part = np.zeros(n, dtype=int)  # -1 lower, 0 free, +1 upper
        cc = code
        for i in range(n):
            part[i] = (cc % 3) - 1
            cc //= 3
        if np.any((part == -1) & ~np.isfinite(lo)):
            continue
        if np.any((part == 1) & ~np.isfinite(hi)):
            continue
        x = np.where(part == -1, lo, np.where(part == 1, hi, 0.0))
        free = np.flatnonzero(part == 0)
        if free.size:
            fixed = np.flatnonzero(part != 0)
            rhs = -c[free]
            if fixed.size:
                rhs = rhs - q[np.ix_(free, fixed)] @ x[fixed]
            try:
                x[free] = np.linalg.solve(q[np.ix_(free, free)], rhs)
            except np.linalg.LinAlgError:
                continue
            if np.any(x[free] < lo[free] - mult_tol) or np.any(
                x[free] > hi[free] + mult_tol
            ):
                continue
        g = q @ x + c
        if np.any(g[part == -1] < -mult_tol) or np.any(g[part == 1] > mult_tol):
            continue
        obj = 0.5 * float(x @ (q @ x)) + float(c @ x)
        if obj < best_obj:
            best, best_obj = np.clip(x, lo, hi), obj
    if best is None:
        raise RuntimeError("oracle_boxqp: no partition satisfied the KKT system")
    return best


def control_as_boxqp(spec: ControlSpec) -> BoxQPSpec:
    """The control problem is a box QP with Q = S'S + alpha*I, c = -S'z."""
    q = spec.s.T @ spec.s + spec.alpha * np.eye(spec.n)
    return BoxQPSpec(q, -spec.s.T @ spec.z, spec.lo, spec.hi)


def oracle_control(spec: ControlSpec) -> np.ndarray:
    return oracle_boxqp(control_as_boxqp(spec))


def oracle_huber(spec: HuberSpec) -> np.ndarray:
    """Closed-form coordinatewise solution.

    x_i = b_i / (1 + alpha/gamma) while that stays inside the quadratic
    branch (|b_i| <= gamma + alpha), else x_i = b_i - alpha*sign(b_i).
    """
    b, alpha, gamma = spec.b, spec.alpha, spec.gamma
    inner = b / (1.0 + alpha / gamma)
    outer = b - alpha * np.sign(b)
    return np.where(np.abs(b) <= gamma + alpha, inner, outer)


# --- optimality measures -----------------------------------------------------


def lasso_duality_gap(spec: LassoSpec, x) -> float:
    """Duality gap at x with the standard rescaled dual certificate.

    y = Ax - b pulled inside the dual feasible set by
    y * min(1, alpha/||A'y||_inf); the gap then upper-bounds the objective
    suboptimality and vanishes exactly at the solution.
    """
    x = as_vector(x)
    y = spec.a @ x - spec.b
    s = float(np.max(np.abs(spec.a.T @ y))) if y.size else 0.0
    if s > spec.alpha:
        y = y * (spec.alpha / s)
    return duality_gap(lasso_composite_split(spec), x, y)


def kkt_residual(spec, x) -> float:
    """Scalar optimality measure, zero exactly at the solution.

    lasso: rescaled duality gap.  boxqp and control: Fenchel-Young gap of
    the box indicator paired with the negative gradient, +inf off the box.
    huber: gradient norm of the smooth objective.
    """
    x = as_vector(x)
    if isinstance(spec, LassoSpec):
        return lasso_duality_gap(spec, x)
    if isinstance(spec, BoxQPSpec):
        g = spec.q @ x + spec.c
        return fenchel_young_gap(BoxIndicator(spec.lo, spec.hi), x, -g)
    if isinstance(spec, ControlSpec):
        return kkt_residual(control_as_boxqp(spec), x)
    if isinstance(spec, HuberSpec):
        g = spec.alpha * spec.huber_grad(x) + (x - spec.b)
        return norm(g)
    raise TypeError(f"kkt_residual: unknown spec type {type(spec).__name__}")


# --- composite builders -------------------------------------------------------


def lasso_composite_smooth(spec: LassoSpec) -> CompositeProblem:
    """Smooth-plus-prox form for gradient methods: F = 1/2||A.-b||^2, G = alpha*l1."""
    a_op = LinearOperator(spec.a)
    lip = op_norm(a_op) ** 2
    smooth = SmoothFn(
        value=lambda x: 0.5 * float(np.sum((spec.a @ x - spec.b) ** 2)),
        gradient=lambda x: spec.a.T @ (spec.a @ x - spec.b),
        lipschitz=lip if lip > 0 else None,
    )
    return CompositeProblem(smooth=smooth, g=scale(L1(), spec.alpha))


def lasso_composite_split(spec: LassoSpec) -> CompositeProblem:
    """Coupled form for primal-dual: f = alpha*l1, g = 1/2||.-b||^2, A the design."""
    return CompositeProblem(
        f=scale(L1(), spec.alpha),
        g=shift(SquaredL2(), spec.b),
        a=LinearOperator(spec.a),
    )


def lasso_dr_pair(spec: LassoSpec) -> CompositeProblem:
    """Two-prox form: f the least squares term as a quadratic, g = alpha*l1."""
    gram = spec.a.T @ spec.a
    return CompositeProblem(
        f=Quadratic(gram, -spec.a.T @ spec.b, 0.5 * float(spec.b @ spec.b)),
        g=scale(L1(), spec.alpha),
    )


def boxqp_composite(spec: BoxQPSpec) -> CompositeProblem:
    """Smooth-plus-prox form: F the quadratic, G the box indicator."""
    quad = Quadratic(spec.q, spec.c)
    lip = op_norm(LinearOperator(spec.q))
    smooth = SmoothFn(
        value=quad.value, gradient=quad.gradient, lipschitz=lip if lip > 0 else None
    )
    return CompositeProblem(smooth=smooth, g=BoxIndicator(spec.lo, spec.hi))


def boxqp_dr_pair(spec: BoxQPSpec) -> CompositeProblem:
    """Two-prox form: f the quadratic by its resolvent, g the box indicator."""
    return CompositeProblem(
        f=Quadratic(spec.q, spec.c), g=BoxIndicator(spec.lo, spec.hi)
    )


def control_composite(spec: ControlSpec) -> CompositeProblem:
    return boxqp_composite(control_as_boxqp(spec))


def huber_composite(spec: HuberSpec) -> CompositeProblem:
    """Fully smooth problem: G is the zero functional."""
    smooth = SmoothFn(
        value=spec.objective,
        gradient=lambda x: spec.alpha * spec.huber_grad(x) + (as_vector(x) - spec.b),
        lipschitz=spec.alpha / spec.gamma + 1.0,
    )
    return CompositeProblem(smooth=smooth, g=Zero())


# --- JSON ---------------------------------------------------------------------

_SPEC_KINDS = {
    "lasso": (LassoSpec, ("a", "b", "alpha", "x_true")),
    "boxqp": (BoxQPSpec, ("q", "c", "lo", "hi")),
    "control": (ControlSpec, ("s", "z", "alpha", "lo", "hi")),
    "huber": (HuberSpec, ("b", "alpha", "gamma")),
}


def problem_to_json(spec) -> dict:
    return spec.to_json()


def problem_from_json(data: dict):
    kind = data.get("kind")
    if kind not in _SPEC_KINDS:
        raise ValueError(f"unknown problem kind: {kind}")
    cls, fields = _SPEC_KINDS[kind]
    params = data.get("params", {})
    kwargs = {k: params[k] for k in fields if k in params}
    return cls(**kwargs)
