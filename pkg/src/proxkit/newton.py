"""Semismooth Newton solvers for piecewise-smooth optimality systems.

Each solver rewrites first-order optimality as a fixed-point residual built
from a projection or soft threshold, picks one element of the generalized
derivative through an activity mask, and eliminates the masked rows by hand:
pinned coordinates take their residual value directly (landing exactly on a
bound or exactly at zero after the update), and only the free block goes to
the SPD solver.  Dense Hessian blocks throughout; sized for N up to a few
hundred.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_vector, norm, solve_spd

__all__ = [
    "NewtonDerivativeMask",
    "NewtonSystem",
    "NewtonResult",
    "ssn_solve",
    "scaled_soft_threshold",
    "scaled_soft_threshold_slope",
    "l1_ssn",
    "moreau_yosida_ssn",
    "control_ssn",
    "ContinuationSchedule",
    "continuation",
    "superlinear_diagnostic",
]

_DIVERGE_FACTOR = 1e6


@dataclass
class NewtonDerivativeMask:
    """Chooses one element of a piecewise derivative coordinatewise.

    active marks coordinates on the smooth (differentiable) branch; pinned
    is its complement, where the projection derivative is zero.
    """

    active: np.ndarray

    def __post_init__(self):
        self.active = np.asarray(self.active, dtype=bool)

    @property
    def pinned(self) -> np.ndarray:
        return ~self.active

    @classmethod
    def threshold(cls, w, thresh: float) -> "NewtonDerivativeMask":
        """Active where |w_i| >= thresh; ties count as active."""
        return cls(np.abs(as_vector(w)) >= thresh)

    @classmethod
    def interval(cls, v, lo, hi) -> "NewtonDerivativeMask":
        """Active where lo < v_i < hi strictly; ties count as pinned."""
        v = as_vector(v)
        return cls((v > lo) & (v < hi))

    def indicator(self) -> np.ndarray:
        return self.active.astype(float)


@dataclass
class NewtonSystem:
    """The eliminated Newton system for one step.

    The full system is diag(pinned) s + diag(active) (B s) = rhs; pinned
    rows give s_i = rhs_i directly, and the active block solves
    B_aa s_a = rhs_a - B_ap s_p.  matrix and reduced_rhs are that block;
    step is the assembled full-dimension step.
    """

    mask: NewtonDerivativeMask
    matrix: np.ndarray
    reduced_rhs: np.ndarray
    step: np.ndarray


def _masked_step(B: np.ndarray, mask: NewtonDerivativeMask, rhs: np.ndarray) -> NewtonSystem:
    act = mask.active
    pin = mask.pinned
    s = np.empty_like(rhs)
    s[pin] = rhs[pin]
    if act.any():
        Baa = B[np.ix_(act, act)]
        r = rhs[act].copy()
        if pin.any():
            r -= B[np.ix_(act, pin)] @ s[pin]
        s[act] = solve_spd(Baa, r)
    else:
        Baa = np.zeros((0, 0))
        r = np.zeros(0)
    return NewtonSystem(mask, Baa, r, s)


@dataclass
class NewtonResult:
    x: np.ndarray
    residuals: list[float] = field(default_factory=list)
    iterates: list[np.ndarray] = field(default_factory=list)
    converged: bool = False
    diverged: bool = False
    last_system: NewtonSystem | None = None

    @property
    def n_iter(self) -> int:
        return len(self.residuals) - 1 if self.residuals else 0


def ssn_solve(residual, step, x0, tol: float = 1e-10, max_iter: int = 50,
              damped: bool = True) -> NewtonResult:
    """Generic semismooth Newton loop x <- x + t * step(x, Phi(x)).

    residual maps x to Phi(x); step maps (x, Phi(x)) to a NewtonSystem.
    Stops when ||Phi(x)|| <= tol.  With damped=True the step is halved
    until the residual norm decreases; the full step is always tried first,
    so the exact one-step behavior on a correctly identified piece is
    preserved, while the backtracking breaks the mask cycles that undamped
    active-set Newton is prone to.  On a residual that blows up past 1e6
    times its starting value (or stops being finite) the result is marked
    diverged instead of raising, so outer drivers can react.
    """
    if not (tol > 0):
        raise ValueError("ssn_solve: tol must be positive")
    x = as_vector(x0).copy()
    out = NewtonResult(x)
    out.iterates.append(x.copy())
    r = residual(x)
    nr = norm(r)
    out.residuals.append(nr)
    blowup = _DIVERGE_FACTOR * max(nr, tol)
    for _ in range(max_iter):
        if nr <= tol:
            out.converged = True
            break
        system = step(x, r)
        out.last_system = system
        x_full = x + system.step
        if damped:
            x_try, t = x_full, 1.0
            while norm(residual(x_try)) >= nr and t > 2.0**-24:
                t *= 0.5
                x_try = x + t * system.step
            x = x_full if t <= 2.0**-24 else x_try
        else:
            x = x_full
        out.iterates.append(x.copy())
        r = residual(x)
        nr = norm(r)
        out.residuals.append(nr)
        if not np.isfinite(nr) or nr > blowup:
            out.diverged = True
            break
    else:
        out.converged = nr <= tol
    out.x = x
    return out


def scaled_soft_threshold(t, gamma: float):
    """(1/gamma) * (t - clip(t, -1, 1)) elementwise.

    Solves min_s gamma/2 s^2 + |s| - t s in closed form; the resolvent map
    behind the Tikhonov-regularized l1 system below.
    """
    t = np.asarray(t, dtype=float)
    return (t - np.clip(t, -1.0, 1.0)) / gamma


def scaled_soft_threshold_slope(t, gamma: float):
    """Generalized derivative of scaled_soft_threshold: 1/gamma where |t| >= 1
    (ties take the sloped branch), 0 inside."""
    t = np.asarray(t, dtype=float)
    return np.where(np.abs(t) >= 1.0, 1.0 / gamma, 0.0)


def _as_hess(hess):
    if callable(hess):
        return hess
    H = np.asarray(hess, dtype=float)
    return lambda _x: H


def l1_ssn(grad, hess, alpha: float, gamma: float, x0, tol: float = 1e-10,
           max_iter: int = 50, damped: bool = True) -> NewtonResult:
    """Semismooth Newton on Phi(x) = x - soft(x - gamma*grad(x), gamma*alpha).

    Zeros of Phi minimize F(x) + alpha*||x||_1 for smooth F with Hessian
    hess (constant matrix or callable).  Pinned coordinates, where the
    threshold argument falls strictly inside the dead zone, land exactly at
    zero after each step.
    """
    if not (alpha > 0 and gamma > 0):
        raise ValueError("l1_ssn: alpha and gamma must be positive")
    hess_at = _as_hess(hess)
    thresh = gamma * alpha

    def residual(x):
        w = x - gamma * as_vector(grad(x))
        return x - np.sign(w) * np.maximum(np.abs(w) - thresh, 0.0)

    def step(x, r):
        w = x - gamma * as_vector(grad(x))
        mask = NewtonDerivativeMask.threshold(w, thresh)
        return _masked_step(gamma * hess_at(x), mask, -r)

    return ssn_solve(residual, step, x0, tol=tol, max_iter=max_iter, damped=damped)


def moreau_yosida_ssn(grad, hess, gamma: float, u0, tol: float = 1e-10,
                      max_iter: int = 50, damped: bool = True) -> NewtonResult:
    """Newton on the Tikhonov-regularized l1 system for given gamma > 0.

    Solves Psi(u) = u - h(-grad(u)) = 0 with h = scaled_soft_threshold at
    gamma; the root is the unique minimizer of
    F(u) + ||u||_1 + (gamma/2)||u||^2.  The free block is
    (I + H/gamma) restricted to coordinates with |grad(u)_i| >= 1.
    """
    if not (gamma > 0):
        raise ValueError("moreau_yosida_ssn: gamma must be positive")
    hess_at = _as_hess(hess)

    def residual(u):
        return u - scaled_soft_threshold(-as_vector(grad(u)), gamma)

    def step(u, r):
        gu = as_vector(grad(u))
        mask = NewtonDerivativeMask.threshold(-gu, 1.0)
        H = hess_at(u)
        B = np.eye(u.size) + H / gamma
        return _masked_step(B, mask, -r)

    return ssn_solve(residual, step, u0, tol=tol, max_iter=max_iter, damped=damped)


def control_ssn(S, z, alpha: float, lo, hi, u0=None, tol: float = 1e-10,
                max_iter: int = 50, damped: bool = True) -> NewtonResult:
    """Box-constrained Tikhonov least squares by projection Newton.

    Solves min 1/2||Su - z||^2 + alpha/2 ||u||^2 over the box [lo, hi]
    through Phi(u) = u - clip(v(u), lo, hi), v(u) = -(1/alpha) S'(Su - z).
    Coordinates whose v hits or crosses a bound are pinned and sit exactly
    on that bound after the step.
    """
    if not (alpha > 0):
        raise ValueError("control_ssn: alpha must be positive")
    S = np.asarray(S, dtype=float)
    if S.ndim != 2:
        raise ValueError("control_ssn: S must be a matrix")
    z = as_vector(z)
    if z.size != S.shape[0]:
        raise ValueError("control_ssn: z does not match S")
    n = S.shape[1]
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (n,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (n,))
    if np.any(lo > hi):
        raise ValueError("control_ssn: need lo <= hi")
    StS = S.T @ S
    Stz = S.T @ z
    B = np.eye(n) + StS / alpha
    x_start = np.zeros(n) if u0 is None else as_vector(u0)

    def v_of(u):
        return (Stz - StS @ u) / alpha

    def residual(u):
        return u - np.clip(v_of(u), lo, hi)

    def step(u, r):
        mask = NewtonDerivativeMask.interval(v_of(u), lo, hi)
        return _masked_step(B, mask, -r)

    return ssn_solve(residual, step, x_start, tol=tol, max_iter=max_iter, damped=damped)


@dataclass
class ContinuationSchedule:
    """Geometric gamma ladder gamma0 * factor^k down to gamma_min inclusive."""

    gamma0: float = 1.0
    factor: float = 0.5
    gamma_min: float = 2.0 ** -10

    def __post_init__(self):
        if not (self.gamma0 > 0 and self.gamma_min > 0):
            raise ValueError("gamma0 and gamma_min must be positive")
        if not (0 < self.factor < 1):
            raise ValueError("factor must lie in (0, 1)")
        if self.gamma_min > self.gamma0:
            raise ValueError("gamma_min must not exceed gamma0")

    def gammas(self) -> list[float]:
        out = []
        g = self.gamma0
        while g >= self.gamma_min * (1.0 - 1e-12):
            out.append(g)
            g *= self.factor
        return out


def continuation(solve_at, schedule: ContinuationSchedule, u0):
    """Warm-started sweep of solve_at(gamma, u) down the schedule.

    solve_at returns a NewtonResult.  Returns (u, stages) where each stage
    records gamma, iterations, final residual, and flags.  A diverged inner
    solve stops the sweep immediately and keeps the last good iterate; the
    failing stage stays in the list with diverged=True.
    """
    u = as_vector(u0).copy()
    stages = []
    for gamma in schedule.gammas():
        result = solve_at(gamma, u)
        stages.append(
            {
                "gamma": gamma,
                "n_iter": result.n_iter,
                "residual": result.residuals[-1],
                "converged": result.converged,
                "diverged": result.diverged,
            }
        )
        if result.diverged:
            break
        u = result.x
    return u, stages


def superlinear_diagnostic(iterates, x_ref):
    """Error norms against x_ref and their successive ratios.

    The error sequence stops once it reaches the roundoff floor
    1000*eps*(1 + ||x_ref||): the first sub-floor entry is kept, so the
    final ratio records the drop into roundoff (an upper bound on the true
    contraction there), but no ratios of pure noise are formed.  Returns
    (errors, ratios); superlinear convergence shows up as ratios heading
    to zero.
    """
    ref = as_vector(x_ref)
    floor = 1000.0 * np.finfo(float).eps * (1.0 + norm(ref))
    errors = []
    for x in iterates:
        e = norm(as_vector(x) - ref)
        errors.append(e)
        if e < floor:
            break
    ratios = [errors[i + 1] / errors[i] for i in range(len(errors) - 1)]
    return errors, ratios
