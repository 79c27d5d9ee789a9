"""Shared test utilities.

The scalar prox oracle minimizes the prox objective by golden-section search
in extended precision, so it shares no formulas with the catalog it judges.
The grid-sup oracle brackets a one-dimensional conjugate value the same way.
"""

import numpy as np

from proxkit.functionals import (
    BoxIndicator,
    BoxSupport,
    InfBallIndicator,
    L1,
    L2BallIndicator,
    L2Norm,
    Quadratic,
    SeparableSum,
    Shifted,
    SquaredL2,
    Tilted,
    Zero,
    scale,
    shift,
    tilt,
)

_GOLDEN = (np.sqrt(np.longdouble(5.0)) - 1) / 2


def golden_min(phi, a, b, iters=180):
    """Golden-section minimizer of a unimodal phi on [a, b] in longdouble."""
    a = np.longdouble(a)
    b = np.longdouble(b)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = phi(c)
    fd = phi(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = phi(d)
    return (a + b) / 2


def prox_oracle_1d(f_scalar, gamma, t, dom=(-np.inf, np.inf), iters=180):
    """argmin over dom of (z - t)^2/2 + gamma * f_scalar(z).

    The search window is dom clipped to |z| <= |t| + 10*gamma + 10, which
    always contains the prox for the catalog's scalar pieces.
    """
    tl = np.longdouble(t)
    gl = np.longdouble(gamma)
    r = abs(tl) + 10 * gl + 10
    a = max(np.longdouble(dom[0]), -r)
    b = min(np.longdouble(dom[1]), r)

    def phi(z):
        return np.longdouble(0.5) * (z - tl) ** 2 + gl * f_scalar(z)

    return float(golden_min(phi, a, b, iters))


def grid_sup_1d(h, lo, hi, rounds=4, points=2001):
    """sup of h on [lo, hi] by coarse grid plus zooming refinements.

    Each round keeps one grid cell on either side of the incumbent, so after
    four rounds the bracket width is (hi-lo) * (2/points)^4 and the one-sided
    error is bounded by the local curvature times that squared.
    """
    lo = float(lo)
    hi = float(hi)
    for _ in range(rounds):
        zs = np.linspace(lo, hi, points)
        vals = np.array([h(z) for z in zs])
        j = int(np.argmax(vals))
        lo = zs[max(j - 1, 0)]
        hi = zs[min(j + 1, points - 1)]
    return float(max(h(lo), h(0.5 * (lo + hi)), h(hi)))


def scalar_catalog(rng):
    """One scalar instance per catalog kind, paired with an independent
    description (value callable in extended precision, domain interval)."""
    lo = -float(np.round(rng.uniform(0.4, 1.6), 3))
    hi = float(np.round(rng.uniform(0.4, 1.6), 3))
    r = float(np.round(rng.uniform(0.3, 2.0), 3))
    alpha = float(np.round(rng.uniform(0.3, 3.0), 3))
    s0 = float(np.round(rng.standard_normal(), 3))
    v0 = float(np.round(rng.standard_normal(), 3))
    q0 = float(np.round(rng.uniform(0.2, 4.0), 3))
    c0 = float(np.round(rng.standard_normal(), 3))
    full = (-np.inf, np.inf)
    zero = lambda z: np.longdouble(0.0)
    return [
        ("Zero", Zero(), zero, full),
        ("SquaredL2", SquaredL2(), lambda z: np.longdouble(0.5) * z * z, full),
        ("L1", L1(), abs, full),
        ("L2Norm", L2Norm(), abs, full),
        ("BoxIndicator", BoxIndicator(lo, hi), zero, (lo, hi)),
        ("InfBallIndicator", InfBallIndicator(r), zero, (-r, r)),
        ("L2BallIndicator", L2BallIndicator(r), zero, (-r, r)),
        (
            "BoxSupport",
            BoxSupport(lo, hi),
            lambda z, lo=lo, hi=hi: np.longdouble(hi) * z if z > 0 else np.longdouble(lo) * z,
            full,
        ),
        ("Scaled", scale(L1(), alpha), lambda z, a=alpha: np.longdouble(a) * abs(z), full),
        (
            "Shifted",
            shift(SquaredL2(), [s0]),
            lambda z, s=s0: np.longdouble(0.5) * (z - s) ** 2,
            full,
        ),
        ("Tilted", tilt(L1(), [v0]), lambda z, v=v0: abs(z) + np.longdouble(v) * z, full),
        ("SeparableSum", SeparableSum([L1()]), abs, full),
        (
            "Quadratic",
            Quadratic([[q0]], [c0], 0.25),
            lambda z, q=q0, c=c0: np.longdouble(0.5) * q * z * z
            + np.longdouble(c) * z
            + np.longdouble(0.25),
            full,
        ),
    ]


def catalog_menagerie(rng, n):
    """A spread of (name, functional) pairs on R^n covering every kind,
    including nested combinators and one-sided infinite bounds."""
    x0 = rng.standard_normal(n)
    v = rng.standard_normal(n)
    lo = -np.abs(rng.standard_normal(n)) - 0.2
    hi = np.abs(rng.standard_normal(n)) + 0.2
    lo_open = lo.copy()
    lo_open[0] = -np.inf
    bmat = rng.standard_normal((n, n))
    q = bmat @ bmat.T / n + 0.3 * np.eye(n)
    pieces = []
    for i in range(n):
        pieces.append([L1(), SquaredL2(), L2Norm(), scale(L1(), 1.7)][i % 4])
    return [
        ("Zero", Zero()),
        ("SquaredL2", SquaredL2()),
        ("L1", L1()),
        ("L2Norm", L2Norm()),
        ("BoxIndicator", BoxIndicator(lo, hi)),
        ("BoxIndicator_halfopen", BoxIndicator(lo_open, hi)),
        ("BoxSupport", BoxSupport(lo, hi)),
        ("InfBallIndicator", InfBallIndicator(0.8)),
        ("InfBallIndicator_origin", InfBallIndicator(0.0)),
        ("L2BallIndicator", L2BallIndicator(1.3)),
        ("Scaled_l1", scale(L1(), 0.7)),
        ("Scaled_sq", scale(SquaredL2(), 2.5)),
        ("Scaled_l2", scale(L2Norm(), 1.9)),
        ("Shifted_sq", shift(SquaredL2(), x0)),
        ("Shifted_ball", Shifted(x0, InfBallIndicator(0.6))),
        ("Tilted_l1", tilt(L1(), v)),
        ("Tilted_box", Tilted(BoxIndicator(lo, hi), v)),
        ("SeparableSum", SeparableSum(pieces)),
        ("Quadratic", Quadratic(q, rng.standard_normal(n))),
        ("Shifted_tilted", Shifted(x0, Tilted(L1(), v))),
    ]
