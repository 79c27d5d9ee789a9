"""proxkit: finite-dimensional nonsmooth convex optimization.

A catalog of convex functionals with closed-form proximal maps and Fenchel
conjugates, Moreau-Yosida smoothing, first-order splitting solvers
(proximal point, proximal gradient, accelerated proximal gradient,
Douglas-Rachford, primal-dual extragradient), semismooth Newton methods,
reproducible benchmark problems with brute-force oracles, and a CLI.
"""

__version__ = "0.1.0"

from . import functionals, linalg, newton, problems, splitting
from .linalg import LinearOperator, inner, op_norm, solve_spd

__all__ = [
    "functionals",
    "linalg",
    "newton",
    "problems",
    "splitting",
    "LinearOperator",
    "inner",
    "op_norm",
    "solve_spd",
    "__version__",
]
