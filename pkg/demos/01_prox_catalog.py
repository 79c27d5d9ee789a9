"""Tour of the functional catalog: values, proxes, conjugates.

Run: python3 demos/01_prox_catalog.py
"""

import numpy as np

from proxkit.functionals import (
    BoxIndicator,
    L1,
    L2Norm,
    Quadratic,
    SquaredL2,
    fenchel_young_gap,
    prox_conjugate,
    scale,
    shift,
)

x = np.array([3.0, -0.5, 1.2])
print("x =", x)

print("\n-- soft thresholding --")
f = L1()
for gamma in (0.5, 1.0, 2.0):
    print(f"prox_{{{gamma} |.|_1}}(x) =", f.prox(gamma, x))

print("\n-- group shrinkage --")
g = L2Norm()
print("prox_{1.0 ||.||}(x) =", g.prox(1.0, x), " (radial, direction kept)")
print("prox_{9.9 ||.||}(x) =", g.prox(9.9, x), " (norm below 9.9: collapses)")

print("\n-- projections are proxes of indicators --")
box = BoxIndicator(-1.0, 1.0)
print("proj onto [-1,1]^3:", box.prox(1.0, x), " (gamma irrelevant)")

print("\n-- conjugate pairs --")
pairs = [L1(), L2Norm(), SquaredL2(), box, scale(L1(), 2.5)]
for h in pairs:
    print(f"  ({h!r})* = {h.conjugate()!r}")

print("\n-- Moreau decomposition: x = prox_F(x) + prox_F*(x) at gamma 1 --")
p = f.prox(1.0, x)
q = prox_conjugate(f, 1.0, x)
print("prox part   :", p)
print("conj part   :", q)
print("sum         :", p + q, " (equals x)")

print("\n-- Fenchel-Young gap as an optimality certificate --")
# (x - p) is a subgradient of |.|_1 at p, so the gap vanishes
print("gap at (p, x - p)    :", fenchel_young_gap(f, p, x - p))
print("gap at (p, 0.9*(x-p)):", fenchel_young_gap(f, p, 0.9 * (x - p)))

print("\n-- composing: shifted quadratic --")
quad = Quadratic(np.diag([2.0, 1.0, 0.5]), np.zeros(3))
moved = shift(quad, np.ones(3))
print("value at the new center:", moved.value(np.ones(3)))
print("prox pulls toward it   :", moved.prox(5.0, np.zeros(3)))
