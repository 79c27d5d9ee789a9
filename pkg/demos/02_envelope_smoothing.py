"""Moreau envelope as a smoother: the Huber connection, gradients, limits.

Run: python3 demos/02_envelope_smoothing.py
"""

import numpy as np

from proxkit.functionals import L1, InfBallIndicator, moreau_envelope, yosida

print("-- envelope of |t| is the Huber function --")
print(f"{'t':>6} {'gamma=1':>10} {'gamma=0.25':>12} {'|t|':>8}")
for t in (-2.0, -0.5, 0.0, 0.5, 2.0):
    e1 = moreau_envelope(L1(), 1.0, np.array([t]))
    e2 = moreau_envelope(L1(), 0.25, np.array([t]))
    print(f"{t:6.2f} {e1:10.4f} {e2:12.4f} {abs(t):8.2f}")
print("quadratic near zero, linear in the tails, below |t| everywhere")

print("\n-- envelope gradient equals the Yosida map (x - prox)/gamma --")
x = np.array([2.0, -0.3])
g = yosida(L1(), 1.0, x)
h = 1e-6
fd = np.array(
    [
        (
            moreau_envelope(L1(), 1.0, x + h * e)
            - moreau_envelope(L1(), 1.0, x - h * e)
        )
        / (2 * h)
        for e in np.eye(2)
    ]
)
print("yosida   :", g)
print("central fd:", fd)

print("\n-- smoothing an indicator gives squared distance --")
ball = InfBallIndicator(1.0)
for t in (0.5, 1.0, 3.0):
    e = moreau_envelope(ball, 0.5, np.array([t]))
    print(f"envelope at {t}: {e:.4f}  (dist^2/(2*0.5) = {max(0, t - 1) ** 2:.4f})")

print("\n-- gamma controls the tradeoff --")
print("small gamma: envelope hugs the function, gradient steep")
print("large gamma: heavy smoothing, gradient 1/gamma-Lipschitz")
for gamma in (0.1, 1.0, 10.0):
    print(f"  gamma {gamma:5.1f}: envelope of |.| at 2.0 =",
          f"{moreau_envelope(L1(), gamma, np.array([2.0])):.4f}")
