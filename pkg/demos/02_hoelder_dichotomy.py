"""Finite or divergent: the two Hoelder estimators on three kinds of measure.

The direct estimator maximizes ``m(x-eps, x+eps) / (2 eps)**alpha``; the
Borel estimator maximizes ``a**(1-alpha) Im F(x+ia)``.  Both are finite for
exactly the same measures.  When the supremum keeps growing as the scale
shrinks, the estimate is reported as ``inf`` together with the growth slope.
"""

import numpy as np

from idslab.measures import cantor, delta, uniform
from idslab.transforms import hoelder_constant_borel, hoelder_constant_direct

dust = cantor()
cases = [
    ("uniform", uniform(), 1.0),
    ("uniform", uniform(), 0.5),
    ("point mass", delta(), 0.5),
    ("point mass", delta(), 1.0),
    ("cantor at its dimension", dust, dust.dimension),
    ("cantor above its dimension", dust, 0.7),
]

print(f"{'measure':28s} {'alpha':>6s} {'direct':>10s} {'borel':>10s} {'slope':>7s}")
for name, m, alpha in cases:
    d = hoelder_constant_direct(m, alpha)
    b = hoelder_constant_borel(m, alpha, d.grid)
    print(f"{name:28s} {alpha:6.3f} {d.constant:10.4f} {b.constant:10.4f} {d.divergence_slope:7.3f}")

# For uniform[0,1] at alpha = 1 the Borel supremum approaches pi from below.
b = hoelder_constant_borel(uniform(), 1.0)
print(f"\nuniform, alpha=1: Borel sup {b.constant:.6f}, pi - sup = {np.pi - b.constant:.2e}")
