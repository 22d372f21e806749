"""Dilating a measure multiplies its Hoelder constant by ``|c|**alpha``.

Translations leave it unchanged.  The check compares grid estimates, so the
tolerance is expressed in grid-resolution units: how much a supremum could
move between two neighbouring scales of the grid.
"""

from idslab.averaging import check_bound
from idslab.measures import uniform

for c in (2.0, -3.0, 0.5):
    for alpha in (0.5, 1.0):
        d = check_bound("dilation", mu=uniform(), c=c, alpha=alpha)
        t = check_bound("translation", mu=uniform(), c=c, alpha=alpha)
        print(f"c={c:5.1f} alpha={alpha}: scaled {d.extra['d_scaled']:.4f} vs expected {d.extra['expected']:.4f} "
              f"({d.lhs / d.extra['unit']:.2f} units); translated off by {t.lhs:.1e}")
