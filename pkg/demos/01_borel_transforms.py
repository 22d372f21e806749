"""Borel transforms of a few measures and the reciprocal-ratio sweep.

The imaginary part of the Borel transform at height ``a`` is the measure seen
through a Poisson kernel of width ``a``.  As ``a`` shrinks it sharpens toward
``pi`` times the density; an atom shows up as a spike of height ``w / a``.
"""

from pathlib import Path

import numpy as np

from idslab.measures import cantor, delta, mixture, uniform
from idslab.plotting import emit_plot
from idslab.transforms import poisson_smooth, reciprocal_imag_ratio

OUT = Path(__file__).with_name("out")
OUT.mkdir(exist_ok=True)

measures = {
    "uniform[0,1]": uniform(),
    "point mass": delta(0.5),
    "cantor": cantor(),
    "half atom, half uniform": mixture((0.5, delta(0.0)), (0.5, uniform())),
}

x = np.linspace(-0.5, 1.5, 9)
for name, m in measures.items():
    print(f"\n{name}")
    for a in (1.0, 0.1, 0.01):
        print(f"  a={a:<5} Im F(x+ia) =", np.array2string(poisson_smooth(m, x, a), precision=3))

# The ratio a / Im(1/F) never leaves [-2, 2]; in fact it stays within [-1, 0].
ys = np.linspace(-5, 5, 101)
scales = np.geomspace(1e-4, 10, 61)
for name, m in measures.items():
    vals = reciprocal_imag_ratio(m, ys[:, None], scales[None, :])
    print(f"{name:28s} max |a / Im(1/F)| = {np.abs(vals).max():.6f}")

vals = reciprocal_imag_ratio(measures["cantor"], ys[:, None], scales[None, :])
emit_plot((ys, scales, vals), "sweep", OUT / "reciprocal_ratio_cantor.svg", title="cantor: |a / Im(1/F)|")
print("wrote", OUT / "reciprocal_ratio_cantor.svg")
