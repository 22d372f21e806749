"""Borel transforms, Poisson smoothing and Hoelder-constant estimators.

The Borel (Stieltjes) transform of a probability measure ``m`` is

.. math::

    F_m(z) = \\int \\frac{dm(x)}{x - z}, \\qquad \\mathrm{Im}\\, z \\neq 0,

and ``Im F_m(x + ia)`` is the convolution of ``m`` with the Cauchy/Poisson
kernel of width ``a``.  Both Hoelder estimators return suprema over a finite
:class:`GridSpec`, i.e. lower bounds on the true supremum.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from .measures import Atomic, Density, IFSCantor, Mixture

# cells of an IFS measure are refined until length <= REFINE_THETA * distance to z
REFINE_THETA = 0.02
DIVERGENCE_THRESHOLD = 0.03
_CHUNK = 1 << 22


class TransformError(ValueError):
    pass


def _clog1p(w):
    """``log(1 + w)`` for complex ``w`` without cancellation at small ``|w|``."""
    re, im = w.real, w.imag
    mod = 0.5 * np.log1p(2.0 * re + re * re + im * im)
    return mod + 1j * np.arctan2(im, 1.0 + re)


def _as_points(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise TransformError("Borel transform needs Im z != 0")
    return z


def _pairwise(z, n, fn):
    """Sum ``fn(z_block[:, None], j_slice)`` over the measure axis in chunks."""
    flat = z.ravel()
    out = np.empty(flat.shape, dtype=complex)
    step = max(1, _CHUNK // max(n, 1))
    for s in range(0, flat.size, step):
        out[s : s + step] = fn(flat[s : s + step, None]).sum(axis=1)
    return out.reshape(z.shape)


def _borel_atomic(m, z):
    x, w = m.locations, m.weights
    return _pairwise(z, x.size, lambda zz: w / (x - zz))


def _borel_density(m, z):
    l, r, v = m.left, m.right, m.values
    return _pairwise(z, l.size, lambda zz: v * _clog1p((r - l) / (l - zz)))


def _borel_cantor(m, z, theta=REFINE_THETA):
    flat = z.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    zi = np.arange(flat.size)
    lefts = np.full(flat.size, m.left)
    h, mass = m.length, 1.0
    for level in range(m.depth + 1):
        zz = flat[zi]
        gap = np.maximum(np.maximum(lefts - zz.real, zz.real - lefts - h), 0.0)
        dist = np.hypot(gap, zz.imag)
        done = (h <= theta * dist) | (level == m.depth)
        if done.any():
            # cell mass spread uniformly over the cell
            val = (mass / h) * _clog1p(h / (lefts[done] - zz[done]))
            np.add.at(out, zi[done], val)
        keep = ~done
        if not keep.any():
            break
        zi = np.concatenate([zi[keep], zi[keep]])
        lefts = np.concatenate([lefts[keep], lefts[keep] + (1.0 - m.ratio) * h])
        h *= m.ratio
        mass *= 0.5
    return out.reshape(z.shape)


def borel_transform(m, z):
    """``F_m(z) = int dm(x) / (x - z)`` at one point or an array of points.

    Closed forms are used for atomic and piecewise-constant measures; IFS
    measures are evaluated by adaptive cell refinement, which is the exact
    transform of a probability measure agreeing with ``m`` on every cell
    whose diameter exceeds ``REFINE_THETA`` times its distance to ``z``.
    """
    zs = _as_points(z)
    if isinstance(m, Atomic):
        out = _borel_atomic(m, zs)
    elif isinstance(m, Density):
        out = _borel_density(m, zs)
    elif isinstance(m, IFSCantor):
        out = _borel_cantor(m, zs)
    elif isinstance(m, Mixture):
        out = sum(w * borel_transform(c, zs) for w, c in zip(m.weights, m.components) if w > 0)
    else:
        raise TransformError(f"no Borel transform for {type(m).__name__}")
    return complex(out) if np.ndim(out) == 0 else out


def poisson_smooth(m, x, a):
    """``Im F_m(x + ia)``: ``m`` convolved with the Poisson kernel of width ``a``."""
    a = np.asarray(a, dtype=float)
    if np.any(~(a > 0)):
        raise TransformError("smoothing width must be positive")
    out = np.imag(borel_transform(m, np.asarray(x, dtype=float) + 1j * a))
    return float(out) if np.ndim(out) == 0 else out


def reciprocal_imag_ratio(sigma, y, a):
    """``a / Im(1 / F_sigma(y + ia))``.

    Evaluated as ``-(Re(aF)**2 + Im(aF)**2) / Im(aF)``, which stays accurate
    when ``|F|`` is tiny.  Its modulus never exceeds 2 (and in fact 1, by
    Cauchy-Schwarz) for any probability measure.
    """
    y = np.asarray(y, dtype=float)
    a = np.asarray(a, dtype=float)
    if np.any(a == 0):
        raise TransformError("scale a must be nonzero")
    af = a * borel_transform(sigma, y + 1j * a)
    out = -(af.real**2 + af.imag**2) / af.imag
    return float(out) if np.ndim(out) == 0 else out


def aggregated_transform(sigma, mu, y, a):
    """``Im int dmu(x) / (x + w)`` with ``w = 1 / F_sigma(y + ia)``.

    This is ``Im F_mu(-w)``, the averaged diagonal resolvent element of a
    rank-one coupling distributed by ``mu`` on top of a background with
    spectral measure ``sigma``.
    """
    a = np.asarray(a, dtype=float)
    if np.any(~(a > 0)):
        raise TransformError("scale a must be positive")
    w = 1.0 / borel_transform(sigma, np.asarray(y, dtype=float) + 1j * a)
    out = np.imag(borel_transform(mu, -w))
    return float(out) if np.ndim(out) == 0 else out


# ----------------------------------------------------------------------------
# grids and estimators


@dataclass(frozen=True)
class GridSpec:
    """Finite grid for the two suprema over centers ``x`` and scales ``eps``."""

    x_range: tuple = (-1.0, 2.0)
    x_count: int = 401
    eps_range: tuple = (1e-4, 1.0)
    eps_count: int = 81
    spacing: str = "log"

    def __post_init__(self):
        x0, x1 = map(float, self.x_range)
        e0, e1 = map(float, self.eps_range)
        if not x1 > x0 or not e1 > e0:
            raise TransformError("grid ranges must be nonempty")
        if self.x_count < 2 or self.eps_count < 2:
            raise TransformError("grid counts must be at least 2")
        if e0 <= 0:
            raise TransformError("eps_min must be positive")
        if self.spacing not in ("log", "linear"):
            raise TransformError(f"unknown spacing {self.spacing!r}")
        object.__setattr__(self, "x_range", (x0, x1))
        object.__setattr__(self, "eps_range", (e0, e1))
        object.__setattr__(self, "x_count", int(self.x_count))
        object.__setattr__(self, "eps_count", int(self.eps_count))

    @classmethod
    def around(cls, m, widen=1.0, x_count=401, eps_range=(1e-4, 1.0), eps_count=81,
               unbounded=False):
        """Default grid: the support of ``m`` widened by ``widen`` on each side.

        ``unbounded=True`` extends the scales past 1 to cover the whole support,
        matching the ``eps in (0, inf)`` form of the Hoelder constant.
        """
        lo, hi = m.support()
        e0, e1 = eps_range
        count = eps_count
        if unbounded:
            top = max(e1, 2.0 * (hi - lo + 2.0 * widen))
            count = eps_count + int(np.ceil((eps_count - 1) * np.log10(top / e1) / np.log10(e1 / e0)))
            e1 = top
        return cls((lo - widen, hi + widen), x_count, (e0, e1), count, "log")

    def xs(self):
        return np.linspace(*self.x_range, self.x_count)

    def eps(self):
        if self.spacing == "log":
            return np.geomspace(*self.eps_range, self.eps_count)
        return np.linspace(*self.eps_range, self.eps_count)

    def refined(self):
        """Nested refinement containing every point of this grid."""
        return GridSpec(self.x_range, 2 * self.x_count - 1, self.eps_range,
                        2 * self.eps_count - 1, self.spacing)

    def step_ratio(self):
        e = self.eps()
        return float(np.max(e[1:] / e[:-1]))

    def to_dict(self):
        return asdict(self) | {"x_range": list(self.x_range), "eps_range": list(self.eps_range)}


@dataclass
class HoelderEstimate:
    """Grid supremum for a Hoelder constant, or the divergence sentinel.

    ``constant`` is ``inf`` when the fine-scale growth slope exceeds the
    threshold; ``grid_sup`` always holds the largest value actually seen.
    ``resolution`` bounds how much a supremum attained between two adjacent
    scales could exceed the grid value.
    """

    alpha: float
    constant: float
    method: str
    grid: GridSpec
    grid_sup: float
    divergence_slope: float
    resolution: float
    profile: np.ndarray = field(repr=False, default=None)

    @property
    def finite(self):
        return np.isfinite(self.constant)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "constant": self.constant if self.finite else "inf",
            "grid_sup": self.grid_sup,
            "method": self.method,
            "divergence_slope": self.divergence_slope,
            "resolution": self.resolution,
            "grid": self.grid.to_dict(),
        }


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise TransformError(f"alpha outside (0,1]: {alpha}")
    return alpha


def divergence_slope(scales, profile):
    """Growth rate of the running supremum as the scale shrinks.

    ``profile[j]`` is the supremum over centers at ``scales[j]``.  The running
    maximum over all coarser scales is fitted against ``log(1/scale)`` by least
    squares on the finest decade; a bounded profile gives slope ~0, an atom
    seen at exponent ``alpha`` gives slope ``alpha``.
    """
    order = np.argsort(scales)[::-1]
    s = np.asarray(scales)[order]
    g = np.asarray(profile)[order]
    env = np.maximum.accumulate(g)
    fine = s <= 10.0 * s[-1]
    if fine.sum() < 2:
        fine = np.ones_like(s, dtype=bool)
    with np.errstate(divide="ignore"):
        ly = np.log(env[fine])
    if not np.all(np.isfinite(ly)):
        return 0.0
    lx = -np.log(s[fine])
    return float(np.polyfit(lx, ly, 1)[0])


def estimate_from_values(alpha, values, scales, method, grid, threshold=DIVERGENCE_THRESHOLD):
    """Assemble a :class:`HoelderEstimate` from grid values shaped (center, scale)."""
    profile = values.max(axis=0)
    top = float(profile.max())
    slope = divergence_slope(scales, profile)
    const = np.inf if slope > threshold else top
    res = top * (grid.step_ratio() ** alpha - 1.0)
    return HoelderEstimate(alpha, const, method, grid, top, slope, res, profile)


def centers(m, grid):
    """Grid centers plus the atoms of ``m`` inside the grid range.

    An atom between two grid centers is invisible at scales below its
    distance to them, which would hide the divergence; adding the atoms keeps
    every value a genuine ratio, so suprema stay lower bounds.
    """
    xs = grid.xs()
    locs, w = m.atoms()
    lo, hi = grid.x_range
    locs = locs[(w > 0) & (locs >= lo) & (locs <= hi)]
    return np.union1d(xs, locs) if locs.size else xs


def direct_ratios(m, alpha, grid):
    """``m((x - eps, x + eps)) / (2 eps)**alpha`` on the grid, shape (x, eps)."""
    xs, eps = centers(m, grid), grid.eps()
    mass = m.interval_mass(xs[:, None], eps[None, :])
    return mass / (2.0 * eps[None, :]) ** alpha


def borel_values(m, alpha, grid):
    """``a**(1 - alpha) * Im F_m(x + ia)`` at :func:`centers`, with ``a`` the scale axis."""
    xs, a = centers(m, grid), grid.eps()
    im = np.imag(borel_transform(m, xs[:, None] + 1j * a[None, :]))
    return a[None, :] ** (1.0 - alpha) * im


def hoelder_constant_direct(m, alpha, grid=None, threshold=DIVERGENCE_THRESHOLD):
    """Grid estimate of ``sup_x sup_eps m((x-eps, x+eps)) / (2 eps)**alpha``."""
    alpha = _check_alpha(alpha)
    grid = GridSpec.around(m) if grid is None else grid
    return estimate_from_values(alpha, direct_ratios(m, alpha, grid), grid.eps(), "direct-sup", grid, threshold)


def hoelder_constant_borel(m, alpha, grid=None, threshold=DIVERGENCE_THRESHOLD):
    """Grid estimate of ``sup_{x, a>0} a**(1-alpha) Im F_m(x + ia)``.

    Finite exactly when the direct constant is; on a shared grid the two obey
    ``direct <= 2**(1-alpha) * borel`` pointwise, while ``borel <= 2**alpha *
    pi * d`` holds against the true constant ``d``.
    """
    alpha = _check_alpha(alpha)
    grid = GridSpec.around(m) if grid is None else grid
    return estimate_from_values(alpha, borel_values(m, alpha, grid), grid.eps(), "borel-sup", grid, threshold)


def sweep(fn, ys, scales):
    """Evaluate ``fn(y, a)`` on the outer grid; returns long-format columns."""
    Y, A = np.meshgrid(np.asarray(ys, float), np.asarray(scales, float), indexing="ij")
    return Y.ravel(), A.ravel(), np.asarray(fn(Y, A)).ravel()


__all__ = [
    "GridSpec",
    "HoelderEstimate",
    "TransformError",
    "aggregated_transform",
    "borel_transform",
    "borel_values",
    "centers",
    "direct_ratios",
    "divergence_slope",
    "estimate_from_values",
    "hoelder_constant_borel",
    "hoelder_constant_direct",
    "poisson_smooth",
    "reciprocal_imag_ratio",
    "sweep",
]
