"""Probability measures on the real line.

Four closed representations are provided: :class:`Atomic`, piecewise-constant
:class:`Density`, the self-similar two-map :class:`IFSCantor` measure and
finite :class:`Mixture` combinations.  All are immutable; every query is
vectorized over numpy arrays.

Intervals in :func:`interval_mass` are open, so atoms sitting exactly on an
endpoint are not counted.
"""

from dataclasses import dataclass, field

import numpy as np

MASS_TOL = 1e-12
DEFAULT_CANTOR_DEPTH = 30
# cell level used when an IFS measure is enumerated as candidate endpoints
FEATURE_LEVEL = 12


class MeasureError(ValueError):
    """Invalid measure literal or invalid query on a measure."""


def _check_positive(eps, name="eps"):
    eps = np.asarray(eps, dtype=float)
    if np.any(~(eps > 0)):
        raise MeasureError(f"{name} must be strictly positive")
    return eps


class Measure:
    """Common interface; concrete variants below."""

    kind = "abstract"

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        """Left limit ``m((-inf, x))``."""
        raise NotImplementedError

    def quantile(self, u):
        """Generalized inverse ``inf{x : F(x) >= u}``."""
        raise NotImplementedError

    def support(self):
        """``(lo, hi)``, the closed hull of the support."""
        raise NotImplementedError

    def atoms(self):
        return np.empty(0), np.empty(0)

    def feature_points(self):
        """Points where the distribution function can bend or jump."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def interval_mass(self, x, eps):
        eps = _check_positive(eps)
        x = np.asarray(x, dtype=float)
        return np.clip(self.cdf_left(x + eps) - self.cdf(x - eps), 0.0, 1.0)

    def __eq__(self, other):
        return isinstance(other, Measure) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))


@dataclass(frozen=True, eq=False)
class Atomic(Measure):
    """Finitely many atoms at strictly increasing ``locations``."""

    locations: np.ndarray
    weights: np.ndarray
    kind = "atomic"

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if loc.shape != w.shape or loc.ndim != 1 or loc.size == 0:
            raise MeasureError("atomic measure needs matching 1-d locations and weights")
        if np.any(w < 0):
            raise MeasureError("atomic weights must be nonnegative")
        if abs(w.sum() - 1.0) > MASS_TOL:
            raise MeasureError(f"atomic weights sum to {w.sum()!r}, not 1")
        if np.any(np.diff(loc) <= 0):
            raise MeasureError("atomic locations must be strictly increasing")
        loc.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(w)]))

    @classmethod
    def from_points(cls, points, normalize=False):
        """Build from ``(location, weight)`` pairs in any order; equal locations merge."""
        arr = np.asarray(points, dtype=float).reshape(-1, 2)
        loc, inv = np.unique(arr[:, 0], return_inverse=True)
        w = np.zeros(loc.size)
        np.add.at(w, inv, arr[:, 1])
        if normalize:
            w = w / w.sum()
        return cls(loc, w)

    def cdf(self, x):
        idx = np.searchsorted(self.locations, x, side="right")
        return self._cum[idx]

    def cdf_left(self, x):
        idx = np.searchsorted(self.locations, x, side="left")
        return self._cum[idx]

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._cum[1:], u, side="left")
        return self.locations[np.clip(idx, 0, self.locations.size - 1)]

    def support(self):
        nz = self.locations[self.weights > 0]
        return float(nz[0]), float(nz[-1])

    def atoms(self):
        return self.locations, self.weights

    def feature_points(self):
        return self.locations

    def to_dict(self):
        return {
            "type": "atomic",
            "points": [[float(x), float(w)] for x, w in zip(self.locations, self.weights)],
        }


@dataclass(frozen=True, eq=False)
class Density(Measure):
    """Piecewise-constant density on ordered, non-overlapping pieces."""

    left: np.ndarray
    right: np.ndarray
    values: np.ndarray
    kind = "density"

    def __post_init__(self):
        l = np.atleast_1d(np.asarray(self.left, dtype=float))
        r = np.atleast_1d(np.asarray(self.right, dtype=float))
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if not (l.shape == r.shape == v.shape) or l.ndim != 1 or l.size == 0:
            raise MeasureError("density pieces need matching 1-d arrays")
        if np.any(r <= l):
            raise MeasureError("density pieces must have positive length")
        if np.any(l[1:] < r[:-1]):
            raise MeasureError("density pieces must be ordered and non-overlapping")
        if np.any(v < 0):
            raise MeasureError("density values must be nonnegative")
        masses = v * (r - l)
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise MeasureError(f"density integrates to {masses.sum()!r}, not 1")
        for a in (l, r, v, masses):
            a.flags.writeable = False
        object.__setattr__(self, "left", l)
        object.__setattr__(self, "right", r)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(masses)]))

    @classmethod
    def from_pieces(cls, pieces, normalize=False):
        arr = np.asarray(pieces, dtype=float).reshape(-1, 3)
        l, r, v = arr.T
        if normalize:
            v = v / np.sum(v * (r - l))
        return cls(l, r, v)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(self.left, x, side="right") - 1
        ic = np.clip(i, 0, self.left.size - 1)
        inside = np.clip(x - self.left[ic], 0.0, self.right[ic] - self.left[ic])
        out = self._cum[ic] + self.values[ic] * inside
        return np.where(i < 0, 0.0, np.minimum(out, 1.0))

    cdf_left = cdf

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        i = np.clip(np.searchsorted(self._cum[1:], u, side="left"), 0, self.left.size - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(self.values[i] > 0, (u - self._cum[i]) / self.values[i], 0.0)
        return np.clip(self.left[i] + step, self.left[i], self.right[i])

    def support(self):
        keep = self.values > 0
        return float(self.left[keep][0]), float(self.right[keep][-1])

    def feature_points(self):
        return np.union1d(self.left, self.right)

    def to_dict(self):
        return {
            "type": "density",
            "pieces": [
                [float(a), float(b), float(c)]
                for a, b, c in zip(self.left, self.right, self.values)
            ],
        }


@dataclass(frozen=True, eq=False)
class IFSCantor(Measure):
    """Self-similar measure of the two maps fixing the ends of ``[left, right]``.

    Each map contracts by ``ratio`` and carries half the mass; ``ratio=1/3``
    gives the middle-thirds Cantor measure.  Queries descend ``depth`` levels
    and then treat the mass of a level-``depth`` cell as uniform on it, so any
    distribution-function value is within ``2**-depth`` of the infinite-depth
    measure.
    """

    left: float = 0.0
    right: float = 1.0
    ratio: float = 1.0 / 3.0
    depth: int = DEFAULT_CANTOR_DEPTH
    kind = "cantor"

    def __post_init__(self):
        if not self.right > self.left:
            raise MeasureError("cantor base interval must have positive length")
        if not 0.0 < self.ratio <= 0.5:
            raise MeasureError("cantor contraction ratio must lie in (0, 1/2]")
        if int(self.depth) < 1:
            raise MeasureError("cantor depth must be at least 1")
        object.__setattr__(self, "depth", int(self.depth))
        object.__setattr__(self, "left", float(self.left))
        object.__setattr__(self, "right", float(self.right))
        object.__setattr__(self, "ratio", float(self.ratio))

    @property
    def length(self):
        return self.right - self.left

    @property
    def dimension(self):
        """Exact Hoelder exponent ``log 2 / log(1/ratio)``."""
        return np.log(2.0) / np.log(1.0 / self.ratio)

    def with_depth(self, depth):
        return IFSCantor(self.left, self.right, self.ratio, depth)

    def cdf(self, x):
        rho = self.ratio
        t = (np.asarray(x, dtype=float) - self.left) / self.length
        out = np.where(t >= 1.0, 1.0, 0.0)
        active = (t > 0.0) & (t < 1.0)
        scale = 1.0
        for _ in range(self.depth):
            if not active.any():
                break
            go_left = active & (t < rho)
            go_right = active & (t > 1.0 - rho)
            gap = active & ~go_left & ~go_right
            out = out + np.where(gap | go_right, 0.5 * scale, 0.0)
            t = np.where(go_left, t / rho, np.where(go_right, (t - (1.0 - rho)) / rho, t))
            active = go_left | go_right
            scale *= 0.5
        return out + np.where(active, scale * np.clip(t, 0.0, 1.0), 0.0)

    cdf_left = cdf

    def quantile(self, u):
        u = np.array(u, dtype=float, copy=True)
        pos = np.zeros_like(u)
        h = 1.0
        for _ in range(self.depth):
            right = u >= 0.5
            pos = pos + np.where(right, (1.0 - self.ratio) * h, 0.0)
            u = np.where(right, 2.0 * u - 1.0, 2.0 * u)
            h *= self.ratio
        return self.left + self.length * (pos + h * np.clip(u, 0.0, 1.0))

    def cells(self, level):
        """Left endpoints, common length and common mass of the level cells."""
        level = min(int(level), self.depth)
        lefts = np.array([self.left])
        h = self.length
        for _ in range(level):
            lefts = np.concatenate([lefts, lefts + (1.0 - self.ratio) * h])
            h *= self.ratio
        return np.sort(lefts), h, 0.5**level

    def support(self):
        return self.left, self.right

    def feature_points(self):
        lefts, h, _ = self.cells(min(FEATURE_LEVEL, self.depth))
        return np.union1d(lefts, lefts + h)

    def to_dict(self):
        return {
            "type": "cantor",
            "interval": [self.left, self.right],
            "ratio": self.ratio,
            "depth": self.depth,
        }


@dataclass(frozen=True, eq=False)
class Mixture(Measure):
    """Convex combination of component measures."""

    weights: np.ndarray
    components: tuple = field(default=())
    kind = "mixture"

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        comps = tuple(self.components)
        if w.size != len(comps) or w.size == 0:
            raise MeasureError("mixture needs one weight per component")
        if np.any(w < 0):
            raise MeasureError("mixture weights must be nonnegative")
        if abs(w.sum() - 1.0) > MASS_TOL:
            raise MeasureError(f"mixture weights sum to {w.sum()!r}, not 1")
        if not all(isinstance(c, Measure) for c in comps):
            raise MeasureError("mixture components must be measures")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    def _combine(self, fn, x):
        return sum(w * fn(c, x) for w, c in zip(self.weights, self.components))

    def cdf(self, x):
        return np.minimum(self._combine(lambda c, t: c.cdf(t), x), 1.0)

    def cdf_left(self, x):
        return np.minimum(self._combine(lambda c, t: c.cdf_left(t), x), 1.0)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        lo_s, hi_s = self.support()
        lo = np.full(u.shape, lo_s - 1.0)
        hi = np.full(u.shape, hi_s)
        # invariant: cdf(lo) < u <= cdf(hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if np.all((mid == lo) | (mid == hi)):
                break
            up = self.cdf(mid) >= u
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        return hi

    def support(self):
        spans = [c.support() for w, c in zip(self.weights, self.components) if w > 0]
        return min(s[0] for s in spans), max(s[1] for s in spans)

    def atoms(self):
        locs, ws = [], []
        for w, c in zip(self.weights, self.components):
            l, a = c.atoms()
            locs.append(l)
            ws.append(w * a)
        return np.concatenate(locs), np.concatenate(ws)

    def feature_points(self):
        return np.unique(np.concatenate([c.feature_points() for c in self.components]))

    def to_dict(self):
        return {
            "type": "mixture",
            "components": [
                {"weight": float(w), "measure": c.to_dict()}
                for w, c in zip(self.weights, self.components)
            ],
        }


def delta(x=0.0):
    return Atomic([float(x)], [1.0])


def uniform(lo=0.0, hi=1.0):
    return Density([lo], [hi], [1.0 / (hi - lo)])


def cantor(lo=0.0, hi=1.0, ratio=1.0 / 3.0, depth=DEFAULT_CANTOR_DEPTH):
    return IFSCantor(lo, hi, ratio, depth)


def mixture(*pairs):
    """``mixture((w1, m1), (w2, m2), ...)``."""
    return Mixture([w for w, _ in pairs], tuple(m for _, m in pairs))


# ----------------------------------------------------------------------------
# operations


def interval_mass(m, x, eps):
    """Mass of the open interval ``(x - eps, x + eps)``."""
    out = m.interval_mass(x, eps)
    return float(out) if np.ndim(out) == 0 else out


def cdf(m, x):
    out = m.cdf(x)
    return float(out) if np.ndim(out) == 0 else out


def sample(m, stream, size=None, realization=0):
    """Inverse-CDF samples driven by a :class:`~idslab.rng.CounterStream`."""
    n = 1 if size is None else int(size)
    x = m.quantile(stream.uniforms(n, realization))
    return float(x[0]) if size is None else x


def scale_measure(m, c):
    """``B -> m(c B)``, the pushforward of ``m`` under ``x -> x / c``."""
    c = float(c)
    if c == 0.0:
        raise MeasureError("scaling constant must be nonzero")
    if isinstance(m, Atomic):
        loc, w = m.locations / c, m.weights
        if c < 0:
            loc, w = loc[::-1], w[::-1]
        return Atomic(loc, w)
    if isinstance(m, Density):
        l, r, v = m.left / c, m.right / c, m.values * abs(c)
        if c < 0:
            l, r, v = r[::-1], l[::-1], v[::-1]
        return Density(l, r, v)
    if isinstance(m, IFSCantor):
        # the two-map measure is symmetric, so reflection keeps the family
        a, b = sorted((m.left / c, m.right / c))
        return IFSCantor(a, b, m.ratio, m.depth)
    if isinstance(m, Mixture):
        return Mixture(m.weights, tuple(scale_measure(x, c) for x in m.components))
    raise MeasureError(f"cannot scale {type(m).__name__}")


def translate_measure(m, c):
    """``B -> m(B + c)``, the pushforward of ``m`` under ``x -> x - c``."""
    c = float(c)
    if c == 0.0:
        return m
    if isinstance(m, Atomic):
        return Atomic(m.locations - c, m.weights)
    if isinstance(m, Density):
        return Density(m.left - c, m.right - c, m.values)
    if isinstance(m, IFSCantor):
        return IFSCantor(m.left - c, m.right - c, m.ratio, m.depth)
    if isinstance(m, Mixture):
        return Mixture(m.weights, tuple(translate_measure(x, c) for x in m.components))
    raise MeasureError(f"cannot translate {type(m).__name__}")


def modulus_of_continuity(m, eps):
    """Supremum of ``m(I)`` over open intervals ``I`` shorter than ``eps``.

    The supremum is approached by half-open windows ``[p, p + eps)`` or
    ``(p - eps, p]`` anchored at a feature point ``p``; this is exact for
    atomic and density variants and accurate to the enumeration level for IFS.
    """
    eps = float(_check_positive(eps))
    p = m.feature_points()
    fwd = m.cdf_left(p + eps) - m.cdf_left(p)
    back = m.cdf(p) - m.cdf(p - eps)
    return float(np.clip(max(fwd.max(), back.max()), 0.0, 1.0))


# ----------------------------------------------------------------------------
# literals


def measure_from_dict(d, named=None):
    """Parse a measure literal; ``named`` resolves string references."""
    if isinstance(d, str):
        if named is None or d not in named:
            raise MeasureError(f"unknown measure reference {d!r}")
        return named[d]
    if isinstance(d, Measure):
        return d
    if not isinstance(d, dict) or "type" not in d:
        raise MeasureError("measure literal must be a mapping with a 'type' key")
    kind = d["type"]
    try:
        if kind == "atomic":
            return Atomic.from_points(d["points"])
        if kind == "delta":
            return delta(d.get("at", 0.0))
        if kind == "density":
            return Density.from_pieces(d["pieces"])
        if kind == "uniform":
            lo, hi = d.get("interval", (0.0, 1.0))
            return uniform(lo, hi)
        if kind == "cantor":
            lo, hi = d.get("interval", (0.0, 1.0))
            return IFSCantor(lo, hi, d.get("ratio", 1.0 / 3.0), d.get("depth", DEFAULT_CANTOR_DEPTH))
        if kind == "mixture":
            comps = d["components"]
            return Mixture(
                [c["weight"] for c in comps],
                tuple(measure_from_dict(c["measure"], named) for c in comps),
            )
    except (KeyError, TypeError) as exc:
        raise MeasureError(f"malformed {kind} literal: {exc}") from exc
    raise MeasureError(f"unknown measure type {kind!r}")
