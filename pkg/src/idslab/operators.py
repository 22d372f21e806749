"""Finite-box random lattice operators ``H = Delta + W + B V`` and rank-one splits.

Sites of the cube ``{0, ..., L-1}**dim`` are flattened row-major.  The
background ``W`` is periodic or quasi-periodic in the box index; the
modulation ``a_n`` depends on the sup-norm offset ``|n|`` from the box
center ``(L-1)//2``.  Truncation at the box edge is Dirichlet.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .measures import Measure, delta
from .rng import CounterStream

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
DISORDER_STREAM = 0x5EED
MAX_DENSE = 4096


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodicBackground:
    """``W(i) = values[i mod period]``, ``values`` shaped like one period cell."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.atleast_1d(np.asarray(self.values, dtype=float)))

    def __call__(self, index):
        v = self.values
        if index.shape[1] != v.ndim:
            raise OperatorError("periodic background rank does not match lattice dimension")
        return v[tuple((index % np.array(v.shape)).T)]

    def to_dict(self):
        return {"type": "periodic", "values": self.values.tolist()}


@dataclass(frozen=True)
class QuasiPeriodicBackground:
    """``W(i) = amplitude * cos(2 pi theta . i + phase)``."""

    amplitude: float = 1.0
    frequency: float = GOLDEN
    phase: float = 0.0

    def __call__(self, index):
        theta = np.broadcast_to(np.asarray(self.frequency, dtype=float), (index.shape[1],))
        return self.amplitude * np.cos(2.0 * np.pi * (index @ theta) + self.phase)

    def to_dict(self):
        freq = np.asarray(self.frequency, dtype=float)
        return {
            "type": "quasiperiodic",
            "amplitude": float(self.amplitude),
            "frequency": freq.tolist() if freq.ndim else float(freq),
            "phase": float(self.phase),
        }


@dataclass(frozen=True)
class Modulation:
    """Diagonal weights ``a_n``: stationary, decaying, growing or an explicit table."""

    kind: str = "stationary"
    delta: float = 0.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("stationary", "decaying", "growing", "explicit"):
            raise OperatorError(f"unknown modulation {self.kind!r}")
        if self.kind in ("decaying", "growing") and not self.delta > 0:
            raise OperatorError("decaying/growing modulation needs delta > 0")
        if self.kind == "explicit":
            vals = tuple(float(v) for v in np.ravel(self.values))
            if any(v == 0.0 for v in vals):
                raise OperatorError("modulation values a_n must be nonzero")
            object.__setattr__(self, "values", vals)

    def __call__(self, offset, n_sites):
        dist = np.abs(offset).max(axis=1).astype(float)
        if self.kind == "stationary":
            return np.ones(n_sites)
        if self.kind == "decaying":
            return (1.0 + dist) ** (-self.delta)
        if self.kind == "growing":
            return (1.0 + dist) ** self.delta
        if len(self.values) != n_sites:
            raise OperatorError(f"explicit modulation has {len(self.values)} entries for {n_sites} sites")
        return np.asarray(self.values)

    def to_dict(self):
        d = {"type": self.kind}
        if self.kind in ("decaying", "growing"):
            d["delta"] = float(self.delta)
        if self.kind == "explicit":
            d["values"] = list(self.values)
        return d


@dataclass(frozen=True)
class OperatorConfig:
    dimension: int = 1
    side: int = 1
    single_site: Measure = field(default_factory=delta)
    background: object = None
    modulation: Modulation = field(default_factory=Modulation)
    coupling: float = 1.0

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise OperatorError("lattice dimension must be 1 or 2")
        if int(self.side) < 1:
            raise OperatorError("box side must be a positive integer")
        object.__setattr__(self, "side", int(self.side))
        self.modulation_values()

    @property
    def n_sites(self):
        return self.side**self.dimension

    def index(self):
        """Box coordinates, shape ``(n_sites, dimension)``."""
        grid = np.indices((self.side,) * self.dimension).reshape(self.dimension, -1)
        return grid.T

    def offset(self):
        return self.index() - (self.side - 1) // 2

    def site(self, coord):
        """Flat index of a box coordinate tuple."""
        coord = np.atleast_1d(coord)
        if coord.size != self.dimension or np.any((coord < 0) | (coord >= self.side)):
            raise OperatorError(f"site {tuple(coord)} outside the box")
        return int(np.ravel_multi_index(tuple(coord), (self.side,) * self.dimension))

    def center(self):
        return self.site([(self.side - 1) // 2] * self.dimension)

    def background_values(self):
        if self.background is None:
            return np.zeros(self.n_sites)
        return np.asarray(self.background(self.index()), dtype=float)

    def modulation_values(self):
        return self.modulation(self.offset(), self.n_sites)


@dataclass(frozen=True)
class DisorderSample:
    seed: int
    realization: int
    values: np.ndarray


def sample_disorder(cfg, seed, realization=0):
    """i.i.d. site values from ``cfg.single_site``; site ``k`` uses stream word ``k``."""
    stream = CounterStream(seed, DISORDER_STREAM)
    u = stream.uniforms(cfg.n_sites, realization)
    return DisorderSample(int(seed), int(realization), np.asarray(cfg.single_site.quantile(u), dtype=float))


def _hopping(cfg):
    L = cfg.side
    if L == 1:
        return sp.csr_matrix((cfg.n_sites, cfg.n_sites))
    t = sp.diags([np.ones(L - 1), np.ones(L - 1)], [-1, 1], shape=(L, L), format="csr")
    if cfg.dimension == 1:
        return t
    eye = sp.identity(L, format="csr")
    return (sp.kron(t, eye) + sp.kron(eye, t)).tocsr()


@dataclass(frozen=True, eq=False)
class LatticeOperator:
    """Real symmetric operator; diagonal kept as ``background + potential``."""

    matrix: sp.csr_matrix
    background: np.ndarray
    potential: np.ndarray
    dimension: int = None
    side: int = None

    def __post_init__(self):
        m = sp.csr_matrix(self.matrix, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise OperatorError("operator must be square")
        if m.nnz and abs(m - m.T).max() != 0.0:
            raise OperatorError("operator must be symmetric")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, arr):
        """Wrap a dense symmetric matrix; its whole diagonal counts as potential."""
        a = np.atleast_2d(np.asarray(arr, dtype=float))
        return cls(sp.csr_matrix(a), np.zeros(a.shape[0]), np.diag(a).copy())

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def bandwidth(self):
        coo = self.matrix.tocoo()
        return int(np.abs(coo.row - coo.col).max()) if coo.nnz else 0

    def diagonal(self):
        return self.matrix.diagonal()

    def to_dense(self):
        return self.matrix.toarray()

    def tridiagonal(self):
        """``(diagonal, off-diagonal)`` when the bandwidth is at most one."""
        if self.bandwidth > 1:
            raise OperatorError("operator is not tridiagonal")
        return self.matrix.diagonal(), self.matrix.diagonal(1)

    def to_banded(self):
        """Diagonal-ordered form ``(l, u), ab`` accepted by ``scipy.linalg.solve_banded``."""
        b = self.bandwidth
        n = self.size
        ab = np.zeros((2 * b + 1, n))
        for k in range(-b, b + 1):
            d = self.matrix.diagonal(k)
            if k >= 0:
                ab[b - k, k:] = d
            else:
                ab[b - k, : n + k] = d
        return (b, b), ab

    def coordinate_text(self):
        """Coordinate text export, one ``row col value`` triple per line."""
        coo = sp.triu(self.matrix).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return "".join(
            f"{r} {c} {float(v)!r}\n" for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order])
        )

    def with_potential(self, site, q):
        """Copy whose potential at ``site`` is replaced by ``q``."""
        pot = self.potential.copy()
        pot[site] = q
        m = self.matrix.tolil(copy=True)
        m[site, site] = self.background[site] + q
        return LatticeOperator(m.tocsr(), self.background, pot, self.dimension, self.side)


def build_hamiltonian(cfg, sample):
    """``Delta + W + coupling * a_n * omega(n)`` on the box of ``cfg``."""
    vals = np.asarray(sample.values if isinstance(sample, DisorderSample) else sample, dtype=float)
    if vals.shape != (cfg.n_sites,):
        raise OperatorError(f"disorder sample has shape {vals.shape}, box needs ({cfg.n_sites},)")
    w = cfg.background_values()
    pot = cfg.coupling * cfg.modulation_values() * vals
    m = _hopping(cfg) + sp.diags(w + pot, format="csr")
    return LatticeOperator(m.tocsr(), w, pot, cfg.dimension, cfg.side)


def background_operator(cfg, sample, site):
    """Operator built with the disorder at ``site`` masked out.

    The result never reads ``omega(site)``, so it is independent of the
    coupling ``coupling * a_site * omega(site)`` by construction.
    """
    vals = np.array(sample.values if isinstance(sample, DisorderSample) else sample, dtype=float)
    vals[site] = 0.0
    return build_hamiltonian(cfg, vals)


@dataclass(frozen=True, eq=False)
class RankOneSplit:
    """``H = A + q |phi><phi|`` with ``phi`` the unit vector at ``site``."""

    background: LatticeOperator
    coupling: float
    site: int

    @property
    def phi(self):
        e = np.zeros(self.background.size)
        e[self.site] = 1.0
        return e

    def recombine(self):
        return self.background.with_potential(self.site, self.coupling)


def split_rank_one(H, site):
    """Remove the random diagonal entry at ``site``: ``A = H - q P_site``."""
    site = int(site)
    if not 0 <= site < H.size:
        raise OperatorError(f"site {site} outside operator of size {H.size}")
    q = float(H.potential[site])
    return RankOneSplit(H.with_potential(site, 0.0), q, site)
