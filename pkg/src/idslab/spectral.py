"""Spectral measures and resolvent matrix elements of finite symmetric operators."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .measures import Atomic
from .operators import MAX_DENSE, LatticeOperator, OperatorError

MERGE_TOL = 1e-9
WEIGHT_TOL = 1e-10


class SpectralError(ValueError):
    pass


def _as_operator(H):
    return H if isinstance(H, LatticeOperator) else LatticeOperator.from_matrix(H)


def _as_vector(phi, n):
    """``(site, vector)``; ``site`` is ``None`` unless ``phi`` is a basis vector."""
    if np.ndim(phi) == 0:
        site = int(phi)
        if not 0 <= site < n:
            raise SpectralError(f"site {site} outside operator of size {n}")
        e = np.zeros(n)
        e[site] = 1.0
        return site, e
    v = np.asarray(phi, dtype=float).ravel()
    if v.size != n:
        raise SpectralError("vector length does not match operator")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise SpectralError("phi must be a unit vector")
    nz = np.flatnonzero(v)
    if nz.size == 1 and v[nz[0]] == 1.0:
        return int(nz[0]), v
    return None, v


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Atoms ``(eigenvalue, |<phi, psi_k>|**2)`` sorted by eigenvalue."""

    eigenvalues: np.ndarray
    weights: np.ndarray

    def total(self):
        return float(self.weights.sum())

    def to_measure(self):
        keep = self.weights > 0
        w = self.weights[keep]
        return Atomic(self.eigenvalues[keep], w / w.sum())

    def rows(self):
        return list(zip(self.eigenvalues.tolist(), self.weights.tolist()))


def eigensystem(H):
    """Eigenvalues and eigenvectors, with a tridiagonal fast path."""
    H = _as_operator(H)
    if H.size > MAX_DENSE:
        raise SpectralError(f"dense eigensolve limited to {MAX_DENSE} sites; use resolvent_element")
    if H.bandwidth <= 1 and H.size > 1:
        d, e = H.tridiagonal()
        return sla.eigh_tridiagonal(d, e)
    return np.linalg.eigh(H.to_dense())


def _merge(vals, weights, tol=MERGE_TOL):
    # consecutive eigenvalues closer than tol share one eigenprojection atom
    if vals.size == 0:
        return vals, weights
    starts = np.concatenate([[True], np.diff(vals) > tol])
    groups = np.cumsum(starts) - 1
    w = np.bincount(groups, weights=weights)
    loc = np.bincount(groups, weights=vals) / np.bincount(groups)
    return loc, w


def spectral_measure(H, phi):
    """``<phi, E_H(.) phi>`` for a site index or a unit vector ``phi``."""
    H = _as_operator(H)
    _, v = _as_vector(phi, H.size)
    vals, vecs = eigensystem(H)
    w = (vecs.T @ v) ** 2
    loc, w = _merge(vals, w)
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise SpectralError(f"spectral weights sum to {w.sum()!r}")
    return SpectralMeasure(loc, w)


def green_diagonal(d, e, z, sites):
    """Diagonal Green's function entries of a real tridiagonal matrix.

    Forward and backward continued-fraction sweeps give ``G_nn(z)`` for all
    requested ``sites`` at all points ``z`` in ``O(N * len(z))``; every
    denominator has imaginary part at least ``|Im z|`` in modulus.
    """
    z = np.asarray(z, dtype=complex)
    n = d.size
    e2 = np.asarray(e, dtype=float) ** 2
    left = np.zeros((n,) + z.shape, dtype=complex)
    right = np.zeros((n,) + z.shape, dtype=complex)
    g = np.zeros(z.shape, dtype=complex)
    for j in range(n):
        left[j] = g
        g = 1.0 / (d[j] - z - (e2[j - 1] * g if j > 0 else 0.0))
    g = np.zeros(z.shape, dtype=complex)
    for j in range(n - 1, -1, -1):
        right[j] = g
        g = 1.0 / (d[j] - z - (e2[j] * g if j < n - 1 else 0.0))
    out = []
    for s in np.atleast_1d(sites):
        sigma = (e2[s - 1] * left[s] if s > 0 else 0.0) + (e2[s] * right[s] if s < n - 1 else 0.0)
        out.append(1.0 / (d[s] - z - sigma))
    return np.array(out)


def resolvent_element(H, phi, z):
    """``<phi, (H - z)**-1 phi>`` by a direct tridiagonal or banded solve."""
    H = _as_operator(H)
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise SpectralError("resolvent needs Im z != 0")
    site, v = _as_vector(phi, H.size)
    if site is not None and H.bandwidth <= 1:
        if H.size == 1:
            out = 1.0 / (H.diagonal()[0] - z)
        else:
            d, e = H.tridiagonal()
            out = green_diagonal(d, e, z, [site])[0]
    else:
        (l, u), ab = H.to_banded()
        flat = z.ravel()
        vals = np.empty(flat.shape, dtype=complex)
        for i, zz in enumerate(flat):
            shifted = ab.astype(complex)
            shifted[u] -= zz
            try:
                x = sla.solve_banded((l, u), shifted, v.astype(complex))
            except (np.linalg.LinAlgError, ValueError) as exc:  # pragma: no cover
                raise SpectralError(f"singular resolvent solve at z={zz}") from exc
            vals[i] = v @ x
        out = vals.reshape(z.shape)
    return complex(out) if np.ndim(out) == 0 else out


def rank_one_residual(split, z):
    """``|F_H(z) - 1 / (q + 1 / F_A(z))|`` for ``H = A + q P_phi``."""
    fa = resolvent_element(split.background, split.site, z)
    fh = resolvent_element(split.recombine(), split.site, z)
    out = np.abs(fh - 1.0 / (split.coupling + 1.0 / fa))
    return float(out) if np.ndim(out) == 0 else out


def arcsine_cdf(x):
    """Distribution function of the density ``1 / (pi sqrt(4 - x**2))`` on (-2, 2)."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + np.arcsin(x / 2.0) / np.pi


__all__ = [
    "OperatorError",
    "SpectralError",
    "SpectralMeasure",
    "arcsine_cdf",
    "eigensystem",
    "green_diagonal",
    "rank_one_residual",
    "resolvent_element",
    "spectral_measure",
]
