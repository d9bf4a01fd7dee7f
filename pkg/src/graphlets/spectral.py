"""Normalized adjacency spectra, trace powers and residual norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import InputError, NumericalFailure
from .graph import Graph

DENSE_LIMIT = 4096


def normalized_adjacency(G: Graph) -> np.ndarray:
    """M = D^{-1/2} A D^{-1/2}."""
    s = 1.0 / np.sqrt(G.degrees)
    return G.adjacency * s[:, None] * s[None, :]


def _orient(phi: np.ndarray) -> np.ndarray:
    """Flip each column so its first non-negligible entry is positive."""
    phi = phi.copy()
    tol = 1e-12 * np.max(np.abs(phi), axis=0)
    for j in range(phi.shape[1]):
        nz = np.flatnonzero(np.abs(phi[:, j]) > tol[j])
        if nz.size and phi[nz[0], j] < 0:
            phi[:, j] = -phi[:, j]
    return phi


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Eigenpairs of M, descending.

    ``combinatorial`` holds D^{-1/2} phi, the eigenfunctions of the random-walk
    operator D^{-1} A.  When ``partial`` is set only the extremal pairs were
    computed (top block first, then bottom block).
    """

    rho: np.ndarray
    phi: np.ndarray
    combinatorial: np.ndarray
    residual: float
    partial: bool = False

    def to_json(self) -> dict:
        return {"rho": self.rho.tolist(), "phi": self.phi.tolist(), "residual": self.residual}


def spectrum(G: Graph, k: int | None = None) -> SpectralSummary:
    """Eigendecomposition of the normalized adjacency.

    Dense for n <= 4096.  Above that only the 2k+2 extremal pairs are returned
    (``k`` defaults to 4).
    """
    M = normalized_adjacency(G)
    n = G.n
    try:
        if n <= DENSE_LIMIT:
            w, V = scipy.linalg.eigh(M)
            partial = False
        else:
            k = 4 if k is None else k
            h = k + 1
            wt, Vt = scipy.sparse.linalg.eigsh(M, k=h, which="LA")
            wb, Vb = scipy.sparse.linalg.eigsh(M, k=h, which="SA")
            w = np.concatenate([wb, wt])
            V = np.concatenate([Vb, Vt], axis=1)
            partial = True
    except (np.linalg.LinAlgError, scipy.sparse.linalg.ArpackNoConvergence) as exc:
        raise NumericalFailure(f"eigensolver failed on n={n}: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    rho = w[order]
    phi = _orient(V[:, order])
    if partial:
        res = float(np.max(np.linalg.norm(M @ phi - phi * rho, axis=0)))
    else:
        res = float(np.linalg.norm(M - (phi * rho) @ phi.T, 2))
        if res > 1e-10 * n:
            raise NumericalFailure(f"eigendecomposition residual {res:.3g} exceeds tolerance")
    comb = phi / np.sqrt(G.degrees)[:, None]
    return SpectralSummary(rho, phi, comb, res, partial)


def trace_power(G: Graph, k: int) -> float:
    """sum_i rho_i^k = trace(M^k)."""
    if int(k) != k or k < 1:
        raise InputError("k must be a positive integer")
    k = int(k)
    if G.n <= DENSE_LIMIT:
        rho = scipy.linalg.eigvalsh(normalized_adjacency(G))
        return float(np.sum(rho**k))
    M = normalized_adjacency(G)
    half = np.linalg.matrix_power(M, k // 2)
    other = half @ M if k % 2 else half
    return float(np.sum(half * other.T))


def residual_norm(G: Graph, B) -> float:
    """Spectral norm of D^{-1/2} (A - B) D^{-1/2}."""
    B = np.asarray(B, dtype=float)
    if B.shape != G.adjacency.shape:
        raise InputError(f"approximant has shape {B.shape}, expected {G.adjacency.shape}")
    s = 1.0 / np.sqrt(G.degrees)
    R = (G.adjacency - B) * s[:, None] * s[None, :]
    R = (R + R.T) / 2
    try:
        ev = scipy.linalg.eigvalsh(R)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver failed: {exc}") from exc
    return float(max(abs(ev[0]), abs(ev[-1])))


def rank_one_approximant(G: Graph) -> np.ndarray:
    """D J D / vol."""
    d = G.degrees
    return np.outer(d, d) / G.vol


def quadratic_form(G: Graph, f, g, matrix: bool = False) -> float:
    """<f, Delta g>_mu, as an edge sum (default) or as f^T (D - A) g / vol."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (G.n,) or g.shape != (G.n,):
        raise InputError("vectors must have one entry per vertex")
    if matrix:
        return float(f @ (G.degrees * g - G.adjacency @ g)) / G.vol
    iu, iv = np.nonzero(np.triu(G.adjacency, 1))
    w = G.adjacency[iu, iv]
    return float(np.sum((f[iu] - f[iv]) * (g[iu] - g[iv]) * w)) / G.vol
