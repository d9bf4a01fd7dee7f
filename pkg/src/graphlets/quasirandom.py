"""Quasirandomness certificates: how far a graph is from its rank-one (or
bipartite rank-two) degree model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InputError, InvalidPartition
from .graph import Graph
from .spectral import normalized_adjacency, trace_power
from . import subsets

PROPERTIES = ("spectral_iv", "discrepancy_v", "trace_vi", "bipartite_iv", "bipartite_v")


@dataclass
class Certificate:
    property: str
    epsilon: float
    exact: bool = True
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.property not in PROPERTIES:
            raise InputError(f"unknown property {self.property!r}")
        self.epsilon = max(float(self.epsilon), 0.0)

    def to_json(self) -> dict:
        return {"property": self.property, "epsilon": self.epsilon,
                "exact": self.exact, "details": self.details}


def _extremal(R: np.ndarray):
    R = (R + R.T) / 2
    w, V = scipy.linalg.eigh(R)
    i = 0 if abs(w[0]) >= abs(w[-1]) else len(w) - 1
    return float(abs(w[i])), float(w[i]), V[:, i]


def qr_epsilon_spectral(G: Graph) -> Certificate:
    """|| D^{-1/2} (A - D J D / vol) D^{-1/2} ||."""
    phi0 = np.sqrt(G.degrees / G.vol)
    R = normalized_adjacency(G) - np.outer(phi0, phi0)
    eps, lam, vec = _extremal(R)
    return Certificate("spectral_iv", eps, True,
                       {"eigenvalue": lam, "eigenvector": vec.tolist()})


def _discrepancy(kind, objective, n, mode, samples, seed):
    res = subsets.maximize(objective, n, mode, samples, seed)
    return Certificate(kind, res.value, not res.lower_bound,
                       {**res.witness(), "lower_bound": res.lower_bound})


def qr_epsilon_discrepancy(G: Graph, mode: str = "exact", samples: int = subsets.DEFAULT_SAMPLES,
                           seed: int = 0) -> Certificate:
    """max |E(S,T) - vol(S) vol(T) / vol| / sqrt(vol(S) vol(T))."""
    A, d, vol = G.adjacency, G.degrees, G.vol

    def objective(ops):
        vs, vt = ops.ls(d), ops.lt(d)
        return np.abs(ops.bil(A) - vs * vt / vol) / np.sqrt(vs * vt)

    return _discrepancy("discrepancy_v", objective, G.n, mode, samples, seed)


def qr_trace_defect(G: Graph, k: int = 4) -> Certificate:
    """|trace(M^k) - 1| for even k."""
    if int(k) != k or k < 2 or k % 2:
        raise InputError("k must be an even integer >= 2")
    t = trace_power(G, int(k))
    return Certificate("trace_vi", abs(t - 1.0), True, {"k": int(k), "trace": t})


def partition_mask(G: Graph, X) -> np.ndarray:
    """Boolean mask of a proper nonempty vertex subset."""
    idx = np.asarray(sorted(set(int(x) for x in X)), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= G.n):
        raise InvalidPartition("partition names a vertex outside the graph")
    mask = np.zeros(G.n, dtype=bool)
    mask[idx] = True
    if not mask.any() or mask.all():
        raise InvalidPartition("partition side must be nonempty and proper")
    return mask


def bipartite_approximant(G: Graph, X, unit_factor: bool = False) -> np.ndarray:
    """c d_x d_y / vol on cross pairs; c = 2, or 1 when ``unit_factor``."""
    x = partition_mask(G, X)
    c = 1.0 if unit_factor else 2.0
    cross = np.logical_xor(x[:, None], x[None, :])
    return c * np.outer(G.degrees, G.degrees) / G.vol * cross


def bipartite_epsilon_spectral(G: Graph, X, unit_factor: bool = False) -> Certificate:
    B = bipartite_approximant(G, X, unit_factor)
    s = 1.0 / np.sqrt(G.degrees)
    R = (G.adjacency - B) * s[:, None] * s[None, :]
    eps, lam, vec = _extremal(R)
    return Certificate("bipartite_iv", eps, True,
                       {"eigenvalue": lam, "eigenvector": vec.tolist(),
                        "factor": 1 if unit_factor else 2})


def bipartite_epsilon_discrepancy(G: Graph, X, mode: str = "exact", unit_factor: bool = False,
                                  samples: int = subsets.DEFAULT_SAMPLES, seed: int = 0) -> Certificate:
    """max |E(S,T) - c (vol(S&X) vol(T-X) + vol(S-X) vol(T&X)) / vol| / sqrt(vol S vol T)."""
    x = partition_mask(G, X).astype(float)
    A, d, vol = G.adjacency, G.degrees, G.vol
    c = 1.0 if unit_factor else 2.0
    dx, dy = d * x, d * (1 - x)

    def objective(ops):
        expect = c * (ops.ls(dx) * ops.lt(dy) + ops.ls(dy) * ops.lt(dx)) / vol
        return np.abs(ops.bil(A) - expect) / np.sqrt(ops.ls(d) * ops.lt(d))

    cert = _discrepancy("bipartite_v", objective, G.n, mode, samples, seed)
    cert.details["factor"] = int(c)
    return cert


def bipartite_deviation(G: Graph, X, S, T, unit_factor: bool = False) -> float:
    """Signed E(S,T) minus its bipartite expectation, before normalization."""
    x = partition_mask(G, X)
    s = np.zeros(G.n, dtype=bool)
    t = np.zeros(G.n, dtype=bool)
    s[list(S)] = True
    t[list(T)] = True
    d, c = G.degrees, (1.0 if unit_factor else 2.0)
    expect = c * (d[s & x].sum() * d[t & ~x].sum() + d[s & ~x].sum() * d[t & x].sum()) / G.vol
    return float(G.adjacency[np.ix_(s, t)].sum() - expect)
