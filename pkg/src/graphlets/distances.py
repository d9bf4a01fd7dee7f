"""Distances between graphs of possibly different sizes.

Both graphs are lifted to step kernels on [0, 1] and refined to a common grid
of N equal cells.  Write K for the lifted kernel scaled to total mass one and
w = K 1 for the cell masses of the lifted degree measure.  For step functions
f, g on the grid

    <f, g>_{mu}             = f^T diag(w) g
    <f, (I - Delta) g>_{mu} = f^T K g

so every quantity below is a finite-dimensional matrix computation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InputError, VertexCountMismatch
from .graph import (
    Graph,
    LabelingMap,
    StepMeasure,
    canonical_labeling,
    lift_kernel,
    lift_measure,
)
from .graph import refine_common as _refine_common
from . import subsets

LABELINGS = ("degree-sorted", "identity")
SEARCH_LIMIT = 7


@dataclass
class DistanceResult:
    kind: str
    value: float
    lower_bound: bool = False
    labeling: str = "degree-sorted"
    degree_gap: float | None = None
    shared_measure: bool | None = None
    witness: dict | None = None
    cells: int | None = None

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "value": self.value,
            "lower_bound": self.lower_bound,
            "labeling": self.labeling,
        }
        for key in ("degree_gap", "shared_measure", "witness", "cells"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


def _label(G: Graph, labeling) -> LabelingMap:
    if isinstance(labeling, LabelingMap):
        return labeling
    if labeling == "degree-sorted":
        return canonical_labeling(G)
    if labeling == "identity":
        return LabelingMap.identity(G.n)
    raise InputError(f"unknown labeling {labeling!r}")


def lifted_pair(G1: Graph, G2: Graph, labeling="degree-sorted", labeling2=None):
    """Normalized kernels of both lifts on their common refinement."""
    l1 = _label(G1, labeling)
    l2 = _label(G2, labeling if labeling2 is None else labeling2)
    k1, k2 = _refine_common(lift_kernel(G1, l1), lift_kernel(G2, l2))
    return k1.normalized(), k2.normalized()


def degree_distribution_distance(G1: Graph, G2: Graph) -> float:
    """L1 distance between the degree-sorted lifted degree measures."""
    m1 = lift_measure(G1, canonical_labeling(G1))
    m2 = lift_measure(G2, canonical_labeling(G2))
    return m1.l1_distance(m2)


# -- spectral distance -------------------------------------------------------


def kernel_spectral_distance(K1, K2, tol: float = 1e-12):
    """(value, degree_gap, shared) for two normalized kernels on one grid.

    With a shared measure W the supremum of the normalized form difference is
    the operator norm of W^{-1/2} (K1 - K2) W^{-1/2}.  The extremizers may be
    taken piecewise constant on the grid: averaging f over each cell against W
    leaves f^T (K1 - K2) g unchanged and can only shrink the norms.

    With different measures, the Markov operators P_i = W_i^{-1} K_i are
    compared under the mean measure; the L1 measure gap is reported alongside.
    """
    w1 = K1.sum(axis=1)
    w2 = K2.sum(axis=1)
    gap = float(np.abs(w1 - w2).sum())
    shared = bool(np.allclose(w1, w2, rtol=tol, atol=tol / len(w1)))
    if shared:
        s = 1.0 / np.sqrt(w1)
        R = (K1 - K2) * s[:, None] * s[None, :]
    else:
        mu = (w1 + w2) / 2
        D = K1 / w1[:, None] - K2 / w2[:, None]
        R = np.sqrt(mu)[:, None] * D / np.sqrt(mu)[None, :]
    R = np.where(np.abs(R) < 1e-300, 0.0, R)
    if shared:
        ev = scipy.linalg.eigvalsh((R + R.T) / 2)
        value = float(max(abs(ev[0]), abs(ev[-1])))
    else:
        value = float(scipy.linalg.svdvals(R)[0])
    return value, gap, shared


def spectral_distance(G1: Graph, G2: Graph, labeling="degree-sorted",
                      search: bool = False) -> DistanceResult:
    """Spectral distance of the lifted Laplace operators.

    ``search`` minimizes over every relabeling of the second graph (n <= 7).
    """
    K1, K2 = lifted_pair(G1, G2, labeling)
    value, gap, shared = kernel_spectral_distance(K1, K2)
    name = labeling if isinstance(labeling, str) else "custom"
    if search:
        if G2.n > SEARCH_LIMIT:
            raise InputError(f"labeling search is limited to n <= {SEARCH_LIMIT}")
        l1 = _label(G1, labeling)
        for perm in itertools.permutations(range(G2.n)):
            A, B = lifted_pair(G1, G2, l1, LabelingMap.from_order(perm))
            v, g, s = kernel_spectral_distance(A, B)
            if v < value - 1e-15:
                value, gap, shared = v, g, s
        name = "searched"
    return DistanceResult("spectral", value, False, name, degree_gap=gap,
                          shared_measure=shared, cells=len(K1))


# -- discrepancy-type distances ---------------------------------------------


def disc_objective(K1, K2):
    w1 = K1.sum(axis=1)
    w2 = K2.sum(axis=1)

    def objective(ops):
        a = ops.bil(K1) / np.sqrt(ops.ls(w1) * ops.lt(w1))
        b = ops.bil(K2) / np.sqrt(ops.ls(w2) * ops.lt(w2))
        return np.abs(a - b)

    return objective


def disc_mu_objective(K1, K2, mu):
    mu = np.asarray(mu, dtype=float)
    P1 = K1 / K1.sum(axis=1)[:, None]
    P2 = K2 / K2.sum(axis=1)[:, None]
    Q = mu[:, None] * (P2 - P1)

    def objective(ops):
        return np.abs(ops.bil(Q)) / np.sqrt(ops.ls(mu) * ops.lt(mu))

    return objective


def _result(kind, res: subsets.SubsetResult, labeling, N, **extra):
    return DistanceResult(kind, max(res.value, 0.0), res.lower_bound, labeling,
                          witness=res.witness(), cells=N, **extra)


def disc_distance(G1: Graph, G2: Graph, mode: str = "exact", samples: int = subsets.DEFAULT_SAMPLES,
                  seed: int = 0, labeling="degree-sorted") -> DistanceResult:
    """max over cell sets S, T of |E1(S,T)/sqrt(vol1 S vol1 T) - E2(S,T)/sqrt(vol2 S vol2 T)|."""
    K1, K2 = lifted_pair(G1, G2, labeling)
    res = subsets.maximize(disc_objective(K1, K2), len(K1), mode, samples, seed)
    return _result("disc", res, labeling, len(K1))


def disc_mu(G1: Graph, G2: Graph, mu: StepMeasure | None = None, mode: str = "exact",
            samples: int = subsets.DEFAULT_SAMPLES, seed: int = 0,
            labeling="degree-sorted") -> DistanceResult:
    """max |<chi_S, (Delta_1 - Delta_2) chi_T>_mu| / sqrt(mu(S) mu(T)).

    ``mu`` defaults to the mean of the two lifted degree measures.
    """
    K1, K2 = lifted_pair(G1, G2, labeling)
    N = len(K1)
    if mu is None:
        m = (K1.sum(axis=1) + K2.sum(axis=1)) / 2
    else:
        m = mu.cell_masses(N)
    if np.any(m <= 0):
        raise InputError("mu must be positive on every cell")
    res = subsets.maximize(disc_mu_objective(K1, K2, m), N, mode, samples, seed)
    return _result("disc-mu", res, labeling, N)


def cut_distance(G1: Graph, G2: Graph, mode: str = "exact", samples: int = subsets.DEFAULT_SAMPLES,
                 seed: int = 0) -> DistanceResult:
    """(1/n^2) max |E1(S,T) - E2(S,T)| on a shared vertex set."""
    if G1.n != G2.n:
        raise VertexCountMismatch(f"cut distance needs equal vertex sets, got {G1.n} and {G2.n}")
    n = G1.n
    Dm = G1.adjacency - G2.adjacency

    def objective(ops):
        return np.abs(ops.bil(Dm)) / n**2

    res = subsets.maximize(objective, n, mode, samples, seed)
    return _result("cut", res, "identity", n)


# -- quantization and the equivalence check -----------------------------------


def quantize_four_fifths(f, mu=None) -> np.ndarray:
    """Round |f_j| down to a power of 4/5, keeping the sign.

    h_j = sign(f_j) (4/5)^k with (4/5)^k <= |f_j| < (4/5)^(k-1), so exact powers
    are fixed points.  Since 0.8|f| < |h| <= |f|, a unit f gives ||h||_mu <= 1
    and ||f - h||_mu < 1/5.  ``mu`` is accepted for symmetry with the norms it
    is meant for; the rounding itself is pointwise.
    """
    f = np.asarray(f, dtype=float)
    a = np.abs(f)
    h = np.zeros_like(f)
    nz = a > 0
    if not nz.any():
        return h
    # C pow per element, so that values written as 0.8**k round-trip exactly
    power = np.frompyfunc(lambda k: math.pow(0.8, k), 1, 1)
    x = a[nz]
    k = np.ceil(np.log(x) / math.log(0.8)).astype(np.int64)
    k = np.where(power(k).astype(float) > x, k + 1, k)
    k = np.where(power(k - 1).astype(float) <= x, k - 1, k)
    h[nz] = np.sign(f[nz]) * power(k).astype(float)
    return h


def mu_norm(f, mu) -> float:
    m = mu.cell_masses(len(f)) if isinstance(mu, StepMeasure) else np.asarray(mu, dtype=float)
    f = np.asarray(f, dtype=float)
    return float(np.sqrt(np.sum(f * f * m)))


@dataclass
class EquivalenceReport:
    eps_disc: float
    eps_spec: float
    degree_gap: float
    shared_measure: bool
    forward_bound: float
    forward_ok: bool
    reverse_applicable: bool
    reverse_bound: float | None
    reverse_ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def reverse_bound(eps_disc: float) -> float:
    """20 e ln(1/e), with the e -> 0 limit 0."""
    return 0.0 if eps_disc <= 0 else 20.0 * eps_disc * math.log(1.0 / eps_disc)


def equivalence_check(G1: Graph, G2: Graph, labeling="degree-sorted") -> EquivalenceReport:
    """Exact discrepancy against spectral distance, with both directions of the bound."""
    K1, K2 = lifted_pair(G1, G2, labeling)
    eps_spec, gap, shared = kernel_spectral_distance(K1, K2)
    eps_disc = max(subsets.exact_max(disc_objective(K1, K2), len(K1)).value, 0.0)
    fwd = eps_spec + 4 * gap
    applicable = eps_disc < 0.02
    rb = reverse_bound(eps_disc) if applicable else None
    return EquivalenceReport(
        eps_disc=eps_disc,
        eps_spec=eps_spec,
        degree_gap=gap,
        shared_measure=shared,
        forward_bound=fwd,
        forward_ok=bool(eps_disc <= fwd + 1e-9),
        reverse_applicable=applicable,
        reverse_bound=rb,
        reverse_ok=bool((not applicable) or eps_spec <= rb + 1e-9),
    )
