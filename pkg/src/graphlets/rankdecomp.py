"""Degree splits, their rank-k normalized approximants, and the rank-2
decomposition of a graph from its second eigenpair."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    BalanceNotBracketed,
    DegeneratePart,
    InvalidSplit,
    NotConnected,
    NumericalFailure,
    SpectralGapTooSmall,
    VertexCountMismatch,
)
from .graph import Graph, StepMeasure, connected_components, union
from .quasirandom import qr_epsilon_spectral
from .spectral import residual_norm, spectrum

GAP_MIN = 1e-6
ALPHA_TOL = 1e-12
MAX_BISECTIONS = 200


@dataclass(frozen=True, eq=False)
class DegreeSplit:
    """d = d' + d'' with sum(d') = alpha vol."""

    d_prime: np.ndarray
    d_doubleprime: np.ndarray
    alpha: float = None

    def __post_init__(self):
        a = np.asarray(self.d_prime, dtype=float)
        b = np.asarray(self.d_doubleprime, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise InvalidSplit("split parts must be vectors of equal length")
        if np.any(a < 0) or np.any(b < 0):
            raise InvalidSplit("split parts must be nonnegative")
        total = a.sum() + b.sum()
        alpha = a.sum() / total if total > 0 else 0.0
        if self.alpha is not None and abs(self.alpha - alpha) > 1e-10:
            raise InvalidSplit(f"alpha {self.alpha!r} disagrees with part volumes ({alpha!r})")
        object.__setattr__(self, "d_prime", a)
        object.__setattr__(self, "d_doubleprime", b)
        object.__setattr__(self, "alpha", float(alpha))

    def check(self, G: Graph) -> "DegreeSplit":
        if len(self.d_prime) != G.n:
            raise InvalidSplit(f"split has {len(self.d_prime)} entries, graph has {G.n} vertices")
        err = np.max(np.abs(self.d_prime + self.d_doubleprime - G.degrees))
        if err > 1e-10 * max(1.0, float(G.degrees.max())):
            raise InvalidSplit(f"parts do not sum to the degrees (max error {err:.3g})")
        return self

    def swapped(self) -> "DegreeSplit":
        return DegreeSplit(self.d_doubleprime, self.d_prime)

    def to_rank_k(self) -> "RankKSplit":
        return RankKSplit(np.vstack([self.d_prime, self.d_doubleprime]))


@dataclass(frozen=True, eq=False)
class RankKSplit:
    """k nonnegative per-vertex parts, stored as rows."""

    parts: np.ndarray

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.parts, dtype=float))
        if P.ndim != 2 or P.shape[0] < 1:
            raise InvalidSplit("need at least one part")
        if np.any(P < 0) or not np.all(np.isfinite(P)):
            raise InvalidSplit("parts must be finite and nonnegative")
        object.__setattr__(self, "parts", P)

    @property
    def k(self) -> int:
        return self.parts.shape[0]

    @property
    def volumes(self) -> np.ndarray:
        return self.parts.sum(axis=1)

    def check(self, G: Graph) -> "RankKSplit":
        if self.parts.shape[1] != G.n:
            raise InvalidSplit(f"split has {self.parts.shape[1]} entries, graph has {G.n} vertices")
        err = np.max(np.abs(self.parts.sum(axis=0) - G.degrees))
        if err > 1e-10 * max(1.0, float(G.degrees.max())):
            raise InvalidSplit(f"parts do not sum to the degrees (max error {err:.3g})")
        return self

    def approximant(self) -> np.ndarray:
        """sum_i d_i d_i^T / vol_i."""
        vols = self.volumes
        if np.any(vols <= 0):
            raise DegeneratePart("every part needs positive volume")
        return (self.parts.T / vols) @ self.parts


def _as_rank_k(split) -> RankKSplit:
    return split.to_rank_k() if isinstance(split, DegreeSplit) else split


def split_operator(G: Graph, split) -> np.ndarray:
    """X = D^{-1/2} (sum_i d_i d_i^T / vol_i) D^{-1/2}."""
    s = 1.0 / np.sqrt(G.degrees)
    return _as_rank_k(split).approximant() * s[:, None] * s[None, :]


# -- rank two ----------------------------------------------------------------


def rank2_eta_xi(G: Graph, split: DegreeSplit):
    """Second eigenvalue eta and eigenvector xi of the rank-2 split operator.

    eta = 1 - (sum d'd''/d) vol / (vol' vol''),
    xi  = d^{-1/2} (d'/vol' - d''/vol'').
    """
    split.check(G)
    d = G.degrees
    v1, v2 = split.d_prime.sum(), split.d_doubleprime.sum()
    if v1 <= 0 or v2 <= 0:
        raise DegeneratePart("both parts need positive volume")
    eta = 1.0 - np.sum(split.d_prime * split.d_doubleprime / d) * G.vol / (v1 * v2)
    xi = (split.d_prime / v1 - split.d_doubleprime / v2) / np.sqrt(d)
    X = split_operator(G, split)
    err = np.linalg.norm(X @ xi - eta * xi)
    if err > 1e-9 * max(1.0, np.linalg.norm(xi)):
        raise NumericalFailure(f"eigen-relation for xi fails by {err:.3g}")
    return float(eta), xi


@dataclass
class UnionReport:
    eps_prime: float
    eps_doubleprime: float
    eps: float
    rho: np.ndarray
    eta: float
    rho0_gap: float
    rho1_gap: float
    bulk: float
    alignment: float | None
    alignment_gap: float | None
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "rho"}
        out["rho_top"] = self.rho[:3].tolist()
        out["passed"] = self.passed
        return out


def union_spectrum_check(G1: Graph, G2: Graph, tol: float = 1e-9) -> UnionReport:
    """Compare the spectrum of G1 + G2 with the rank-2 prediction of its degree split.

    Passing needs rho_0 = 1, |rho_1 - eta| <= eps, |rho_i| <= eps for i >= 2 and
    ||phi_1 -+ xi/||xi|| || <= eps, where eps = eps' + eps'' (plus ``tol``).
    ``alignment_gap`` is 1 - |<phi_1, xi/||xi||>|.
    """
    if G1.n != G2.n:
        raise VertexCountMismatch("union needs graphs on the same vertex set")
    e1 = qr_epsilon_spectral(G1).epsilon
    e2 = qr_epsilon_spectral(G2).epsilon
    eps = e1 + e2
    G = union(G1, G2)
    spec = spectrum(G)
    split = DegreeSplit(G1.degrees, G2.degrees)
    eta, xi = rank2_eta_xi(G, split)
    rho = spec.rho
    rho0_gap = abs(rho[0] - 1.0)
    rho1_gap = abs(rho[1] - eta) if G.n > 1 else 0.0
    bulk = float(np.max(np.abs(rho[2:]))) if G.n > 2 else 0.0
    nx = np.linalg.norm(xi)
    if nx > 1e-12:
        c = abs(float(spec.phi[:, 1] @ xi) / nx)
        gap = max(1.0 - c, 0.0)
        dist = float(np.sqrt(2 * gap))
    else:
        gap = dist = None
    checks = {
        "rho0": rho0_gap <= tol,
        "rho1": rho1_gap <= eps + tol,
        "bulk": bulk <= eps + tol,
        "alignment": True if dist is None else dist <= eps + tol,
    }
    return UnionReport(e1, e2, eps, rho, eta, float(rho0_gap), float(rho1_gap), bulk,
                       dist, gap, checks)


def _f_parts(d, phi1, rho1, vol, alpha):
    f1 = alpha * d - np.sqrt(d) * phi1 * np.sqrt(rho1 * alpha * (1 - alpha) * vol)
    return f1, d - f1


def _balance(d, phi1, rho1, vol, alpha):
    f1, f2 = _f_parts(d, phi1, rho1, vol, alpha)
    return float(-f1[f1 < 0].sum() + f2[f2 < 0].sum())


def _split_from_phi(d, phi1, rho1, vol):
    """Bisect the balance condition; returns (d_prime, alpha, f1, f2, balance_gap)."""
    lo, hi = 1e-12, 1 - 1e-12
    glo = _balance(d, phi1, rho1, vol, lo)
    ghi = _balance(d, phi1, rho1, vol, hi)
    if not (glo > 0 > ghi):
        raise BalanceNotBracketed(
            f"balance objective does not change sign on (0,1): g(lo)={glo:.3g}, g(hi)={ghi:.3g}"
        )
    for _ in range(MAX_BISECTIONS):
        mid = (lo + hi) / 2
        g = _balance(d, phi1, rho1, vol, mid)
        if g > 0:
            lo = mid
        elif g < 0:
            hi = mid
        else:
            lo = hi = mid
        if hi - lo <= ALPHA_TOL:
            break
    else:
        raise BalanceNotBracketed(f"bisection did not reach tolerance in {MAX_BISECTIONS} steps")
    alpha = (lo + hi) / 2
    f1, f2 = _f_parts(d, phi1, rho1, vol, alpha)
    dp = np.where(f1 < 0, 0.0, np.where(f2 < 0, d, f1))
    return dp, alpha, f1, f2, _balance(d, phi1, rho1, vol, alpha)


def _orient_largest(phi):
    i = int(np.argmax(np.abs(phi)))
    return phi if phi[i] >= 0 else -phi


def _canonical(dp, dpp, vol, tie=1e-9):
    """Order the parts so alpha <= 1/2 (ties broken on the first differing vertex)."""
    a = dp.sum() / vol
    if abs(a - 0.5) <= tie:
        diff = dp - dpp
        idx = np.flatnonzero(np.abs(diff) > tie * max(1.0, float(np.max(dp + dpp))))
        swap = idx.size > 0 and diff[idx[0]] < 0
    else:
        swap = a > 0.5
    return (dpp, dp) if swap else (dp, dpp)


@dataclass
class Rank2Diagnostics:
    alpha: float
    rho1: float
    residual: float
    eta: float
    frow_lhs: float
    frow_rhs: float
    balance_gap: float
    bisection_alpha: float

    @property
    def frow_gap(self) -> float:
        return abs(self.frow_lhs - self.frow_rhs)

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["frow_gap"] = self.frow_gap
        return out


def rank2_decompose(G: Graph, gap_min: float = GAP_MIN, phi1=None):
    """Split the degrees of G into two parts from its second eigenpair.

    Returns ``(DegreeSplit, Rank2Diagnostics)``; the split is ordered so that
    alpha <= 1/2.  ``phi1`` overrides the (oriented) unit eigenvector of M.
    """
    if connected_components(G) > 1:
        raise NotConnected("decomposition needs a connected graph")
    spec = spectrum(G)
    rho1 = float(spec.rho[1])
    if rho1 <= gap_min:
        hint = (" (negative second eigenvalue: bipartite-type structure is not a union of"
                " quasirandom parts)") if rho1 < 0 else ""
        raise SpectralGapTooSmall(f"rho_1 = {rho1:.6g} <= {gap_min:g}: graph is rank one{hint}")
    if rho1 >= 1 - gap_min:
        raise SpectralGapTooSmall(f"rho_1 = {rho1:.6g} is within {gap_min:g} of 1")
    d, vol = G.degrees, G.vol
    phi = _orient_largest(spec.phi[:, 1]) if phi1 is None else np.asarray(phi1, dtype=float)
    dp, a_bis, f1, f2, bal = _split_from_phi(d, phi, rho1, vol)
    frow_rhs = float(np.sum(f1 * f2 / d) / (a_bis * (1 - a_bis) * vol))
    dp, dpp = _canonical(dp, d - dp, vol)
    dpp = np.maximum(dpp, 0.0)
    split = DegreeSplit(dp, dpp)
    eta, _ = rank2_eta_xi(G, split)
    res = residual_norm(G, split.to_rank_k().approximant())
    diag = Rank2Diagnostics(split.alpha, rho1, res, eta, 1 - rho1, frow_rhs, abs(bal), a_bis)
    return split, diag


def split_measure_vectors(G: Graph, split: DegreeSplit, rho1=None, phi1=None):
    """(mu_1, mu_2, clipped) for the two parts of a rank-2 split.

    mu_1 = mu - s sqrt((1-a) rho / a) mu phi,  mu_2 = mu + s sqrt(a rho / (1-a)) mu phi,
    with ||phi||_mu = 1 and the sign s chosen to match d'/vol'.  When either
    formula leaves the probability simplex (noisy input) the normalized parts
    d'/vol', d''/vol'' are returned instead and ``clipped`` is set.
    """
    split.check(G)
    a = split.alpha
    if not 0 < a < 1:
        raise DegeneratePart("both parts need positive volume")
    d, vol = G.degrees, G.vol
    if rho1 is None or phi1 is None:
        spec = spectrum(G)
        rho1, phi1 = float(spec.rho[1]), spec.phi[:, 1]
    mu = d / vol
    phi = np.sqrt(vol) * np.asarray(phi1, dtype=float) / np.sqrt(d)
    target = split.d_prime / split.d_prime.sum()
    best = None
    for s in (1.0, -1.0):
        m1 = mu - s * np.sqrt((1 - a) * rho1 / a) * mu * phi
        m2 = mu + s * np.sqrt(a * rho1 / (1 - a)) * mu * phi
        err = np.abs(m1 - target).sum()
        if best is None or err < best[0]:
            best = (err, m1, m2)
    _, m1, m2 = best
    clipped = bool(min(m1.min(), m2.min()) < -1e-12)
    if clipped:
        m1 = target
        m2 = split.d_doubleprime / split.d_doubleprime.sum()
    else:
        m1, m2 = np.maximum(m1, 0.0), np.maximum(m2, 0.0)
    err = np.max(np.abs(a * m1 + (1 - a) * m2 - mu))
    if err > 1e-10:
        raise NumericalFailure(f"mixture identity fails by {err:.3g}")
    return m1, m2, clipped


def split_measures(G: Graph, split: DegreeSplit, rho1=None, phi1=None):
    """The two part measures as step densities on n equal cells (vertex order)."""
    m1, m2, _ = split_measure_vectors(G, split, rho1, phi1)
    return StepMeasure.uniform_cells(m1 / m1.sum()), StepMeasure.uniform_cells(m2 / m2.sum())


# -- rank k ------------------------------------------------------------------


def rank_k_matrix(G: Graph, split) -> np.ndarray:
    """M(i, j) = sum_v d_i(v) d_j(v) / d(v)."""
    P = _as_rank_k(split).check(G).parts
    M = (P / G.degrees) @ P.T
    return (M + M.T) / 2


def rank_k_eigs(G: Graph, split):
    """Nonzero-spectrum eigenpairs (eta_i, xi_i) of X, descending, xi_i unit length.

    The eigenvalues come from the k x k matrix V^{1/2} M V^{1/2}, V = diag(1/vol_i),
    and lift back through xi = D^{-1/2} [d_1 .. d_k] V^{1/2} chi.
    """
    split = _as_rank_k(split).check(G)
    vols = split.volumes
    if np.any(vols <= 0):
        raise DegeneratePart("every part needs positive volume")
    M = rank_k_matrix(G, split)
    v = 1.0 / np.sqrt(vols)
    Nk = M * v[:, None] * v[None, :]
    eta, chi = scipy.linalg.eigh((Nk + Nk.T) / 2)
    order = np.argsort(-eta, kind="stable")
    eta, chi = eta[order], chi[:, order]
    U = split.parts.T / np.sqrt(G.degrees)[:, None]
    X = split_operator(G, split)
    out = []
    for i in range(split.k):
        xi = U @ (v * chi[:, i])
        nrm = np.linalg.norm(xi)
        if nrm > 1e-12:
            xi = xi / nrm
        err = np.linalg.norm(X @ xi - eta[i] * xi)
        if err > 1e-8:
            raise NumericalFailure(f"lifted eigenvector {i} has residual {err:.3g}")
        out.append((float(eta[i]), xi))
    return out


def rank_k_residual(G: Graph, split) -> float:
    """|| D^{-1/2} (A - sum_i d_i d_i^T / vol_i) D^{-1/2} ||."""
    split = _as_rank_k(split).check(G)
    return residual_norm(G, split.approximant())
