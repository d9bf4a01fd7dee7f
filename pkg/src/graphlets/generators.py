"""Random and deterministic graph families.

All randomness comes from numpy's Philox counter-based bit generator seeded with
the user seed, so a (parameters, seed) pair always yields the same graph.
Pairs u < v are visited in row-major upper-triangle order and each consumes
one uniform double.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError, IsolationRetryExhausted, ProbabilityOverflow, SizeTooSmall
from .graph import Graph
from .spectral import spectrum
from .subsets import make_rng
from .rankdecomp import RankKSplit

MAX_RETRIES = 100


def _weights(w, name="weights"):
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or len(w) < 2:
        raise InputError(f"{name} must be a vector with at least two entries")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise InputError(f"{name} must be finite and nonnegative")
    return w


def _sample_upper(P, rng):
    """Symmetric 0/1 adjacency with independent edges of probability P[u, v], u < v."""
    n = len(P)
    iu, iv = np.triu_indices(n, 1)
    hit = rng.random(len(iu)) < P[iu, iv]
    A = np.zeros((n, n))
    A[iu[hit], iv[hit]] = 1.0
    return A + A.T


def _draw(P, rng, retries, require_all=True):
    for _ in range(retries + 1):
        A = _sample_upper(P, rng)
        if not require_all or np.all(A.sum(axis=1) > 0):
            return A
    raise IsolationRetryExhausted(f"every one of {retries + 1} draws left an isolated vertex")


def chung_lu_probabilities(w) -> np.ndarray:
    w = _weights(w)
    W = w.sum()
    if W <= 0:
        raise InputError("weights must not all be zero")
    if w.max() ** 2 > W * (1 + 1e-12):
        raise ProbabilityOverflow(f"max weight squared {w.max() ** 2:.6g} exceeds total weight {W:.6g}")
    return np.minimum(np.outer(w, w) / W, 1.0)


def chung_lu(weights, seed: int = 0, max_retries: int = MAX_RETRIES) -> Graph:
    """Independent edges with probability w_u w_v / sum(w); redrawn while any vertex is isolated.

    The expected degree of u is w_u (W - w_u) / W, since loops are not drawn.
    """
    P = chung_lu_probabilities(weights)
    return Graph(_draw(P, make_rng(seed), max_retries))


def union_quasirandom(weight_lists, seed: int = 0, max_retries: int = MAX_RETRIES):
    """Sum of independent Chung-Lu parts on one vertex set.

    Returns the union graph and the ground-truth split (degree of each vertex in
    each part).  A part may leave vertices isolated; only the union must not.
    """
    Ps = [chung_lu_probabilities(w) for w in weight_lists]
    if len({len(P) for P in Ps}) != 1:
        raise InputError("all parts must live on the same vertex set")
    rng = make_rng(seed)
    for _ in range(max_retries + 1):
        parts = [_sample_upper(P, rng) for P in Ps]
        A = sum(parts)
        if np.all(A.sum(axis=1) > 0):
            return Graph(A), RankKSplit(np.vstack([p.sum(axis=1) for p in parts]))
    raise IsolationRetryExhausted(f"every one of {max_retries + 1} draws left an isolated vertex")


def bipartite_quasirandom(wX, wY, seed: int = 0, max_retries: int = MAX_RETRIES) -> Graph:
    """Cross edges only, p(x, y) = c wX_x wY_y with c = (sum wX + sum wY) / (2 sum wX sum wY).

    Vertices 0..|X|-1 form X.  The expected volume is sum(wX) + sum(wY).
    """
    wX = np.asarray(wX, dtype=float)
    wY = np.asarray(wY, dtype=float)
    if wX.ndim != 1 or wY.ndim != 1 or not len(wX) or not len(wY):
        raise InputError("both sides need at least one vertex")
    if np.any(wX < 0) or np.any(wY < 0):
        raise InputError("weights must be nonnegative")
    sx, sy = wX.sum(), wY.sum()
    if sx <= 0 or sy <= 0:
        raise InputError("each side needs positive total weight")
    c = (sx + sy) / (2 * sx * sy)
    cross = c * np.outer(wX, wY)
    if cross.max() > 1 + 1e-12:
        raise ProbabilityOverflow(f"largest cross probability is {cross.max():.6g} > 1")
    a, b = len(wX), len(wY)
    P = np.zeros((a + b, a + b))
    P[:a, a:] = np.minimum(cross, 1.0)
    P[a:, :a] = P[:a, a:].T
    return Graph(_draw(P, make_rng(seed), max_retries))


def blowup(G: Graph, k: int) -> Graph:
    """Replace each vertex v by twins v*k .. v*k+k-1 joined like v's edges."""
    if int(k) != k or k < 1:
        raise InputError("k must be a positive integer")
    k = int(k)
    return Graph(np.kron(G.adjacency, np.ones((k, k))), allow_loops=G.allow_loops)


def dense_universal_basis(H: Graph, m: int) -> np.ndarray:
    """h*m real vectors (columns) on the m-fold blow-up of H.

    The first h columns are H's combinatorial eigenfunctions, constant on each
    block of m twins.  The rest vary inside blocks: for each vertex of H and each
    b, cos(2 pi b j / m) for 1 <= b <= m // 2 and sin(2 pi b j / m) for
    1 <= b < m / 2, supported on that vertex's block.
    """
    if int(m) != m or m < 1:
        raise InputError("m must be a positive integer")
    m = int(m)
    h = H.n
    primary = np.repeat(spectrum(H).combinatorial, m, axis=0)
    j = np.arange(m)
    waves = [np.cos(2 * np.pi * b * j / m) for b in range(1, m // 2 + 1)]
    waves += [np.sin(2 * np.pi * b * j / m) for b in range(1, (m + 1) // 2)]
    cols = [primary]
    if waves:
        Wv = np.column_stack(waves)
        cols.append(np.kron(np.eye(h), Wv))
    return np.hstack(cols)


# -- named unit-weight families --------------------------------------------


def complete(n: int) -> Graph:
    if n < 2:
        raise SizeTooSmall("complete graph needs n >= 2")
    return Graph(np.ones((n, n)) - np.eye(n))


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise SizeTooSmall("complete bipartite graph needs both sides nonempty")
    A = np.zeros((a + b, a + b))
    A[:a, a:] = 1.0
    A[a:, :a] = 1.0
    return Graph(A)


def path(n: int) -> Graph:
    if n < 2:
        raise SizeTooSmall("path needs n >= 2")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise SizeTooSmall("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def matching(m: int) -> Graph:
    """m disjoint edges on 2m vertices."""
    if m < 1:
        raise SizeTooSmall("matching needs m >= 1")
    return Graph.from_edges(2 * m, [(2 * i, 2 * i + 1) for i in range(m)])


FAMILIES = {
    "complete": (complete, 1),
    "complete_bipartite": (complete_bipartite, 2),
    "path": (path, 1),
    "cycle": (cycle, 1),
    "matching": (matching, 1),
}


def named(family: str, *params: int) -> Graph:
    try:
        fn, arity = FAMILIES[family]
    except KeyError:
        raise InputError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if len(params) != arity:
        raise InputError(f"{family} takes {arity} size parameter(s)")
    return fn(*(int(p) for p in params))


# -- weight shapes -----------------------------------------------------------


SHAPES = ("constant", "powerlaw", "ramp-up", "ramp-down")


def weight_shape(shape: str, n: int, scale: float, exponent: float = 0.5, cap: float | None = None):
    """Weights w_i = scale * s((i + 0.5) / n) for a fixed profile s on (0, 1).

    ``constant``: s = 1.  ``powerlaw``: s(x) = x^(-exponent) normalized to mean
    one, truncated at ``cap`` times the mean when given.  ``ramp-up`` and
    ``ramp-down``: s = 0.2 + 1.6 x and its mirror image, both of mean one.
    """
    x = (np.arange(n) + 0.5) / n
    if shape == "constant":
        s = np.ones(n)
    elif shape == "powerlaw":
        s = x ** (-exponent)
        s = s / s.mean()
        if cap is not None:
            s = np.minimum(s, cap)
    elif shape == "ramp-up":
        s = 0.2 + 1.6 * x
    elif shape == "ramp-down":
        s = 0.2 + 1.6 * (1 - x)
    else:
        raise InputError(f"unknown weight shape {shape!r}")
    return scale * s
