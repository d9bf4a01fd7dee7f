"""Weighted undirected graphs, their degree measures, and lifts to [0, 1].

A graph on n vertices is lifted to the unit interval through a labeling: vertex
``u`` at position ``p`` owns the cell ``(p/n, (p+1)/n]``.  The lifted degree
measure has density ``n * mu(u)`` on that cell and the lifted kernel takes the
value ``A(u, v)`` on the product of the cells of ``u`` and ``v``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConflictingEdge,
    IsolatedVertex,
    InputError,
    NegativeWeight,
    ParseError,
    RefinementTooLarge,
)

MAX_REFINEMENT = 4096


def fmt_float(x) -> str:
    """Serialize a float with 17 significant digits."""
    return format(float(x), ".17g")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Dense weighted undirected graph with strictly positive degrees.

    ``ids`` maps dense vertex indices back to the ids used in the source file.
    """

    adjacency: np.ndarray
    allow_loops: bool = False
    ids: tuple = None

    def __post_init__(self):
        A = np.asarray(self.adjacency, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputError(f"adjacency must be square, got shape {A.shape}")
        n = A.shape[0]
        if n == 0:
            raise InputError("graph has no vertices")
        if not np.all(np.isfinite(A)):
            raise InputError("adjacency contains non-finite weights")
        if np.any(A < 0):
            raise NegativeWeight("negative edge weight")
        if not np.allclose(A, A.T, rtol=1e-12, atol=0.0):
            raise InputError("adjacency is not symmetric")
        A = (A + A.T) / 2.0
        if not self.allow_loops and np.any(np.diag(A) != 0):
            v = int(np.flatnonzero(np.diag(A))[0])
            raise InputError(f"self-loop at vertex {v} but loops are forbidden")
        ids = tuple(range(n)) if self.ids is None else tuple(self.ids)
        if len(ids) != n:
            raise InputError("ids length does not match vertex count")
        d = A.sum(axis=1)
        isolated = np.flatnonzero(d <= 0)
        if isolated.size:
            raise IsolatedVertex(ids[int(isolated[0])])
        object.__setattr__(self, "adjacency", _readonly(A))
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "_degrees", _readonly(d))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence], allow_loops=False, ids=None):
        A = np.zeros((n, n))
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            A[u, v] = w
            A[v, u] = w
        return cls(A, allow_loops=allow_loops, ids=ids)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def vol(self) -> float:
        return float(self._degrees.sum())

    def volume(self, S) -> float:
        return float(self._degrees[_as_index(S, self.n)].sum())

    def edges(self):
        """Yield ``(u, v, w)`` with ``u <= v`` and ``w > 0``."""
        iu, iv = np.nonzero(np.triu(self.adjacency))
        for u, v in zip(iu.tolist(), iv.tolist()):
            yield u, v, float(self.adjacency[u, v])

    def scaled(self, c: float) -> "Graph":
        return Graph(self.adjacency * c, allow_loops=self.allow_loops, ids=self.ids)


def union(*graphs: Graph) -> Graph:
    """Edge-weight sum of graphs on the same vertex set."""
    from .errors import VertexCountMismatch

    n = graphs[0].n
    if any(g.n != n for g in graphs):
        raise VertexCountMismatch("union needs graphs on the same vertex set")
    A = sum(g.adjacency for g in graphs)
    return Graph(A, allow_loops=any(g.allow_loops for g in graphs), ids=graphs[0].ids)


def connected_components(G: Graph) -> int:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components as cc

    count, _ = cc(csr_matrix(G.adjacency > 0), directed=False)
    return int(count)


def _as_index(S, n):
    """Vertex set (iterable of ids, or a boolean mask) -> boolean mask."""
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (n,):
            raise InputError("mask has wrong length")
        return S
    mask = np.zeros(n, dtype=bool)
    idx = list(S)
    if idx:
        mask[np.asarray(idx, dtype=int)] = True
    return mask


# -- loading ---------------------------------------------------------------


def load_graph(path, format: str | None = None, allow_loops: bool = False) -> Graph:
    """Read an edge-list (``u v [w]`` per line) or JSON graph file."""
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "edge-list"
    text = path.read_text(encoding="utf-8")
    if format == "json":
        return parse_json(text, allow_loops=allow_loops)
    if format in ("edge-list", "edgelist"):
        return parse_edge_list(text, allow_loops=allow_loops)
    raise InputError(f"unknown graph format {format!r}")


def _add_edge(weights, u, v, w, line, allow_loops):
    if w < 0 or not math.isfinite(w):
        raise NegativeWeight(f"line {line}: invalid weight {w!r}" if line else f"invalid weight {w!r}")
    if u == v and not allow_loops:
        raise ParseError(f"self-loop at vertex {u} but loops are forbidden", line)
    key = (min(u, v), max(u, v))
    if key in weights and weights[key] != w:
        raise ConflictingEdge(
            f"edge {key} listed with conflicting weights {weights[key]!r} and {w!r}"
            + (f" (line {line})" if line else "")
        )
    weights[key] = w


def _build(vertices, weights, allow_loops):
    ids = sorted(vertices)
    index = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    if n == 0:
        raise InputError("graph has no vertices")
    A = np.zeros((n, n))
    for (u, v), w in weights.items():
        A[index[u], index[v]] = w
        A[index[v], index[u]] = w
    return Graph(A, allow_loops=allow_loops, ids=tuple(ids))


def parse_edge_list(text: str, allow_loops: bool = False) -> Graph:
    """Parse ``u v [w]`` lines; ``#`` starts a comment, a lone id declares a vertex."""
    vertices = set()
    weights = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 3:
            raise ParseError(f"expected 'u v [w]', got {raw.strip()!r}", lineno)
        try:
            ids = [int(p) for p in parts[:2]]
        except ValueError:
            raise ParseError(f"vertex ids must be integers, got {raw.strip()!r}", lineno) from None
        if any(i < 0 for i in ids):
            raise ParseError("vertex ids must be nonnegative", lineno)
        vertices.update(ids)
        if len(parts) == 1:
            continue
        try:
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(f"weight is not a number: {parts[2]!r}", lineno) from None
        _add_edge(weights, ids[0], ids[1], w, lineno, allow_loops)
    return _build(vertices, weights, allow_loops)


def parse_json(text: str, allow_loops: bool = False) -> Graph:
    try:
        data = json.loads(text)
        n = int(data["n"])
        edges = data["edges"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid JSON graph: {exc}") from None
    weights = {}
    for e in edges:
        if len(e) not in (2, 3):
            raise ParseError(f"edge entry must be [u, v] or [u, v, w], got {e!r}")
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"edge {e!r} references a vertex outside 0..{n - 1}")
        _add_edge(weights, u, v, float(e[2]) if len(e) == 3 else 1.0, None, allow_loops)
    return _build(range(n), weights, allow_loops)


def to_edge_list(G: Graph) -> str:
    lines = [f"{G.ids[u]} {G.ids[v]} {fmt_float(w)}" for u, v, w in G.edges()]
    return "\n".join(lines) + "\n"


def to_json(G: Graph) -> dict:
    return {"n": G.n, "edges": [[u, v, w] for u, v, w in G.edges()]}


# -- measures and labelings --------------------------------------------------


def degree_measure(G: Graph) -> np.ndarray:
    """mu(v) = d(v) / vol(G)."""
    mu = G.degrees / G.vol
    mu.flags.writeable = False
    return mu


def mu_inner(G: Graph, f, g) -> float:
    return float(np.sum(np.asarray(f) * np.asarray(g) * degree_measure(G)))


@dataclass(frozen=True)
class LabelingMap:
    """Bijection vertex -> position; ``positions[v]`` is 0-based."""

    positions: tuple

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        if sorted(pos) != list(range(len(pos))):
            raise InputError("labeling is not a bijection onto 0..n-1")
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def order(self) -> np.ndarray:
        """Vertex sitting at each position."""
        order = np.empty(self.n, dtype=int)
        order[list(self.positions)] = np.arange(self.n)
        return order

    @classmethod
    def identity(cls, n: int) -> "LabelingMap":
        return cls(tuple(range(n)))

    @classmethod
    def from_order(cls, order) -> "LabelingMap":
        pos = np.empty(len(order), dtype=int)
        pos[np.asarray(order, dtype=int)] = np.arange(len(order))
        return cls(tuple(pos.tolist()))


def canonical_labeling(G: Graph) -> LabelingMap:
    """Degree-ascending order, ties broken by vertex index."""
    order = np.lexsort((np.arange(G.n), G.degrees))
    return LabelingMap.from_order(order)


@dataclass(frozen=True, eq=False)
class StepMeasure:
    """Piecewise-constant density on [0, 1]."""

    breakpoints: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.breakpoints, dtype=float)
        dens = np.asarray(self.densities, dtype=float)
        if x.ndim != 1 or len(x) != len(dens) + 1:
            raise InputError("need one density per cell")
        if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
            raise InputError("breakpoints must increase from 0 to 1")
        if np.any(dens < 0):
            raise InputError("densities must be nonnegative")
        total = float(np.sum(dens * np.diff(x)))
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"density integrates to {total!r}, not 1")
        object.__setattr__(self, "breakpoints", _readonly(x))
        object.__setattr__(self, "densities", _readonly(dens))

    @classmethod
    def uniform_cells(cls, masses) -> "StepMeasure":
        masses = np.asarray(masses, dtype=float)
        N = len(masses)
        return cls(np.linspace(0.0, 1.0, N + 1), masses * N)

    @property
    def masses(self) -> np.ndarray:
        return self.densities * np.diff(self.breakpoints)

    def integral(self) -> float:
        return float(self.masses.sum())

    def cell_masses(self, N: int) -> np.ndarray:
        """Mass of each of N equal cells; exact because the CDF is piecewise linear."""
        cdf = np.concatenate([[0.0], np.cumsum(self.masses)])
        grid = np.linspace(0.0, 1.0, N + 1)
        return np.diff(np.interp(grid, self.breakpoints, cdf))

    def l1_distance(self, other: "StepMeasure") -> float:
        """Integral of |density difference| over [0, 1]."""
        x = np.union1d(self.breakpoints, other.breakpoints)
        mid = (x[:-1] + x[1:]) / 2
        a = self.densities[np.searchsorted(self.breakpoints, mid) - 1]
        b = other.densities[np.searchsorted(other.breakpoints, mid) - 1]
        return float(np.sum(np.abs(a - b) * np.diff(x)))


@dataclass(frozen=True, eq=False)
class StepKernel:
    """Symmetric kernel constant on the products of N equal cells.

    For a lift, ``values`` holds raw edge weights.  ``normalized()`` rescales to
    total mass one; its row sums are the lifted degree measure of each cell.
    """

    values: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.values, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise InputError("kernel values must be square")
        if not np.allclose(W, W.T, rtol=1e-12, atol=0.0):
            raise InputError("kernel is not symmetric")
        if np.any(W < 0):
            raise InputError("kernel values must be nonnegative")
        object.__setattr__(self, "values", _readonly(W))

    @property
    def cells(self) -> int:
        return self.values.shape[0]

    def refine(self, N: int) -> "StepKernel":
        if N % self.cells:
            raise InputError(f"{N} cells do not refine {self.cells}")
        r = N // self.cells
        return StepKernel(np.kron(self.values, np.ones((r, r))))

    def normalized(self) -> np.ndarray:
        return self.values / self.values.sum()

    def cell_masses(self) -> np.ndarray:
        return self.normalized().sum(axis=1)

    def measure(self) -> StepMeasure:
        return StepMeasure.uniform_cells(self.cell_masses())


def lift_measure(G: Graph, label: LabelingMap) -> StepMeasure:
    mu = degree_measure(G)
    return StepMeasure(np.linspace(0.0, 1.0, G.n + 1), G.n * mu[label.order])


def lift_kernel(G: Graph, label: LabelingMap) -> StepKernel:
    o = label.order
    return StepKernel(G.adjacency[np.ix_(o, o)])


def common_cells(m: int, n: int) -> int:
    L = math.lcm(m, n)
    if L <= MAX_REFINEMENT:
        return L
    if m * n <= MAX_REFINEMENT:
        return m * n
    raise RefinementTooLarge(
        f"common refinement of {m} and {n} cells needs {L} > {MAX_REFINEMENT} cells"
    )


def refine_common(k1: StepKernel, k2: StepKernel):
    N = common_cells(k1.cells, k2.cells)
    return k1.refine(N), k2.refine(N)


def step_project(f, mu: StepMeasure, grid: int) -> np.ndarray:
    """mu-weighted average of a cell vector over each of ``grid`` vertex cells."""
    f = np.asarray(f, dtype=float)
    N = len(f)
    if N % grid:
        raise InputError(f"{N} cells do not refine a {grid}-cell partition")
    m = mu.cell_masses(N).reshape(grid, -1)
    fb = f.reshape(grid, -1)
    return (fb * m).sum(axis=1) / m.sum(axis=1)


def expand(fv, N: int) -> np.ndarray:
    """Repeat a per-vertex-cell vector onto N refinement cells."""
    fv = np.asarray(fv, dtype=float)
    return np.repeat(fv, N // len(fv))


def incidence(G: Graph, S, T) -> float:
    """E(S, T): total weight of ordered pairs (s, t), s in S, t in T."""
    s = _as_index(S, G.n)
    t = _as_index(T, G.n)
    if not s.any() or not t.any():
        return 0.0
    return float(G.adjacency[np.ix_(s, t)].sum())
