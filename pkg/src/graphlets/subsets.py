"""Maximize a subset-pair objective over pairs of nonempty cell sets.

An objective is a function of an ``ops`` object exposing three primitives:

* ``bil(Q)`` -> chi_S^T Q chi_T
* ``ls(v)``  -> chi_S . v
* ``lt(v)``  -> chi_T . v

and returns the (nonnegative) value for every pair in the batch.  The same
objective runs on the exhaustive grid, on random pairs, and on the single-cell
toggles used by hill climbing; only the broadcasting shape differs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExactModeTooLarge, InputError

EXACT_LIMIT = 12
DEFAULT_SAMPLES = 10_000
RNG_NAME = "philox-numpy"


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class SubsetResult:
    value: float
    S: tuple
    T: tuple
    lower_bound: bool
    evaluated: int

    def witness(self) -> dict:
        return {"S": list(self.S), "T": list(self.T)}


class _Grid:
    """Rows of S against every T: results have shape (bs, bt)."""

    def __init__(self, Xs, Xt):
        self.Xs, self.Xt = Xs, Xt

    def bil(self, Q):
        return self.Xs @ Q @ self.Xt.T

    def ls(self, v):
        return (self.Xs @ v)[:, None]

    def lt(self, v):
        return (self.Xt @ v)[None, :]


class _Paired:
    """Row i of S against row i of T: results have shape (b,)."""

    def __init__(self, Xs, Xt):
        self.Xs, self.Xt = Xs, Xt

    def bil(self, Q):
        return np.einsum("ij,ij->i", self.Xs @ Q, self.Xt)

    def ls(self, v):
        return self.Xs @ v

    def lt(self, v):
        return self.Xt @ v


class _Toggles:
    """All 2N single-cell toggles of (s, t): first the N toggles of S, then of T.

    Each primitive costs one matrix-vector product.
    """

    def __init__(self, s, t):
        self.s, self.t = s, t
        self.ds = 1.0 - 2.0 * s  # +1 adds a cell, -1 removes it
        self.dt = 1.0 - 2.0 * t

    def bil(self, Q):
        Qt = Q @ self.t
        sQ = self.s @ Q
        base = self.s @ Qt
        return np.concatenate([base + self.ds * Qt, base + self.dt * sQ])

    def ls(self, v):
        base = self.s @ v
        return np.concatenate([base + self.ds * v, np.full(len(v), base)])

    def lt(self, v):
        base = self.t @ v
        return np.concatenate([np.full(len(v), base), base + self.dt * v])


def _evaluate(objective, ops, empty):
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(objective(ops), dtype=float)
    vals = np.where(empty | ~np.isfinite(vals), -np.inf, vals)
    return vals


def all_masks(N: int) -> np.ndarray:
    """Every nonempty subset of N cells as a 0/1 float matrix, in binary order."""
    codes = np.arange(1, 2**N, dtype=np.int64)
    return ((codes[:, None] >> np.arange(N)) & 1).astype(float)


def _cells(row) -> tuple:
    return tuple(int(i) for i in np.flatnonzero(row > 0.5))


def exact_max(objective, N: int, chunk: int | None = None) -> SubsetResult:
    if N > EXACT_LIMIT:
        raise ExactModeTooLarge(
            f"exact enumeration needs at most {EXACT_LIMIT} cells, got {N}"
        )
    X = all_masks(N)
    m = len(X)
    chunk = chunk or max(1, 2**20 // m)
    best, bs, bt = -np.inf, 0, 0
    no_empty = np.zeros((1, 1), dtype=bool)
    for start in range(0, m, chunk):
        vals = _evaluate(objective, _Grid(X[start:start + chunk], X), no_empty)
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        if vals[i, j] > best:
            best, bs, bt = vals[i, j], start + i, j
    return SubsetResult(float(best), _cells(X[bs]), _cells(X[bt]), False, m * m)


def _random_pairs(rng, b, N):
    Xs = rng.random((b, N)) < 0.5
    Xt = rng.random((b, N)) < 0.5
    fs = rng.integers(0, N, size=b)
    ft = rng.integers(0, N, size=b)
    es = ~Xs.any(axis=1)
    et = ~Xt.any(axis=1)
    Xs[es, fs[es]] = True
    Xt[et, ft[et]] = True
    return Xs.astype(float), Xt.astype(float)


def hill_climb(objective, s, t, value, max_steps: int | None = None):
    """Greedy single-cell toggles until no toggle improves the objective."""
    N = len(s)
    s, t = s.copy(), t.copy()
    max_steps = max_steps or 4 * N + 16
    evaluated = 0
    for _ in range(max_steps):
        ops = _Toggles(s, t)
        size_s, size_t = s.sum(), t.sum()
        empty = np.concatenate([
            ((size_s + ops.ds) < 0.5) | (size_t < 0.5),
            (size_s < 0.5) | ((size_t + ops.dt) < 0.5),
        ])
        vals = _evaluate(objective, ops, empty)
        evaluated += 2 * N
        k = int(np.argmax(vals))
        if not vals[k] > value + 1e-14 * max(1.0, abs(value)):
            break
        value = float(vals[k])
        if k < N:
            s[k] = 1.0 - s[k]
        else:
            t[k - N] = 1.0 - t[k - N]
    return value, s, t, evaluated


def sampled_max(
    objective, N: int, samples: int = DEFAULT_SAMPLES, seed: int = 0, starts: int = 8,
    batch: int = 2048,
) -> SubsetResult:
    """Random pairs (each cell kept with probability 1/2) plus hill climbing.

    The result is a lower bound on the true maximum.
    """
    if samples < 1:
        raise InputError("need at least one sample")
    rng = make_rng(seed)
    pool_v, pool_s, pool_t = [], [], []
    for start in range(0, samples, batch):
        b = min(batch, samples - start)
        Xs, Xt = _random_pairs(rng, b, N)
        vals = _evaluate(objective, _Paired(Xs, Xt), np.zeros(b, dtype=bool))
        keep = np.argsort(-vals, kind="stable")[:starts]
        pool_v.append(vals[keep])
        pool_s.append(Xs[keep])
        pool_t.append(Xt[keep])
    v = np.concatenate(pool_v)
    Xs = np.concatenate(pool_s)
    Xt = np.concatenate(pool_t)
    top = np.argsort(-v, kind="stable")[:starts]
    best = (-np.inf, None, None)
    evaluated = samples
    for i in top:
        val, s, t, ev = hill_climb(objective, Xs[i], Xt[i], float(v[i]))
        evaluated += ev
        if val > best[0]:
            best = (val, s, t)
    return SubsetResult(float(best[0]), _cells(best[1]), _cells(best[2]), True, evaluated)


def maximize(objective, N: int, mode: str = "exact", samples: int = DEFAULT_SAMPLES,
             seed: int = 0) -> SubsetResult:
    if mode == "exact":
        return exact_max(objective, N)
    if mode == "sampled":
        return sampled_max(objective, N, samples=samples, seed=seed)
    raise InputError(f"unknown mode {mode!r}")


def evaluate_pair(objective, S, T, N: int) -> float:
    """Objective value at one explicit pair of cell sets."""
    s = np.zeros((1, N))
    t = np.zeros((1, N))
    s[0, list(S)] = 1.0
    t[0, list(T)] = 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(np.asarray(objective(_Paired(s, t)))[0])
