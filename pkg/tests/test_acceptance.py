"""Acceptance criteria, one test each.

Every test records a single "Criterion N: PASS/FAIL ..." line in RESULTS (printed
by the conftest terminal summary, and by ``python tests/test_acceptance.py``)
and then asserts the criterion at its stated tolerance.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from graphlets.distances import (  # noqa: E402
    degree_distribution_distance,
    equivalence_check,
    mu_norm,
    quantize_four_fifths,
    spectral_distance,
)
from graphlets.generators import (  # noqa: E402
    blowup,
    chung_lu,
    complete,
    complete_bipartite,
    weight_shape,
)
from graphlets.graph import Graph, canonical_labeling, expand, lift_kernel, lift_measure, step_project, union  # noqa: E402
from graphlets.quasirandom import (  # noqa: E402
    bipartite_epsilon_spectral,
    qr_epsilon_discrepancy,
    qr_epsilon_spectral,
    qr_trace_defect,
)
from graphlets.rankdecomp import (  # noqa: E402
    DegreeSplit,
    RankKSplit,
    rank2_decompose,
    rank2_eta_xi,
    rank_k_eigs,
    split_operator,
    union_spectrum_check,
)
from graphlets.spectral import quadratic_form, spectrum, trace_power  # noqa: E402

from oracles import (  # noqa: E402
    connected_graphs,
    exact_graph,
    exact_rank2_parts,
    matrix_qr_disc,
    random_degree_split,
    random_weighted,
    switched_pair,
)

RESULTS: dict = {}
SEED = 20240611


def record(num: int, ok: bool, detail: str, started: float):
    line = f"Criterion {num}: {'PASS' if ok else 'FAIL'} {detail} ({time.perf_counter() - started:.1f}s)"
    RESULTS[num] = line
    print(line)
    assert ok, line


def _rng(num):
    return np.random.default_rng([SEED, num])


def test_criterion_01_two_part_operator_exact():
    t0, rng = time.perf_counter(), _rng(1)
    worst_val = worst_vec = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 51))
        G = Graph(random_weighted(rng, n, density=float(rng.uniform(0.1, 0.8))))
        split = DegreeSplit(*random_degree_split(rng, G.degrees, 2))
        eta, xi = rank2_eta_xi(G, split)
        X = split_operator(G, split)
        ev = np.linalg.eigvalsh(X)
        ev = ev[np.argsort(-np.abs(ev))]
        want = sorted([1.0, eta])
        worst_val = max(worst_val, np.max(np.abs(np.sort(ev[:2]) - want)),
                        float(np.max(np.abs(ev[2:]), initial=0.0)))
        if np.linalg.norm(xi) > 0:
            worst_vec = max(worst_vec, float(np.linalg.norm(X @ xi - eta * xi)))
    ok = worst_val <= 1e-9 and worst_vec <= 1e-9 and time.perf_counter() - t0 < 10
    record(1, ok, f"max spectrum error {worst_val:.2e}, max residual {worst_vec:.2e}", t0)


def test_criterion_02_complete_graph_certificate():
    t0 = time.perf_counter()
    err = max(abs(qr_epsilon_spectral(complete(n)).epsilon - 1 / (n - 1)) for n in range(3, 21))
    record(2, err <= 1e-10, f"max |eps - 1/(n-1)| = {err:.2e} over n = 3..20", t0)


def test_criterion_03_discrepancy_below_spectral():
    t0, rng = time.perf_counter(), _rng(3)
    graphs = [A for n in range(2, 6) for A in connected_graphs(n)]
    graphs += [random_weighted(rng, int(rng.integers(2, 9))) for _ in range(200)]
    worst_excess = worst_oracle = -np.inf
    for A in graphs:
        G = Graph(A)
        disc = qr_epsilon_discrepancy(G, mode="exact").epsilon
        oracle = matrix_qr_disc(A)
        worst_oracle = max(worst_oracle, abs(disc - oracle))
        worst_excess = max(worst_excess, oracle - qr_epsilon_spectral(G).epsilon)
    elapsed = time.perf_counter() - t0
    ok = worst_excess <= 1e-12 and worst_oracle <= 1e-12 and elapsed < 120
    record(3, ok, f"{len(graphs)} graphs, max (disc - spec) = {worst_excess:.3g}, "
                  f"engine vs brute force {worst_oracle:.1e}", t0)


def test_criterion_04_reverse_bound():
    t0, rng = time.perf_counter(), _rng(4)
    checked, worst = 0, -np.inf
    while checked < 100:
        A, B = switched_pair(rng, int(rng.integers(4, 11)), deltas=int(rng.integers(1, 4)),
                             scale=float(10 ** rng.uniform(-4, -0.5)))
        r = equivalence_check(Graph(A, allow_loops=True), Graph(B, allow_loops=True))
        if not (0 < r.eps_disc < 0.02):
            continue
        checked += 1
        worst = max(worst, r.eps_spec - 20 * r.eps_disc * math.log(1 / r.eps_disc))
    record(4, worst <= 1e-9, f"{checked} pairs, max (eps_spec - bound) = {worst:.3g}", t0)


def test_criterion_05_quantizer():
    t0, rng = time.perf_counter(), _rng(5)
    worst_err = worst_norm = 0.0
    for _ in range(1000):
        N = int(rng.integers(1, 129))
        mu = rng.dirichlet(np.ones(N))
        f = rng.normal(size=N) * rng.choice([1e-3, 1.0, 1e3])
        f /= mu_norm(f, mu)
        h = quantize_four_fifths(f, mu)
        worst_err = max(worst_err, mu_norm(f - h, mu))
        worst_norm = max(worst_norm, mu_norm(h, mu))
    ok = worst_err <= 0.2501 and worst_norm <= 1
    record(5, ok, f"max ||f - h|| = {worst_err:.4f}, max ||h|| = {worst_norm:.6f}", t0)


def test_criterion_06_step_projection_identity():
    t0, rng = time.perf_counter(), _rng(6)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        G = Graph(random_weighted(rng, n))
        lab = canonical_labeling(G)
        N = n * int(rng.integers(1, 6))
        K = lift_kernel(G, lab).refine(N).normalized()
        w = K.sum(1)
        f = rng.normal(size=N)
        lhs = f @ (w * f) - f @ K @ f
        ft = step_project(f, lift_measure(G, lab), n)
        fv = np.empty(n)
        fv[lab.order] = ft
        rest = f - expand(ft, N)
        worst = max(worst, abs(lhs - quadratic_form(G, fv, fv) - rest @ (w * rest)))
    record(6, worst <= 1e-10, f"max identity defect {worst:.2e}", t0)


SIZES = (64, 128, 256, 512)
MEAN_DEGREE = 16.0


def _sequence_medians(stat):
    return [float(np.median([stat(chung_lu(np.full(n, MEAN_DEGREE), s)) for s in range(3)]))
            for n in SIZES]


def test_criterion_07_convergence_trend():
    t0 = time.perf_counter()
    med = _sequence_medians(lambda G: qr_epsilon_spectral(G).epsilon)
    decreasing = all(b < a for a, b in zip(med, med[1:]))
    halved = med[-1] < med[0] / 2
    ok = decreasing and halved and time.perf_counter() - t0 < 60
    detail = ", ".join(f"n={n}: {m:.3f}" for n, m in zip(SIZES, med))
    note = "" if ok else "; at fixed mean degree eps stays near 2/sqrt(16), see notes"
    record(7, ok, f"median eps {detail}{note}", t0)


def test_criterion_08_union_spectrum():
    t0 = time.perf_counter()
    n = 400
    x = (np.arange(n) + 0.5) / n
    rows, ok = [], True
    for s in range(3):
        G1 = chung_lu(40 * (0.2 + 1.6 * (1 - x)), 2 * s)
        G2 = chung_lu(40 * (0.2 + 1.6 * x), 2 * s + 1)
        r = union_spectrum_check(G1, G2)
        good = (r.rho0_gap <= 1e-9 and r.rho1_gap <= r.eps and r.bulk <= r.eps
                and r.alignment_gap is not None and r.alignment_gap <= 2 * r.eps)
        ok &= good
        rows.append(f"eps={r.eps:.3f} |rho1-eta|={r.rho1_gap:.3f} bulk={r.bulk:.3f} "
                    f"align={r.alignment_gap:.3f}")
    record(8, ok, "; ".join(rows), t0)


def test_criterion_09_exact_round_trip():
    t0, rng = time.perf_counter(), _rng(9)
    worst = {"resid": 0.0, "eta": 0.0, "frow": 0.0, "alpha": 0.0}
    for _ in range(100):
        a, b = exact_rank2_parts(rng, int(rng.integers(4, 41)))
        G = Graph(exact_graph(a, b), allow_loops=True)
        split, diag = rank2_decompose(G)
        eta, _ = rank2_eta_xi(G, DegreeSplit(a, b))
        alpha = min(a.sum(), b.sum()) / G.vol
        worst["resid"] = max(worst["resid"], diag.residual)
        worst["eta"] = max(worst["eta"], abs(diag.eta - eta))
        worst["frow"] = max(worst["frow"], diag.frow_gap)
        worst["alpha"] = max(worst["alpha"], abs(split.alpha - alpha))
    ok = (worst["resid"] <= 1e-6 and worst["eta"] <= 1e-8 and worst["frow"] <= 1e-8
          and worst["alpha"] <= 1e-8)
    record(9, ok, " ".join(f"{k}={v:.1e}" for k, v in worst.items()), t0)


def test_criterion_10_noisy_round_trip():
    t0, rng = time.perf_counter(), _rng(10)
    n = 400
    G1 = chung_lu(weight_shape("ramp-down", n, 40), 100)
    G2 = chung_lu(weight_shape("ramp-up", n, 40), 101)
    G = union(G1, G2)
    split, _ = rank2_decompose(G)
    eps = float(np.max(np.abs(spectrum(G).rho[2:])))
    A, d = G.adjacency, G.degrees
    dp, dpp = split.d_prime, split.d_doubleprime
    worst = 0.0
    for i in range(1000):
        if i % 2:
            s = rng.random(n) < rng.uniform(0.02, 0.98)
        else:
            lo = int(rng.integers(0, n - 1))
            s = np.zeros(n, dtype=bool)
            s[lo:int(rng.integers(lo + 1, n + 1))] = True
        if not s.any():
            continue
        e = A[np.ix_(s, s)].sum()
        pred = dp[s].sum() ** 2 / dp.sum() + dpp[s].sum() ** 2 / dpp.sum()
        worst = max(worst, abs(e - pred) / d[s].sum())
    record(10, worst <= 8 * eps, f"max deviation / vol(S) = {worst:.4f}, 8 eps = {8 * eps:.4f}", t0)


def test_criterion_11_rank_k_structure():
    t0, rng = time.perf_counter(), _rng(11)
    worst_res, worst_k2, too_many = 0.0, 0.0, 0
    for k in (2, 3, 4, 5):
        for _ in range(10):
            G = Graph(random_weighted(rng, int(rng.integers(k + 1, 61)), density=0.3))
            parts = random_degree_split(rng, G.degrees, k)
            s = RankKSplit(parts)
            X = split_operator(G, s)
            pairs = rank_k_eigs(G, s)
            for eta, xi in pairs:
                worst_res = max(worst_res, float(np.linalg.norm(X @ xi - eta * xi)))
            too_many += int(np.sum(np.abs(np.linalg.eigvalsh(X)) > 1e-9) > k)
            if k == 2:
                eta2, _ = rank2_eta_xi(G, DegreeSplit(*parts))
                got = sorted(e for e, _ in pairs)
                worst_k2 = max(worst_k2, float(np.max(np.abs(np.array(got) - sorted([1.0, eta2])))))
    ok = worst_res <= 1e-8 and too_many == 0 and worst_k2 <= 1e-10
    record(11, ok, f"max residual {worst_res:.1e}, rank violations {too_many}, "
                   f"k=2 agreement {worst_k2:.1e}", t0)


def test_criterion_12_bipartite_exactness():
    t0 = time.perf_counter()
    corrected = literal = 0.0
    for a, b in ((2, 2), (2, 5), (4, 4)):
        G = complete_bipartite(a, b)
        corrected = max(corrected, bipartite_epsilon_spectral(G, range(a)).epsilon)
        literal = max(literal, abs(bipartite_epsilon_spectral(G, range(a), unit_factor=True).epsilon - 0.5))
    ok = corrected <= 1e-10 and literal <= 1e-10
    record(12, ok, f"corrected factor max eps {corrected:.1e}, literal factor max |eps - 1/2| {literal:.1e}", t0)


def test_criterion_13_trace_defect():
    t0 = time.perf_counter()
    k4 = abs(trace_power(complete(4), 4) - 28 / 27)
    med = _sequence_medians(lambda G: qr_trace_defect(G, 4).epsilon)
    decreasing = all(b < a for a, b in zip(med, med[1:]))
    ok = k4 <= 1e-12 and decreasing
    detail = ", ".join(f"n={n}: {m:.3f}" for n, m in zip(SIZES, med))
    note = "" if ok else "; at fixed mean degree the defect grows with n, see notes"
    record(13, ok, f"K4 error {k4:.1e}; median defect {detail}{note}", t0)


def test_criterion_14_invariances():
    t0, rng = time.perf_counter(), _rng(14)
    axiom = 0.0
    for _ in range(100):
        Gs = [Graph(random_weighted(rng, int(rng.integers(2, 9)))) for _ in range(3)]
        d = {(i, j): degree_distribution_distance(Gs[i], Gs[j]) for i in range(3) for j in range(3)}
        axiom = max(axiom, *(d[i, i] for i in range(3)), *(-d[k] for k in d),
                    *(abs(d[i, j] - d[j, i]) for i, j in d),
                    d[0, 2] - d[0, 1] - d[1, 2], d[0, 1] - d[0, 2] - d[2, 1], d[1, 2] - d[1, 0] - d[0, 2])
    lift = 0.0
    for _ in range(20):
        G = Graph(random_weighted(rng, int(rng.integers(2, 9))))
        for k in (2, 3, 4):
            lift = max(lift, spectral_distance(G, blowup(G, k)).value)
    ok = axiom <= 1e-12 and lift <= 1e-12
    record(14, ok, f"max axiom violation {axiom:.1e}, max blow-up distance {lift:.1e}", t0)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
