"""Command-line interface.

Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 refused precondition.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import distances as dist
from . import generators as gen
from . import quasirandom as qr
from . import rankdecomp as rd
from .errors import (
    GraphletError,
    InputError,
    NeedTwoSizes,
    NumericalFailure,
    PreconditionRefused,
)
from .graph import (
    Graph,
    connected_components,
    degree_measure,
    fmt_float,
    load_graph,
    to_edge_list,
    to_json,
)
from .report import csv_text, dumps, metadata
from .spectral import spectrum
from .subsets import DEFAULT_SAMPLES, EXACT_LIMIT

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_REFUSED = 0, 2, 3, 4


# -- helpers -----------------------------------------------------------------


def _read_numbers(path) -> np.ndarray:
    vals = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0]
        for tok in line.split():
            try:
                vals.append(float(tok))
            except ValueError:
                raise InputError(f"{path}: line {lineno}: not a number: {tok!r}") from None
    return np.asarray(vals)


def _partition(G: Graph, path) -> list:
    index = {v: i for i, v in enumerate(G.ids)}
    out = []
    for x in _read_numbers(path):
        if x != int(x) or int(x) not in index:
            raise InputError(f"partition names unknown vertex {x!r}")
        out.append(index[int(x)])
    return out


def _mode(args, n):
    if args.mode:
        return args.mode
    return "exact" if n <= EXACT_LIMIT else "sampled"


def _emit(args, payload, text=None):
    """Write JSON (default) or a preformatted text body to --out or stdout."""
    body = text if text is not None else dumps({"metadata": metadata(args.seed, args.threads), **payload})
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)


def _load(args, path):
    return load_graph(path, format=args.format, allow_loops=args.allow_loops)


# -- subcommands ---------------------------------------------------------------


def _family_weights(args, n):
    return gen.weight_shape(args.shape, n, args.scale if args.scale is not None else n / 4)


def cmd_generate(args):
    fam = args.family
    split = None
    if fam == "chung-lu":
        w = _read_numbers(args.weights[0]) if args.weights else _family_weights(args, args.n)
        G = gen.chung_lu(w, args.seed)
    elif fam == "union":
        if args.weights:
            ws = [_read_numbers(p) for p in args.weights]
        else:
            shapes = args.shapes or ["ramp-down", "ramp-up"]
            scale = args.scale if args.scale is not None else args.n / 10
            ws = [gen.weight_shape(s, args.n, scale) for s in shapes[: args.k]]
        G, split = gen.union_quasirandom(ws, args.seed)
    elif fam == "bipartite":
        if not args.weights or len(args.weights) != 2:
            raise InputError("bipartite needs two --weights files (X side, Y side)")
        G = gen.bipartite_quasirandom(_read_numbers(args.weights[0]), _read_numbers(args.weights[1]),
                                      args.seed)
    elif fam == "blowup":
        if not args.input:
            raise InputError("blowup needs --input")
        G = gen.blowup(_load(args, args.input), args.k)
    else:
        G = gen.named(fam.replace("-", "_"), *args.params)
    meta = metadata(args.seed, args.threads)
    if args.json:
        payload = {"graph": to_json(G)}
        if split is not None:
            payload["split"] = split.parts
        _emit(args, payload)
    else:
        head = "".join(f"# {k}: {v}\n" for k, v in meta.items())
        _emit(args, None, head + to_edge_list(G))
    if split is not None and args.split_out:
        Path(args.split_out).write_text(dumps({"metadata": meta, "parts": split.parts}), encoding="utf-8")
    return EXIT_OK


def _top_bottom(rho, k=10):
    return {"top": rho[:k], "bottom": rho[-k:]}


def cmd_analyze(args):
    G = _load(args, args.input)
    comps = connected_components(G)
    spec = spectrum(G)
    mode = _mode(args, G.n)
    report = {
        "n": G.n,
        "vol": G.vol,
        "components": comps,
        "degree_measure": degree_measure(G),
        "spectrum": _top_bottom(spec.rho),
        "certificates": {
            "spectral": qr.qr_epsilon_spectral(G).epsilon,
            "disc": qr.qr_epsilon_discrepancy(G, mode, args.samples, args.seed).to_json(),
            "trace": qr.qr_trace_defect(G, args.k).to_json(),
        },
    }
    report["rho"] = spec.rho
    report["eps_spectral"] = report["certificates"]["spectral"]
    if comps > 1:
        report["hint"] = (f"graph has {comps} components; analyze or decompose each component"
                          " separately")
    _emit(args, report)
    return EXIT_OK


def cmd_certify(args):
    G = _load(args, args.input)
    prop = args.property
    if prop in ("bip-spectral", "bip-disc"):
        if not args.partition:
            raise InputError("bipartite certificates need --partition FILE")
        X = _partition(G, args.partition)
    if prop == "spectral":
        cert = qr.qr_epsilon_spectral(G)
    elif prop == "disc":
        cert = qr.qr_epsilon_discrepancy(G, _mode(args, G.n), args.samples, args.seed)
    elif prop == "trace":
        cert = qr.qr_trace_defect(G, args.k)
    elif prop == "bip-spectral":
        cert = qr.bipartite_epsilon_spectral(G, X, args.unit_factor)
    else:
        cert = qr.bipartite_epsilon_discrepancy(G, X, _mode(args, G.n), args.unit_factor,
                                                args.samples, args.seed)
    _emit(args, {"certificate": cert})
    return EXIT_OK


def cmd_decompose(args):
    G = _load(args, args.input)
    split, diag = rd.rank2_decompose(G, args.gap_min)
    _emit(args, {
        "alpha": split.alpha,
        "d_prime": split.d_prime,
        "d_doubleprime": split.d_doubleprime,
        "rho1": diag.rho1,
        "residual": diag.residual,
        "balance_gap": diag.balance_gap,
        "eta": diag.eta,
        "frow_gap": diag.frow_gap,
    })
    return EXIT_OK


def cmd_distance(args):
    G1, G2 = _load(args, args.first), _load(args, args.second)
    kind = args.kind
    if kind == "degree":
        res = dist.DistanceResult("degree", dist.degree_distribution_distance(G1, G2))
    elif kind == "spectral":
        res = dist.spectral_distance(G1, G2, args.labeling)
    else:
        cells = G1.n if kind == "cut" else _cells(G1, G2)
        mode = _mode(args, cells)
        if kind == "disc":
            res = dist.disc_distance(G1, G2, mode, args.samples, args.seed, args.labeling)
        elif kind == "disc-mu":
            res = dist.disc_mu(G1, G2, None, mode, args.samples, args.seed, args.labeling)
        else:
            res = dist.cut_distance(G1, G2, mode, args.samples, args.seed)
    _emit(args, res.to_json())
    return EXIT_OK


def _cells(G1, G2):
    from .graph import common_cells

    return common_cells(G1.n, G2.n)


def _converge_graph(args, n, seed):
    if args.degree is not None:
        w = gen.weight_shape(args.shape, n, args.degree)
    else:
        w = gen.weight_shape(args.shape, n, args.density * n)
    return gen.chung_lu(w, seed)


def converge_rows(args):
    sizes = list(args.sizes)
    if len(sizes) < 2:
        raise NeedTwoSizes("converge needs at least two sizes")
    rows = []
    eps = {}
    for seed in sorted(args.seeds):
        graphs = {n: _converge_graph(args, n, seed) for n in sorted(set(sizes))}
        for n, G in graphs.items():
            eps[(n, seed)] = qr.qr_epsilon_spectral(G).epsilon
        for n1, n2 in zip(sizes, sizes[1:]):
            G1, G2 = graphs[n1], graphs[n2]
            d_deg = dist.degree_distribution_distance(G1, G2)
            d_disc = dist.disc_mu(G1, G2, None, "sampled", args.samples, seed).value
            rows.append((n1, n2, seed, d_deg, d_disc, eps[(n1, seed)], eps[(n2, seed)]))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows, eps


def trend_summary(eps: dict, sizes) -> list:
    ordered = sorted(set(sizes))
    med = [float(np.median([v for (n, _), v in eps.items() if n == m])) for m in ordered]
    lines = [f"median_eps n={n}: {fmt_float(v)}" for n, v in zip(ordered, med)]
    dec = all(b < a for a, b in zip(med, med[1:]))
    lines.append("trend: " + ("decreasing" if dec else "not decreasing"))
    return lines


def cmd_converge(args):
    rows, eps = converge_rows(args)
    header = ["n1", "n2", "seed", "d_deg", "d_disc", "eps1", "eps2"]
    meta = metadata(list(sorted(args.seeds)), args.threads)
    comments = trend_summary(eps, args.sizes)
    if args.json:
        _emit(args, {"columns": header, "rows": [list(r) for r in rows], "summary": comments})
    else:
        _emit(args, None, csv_text(header, rows, meta, comments))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _global_flags(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--threads", type=int, default=d(1), help="thread count recorded in metadata")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=d(False), help="JSON output")
    fmt.add_argument("--csv", action="store_true", default=d(False), help="CSV output (converge)")
    p.add_argument("--out", default=d(None), help="write output to this file")
    p.add_argument("--format", choices=["edge-list", "json"], default=d(None),
                   help="input graph format (default: from file suffix)")
    p.add_argument("--allow-loops", action="store_true", default=d(False),
                   help="accept self-loops, counted once into the degree")


def _sampling(p):
    p.add_argument("--mode", choices=["exact", "sampled"], default=None,
                   help="subset search (default: exact when at most 12 cells)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphlets", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        _global_flags(p, suppress=True)
        return p

    p = add("generate", "write a generated graph")
    p.add_argument("--family", required=True,
                   choices=["chung-lu", "union", "bipartite", "blowup", "complete",
                            "complete-bipartite", "path", "cycle", "matching"])
    p.add_argument("--params", type=int, nargs="*", default=[], help="sizes for named families")
    p.add_argument("--weights", action="append", help="weight file (repeat for union parts)")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--shape", choices=gen.SHAPES, default="constant")
    p.add_argument("--shapes", nargs="+", choices=gen.SHAPES, help="part shapes for union")
    p.add_argument("--scale", type=float, default=None, help="weight scale (default n/4)")
    p.add_argument("--k", type=int, default=2, help="union parts or blow-up factor")
    p.add_argument("--input", help="base graph for blowup")
    p.add_argument("--split-out", help="write the union's ground-truth split here")
    p.set_defaults(func=cmd_generate)

    p = add("analyze", "spectrum, degree measure and certificates")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=4, help="trace power")
    _sampling(p)
    p.set_defaults(func=cmd_analyze)

    p = add("certify", "one quasirandomness certificate")
    p.add_argument("input")
    p.add_argument("--property", required=True,
                   choices=["spectral", "disc", "trace", "bip-spectral", "bip-disc"])
    p.add_argument("--partition", help="file listing the vertex ids of one side")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--unit-factor", action="store_true",
                   help="bipartite certificates with normalizing factor 1 instead of 2")
    p.add_argument("--paper-literal", dest="unit_factor", action="store_true", help=argparse.SUPPRESS)
    _sampling(p)
    p.set_defaults(func=cmd_certify)

    p = add("decompose", "rank-2 degree split")
    p.add_argument("input")
    p.add_argument("--gap-min", type=float, default=rd.GAP_MIN)
    p.set_defaults(func=cmd_decompose)

    p = add("distance", "distance between two graphs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--kind", choices=["degree", "spectral", "disc", "cut", "disc-mu"], default="degree")
    p.add_argument("--labeling", choices=list(dist.LABELINGS), default="degree-sorted")
    _sampling(p)
    p.set_defaults(func=cmd_distance)

    p = add("converge", "distances and certificates along a Chung-Lu size sequence")
    p.add_argument("--family", choices=["chung-lu"], default="chung-lu")
    p.add_argument("--shape", choices=gen.SHAPES, default="constant")
    scale = p.add_mutually_exclusive_group()
    scale.add_argument("--density", type=float, default=0.25,
                       help="weights scale as density * n (default 0.25)")
    scale.add_argument("--degree", type=float, default=None, help="fixed weight scale instead")
    p.add_argument("--sizes", type=int, nargs="+", required=True)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(func=cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphletError, OSError, UnicodeDecodeError) as exc:
        if isinstance(exc, PreconditionRefused):
            code = EXIT_REFUSED
        elif isinstance(exc, NumericalFailure):
            code = EXIT_NUMERIC
        else:
            code = EXIT_INPUT
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
