"""Command-line entry point: ``striations <subcommand> ...``."""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from striations import analysis, centrality, generators, render
from striations.graph import Graph, format_edge_list, read_edge_list, to_directed_coinflip
from striations.ordering import format_order_csv, order_by, random_ordering
from striations.centrality import PowerIterationConfig, read_rank_csv

ORDER_MEASURES = centrality.MEASURES + ("random",)


def write_atomic(path: str | Path, data: bytes | str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(args) -> Graph:
    return read_edge_list(args.input, directed=args.directed, remap=args.remap)


def _power_cfg(args) -> PowerIterationConfig:
    return PowerIterationConfig(damping=args.d, tolerance=args.tol, max_iterations=args.max_iter)


def cmd_generate(args) -> None:
    if args.model == "ba":
        g = generators.preferential_attachment(args.n, args.m, args.seed)
    elif args.model == "ws":
        g = generators.watts_strogatz(args.n, args.k, args.p, args.seed)
    elif args.model == "er":
        g = generators.erdos_renyi(args.n, args.p, args.seed)
    elif args.model == "config":
        family, param = ("powerlaw", args.gamma) if args.gamma is not None else ("poisson", args.mu)
        seq = generators.sample_degree_sequence(args.n, family, param, args.seed)
        g = generators.configuration_model(seq, args.seed)
    else:
        init = generators.KroneckerInitiator([[args.a, args.b], [args.c, args.dd]], args.t)
        g = generators.kronecker(init, args.seed)
    if args.coinflip:
        g = to_directed_coinflip(g, args.seed)
    write_atomic(args.output, format_edge_list(g))


def cmd_rank(args) -> None:
    g = _load(args)
    rv = centrality.compute(g, args.measure, _power_cfg(args))
    write_atomic(args.output, centrality.format_rank_csv(rv))


def cmd_order(args) -> None:
    rv = read_rank_csv(args.input)
    o = random_ordering(len(rv), args.seed) if args.random else order_by(rv)
    write_atomic(args.output, format_order_csv(o))


def cmd_render(args) -> None:
    g = _load(args)
    cfg = _power_cfg(args)
    pr = centrality.pagerank(g, cfg) if g.n else None
    if args.measure == "random":
        ordering = random_ordering(g.n, args.seed)
    elif args.measure == "pagerank":
        ordering = order_by(pr)
    else:
        ordering = order_by(centrality.compute(g, args.measure, cfg))
    spec = render.RenderSpec(
        width=args.width,
        cell_color=args.cell_color,
        degree_threshold=args.threshold,
        bin_reduce=args.bin_reduce,
    )
    if args.grid == 1 and args.tile_dir is None:
        raster = render.rasterize(g, ordering, pr, spec)
    else:
        raster = render.tile_and_stitch(g, ordering, pr, spec, args.grid, tile_dir=args.tile_dir, threads=args.threads)
    write_atomic(args.output, render.write_ppm(raster))


def cmd_neighborhood(args) -> None:
    g = _load(args)
    pr = centrality.pagerank(g, _power_cfg(args))
    ds = analysis.neighborhood_distribution(g, pr, order_by(pr), args.threshold, args.x_scale)
    write_atomic(args.output, analysis.format_scatter_csv(ds))


def cmd_scatter(args) -> None:
    g = _load(args)
    rv = centrality.compute(g, args.measure, _power_cfg(args))
    ds = analysis.scatter(g, rv, order_by(rv), args.x_axis)
    write_atomic(args.output, analysis.format_scatter_csv(ds))


def cmd_boundary(args) -> None:
    g = _load(args)
    ev = centrality.eigenvector_centrality(g, tolerance=args.tol)
    rep = analysis.boundary_check(g, ev, args.degree_class)
    write_atomic(args.output, analysis.format_boundary_csv(rep))


def cmd_info(args) -> None:
    g = _load(args)
    deg = g.degree()
    lines = [
        f"nodes {g.n}",
        f"edges {g.edge_count}",
        f"directed {int(g.directed)}",
        f"self_loops_dropped {g.meta.get('self_loops_dropped', 0)}",
        f"duplicates_dropped {g.meta.get('duplicates_dropped', 0)}",
    ]
    if g.n:
        lines += [
            f"degree_min {int(deg.min())}",
            f"degree_max {int(deg.max())}",
            f"degree_mean {float(deg.mean()):.17g}",
            f"isolated {int((deg + g.in_degree() == 0).sum())}",
        ]
    text = "\n".join(lines) + "\n"
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="striations", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker cap for tiled rendering")

    graph_in = argparse.ArgumentParser(add_help=False)
    graph_in.add_argument("-i", "--input", required=True, help="edge-list file")
    graph_in.add_argument("--directed", action="store_true", help="read arcs instead of undirected edges")
    graph_in.add_argument("--remap", action="store_true", help="renumber node ids densely")

    power = argparse.ArgumentParser(add_help=False)
    power.add_argument("--d", type=float, default=0.85, help="PageRank damping")
    power.add_argument("--tol", type=float, default=1e-10, help="power-iteration tolerance")
    power.add_argument("--max-iter", type=int, default=50, help="PageRank iteration cap")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("-o", "--output", required=True)

    gen = sub.add_parser("generate", help="write a synthetic graph as an edge list")
    models = gen.add_subparsers(dest="model", required=True)
    stoch = argparse.ArgumentParser(add_help=False, parents=[common, out])
    stoch.add_argument("--seed", type=int, required=True)
    stoch.add_argument("--coinflip", action="store_true", help="orient each edge by a fair coin")
    p = models.add_parser("ba", parents=[stoch], help="preferential attachment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p = models.add_parser("ws", parents=[stoch], help="Watts-Strogatz")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p = models.add_parser("er", parents=[stoch], help="Erdos-Renyi G(n, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p = models.add_parser("config", parents=[stoch], help="configuration model")
    p.add_argument("--n", type=int, required=True)
    fam = p.add_mutually_exclusive_group(required=True)
    fam.add_argument("--gamma", type=float, help="power-law exponent")
    fam.add_argument("--mu", type=float, help="Poisson mean")
    p = models.add_parser("kron", parents=[stoch], help="stochastic Kronecker (2x2 initiator)")
    for name in ("a", "b", "c"):
        p.add_argument(f"--{name}", type=float, required=True)
    p.add_argument("--d", dest="dd", type=float, required=True)
    p.add_argument("--t", type=int, required=True)
    gen.set_defaults(func=cmd_generate)

    p = sub.add_parser("rank", parents=[common, graph_in, power, out], help="edge list -> score CSV")
    p.add_argument("--measure", choices=centrality.MEASURES, default="pagerank")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("order", parents=[common, out], help="score CSV -> ordering CSV")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--random", action="store_true", help="ignore scores, shuffle uniformly")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("render", parents=[common, graph_in, power, out], help="edge list -> PPM")
    p.add_argument("--measure", choices=ORDER_MEASURES, default="pagerank")
    p.add_argument("--width", type=int, default=1000)
    p.add_argument("--grid", type=int, default=1)
    p.add_argument("--tile-dir", help="also keep tiles as tile_<row>_<col>.ppm here")
    p.add_argument("--cell-color", choices=("pagerank_sum", "degree_class", "flat"), default="pagerank_sum")
    p.add_argument("--bin-reduce", choices=("max", "count"), default="max")
    p.add_argument("--threshold", type=int, default=10, help="degree_class threshold")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("neighborhood", parents=[common, graph_in, power, out], help="neighbour PageRank CSV")
    p.add_argument("--threshold", type=int, default=10)
    p.add_argument("--x-scale", choices=("linear", "log"), default="log")
    p.set_defaults(func=cmd_neighborhood)

    p = sub.add_parser("scatter", parents=[common, graph_in, power, out], help="value/value or value/order CSV")
    p.add_argument("--measure", choices=centrality.MEASURES, default="pagerank")
    p.add_argument("--x-axis", choices=("value", "order"), default="value")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("boundary", parents=[common, graph_in, out], help="degree-1/2 spectral residuals")
    p.add_argument("--degree-class", type=int, choices=(1, 2), default=1)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("info", parents=[common, graph_in], help="node/edge counts and degree summary")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    needs_seed = (args.command == "render" and args.measure == "random") or (args.command == "order" and args.random)
    if needs_seed and args.seed is None:
        parser.error("--seed is required for random orderings")
    try:
        args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"striations: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
