"""Command-line entry point: ``isirgn <subcommand> ...``.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import store
from .graph import GraphFormatError, RandomGraphSpec, generate_random_graph, load_edge_list, save_edge_list
from .infer import (embed_many, embed_nodes, read_embeddings_bin, read_embeddings_csv,
                    write_embeddings_bin, write_embeddings_csv)
from .metrics import METRICS, compute_metric, r2_score
from .train import TrainConfig, VariantMismatchError, train

log = logging.getLogger("isirgn")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# flag dest -> (TrainConfig field, default, type)
TRAIN_FLAGS = {
    "graphs": ("g", 200, int),
    "graph_size": ("m", 5000, int),
    "depth": ("d", 10, int),
    "clusters": ("c", 100, int),
    "pca": ("p", 100, int),
    "graph_clusters": ("w", 0, int),
    "iterations": ("t", 100, int),
    "node_labels": ("nnl", 0, int),
    "edge_labels": ("nel", 0, int),
    "max_degree_factor": ("max_degree_factor", 10.0, float),
    "seed": ("master_seed", 0, int),
}


def _threads_arg(p):
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $SIRGN_THREADS or all cores; 1 = serial)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isirgn", description="Train-once structural graph embeddings.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("train", help="train a model on random graphs")
    p.add_argument("--config", type=Path, help="flat key=value file; flags override it")
    p.add_argument("--graphs", type=int, help="random graphs per fitted object g (default: 200)")
    p.add_argument("--graph-size", type=int, help="nodes per training graph m (default: 5000)")
    p.add_argument("--depth", type=int, help="exploration depth d (default: 10)")
    p.add_argument("--clusters", type=int, help="node clusters c (default: 100)")
    p.add_argument("--pca", type=int, help="PCA components p (default: 100)")
    p.add_argument("--graph-clusters", type=int,
                   help="graph clusters w, 0 disables the graph model (default: 0)")
    p.add_argument("--iterations", type=int, help="k-means iterations t (default: 100)")
    p.add_argument("--directed", action="store_true", default=None,
                   help="train on directed graphs (default: off)")
    p.add_argument("--node-labels", type=int, help="node label count nnl (default: 0)")
    p.add_argument("--edge-labels", type=int, help="edge label count nel (default: 0)")
    p.add_argument("--max-degree-factor", type=float,
                   help="training graphs have up to this many edges per node (default: 10)")
    p.add_argument("--seed", type=int, help="master seed (default: 0)")
    p.add_argument("--out", type=Path, required=True, help="model file to write")
    _threads_arg(p)

    p = sub.add_parser("embed-nodes", help="embed the nodes of one graph")
    p.add_argument("--model", type=Path, required=True, help="model file")
    p.add_argument("--graph", type=Path, required=True, help="edge-list file")
    p.add_argument("--directed", action="store_true", help="read the graph as directed")
    p.add_argument("--labels", type=Path, help="node-label file 'node<TAB>label'")
    p.add_argument("--format", choices=("csv", "bin"), default="csv",
                   help="output format (default: csv)")
    p.add_argument("--out", type=Path, required=True, help="embedding file to write")
    _threads_arg(p)

    p = sub.add_parser("embed-graphs", help="embed every graph in a directory")
    p.add_argument("--model", type=Path, required=True, help="model file with a graph component")
    p.add_argument("--graph-dir", type=Path, required=True, help="directory of edge lists")
    p.add_argument("--pattern", default="*.edges",
                   help="file glob inside --graph-dir (default: *.edges); a sibling "
                        "<stem>.labels file supplies node labels")
    p.add_argument("--directed", action="store_true", help="read graphs as directed")
    p.add_argument("--out", type=Path, required=True, help="CSV: graph,m0..m{w*w-1}")
    _threads_arg(p)

    p = sub.add_parser("randgraph", help="write a seeded random graph")
    p.add_argument("--nodes", type=int, required=True, help="node count m")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--max-degree-factor", type=float, default=10.0,
                   help="edge budget upper bound per node (default: 10)")
    p.add_argument("--edges", type=int, default=None,
                   help="fixed edge count instead of a random budget (default: random)")
    p.add_argument("--directed", action="store_true", help="directed graph")
    p.add_argument("--node-labels", type=int, default=0, help="node label count (default: 0)")
    p.add_argument("--edge-labels", type=int, default=0, help="edge label count (default: 0)")
    p.add_argument("--labels-out", type=Path, default=None,
                   help="node-label file to write when --node-labels > 0 (default: none)")
    p.add_argument("--out", type=Path, required=True, help="edge-list file to write")

    p = sub.add_parser("metrics", help="compute structural node metrics")
    p.add_argument("--graph", type=Path, required=True, help="edge-list file")
    p.add_argument("--directed", action="store_true", help="read the graph as directed")
    p.add_argument("--metric", default="all", choices=METRICS + ("all",),
                   help="metric to compute (default: all)")
    p.add_argument("--out", type=Path, default=None,
                   help="CSV node_id,metric,value (default: stdout)")

    p = sub.add_parser("bench", help="time node inference on random graphs")
    p.add_argument("--model", type=Path, required=True, help="model file")
    p.add_argument("--nodes-list", default="10000",
                   help="comma-separated node counts (default: 10000)")
    p.add_argument("--edges-list", default="100000,200000,400000",
                   help="comma-separated edge counts (default: 100000,200000,400000)")
    p.add_argument("--repeats", type=int, default=3,
                   help="timed runs per size, fastest kept (default: 3)")
    p.add_argument("--seed", type=int, default=0, help="graph seed (default: 0)")
    p.add_argument("--out", type=Path, default=None, help="CSV output (default: stdout)")
    _threads_arg(p)

    p = sub.add_parser("eval-r2", help="held-out OLS R² of a metric from embeddings")
    p.add_argument("--embeddings", type=Path, required=True, help="embedding file (csv or bin)")
    p.add_argument("--graph", type=Path, required=True, help="edge-list file")
    p.add_argument("--directed", action="store_true", help="read the graph as directed")
    p.add_argument("--metric", required=True, choices=METRICS, help="target metric")
    p.add_argument("--train-fraction", type=float, default=0.8,
                   help="fraction of nodes used for fitting (default: 0.8)")
    p.add_argument("--seed", type=int, default=0, help="split seed (default: 0)")
    return parser


def read_config_file(path) -> dict:
    """Parse a flat ``key=value`` file (``#`` comments allowed)."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def train_config_from_args(args) -> TrainConfig:
    file_cfg = read_config_file(args.config) if args.config else {}
    unknown = set(file_cfg) - set(TRAIN_FLAGS) - {"directed"}
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    kwargs = {}
    for dest, (fname, default, typ) in TRAIN_FLAGS.items():
        value = getattr(args, dest)
        if value is None and dest in file_cfg:
            try:
                value = typ(file_cfg[dest])
            except ValueError:
                raise UsageError(f"config key {dest}: bad value {file_cfg[dest]!r}") from None
        kwargs[fname] = default if value is None else value
    directed = args.directed
    if directed is None:
        directed = file_cfg.get("directed", "false").lower() in ("1", "true", "yes", "on")
    kwargs["directed"] = directed
    try:
        return TrainConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _int_list(text, name):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{name}: expected comma-separated integers") from None


def _open_out(path):
    return open(path, "w", newline="", encoding="utf-8") if path else _Stdout()


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()


def cmd_train(args):
    cfg = train_config_from_args(args)
    t0 = time.perf_counter()
    model = train(cfg, threads=args.threads)
    store.save(model, args.out)
    print(f"trained d={cfg.d} c={cfg.c} p={cfg.p} w={cfg.w} in "
          f"{time.perf_counter() - t0:.2f}s -> {args.out}")


def _load_for(model, path, directed, labels=None):
    cfg = model.config
    if directed != cfg.directed:
        want = "directed" if cfg.directed else "undirected"
        raise VariantMismatchError(
            f"variant mismatch: model is {want}; pass {'--directed' if cfg.directed else 'no --directed'}")
    return load_edge_list(path, directed=directed, labeled=cfg.nel > 0, node_labels_path=labels)


def cmd_embed_nodes(args):
    model = store.load(args.model)
    g = _load_for(model, args.graph, args.directed, args.labels)
    emb = embed_nodes(g, model, threads=args.threads)
    if args.format == "csv":
        write_embeddings_csv(emb, args.out)
    else:
        write_embeddings_bin(emb.values, args.out)


def cmd_embed_graphs(args):
    model = store.load(args.model)
    if model.graph_kmeans is None:
        raise DataError("model has no graph component (train with --graph-clusters > 0)")
    files = sorted(p for p in args.graph_dir.glob(args.pattern) if p.is_file())
    graphs, names, errors = [], [], []
    for path in files:
        labels = path.with_suffix(".labels")
        try:
            graphs.append(_load_for(model, path, args.directed, labels if labels.exists() else None))
            names.append(path.name)
        except (GraphFormatError, ValueError) as exc:
            errors.append((path.name, str(exc)))
    mat, failed = embed_many(graphs, model, threads=args.threads)
    errors += [(names[i], msg) for i, msg in failed]
    bad = {i for i, _ in failed}
    w = model.graph_kmeans.c
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(["graph"] + [f"m{k}" for k in range(w * w)])
        for i, name in enumerate(names):
            if i not in bad:
                out.writerow([name] + [repr(x) for x in mat[i].tolist()])
    for name, msg in errors:
        print(f"error: {name}: {msg}", file=sys.stderr)
    if errors:
        raise DataError(f"{len(errors)} graph(s) failed")


def cmd_randgraph(args):
    try:
        spec = RandomGraphSpec(m=args.nodes, max_degree_factor=args.max_degree_factor,
                               seed=args.seed, directed=args.directed, nnl=args.node_labels,
                               nel=args.edge_labels, n_edges=args.edges)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    g = generate_random_graph(spec)
    save_edge_list(g, args.out, args.labels_out)


def cmd_metrics(args):
    g = load_edge_list(args.graph, directed=args.directed)
    names = METRICS if args.metric == "all" else (args.metric,)
    with _open_out(args.out) as fh:
        out = csv.writer(fh)
        out.writerow(["node_id", "metric", "value"])
        for name in names:
            for nid, val in zip(g.node_ids, compute_metric(g, name).tolist()):
                out.writerow([nid, name, repr(val)])


def bench_rows(model, nodes, edges, repeats=3, seed=0, threads=None):
    """Time ``embed_nodes`` on seeded random graphs; yields ``(|V|, |E|, seconds)``."""
    if len(nodes) == 1:
        nodes = nodes * len(edges)
    if len(edges) == 1:
        edges = edges * len(nodes)
    if len(nodes) != len(edges):
        raise UsageError("--nodes-list and --edges-list must pair up (or one must be a single value)")
    for n, e in zip(nodes, edges):
        g = generate_random_graph(RandomGraphSpec(m=n, seed=seed, n_edges=e,
                                                  directed=model.config.directed))
        best = float("inf")
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            embed_nodes(g, model, threads=threads)
            best = min(best, time.perf_counter() - t0)
        yield g.n_nodes, g.n_edges, best


def cmd_bench(args):
    model = store.load(args.model)
    if model.config.nnl or model.config.nel:
        raise DataError("bench supports unlabeled models only")
    nodes = _int_list(args.nodes_list, "--nodes-list")
    edges = _int_list(args.edges_list, "--edges-list")
    with _open_out(args.out) as fh:
        out = csv.writer(fh)
        out.writerow(["n_nodes", "n_edges", "seconds"])
        for n, e, s in bench_rows(model, nodes, edges, args.repeats, args.seed, args.threads):
            out.writerow([n, e, f"{s:.6f}"])
            fh.flush()


def cmd_eval_r2(args):
    g = load_edge_list(args.graph, directed=args.directed)
    if args.embeddings.read_bytes()[:8] == b"ISGNEMB1":
        values = read_embeddings_bin(args.embeddings)
        if values.shape[0] != g.n_nodes:
            raise DataError(f"embedding has {values.shape[0]} rows, graph has {g.n_nodes} nodes")
    else:
        emb = read_embeddings_csv(args.embeddings)
        pos = {nid: i for i, nid in enumerate(emb.node_ids)}
        missing = [nid for nid in g.node_ids if nid not in pos]
        if missing:
            raise DataError(f"no embedding for node {missing[0]!r}")
        values = emb.values[[pos[nid] for nid in g.node_ids]]
    target = compute_metric(g, args.metric)
    r2 = r2_score(values, target, args.train_fraction, args.seed)
    print(f"{args.metric} R2 = {'undefined (zero target variance)' if np.isnan(r2) else f'{r2:.6f}'}")


COMMANDS = {
    "train": cmd_train,
    "embed-nodes": cmd_embed_nodes,
    "embed-graphs": cmd_embed_graphs,
    "randgraph": cmd_randgraph,
    "metrics": cmd_metrics,
    "bench": cmd_bench,
    "eval-r2": cmd_eval_r2,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("isirgn: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"isirgn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, GraphFormatError, store.ModelFormatError, VariantMismatchError,
            FileNotFoundError, ValueError) as exc:
        print(f"isirgn {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error: %s", exc)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
