"""Per-level kernel: vertex description and vertex aggregation."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .graph import Graph, degree_vector
from .mlkit import MiniBatchKMeans, Scaler

_CHUNK = 4096


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("SIRGN_THREADS")
        threads = int(env) if env else os.cpu_count() or 1
    return max(1, int(threads))


def _rowwise(fn, n_rows, threads):
    """Apply ``fn(slice)`` over row chunks and stack; results are chunking-independent."""
    threads = resolve_threads(threads)
    if threads == 1 or n_rows <= _CHUNK:
        return fn(slice(0, n_rows))
    chunks = [slice(i, min(i + _CHUNK, n_rows)) for i in range(0, n_rows, _CHUNK)]
    with ThreadPoolExecutor(threads) as ex:
        return np.vstack(list(ex.map(fn, chunks)))


def description_from_distances(dist: np.ndarray) -> np.ndarray:
    """Invert and normalize distances into cluster-membership probabilities.

    Each row becomes ``(max - d) / (max - min)`` rescaled to sum to one.
    Rows with all distances equal become uniform.
    """
    dist = np.asarray(dist, dtype=np.float64)
    hi = dist.max(axis=1, keepdims=True)
    lo = dist.min(axis=1, keepdims=True)
    span = hi - lo
    flat = (span == 0).ravel()
    span[flat] = 1.0
    dv = (hi - dist) / span
    dv[flat] = 1.0
    dv /= dv.sum(axis=1, keepdims=True)
    return dv


def vertex_description(emb, kmeans: MiniBatchKMeans, scaler: Scaler,
                       threads: int | None = None) -> np.ndarray:
    """Scale ``emb``, measure distances to the centroids and turn them into
    per-node membership distributions (rows on the probability simplex)."""
    emb = np.asarray(emb, dtype=np.float64)
    if emb.shape[1] != scaler.dim or scaler.dim != kmeans.dim:
        raise ValueError(
            f"dimension mismatch: embedding {emb.shape[1]}, scaler {scaler.dim}, k-means {kmeans.dim}")

    def run(rows):
        return description_from_distances(kmeans.distances(scaler.transform(emb[rows])))

    return _rowwise(run, emb.shape[0], threads)


def _spmm(adj, dv, threads):
    return _rowwise(lambda rows: adj[rows] @ dv, adj.shape[0], threads)


def aggregate_undirected(g: Graph, dv, threads: int | None = None) -> np.ndarray:
    """Sum of neighbor descriptions per node."""
    dv = _check_rows(g, dv)
    return _spmm(g.adjacency("out"), dv, threads)


def aggregate_directed(g: Graph, dv, threads: int | None = None) -> np.ndarray:
    """In-neighbor sums followed by out-neighbor sums (``|V| x 2c``)."""
    if not g.directed:
        raise ValueError("aggregate_directed requires a directed graph")
    dv = _check_rows(g, dv)
    return np.hstack([_spmm(g.adjacency("in"), dv, threads),
                      _spmm(g.adjacency("out"), dv, threads)])


def aggregate_edge_labeled(g: Graph, dv, nel: int, threads: int | None = None) -> np.ndarray:
    """One block of ``c`` columns per edge label; block ``el`` sums the
    descriptions of neighbors reached over edges labeled ``el``.

    Directed graphs yield ``nel`` in-blocks followed by ``nel`` out-blocks.
    """
    dv = _check_rows(g, dv)
    check_edge_labels(g, nel)
    directions = ("in", "out") if g.directed else ("out",)
    blocks = [_spmm(g.adjacency(d, label=el), dv, threads)
              for d in directions for el in range(nel)]
    return np.hstack(blocks)


def check_edge_labels(g: Graph, nel: int) -> None:
    if g.edge_labels is None:
        raise ValueError("graph carries no edge labels")
    bad = np.flatnonzero(g.edge_labels >= nel)
    if len(bad):
        k = int(bad[0])
        u = int(np.searchsorted(g.indptr, k, side="right") - 1)
        v = int(g.indices[k])
        raise ValueError(
            f"edge ({g.node_ids[u]}, {g.node_ids[v]}) has label {int(g.edge_labels[k])}, "
            f"but the model supports only {nel} edge label(s)")


def aggregate(g: Graph, dv, nel: int = 0, threads: int | None = None) -> np.ndarray:
    """Dispatch to the aggregation variant matching the graph."""
    if nel > 0:
        return aggregate_edge_labeled(g, dv, nel, threads)
    if g.directed:
        return aggregate_directed(g, dv, threads)
    return aggregate_undirected(g, dv, threads)


def _check_rows(g, dv):
    dv = np.asarray(dv, dtype=np.float64)
    if dv.shape[0] != g.n_nodes:
        raise ValueError(f"description has {dv.shape[0]} rows for {g.n_nodes} nodes")
    return dv


def attach_node_labels(emb, labels, nnl: int) -> np.ndarray:
    """Append a one-hot node-label block of width ``nnl``."""
    emb = np.asarray(emb, dtype=np.float64)
    if nnl == 0:
        return emb
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != emb.shape[0]:
        raise ValueError("one label per row required")
    if len(labels) and (labels.max() >= nnl or labels.min() < 0):
        raise ValueError(f"node label {int(labels.max())} out of range for nnl={nnl}")
    onehot = np.zeros((emb.shape[0], nnl))
    onehot[np.arange(len(labels)), labels] = 1.0
    return np.hstack([emb, onehot])


def degree_init(g: Graph, c: int, nel: int = 0) -> np.ndarray:
    """Initial representation: ``c`` copies of the degree, laid out like the
    aggregation output of the same variant (in/out blocks, per-label blocks)."""
    if nel > 0:
        check_edge_labels(g, nel)
        cols = []
        directions = (("in", g.in_indptr, g.in_edge_labels), ("out", g.indptr, g.edge_labels)) \
            if g.directed else (("out", g.indptr, g.edge_labels),)
        for _, indptr, labels in directions:
            owner = np.repeat(np.arange(g.n_nodes), np.diff(indptr))
            for el in range(nel):
                deg = np.bincount(owner[labels == el], minlength=g.n_nodes)
                cols.append(np.repeat(deg[:, None].astype(np.float64), c, axis=1))
        return np.hstack(cols)
    if g.directed:
        din, dout = degree_vector(g)
        return np.hstack([np.repeat(din[:, None].astype(np.float64), c, axis=1),
                          np.repeat(dout[:, None].astype(np.float64), c, axis=1)])
    deg = degree_vector(g).astype(np.float64)
    return np.repeat(deg[:, None], c, axis=1)


def block_width(c: int, directed: bool, nel: int) -> int:
    """Width of one level's structural representation."""
    return c * max(nel, 1) * (2 if directed else 1)
