"""Node and graph embedding against a frozen model, plus embedding file I/O."""

from __future__ import annotations

import csv
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import vertex_description
from .graph import Graph
from .train import SirgnModel, concatenated

log = logging.getLogger(__name__)

EMB_MAGIC = b"ISGNEMB1"


@dataclass
class NodeEmbedding:
    values: np.ndarray
    node_ids: list


@dataclass
class GraphSignature:
    matrix: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return self.matrix.ravel()


def node_representation(g: Graph, model: SirgnModel, threads: int | None = None) -> np.ndarray:
    """Concatenated per-level representation before scaling and PCA."""
    model.check_graph(g)
    return concatenated(g, model, threads)


def embed_nodes(g: Graph, model: SirgnModel, threads: int | None = None) -> NodeEmbedding:
    rep = node_representation(g, model, threads)
    out = model.pca.transform(model.full_scaler.transform(rep))
    return NodeEmbedding(out, list(g.node_ids))


def graph_descriptions(g: Graph, model: SirgnModel, threads: int | None = None) -> np.ndarray:
    """Per-node membership distribution over the graph-level clusters."""
    if model.graph_kmeans is None or model.pca_scaler is None:
        raise ValueError("model has no graph-level component (train with w > 0)")
    emb = embed_nodes(g, model, threads).values
    return vertex_description(emb, model.graph_kmeans, model.pca_scaler, threads)


def pool(g: Graph, r: np.ndarray) -> np.ndarray:
    """Sum of ``outer(r_u, r_v)`` over every neighbor traversal ``u -> v``.

    Undirected edges are traversed from both endpoints, so the total mass
    is ``2|E|``; directed graphs follow out-edges only (mass ``|E|``).
    """
    return r.T @ (g.adjacency("out") @ r)


def embed_graph(g: Graph, model: SirgnModel, threads: int | None = None) -> GraphSignature:
    return GraphSignature(pool(g, graph_descriptions(g, model, threads)))


def embed_many(graphs, model: SirgnModel, threads: int | None = None):
    """Row-stack linearized signatures.

    Returns ``(matrix, errors)`` where ``errors`` lists ``(index, message)``
    for graphs that failed; their rows are NaN.
    """
    if model.graph_kmeans is None:
        raise ValueError("model has no graph-level component (train with w > 0)")
    w = model.graph_kmeans.c
    graphs = list(graphs)
    out = np.full((len(graphs), w * w), np.nan)
    errors = []
    for i, g in enumerate(graphs):
        try:
            out[i] = embed_graph(g, model, threads).vector
        except (ValueError, ArithmeticError) as exc:
            log.error("graph %d: %s", i, exc)
            errors.append((i, str(exc)))
    return out, errors


# ---------------------------------------------------------------- file formats


def write_embeddings_csv(emb: NodeEmbedding, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id"] + [f"e{k}" for k in range(emb.values.shape[1])])
        for nid, row in zip(emb.node_ids, emb.values.tolist()):
            w.writerow([nid] + [repr(x) for x in row])


def read_embeddings_csv(path) -> NodeEmbedding:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["node_id"]:
        raise ValueError(f"{path}: missing node_id header")
    ids, vals = [], []
    for row in rows[1:]:
        tok = row[0]
        try:
            ids.append(int(tok))
        except ValueError:
            ids.append(tok)
        vals.append([float(x) for x in row[1:]])
    values = np.array(vals, dtype=np.float64).reshape(len(ids), len(rows[0]) - 1)
    return NodeEmbedding(values, ids)


def write_embeddings_bin(values, path) -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(EMB_MAGIC)
        fh.write(struct.pack("<QQ", *values.shape))
        fh.write(values.tobytes())


def read_embeddings_bin(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:8] != EMB_MAGIC:
        raise ValueError(f"{path}: not an embedding file")
    rows, cols = struct.unpack_from("<QQ", data, 8)
    body = data[24:]
    if len(body) != rows * cols * 8:
        raise ValueError(f"{path}: truncated embedding body")
    return np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(np.float64)
