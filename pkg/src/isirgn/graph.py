"""Graph container, edge-list I/O and the seeded random graph generator."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Malformed edge-list or label file."""


@dataclass(frozen=True)
class LoadStats:
    duplicates: int = 0
    self_loops: int = 0


class Graph:
    """Immutable CSR adjacency.

    For undirected graphs ``indptr/indices`` hold the full symmetric
    neighbor lists. For directed graphs they hold out-neighbors and
    ``in_indptr/in_indices`` hold in-neighbors. Neighbor lists are sorted
    ascending. Edge labels, when present, are aligned with ``indices``
    (and ``in_indices``).
    """

    def __init__(self, n_nodes, indptr, indices, *, directed=False, edge_labels=None,
                 in_indptr=None, in_indices=None, in_edge_labels=None,
                 node_labels=None, node_ids=None, stats=None):
        self.n_nodes = int(n_nodes)
        self.directed = bool(directed)
        self.indptr = _frozen(indptr, np.int64)
        self.indices = _frozen(indices, np.int64)
        self.edge_labels = _frozen(edge_labels, np.int64)
        self.in_indptr = _frozen(in_indptr, np.int64)
        self.in_indices = _frozen(in_indices, np.int64)
        self.in_edge_labels = _frozen(in_edge_labels, np.int64)
        self.node_labels = _frozen(node_labels, np.int64)
        self.node_ids = list(range(self.n_nodes)) if node_ids is None else list(node_ids)
        self.stats = stats or LoadStats()
        if len(self.node_ids) != self.n_nodes:
            raise ValueError("node_ids length must equal n_nodes")
        if self.node_labels is not None and len(self.node_labels) != self.n_nodes:
            raise ValueError("node_labels length must equal n_nodes")

    @classmethod
    def from_edges(cls, n_nodes, src, dst, *, directed=False, edge_labels=None,
                   node_labels=None, node_ids=None) -> "Graph":
        """Build a graph from edge arrays.

        Self-loops are dropped, duplicates keep their first occurrence and
        undirected input is symmetrized.
        """
        n = int(n_nodes)
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have equal length")
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        lab = None if edge_labels is None else np.asarray(edge_labels, dtype=np.int64).ravel()
        if lab is not None and lab.shape != src.shape:
            raise ValueError("edge_labels must align with edges")

        loops = src == dst
        n_loops = int(loops.sum())
        src, dst = src[~loops], dst[~loops]
        if lab is not None:
            lab = lab[~loops]

        if directed:
            keys = src * n + dst
        else:
            keys = np.minimum(src, dst) * n + np.maximum(src, dst)
        _, first = np.unique(keys, return_index=True)
        first.sort()
        n_dup = len(keys) - len(first)
        src, dst = src[first], dst[first]
        if lab is not None:
            lab = lab[first]

        if directed:
            indptr, indices, elab = _csr(n, src, dst, lab)
            in_indptr, in_indices, in_elab = _csr(n, dst, src, lab)
            return cls(n, indptr, indices, directed=True, edge_labels=elab,
                       in_indptr=in_indptr, in_indices=in_indices, in_edge_labels=in_elab,
                       node_labels=node_labels, node_ids=node_ids,
                       stats=LoadStats(n_dup, n_loops))
        both_lab = None if lab is None else np.concatenate([lab, lab])
        indptr, indices, elab = _csr(n, np.concatenate([src, dst]),
                                     np.concatenate([dst, src]), both_lab)
        return cls(n, indptr, indices, edge_labels=elab, node_labels=node_labels,
                   node_ids=node_ids, stats=LoadStats(n_dup, n_loops))

    @property
    def n_edges(self) -> int:
        return len(self.indices) if self.directed else len(self.indices) // 2

    @property
    def n_edge_labels(self) -> int:
        return 0 if self.edge_labels is None or not len(self.edge_labels) else int(self.edge_labels.max()) + 1

    @property
    def n_node_labels(self) -> int:
        return 0 if self.node_labels is None or not len(self.node_labels) else int(self.node_labels.max()) + 1

    def neighbors(self, u: int) -> np.ndarray:
        """Out-neighbors (directed) or neighbors (undirected) of ``u``."""
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        if not self.directed:
            return self.neighbors(u)
        return self.in_indices[self.in_indptr[u]:self.in_indptr[u + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints in ascending (u, v) order; undirected edges once with u < v."""
        src = np.repeat(np.arange(self.n_nodes), np.diff(self.indptr))
        if self.directed:
            return src, self.indices.copy()
        keep = src < self.indices
        return src[keep], self.indices[keep]

    def edge_label_array(self) -> np.ndarray | None:
        """Labels aligned with :meth:`edges`."""
        if self.edge_labels is None:
            return None
        if self.directed:
            return self.edge_labels.copy()
        src = np.repeat(np.arange(self.n_nodes), np.diff(self.indptr))
        return self.edge_labels[src < self.indices]

    def adjacency(self, direction: str = "out", label: int | None = None) -> sp.csr_matrix:
        """Sparse 0/1 adjacency, rows indexed by the aggregating node.

        ``direction="in"`` gives rows of in-neighbors. ``label`` restricts to
        edges carrying that edge label.
        """
        return self._adjacency_cache(direction, label)

    def _adjacency_cache(self, direction, label):
        cache = self.__dict__.setdefault("_adj", {})
        key = (direction, label)
        if key not in cache:
            if direction == "in" and self.directed:
                indptr, indices, labels = self.in_indptr, self.in_indices, self.in_edge_labels
            else:
                indptr, indices, labels = self.indptr, self.indices, self.edge_labels
            data = np.ones(len(indices))
            if label is not None:
                if labels is None:
                    raise ValueError("graph has no edge labels")
                data = (labels == label).astype(np.float64)
            m = sp.csr_matrix((data, indices, indptr), shape=(self.n_nodes, self.n_nodes))
            m.eliminate_zeros()
            m.has_sorted_indices = True
            cache[key] = m
        return cache[key]

    def permute(self, perm) -> "Graph":
        """Relabel node ``u`` as ``perm[u]``."""
        perm = np.asarray(perm, dtype=np.int64)
        src, dst = self.edges()
        nl = None
        if self.node_labels is not None:
            nl = np.empty_like(self.node_labels)
            nl[perm] = self.node_labels
        ids = [None] * self.n_nodes
        for u, p in enumerate(perm):
            ids[p] = self.node_ids[u]
        return Graph.from_edges(self.n_nodes, perm[src], perm[dst], directed=self.directed,
                                edge_labels=self.edge_label_array(), node_labels=nl,
                                node_ids=ids)

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, |V|={self.n_nodes}, |E|={self.n_edges})"


def _frozen(a, dtype):
    if a is None:
        return None
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _csr(n, src, dst, lab):
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst, None if lab is None else lab[order]


def degree_vector(g: Graph):
    """Neighbor-list lengths. Directed graphs give ``(in_degree, out_degree)``."""
    out = np.diff(g.indptr)
    if g.directed:
        return np.diff(g.in_indptr), out
    return out


# ---------------------------------------------------------------- random graphs


@dataclass(frozen=True)
class RandomGraphSpec:
    m: int
    max_degree_factor: float = 10
    seed: int = 0
    directed: bool = False
    nnl: int = 0
    nel: int = 0
    # Fixed edge count; overrides the uniform draw (used by scaling benchmarks).
    n_edges: int | None = None

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if self.max_degree_factor < 1:
            raise ValueError("max_degree_factor must be >= 1")


def generate_random_graph(spec: RandomGraphSpec) -> Graph:
    """Seeded random graph with a uniformly drawn edge budget.

    The target edge count is uniform in ``[m, max_degree_factor * m]``,
    clamped to the number of available node pairs. Distinct pairs are then
    added by rejection sampling until the target is reached.
    """
    rng = np.random.default_rng(spec.seed)
    m = spec.m
    pair_space = m * (m - 1) if spec.directed else m * (m - 1) // 2
    if spec.n_edges is None:
        target = int(rng.integers(m, int(spec.max_degree_factor * m), endpoint=True))
    else:
        target = int(spec.n_edges)
    target = min(target, pair_space)

    if target * 2 >= pair_space:
        src, dst = _all_pairs(m, spec.directed)
        pick = np.sort(rng.choice(pair_space, size=target, replace=False))
        src, dst = src[pick], dst[pick]
    else:
        src, dst = _sample_pairs(rng, m, target, spec.directed)

    elab = rng.integers(0, spec.nel, size=len(src)) if spec.nel > 0 else None
    nlab = rng.integers(0, spec.nnl, size=m) if spec.nnl > 0 else None
    return Graph.from_edges(m, src, dst, directed=spec.directed, edge_labels=elab,
                            node_labels=nlab)


def _all_pairs(m, directed):
    u, v = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    u, v = u.ravel(), v.ravel()
    keep = u != v if directed else u < v
    return u[keep], v[keep]


def _sample_pairs(rng, m, target, directed):
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < target:
        need = target - len(keys)
        u = rng.integers(0, m, size=2 * need + 16)
        v = rng.integers(0, m, size=2 * need + 16)
        ok = u != v
        u, v = u[ok], v[ok]
        if not directed:
            u, v = np.minimum(u, v), np.maximum(u, v)
        new = u * m + v
        _, first = np.unique(new, return_index=True)
        new = new[np.sort(first)]
        new = new[~np.isin(new, keys)]
        keys = np.concatenate([keys, new[:need]])
    return keys // m, keys % m


# ---------------------------------------------------------------- edge lists


def _parse_id(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok


def _sort_ids(ids):
    ints = [i for i in ids if isinstance(i, int)]
    strs = [i for i in ids if not isinstance(i, int)]
    return sorted(ints) + sorted(strs)


def load_edge_list(path, directed: bool = False, labeled: bool = False,
                   node_labels_path=None) -> Graph:
    """Read a whitespace-separated edge list.

    Node ids (integers or arbitrary tokens) are densified in sorted order so
    that re-serialising and re-loading yields the same graph. With
    ``labeled`` a third integer column holds the edge label.
    """
    src_raw, dst_raw, lab_raw = [], [], []
    ncols = 3 if labeled else 2
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != ncols:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected {ncols} columns, got {len(parts)}")
            src_raw.append(_parse_id(parts[0]))
            dst_raw.append(_parse_id(parts[1]))
            if labeled:
                try:
                    lab_raw.append(int(parts[2]))
                except ValueError:
                    raise GraphFormatError(
                        f"{path}:{lineno}: edge label must be an integer") from None
                if lab_raw[-1] < 0:
                    raise GraphFormatError(f"{path}:{lineno}: negative edge label")

    node_label_map = {}
    if node_labels_path is not None:
        node_label_map = _read_node_labels(node_labels_path)

    ids = _sort_ids(set(src_raw) | set(dst_raw))
    index = {v: i for i, v in enumerate(ids)}
    for node in node_label_map:
        if node not in index:
            raise GraphFormatError(f"{node_labels_path}: label for unknown node {node!r}")
    src = np.fromiter((index[s] for s in src_raw), dtype=np.int64, count=len(src_raw))
    dst = np.fromiter((index[s] for s in dst_raw), dtype=np.int64, count=len(dst_raw))
    nlab = None
    if node_labels_path is not None:
        missing = [v for v in ids if v not in node_label_map]
        if missing:
            raise GraphFormatError(f"{node_labels_path}: no label for node {missing[0]!r}")
        nlab = [node_label_map[v] for v in ids]
    g = Graph.from_edges(len(ids), src, dst, directed=directed,
                         edge_labels=lab_raw if labeled else None,
                         node_labels=nlab, node_ids=ids)
    if g.stats.self_loops:
        log.warning("%s: dropped %d self-loop(s)", path, g.stats.self_loops)
    if g.stats.duplicates:
        log.info("%s: dropped %d duplicate edge(s)", path, g.stats.duplicates)
    return g


def _read_node_labels(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'node<TAB>label'")
            try:
                label = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: label must be an integer") from None
            if label < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative node label")
            out[_parse_id(parts[0])] = label
    return out


def save_edge_list(g: Graph, path, node_labels_path=None) -> None:
    """Write ``g`` with its original node ids (inverse of :func:`load_edge_list`)."""
    src, dst = g.edges()
    lab = g.edge_label_array()
    ids = g.node_ids
    with open(path, "w", encoding="utf-8") as fh:
        for k, (u, v) in enumerate(zip(src.tolist(), dst.tolist())):
            if lab is None:
                fh.write(f"{ids[u]}\t{ids[v]}\n")
            else:
                fh.write(f"{ids[u]}\t{ids[v]}\t{lab[k]}\n")
    if node_labels_path is not None and g.node_labels is not None:
        Path(node_labels_path).write_text(
            "".join(f"{ids[u]}\t{lab}\n" for u, lab in enumerate(g.node_labels.tolist())),
            encoding="utf-8")
