"""Small synthetic graphs with known structural roles."""

from __future__ import annotations

import numpy as np

from .graph import Graph

MOTIFS = {
    "triangle": (3, [(0, 1), (1, 2), (2, 0)]),
    "square": (4, [(0, 1), (1, 2), (2, 3), (3, 0)]),
    "pentagon": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
    "house": (5, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)]),
    "star": (5, [(0, 1), (0, 2), (0, 3), (0, 4)]),
    "clique4": (4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
    "path": (3, [(0, 1), (1, 2)]),
    "diamond": (4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]),
}


def motif_ring(repeats: int) -> tuple[int, list[tuple[int, int]]]:
    """A ring of ``repeats * 8`` nodes; ring node ``i`` carries motif ``i mod 8``
    attached through the motif's node 0. Returns ``(n_nodes, edges)``."""
    kinds = list(MOTIFS)
    ring = repeats * len(kinds)
    edges = [(i, (i + 1) % ring) for i in range(ring)]
    nxt = ring
    for i in range(ring):
        size, local = MOTIFS[kinds[i % len(kinds)]]
        edges += [(a + nxt, b + nxt) for a, b in local]
        edges.append((i, nxt))
        nxt += size
    return nxt, edges


def refinement_classes(g: Graph) -> np.ndarray:
    """Stable color-refinement classes: nodes share a class iff no number of
    neighbor-multiset refinement rounds tells them apart."""
    colors = np.zeros(g.n_nodes, dtype=np.int64)
    n_colors = 1
    while True:
        keys = [(int(colors[u]), tuple(sorted(colors[g.neighbors(u)].tolist())))
                for u in range(g.n_nodes)]
        palette = {k: i for i, k in enumerate(sorted(set(keys)))}
        colors = np.array([palette[k] for k in keys], dtype=np.int64)
        if len(palette) == n_colors:
            return colors
        n_colors = len(palette)


def edges_to_graph(n: int, edges) -> Graph:
    src, dst = zip(*edges) if edges else ((), ())
    return Graph.from_edges(n, list(src), list(dst))
