"""Structural node metrics used as regression targets, and an OLS R² evaluator."""

from __future__ import annotations

import warnings
from collections import deque

import numpy as np
import scipy.sparse as sp

from .graph import Graph

METRICS = ("degree", "pagerank", "eigenvector", "betweenness", "hits_hub",
           "hits_authority", "clique_number")


class ConvergenceWarning(UserWarning):
    pass


class CliqueBudgetExceeded(RuntimeError):
    pass


def _undirected_adj(g: Graph) -> sp.csr_matrix:
    a = g.adjacency("out")
    if g.directed:
        a = ((a + a.T) > 0).astype(np.float64).tocsr()
    return a


def _neighbor_sets(g: Graph) -> list[set]:
    a = _undirected_adj(g)
    return [set(a.indices[a.indptr[u]:a.indptr[u + 1]].tolist()) for u in range(g.n_nodes)]


def degree_centrality(g: Graph) -> np.ndarray:
    """``|N(v)| / |V|`` (divides by ``|V|``, not ``|V| - 1``)."""
    deg = np.diff(_undirected_adj(g).indptr)
    return deg / g.n_nodes


def pagerank(g: Graph, damping: float = 0.85, tol: float = 1e-10,
             max_iter: int = 1000) -> np.ndarray:
    """Power iteration; dangling nodes spread their mass uniformly."""
    n = g.n_nodes
    a = g.adjacency("out")
    out_deg = np.diff(a.indptr).astype(np.float64)
    dangling = out_deg == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / out_deg[~dangling]
    # transition applied as x -> A^T (x / outdeg)
    at = a.T.tocsr()
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = damping * (at @ (x * inv) + x[dangling].sum() / n) + (1 - damping) / n
        new /= new.sum()
        err = np.abs(new - x).sum()
        x = new
        if err < tol:
            return x
    warnings.warn(f"pagerank did not converge: residual {err:.3e}", ConvergenceWarning)
    return x


def _power(op, x0, tol, max_iter, name):
    x = x0 / np.linalg.norm(x0)
    for _ in range(max_iter):
        y = op(x)
        norm = np.linalg.norm(y)
        if norm == 0:
            return np.zeros_like(x)
        y /= norm
        err = np.abs(y - x).max()
        x = y
        if err < tol:
            return x
    warnings.warn(f"{name} did not converge: residual {err:.3e}", ConvergenceWarning)
    return x


def eigenvector_centrality(g: Graph, tol: float = 1e-13, max_iter: int = 100000) -> np.ndarray:
    """Dominant eigenvector of the adjacency matrix, unit L2 norm.

    Iterates ``A + I`` (same eigenvectors, no sign oscillation on bipartite
    graphs) from the all-ones vector. On disconnected graphs the result is
    the projection of that start vector onto the dominant eigenspace.
    """
    if g.n_nodes == 0:
        return np.zeros(0)
    a = g.adjacency("out")
    x = _power(lambda v: a @ v + v, np.ones(g.n_nodes), tol, max_iter, "eigenvector centrality")
    return np.abs(x)


def hits(g: Graph, tol: float = 1e-13, max_iter: int = 100000) -> tuple[np.ndarray, np.ndarray]:
    """Hub and authority scores, each unit L2 norm.

    Hubs iterate ``A A^T`` and authorities ``A^T A``, both from all-ones;
    on undirected graphs the two computations coincide.
    """
    n = g.n_nodes
    if n == 0:
        return np.zeros(0), np.zeros(0)
    a = g.adjacency("out")
    at = a.T.tocsr()
    hub = _power(lambda v: a @ (at @ v), np.ones(n), tol, max_iter, "hits hub")
    if g.directed:
        auth = _power(lambda v: at @ (a @ v), np.ones(n), tol, max_iter, "hits authority")
    else:
        auth = hub.copy()
    return np.abs(hub), np.abs(auth)


def betweenness_centrality(g: Graph) -> np.ndarray:
    """Brandes' algorithm, raw counts with endpoints excluded.

    Undirected pairs are counted once per unordered pair.
    """
    n = g.n_nodes
    indptr, indices = g.indptr, g.indices
    bc = np.zeros(n)
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in indices[indptr[v]:indptr[v + 1]].tolist():
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc if g.directed else bc / 2


def maximal_cliques(g: Graph, budget: int | None = None):
    """Bron-Kerbosch with Tomita pivoting over the undirected skeleton."""
    nbrs = _neighbor_sets(g)
    found = 0

    def expand(r, p, x):
        nonlocal found
        if not p and not x:
            found += 1
            if budget is not None and found > budget:
                raise CliqueBudgetExceeded(f"more than {budget} maximal cliques")
            yield r
            return
        pivot = max(p | x, key=lambda u: len(nbrs[u] & p))
        for v in list(p - nbrs[pivot]):
            yield from expand(r + [v], p & nbrs[v], x & nbrs[v])
            p = p - {v}
            x = x | {v}

    yield from expand([], set(range(g.n_nodes)), set())


def node_clique_number(g: Graph, budget: int | None = 10_000_000) -> np.ndarray:
    """Size of the largest maximal clique containing each node."""
    ncn = np.zeros(g.n_nodes)
    for clique in maximal_cliques(g, budget):
        k = len(clique)
        idx = np.array(clique)
        ncn[idx] = np.maximum(ncn[idx], k)
    return ncn


def compute_metric(g: Graph, name: str) -> np.ndarray:
    if name == "degree":
        return degree_centrality(g)
    if name == "pagerank":
        return pagerank(g)
    if name == "eigenvector":
        return eigenvector_centrality(g)
    if name == "betweenness":
        return betweenness_centrality(g)
    if name == "hits_hub":
        return hits(g)[0]
    if name == "hits_authority":
        return hits(g)[1]
    if name == "clique_number":
        return node_clique_number(g)
    raise ValueError(f"unknown metric {name!r}; choose from {', '.join(METRICS)}")


def r2_score(embeddings, target, train_fraction: float = 0.8, seed: int = 0,
             ridge: float = 1e-8) -> float:
    """Held-out R² of an ordinary least squares fit with intercept.

    Returns NaN when the held-out target has zero variance.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64).ravel()
    n, p = x.shape
    if n != len(y):
        raise ValueError("embeddings and target must have the same number of rows")
    if n < 2 * (p + 1):
        raise ValueError(f"need at least {2 * (p + 1)} rows for {p} features, got {n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = int(round(train_fraction * n))
    if not 0 < n_train < n:
        raise ValueError("train_fraction leaves an empty split")
    tr, te = order[:n_train], order[n_train:]
    xd = np.hstack([np.ones((n, 1)), x])
    gram = xd[tr].T @ xd[tr] + ridge * np.eye(p + 1)
    beta = np.linalg.solve(gram, xd[tr].T @ y[tr])
    resid = y[te] - xd[te] @ beta
    ss_tot = ((y[te] - y[te].mean()) ** 2).sum()
    if ss_tot == 0:
        return float("nan")
    return float(1 - (resid ** 2).sum() / ss_tot)
