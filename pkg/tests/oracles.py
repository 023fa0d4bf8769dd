"""Brute-force reference implementations, independent of the package code paths."""

from fractions import Fraction
from itertools import combinations, product

import numpy as np


def dense_adj(n, edges, directed=False):
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] = 1
        if not directed:
            a[v, u] = 1
    return a


def two_pass_standardize(x):
    x = np.asarray(x, dtype=float)
    mean = sum(x) / len(x)
    var = sum((x - mean) ** 2) / len(x)
    return mean, np.sqrt(var)


def exhaustive_kmeans(points, k):
    """Best partition of ``points`` into ``k`` non-empty groups by brute force."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    best, best_centers = np.inf, None
    for assign in product(range(k), repeat=n):
        if len(set(assign)) < k:
            continue
        centers = np.array([points[[i for i in range(n) if assign[i] == j]].mean(axis=0)
                            for j in range(k)])
        cost = sum(((points[i] - centers[assign[i]]) ** 2).sum() for i in range(n))
        if cost < best - 1e-12:
            best, best_centers = cost, centers
    return best_centers, best


def covariance_pca(x, p):
    x = np.asarray(x, dtype=float)
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / len(x)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1][:p]
    return vecs[:, order].T, vals[order]


def distances_matrix(a):
    """All-pairs hop distances from boolean matrix powers (inf when unreachable)."""
    n = len(a)
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0)
    reach = np.eye(n, dtype=bool)
    power = np.eye(n)
    for k in range(1, n):
        power = (power @ a > 0).astype(float)
        new = (power > 0) & ~reach
        dist[new] = k
        reach |= power > 0
    return dist


def betweenness_bruteforce(n, edges, directed=False):
    """Exact (Fraction) betweenness from walk counts: walks of length d(s,t)
    are exactly the shortest paths."""
    a = dense_adj(n, edges, directed).astype(np.int64)
    dist = distances_matrix(a.astype(float))
    powers = [np.eye(n, dtype=np.int64)]
    for _ in range(n):
        powers.append(powers[-1] @ a)

    def sigma(s, t):
        d = dist[s, t]
        return 0 if np.isinf(d) else int(powers[int(d)][s, t])

    bc = [Fraction(0)] * n
    for s in range(n):
        for t in range(n):
            if s == t or np.isinf(dist[s, t]):
                continue
            if not directed and t < s:
                continue
            st = sigma(s, t)
            for v in range(n):
                if v in (s, t):
                    continue
                if dist[s, v] + dist[v, t] == dist[s, t]:
                    bc[v] += Fraction(sigma(s, v) * sigma(v, t), st)
    return bc


def clique_number_bruteforce(n, edges):
    """Largest clique containing each node, by enumerating every vertex subset."""
    adj = np.zeros(n, dtype=np.int64)
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    is_clique = np.zeros(1 << n, dtype=bool)
    is_clique[0] = True
    for b in range(n):
        rest = np.arange(1 << b, dtype=np.int64)
        is_clique[(1 << b) + rest] = is_clique[rest] & ((adj[b] & rest) == rest)
    masks = np.flatnonzero(is_clique)
    sizes = np.array([bin(m).count("1") for m in masks])
    out = np.zeros(n, dtype=int)
    for v in range(n):
        has = (masks >> v) & 1 == 1
        out[v] = sizes[has].max()
    return out


def pagerank_dense(n, edges, directed=False, damping=0.85):
    a = dense_adj(n, edges, directed)
    out = a.sum(axis=1)
    p = np.zeros((n, n))
    for u in range(n):
        p[u] = a[u] / out[u] if out[u] else 1.0 / n
    google = damping * p.T + (1 - damping) / n
    x = np.full(n, 1.0 / n)
    for _ in range(100000):
        new = google @ x
        if np.abs(new - x).sum() < 1e-15:
            break
        x = new
    return new / new.sum()


def _top_projection(m, start, rel=1e-9):
    vals, vecs = np.linalg.eigh(m)
    top = vals.max()
    if top <= 0:
        return np.zeros(len(start))
    basis = vecs[:, vals >= top - rel * max(top, 1.0)]
    x = basis @ (basis.T @ start)
    return np.abs(x / np.linalg.norm(x))


def eigenvector_dense(n, edges):
    a = dense_adj(n, edges)
    return _top_projection(a + np.eye(n), np.ones(n))


def hits_dense(n, edges, directed=False):
    a = dense_adj(n, edges, directed)
    return _top_projection(a @ a.T, np.ones(n)), _top_projection(a.T @ a, np.ones(n))


def connected(n, edges):
    seen, stack = {0}, [0]
    nbrs = {u: set() for u in range(n)}
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    while stack:
        u = stack.pop()
        for v in nbrs[u] - seen:
            seen.add(v)
            stack.append(v)
    return len(seen) == n


def all_connected_graphs(n):
    pairs = list(combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        if connected(n, edges):
            yield edges


def wl_classes(n, edges, rounds=None):
    """Color refinement (1-WL) to stability, or for ``rounds`` rounds."""
    nbrs = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    colors = [0] * n
    k = 0
    while rounds is None or k < rounds:
        sig = [(colors[u], tuple(sorted(colors[v] for v in nbrs[u]))) for u in range(n)]
        palette = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [palette[s] for s in sig]
        k += 1
        if len(set(new)) == len(set(colors)) and rounds is None:
            return new
        colors = new
    return colors
