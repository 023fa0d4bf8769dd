"""Streaming learners used by the embedding pipeline.

All three accept data incrementally (``partial_fit``) so training can run
over an unbounded stream of generated graphs without holding them in memory.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist


class NotFittedError(RuntimeError):
    pass


def _as_batch(x, dim):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("expected a 2-D batch")
    if dim is not None and x.shape[1] != dim:
        raise ValueError(f"dimension mismatch: expected {dim} columns, got {x.shape[1]}")
    return x


class Scaler:
    """Standardizing scaler with a streaming (Chan et al.) mean/variance merge.

    Variance is the population variance. Zero-variance dimensions map to 0.
    """

    def __init__(self, dim: int | None = None):
        self.dim = dim
        self.count = 0
        self.mean = None if dim is None else np.zeros(dim)
        self.m2 = None if dim is None else np.zeros(dim)

    def partial_fit(self, batch) -> "Scaler":
        x = _as_batch(batch, self.dim)
        if self.dim is None:
            self.dim = x.shape[1]
            self.mean = np.zeros(self.dim)
            self.m2 = np.zeros(self.dim)
        nb = x.shape[0]
        if nb == 0:
            return self
        mb = x.mean(axis=0)
        m2b = ((x - mb) ** 2).sum(axis=0)
        na = self.count
        n = na + nb
        delta = mb - self.mean
        self.mean = self.mean + delta * (nb / n)
        self.m2 = self.m2 + m2b + delta ** 2 * (na * nb / n)
        self.count = n
        return self

    @property
    def std(self) -> np.ndarray:
        if not self.count:
            raise NotFittedError("scaler has not seen any data")
        return np.sqrt(self.m2 / self.count)

    def transform(self, batch) -> np.ndarray:
        if not self.count:
            raise NotFittedError("scaler has not seen any data")
        x = _as_batch(batch, self.dim)
        std = self.std
        out = np.zeros_like(x)
        nz = std > 0
        out[:, nz] = (x[:, nz] - self.mean[nz]) / std[nz]
        return out


class MiniBatchKMeans:
    """Mini-batch k-means.

    The first ``partial_fit`` seeds with k-means++ and runs up to ``t``
    Lloyd iterations on that batch. Later calls do one pass of the
    per-centroid ``1/count`` update (a running mean of assigned rows).
    """

    def __init__(self, c: int, t: int = 100, seed: int = 0):
        if c < 1:
            raise ValueError("c must be >= 1")
        self.c = c
        self.t = t
        self.seed = seed
        self.dim = None
        self.centroids = None
        self.counts = None

    @property
    def fitted(self) -> bool:
        return self.centroids is not None

    def partial_fit(self, batch) -> "MiniBatchKMeans":
        x = _as_batch(batch, self.dim)
        if x.shape[0] < 1:
            raise ValueError("empty batch")
        if not self.fitted:
            if x.shape[0] < self.c:
                raise ValueError(f"first batch has {x.shape[0]} rows, need at least c={self.c}")
            self.dim = x.shape[1]
            self._init_fit(x)
            return self
        labels = _nearest(x, self.centroids)
        n_new = np.bincount(labels, minlength=self.c).astype(np.float64)
        sums = np.zeros_like(self.centroids)
        np.add.at(sums, labels, x)
        hit = n_new > 0
        total = self.counts[hit] + n_new[hit]
        self.centroids[hit] = (self.centroids[hit] * self.counts[hit, None] + sums[hit]) / total[:, None]
        self.counts[hit] = total
        return self

    def _init_fit(self, x):
        rng = np.random.default_rng(self.seed)
        centers = _kmeanspp(x, self.c, rng)
        for _ in range(self.t):
            labels = _nearest(x, centers)
            new = centers.copy()
            counts = np.bincount(labels, minlength=self.c)
            sums = np.zeros_like(centers)
            np.add.at(sums, labels, x)
            hit = counts > 0
            new[hit] = sums[hit] / counts[hit, None]
            if not hit.all():
                # empty clusters take the batch points farthest from their centroid
                d = ((x - new[labels]) ** 2).sum(axis=1)
                far = np.argsort(-d, kind="stable")
                for k, idx in zip(np.flatnonzero(~hit), far):
                    new[k] = x[idx]
            if np.array_equal(new, centers):
                break
            centers = new
        labels = _nearest(x, centers)
        self.centroids = centers
        self.counts = np.maximum(np.bincount(labels, minlength=self.c), 1).astype(np.float64)

    def distances(self, rows) -> np.ndarray:
        """Exact Euclidean distance of every row to every centroid."""
        if not self.fitted:
            raise NotFittedError("k-means model is not fitted")
        x = _as_batch(rows, self.dim)
        return cdist(x, self.centroids)

    def inertia(self, rows) -> float:
        return float((self.distances(rows).min(axis=1) ** 2).sum())


def _sqdist(x, centers):
    d = (x * x).sum(1)[:, None] - 2 * x @ centers.T + (centers * centers).sum(1)
    return np.maximum(d, 0)


def _nearest(x, centers):
    return np.argmin(_sqdist(x, centers), axis=1)


def _kmeanspp(x, c, rng):
    n = x.shape[0]
    centers = np.empty((c, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = ((x - centers[0]) ** 2).sum(1)
    for k in range(1, c):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centers[k] = x[idx]
        closest = np.minimum(closest, ((x - centers[k]) ** 2).sum(1))
    return centers


class IncrementalPCA:
    """PCA from streamed mean/scatter statistics.

    ``partial_fit`` merges each batch into the running mean and scatter
    matrix; ``finalize`` eigendecomposes the population covariance once.
    Each component's largest-magnitude entry is made positive.
    """

    def __init__(self, p: int, dim: int | None = None):
        self.p = p
        self.dim = dim
        self.count = 0
        self.mean = None
        self._scatter = None
        self.components = None
        self.explained_variance = None

    def partial_fit(self, batch) -> "IncrementalPCA":
        x = _as_batch(batch, self.dim)
        if self.dim is None:
            self.dim = x.shape[1]
        if self.p > self.dim:
            raise ValueError(f"p={self.p} exceeds input dimension {self.dim}")
        if self._scatter is None:
            self.mean = np.zeros(self.dim)
            self._scatter = np.zeros((self.dim, self.dim))
        nb = x.shape[0]
        if nb == 0:
            return self
        mb = x.mean(axis=0)
        xc = x - mb
        na = self.count
        n = na + nb
        delta = mb - self.mean
        self._scatter += xc.T @ xc + np.outer(delta, delta) * (na * nb / n)
        self.mean = self.mean + delta * (nb / n)
        self.count = n
        return self

    @property
    def covariance(self) -> np.ndarray:
        return self._scatter / self.count

    def finalize(self) -> "IncrementalPCA":
        if self.count < self.p:
            raise ValueError(f"need at least p={self.p} samples, have {self.count}")
        cov = self.covariance
        vals, vecs = np.linalg.eigh((cov + cov.T) / 2)
        order = np.argsort(-vals, kind="stable")[: self.p]
        comps = vecs[:, order].T.copy()
        big = np.argmax(np.abs(comps), axis=1)
        signs = np.sign(comps[np.arange(self.p), big])
        signs[signs == 0] = 1
        self.components = comps * signs[:, None]
        self.explained_variance = np.maximum(vals[order], 0.0)
        return self

    @property
    def finalized(self) -> bool:
        return self.components is not None

    def transform(self, rows) -> np.ndarray:
        if not self.finalized:
            raise NotFittedError("PCA has not been finalized")
        x = _as_batch(rows, self.dim)
        return (x - self.mean) @ self.components.T
