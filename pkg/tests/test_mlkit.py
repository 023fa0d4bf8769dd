import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import covariance_pca, exhaustive_kmeans, two_pass_standardize
from isirgn.mlkit import IncrementalPCA, MiniBatchKMeans, NotFittedError, Scaler


class TestScaler:
    def test_closed_form(self):
        s = Scaler().partial_fit([[1.0], [2.0], [3.0]])
        assert s.mean[0] == 2.0
        assert s.std[0] == pytest.approx(np.sqrt(2 / 3), abs=1e-15)
        assert s.transform([[2.0]])[0, 0] == 0.0

    def test_transform_matches_two_pass(self):
        s = Scaler().partial_fit([[1.0], [2.0], [3.0]])
        mean, std = two_pass_standardize([1.0, 2.0, 3.0])
        assert s.transform([[3.0]])[0, 0] == pytest.approx((3 - mean) / std, abs=1e-12)
        assert s.transform([[3.0]])[0, 0] == pytest.approx(1.224744871391589, abs=1e-12)

    def test_constant_column(self):
        s = Scaler().partial_fit([[5.0], [5.0]])
        assert s.transform([[5.0], [5.0]]).tolist() == [[0.0], [0.0]]

    def test_errors(self):
        with pytest.raises(NotFittedError):
            Scaler(2).transform([[1.0, 2.0]])
        s = Scaler().partial_fit(np.ones((3, 2)))
        with pytest.raises(ValueError, match="dimension"):
            s.partial_fit(np.ones((3, 3)))

    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, st.tuples(st.integers(1, 20), st.just(3)),
                  elements=st.floats(-1e3, 1e3)),
           arrays(np.float64, st.tuples(st.integers(1, 20), st.just(3)),
                  elements=st.floats(-1e3, 1e3)))
    def test_merge_equals_single_pass(self, a, b):
        merged = Scaler().partial_fit(a).partial_fit(b)
        full = np.vstack([a, b])
        assert np.allclose(merged.mean, full.mean(axis=0), rtol=1e-9, atol=1e-9)
        assert np.allclose(merged.std, full.std(axis=0), rtol=1e-9, atol=1e-7)


class TestKMeans:
    def test_two_means_on_four_points(self):
        pts = np.array([[0.0], [0.0], [10.0], [10.0]])
        oracle, _ = exhaustive_kmeans(pts, 2)
        km = MiniBatchKMeans(2, seed=0).partial_fit(pts)
        assert sorted(km.centroids.ravel()) == sorted(oracle.ravel()) == [0.0, 10.0]

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_exhaustive_on_small_sets(self, seed):
        pts = np.random.default_rng(seed).normal(size=(6, 2))
        _, best = exhaustive_kmeans(pts, 2)
        km = MiniBatchKMeans(2, seed=seed).partial_fit(pts)
        # k-means++ + Lloyd may stop in a local optimum; it never beats the oracle
        assert km.inertia(pts) >= best - 1e-9

    def test_fixed_point(self):
        pts = np.array([[0.0], [0.0], [10.0], [10.0]])
        km = MiniBatchKMeans(2, seed=0).partial_fit(pts)
        before = km.centroids.copy()
        km.partial_fit(pts)
        assert np.abs(km.centroids - before).max() < 1e-9

    def test_single_cluster_is_running_mean(self):
        rng = np.random.default_rng(1)
        batches = [rng.normal(size=(n, 3)) for n in (5, 7, 2)]
        km = MiniBatchKMeans(1)
        for b in batches:
            km.partial_fit(b)
        assert np.allclose(km.centroids[0], np.vstack(batches).mean(axis=0), atol=1e-12)

    def test_distances(self):
        km = MiniBatchKMeans(2)
        km.partial_fit(np.array([[0.0, 0.0], [3.0, 4.0]]))
        order = np.argsort(km.centroids[:, 0])
        d = km.distances([[0.0, 0.0], [3.0, 0.0]])[:, order]
        assert d.tolist() == [[0.0, 5.0], [3.0, 4.0]]

    def test_errors(self):
        with pytest.raises(ValueError, match="at least c"):
            MiniBatchKMeans(3).partial_fit(np.zeros((2, 1)))
        with pytest.raises(NotFittedError):
            MiniBatchKMeans(2).distances([[0.0]])
        km = MiniBatchKMeans(2).partial_fit(np.arange(4.0)[:, None])
        with pytest.raises(ValueError, match="dimension"):
            km.partial_fit(np.zeros((2, 2)))

    def test_counts_positive_with_duplicates(self):
        km = MiniBatchKMeans(3).partial_fit(np.zeros((5, 2)))
        assert np.all(km.counts >= 1) and np.all(np.isfinite(km.centroids))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6), st.integers(2, 5))
    def test_inertia_nonincreasing(self, seed, c):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(30, 2))
        km = MiniBatchKMeans(c, t=2, seed=seed).partial_fit(x)
        prev = km.inertia(x)
        for _ in range(5):
            km.partial_fit(x)
            cur = km.inertia(x)
            assert cur <= prev + 1e-9
            prev = cur


class TestPCA:
    def test_rank_one(self):
        x = np.array([[t, t] for t in np.linspace(-2, 3, 11)])
        pca = IncrementalPCA(1).partial_fit(x).finalize()
        assert np.allclose(pca.components[0], [1 / np.sqrt(2)] * 2, atol=1e-12)
        full = IncrementalPCA(2).partial_fit(x).finalize()
        assert abs(full.explained_variance[1]) < 1e-12

    def test_matches_covariance_oracle(self):
        x = np.random.default_rng(0).normal(size=(50, 10)) * np.arange(1, 11)
        pca = IncrementalPCA(3)
        for chunk in np.array_split(x, 7):
            pca.partial_fit(chunk)
        pca.finalize()
        comps, vals = covariance_pca(x, 3)
        for k in range(3):
            sign = np.sign(comps[k] @ pca.components[k])
            assert np.allclose(pca.components[k], sign * comps[k], atol=1e-6)
        assert np.allclose(pca.explained_variance, vals, atol=1e-6)

    def test_full_rank_preserves_distances(self):
        x = np.random.default_rng(2).normal(size=(20, 4))
        pca = IncrementalPCA(4).partial_fit(x).finalize()
        y = pca.transform(x)
        dx = np.linalg.norm(x[:, None] - x[None], axis=-1)
        dy = np.linalg.norm(y[:, None] - y[None], axis=-1)
        assert np.abs(dx - dy).max() < 1e-8

    def test_transform_mean_and_component(self):
        x = np.random.default_rng(3).normal(size=(30, 5))
        pca = IncrementalPCA(3).partial_fit(x).finalize()
        assert np.allclose(pca.transform(pca.mean[None]), 0, atol=1e-12)
        y = pca.transform((pca.mean + pca.components[0])[None])[0]
        assert np.allclose(y, [1, 0, 0], atol=1e-12)

    def test_sign_convention(self):
        pca = IncrementalPCA(3).partial_fit(np.random.default_rng(4).normal(size=(30, 5))).finalize()
        for comp in pca.components:
            assert comp[np.argmax(np.abs(comp))] > 0

    def test_errors(self):
        with pytest.raises(ValueError, match="at least p"):
            IncrementalPCA(3).partial_fit(np.ones((2, 4))).finalize()
        with pytest.raises(NotFittedError):
            IncrementalPCA(1).partial_fit(np.ones((2, 4))).transform(np.ones((1, 4)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 6))
    def test_invariants(self, seed, p):
        x = np.random.default_rng(seed).normal(size=(25, 6))
        pca = IncrementalPCA(p).partial_fit(x).finalize()
        ev = pca.explained_variance
        assert np.all(np.diff(ev) <= 1e-12)
        assert np.abs(pca.components @ pca.components.T - np.eye(p)).max() <= 1e-8
        assert pca.transform(x).var(axis=0).sum() <= x.var(axis=0).sum() + 1e-9
