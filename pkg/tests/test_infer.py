import numpy as np
import pytest

from conftest import cycle, triangle
from isirgn.graph import Graph, RandomGraphSpec, generate_random_graph
from isirgn.infer import (embed_graph, embed_many, embed_nodes, node_representation, pool,
                          read_embeddings_bin, read_embeddings_csv, write_embeddings_bin,
                          write_embeddings_csv)
from isirgn.train import VariantMismatchError


def disjoint_union(g, copies=2):
    src, dst = g.edges()
    n = g.n_nodes
    return Graph.from_edges(n * copies, np.concatenate([src + k * n for k in range(copies)]),
                            np.concatenate([dst + k * n for k in range(copies)]))


def test_cycle_rows_identical(small_model):
    emb = embed_nodes(cycle(9), small_model).values
    assert emb.shape == (9, small_model.config.p)
    assert np.ptp(emb, axis=0).max() <= 1e-9


def test_disjoint_copies_identical(small_model):
    g = generate_random_graph(RandomGraphSpec(m=20, seed=4, max_degree_factor=2))
    emb = embed_nodes(disjoint_union(g), small_model).values
    assert np.abs(emb[:20] - emb[20:]).max() <= 1e-9


def test_embedding_finite(small_model):
    g = generate_random_graph(RandomGraphSpec(m=200, seed=5))
    assert np.isfinite(embed_nodes(g, small_model).values).all()


def test_model_not_mutated(small_model):
    from isirgn import store
    before = store.to_bytes(small_model)
    embed_graph(generate_random_graph(RandomGraphSpec(m=30, seed=6)), small_model)
    assert store.to_bytes(small_model) == before


def test_variant_mismatch(small_model, directed_model):
    with pytest.raises(VariantMismatchError):
        embed_nodes(Graph.from_edges(2, [0], [1], directed=True), small_model)
    with pytest.raises(VariantMismatchError):
        embed_nodes(triangle(), directed_model)


def test_label_count_violation(labeled_model):
    g = generate_random_graph(RandomGraphSpec(m=20, seed=1, nnl=3, nel=5, n_edges=60))
    with pytest.raises(VariantMismatchError, match="edge labels"):
        embed_nodes(g, labeled_model)
    fewer = generate_random_graph(RandomGraphSpec(m=20, seed=1, nnl=2, nel=1))
    assert np.isfinite(embed_nodes(fewer, labeled_model).values).all()


def test_pool_single_edge():
    g = Graph.from_edges(2, [0], [1])
    m = pool(g, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert m.tolist() == [[0, 1], [1, 0]]


def test_pool_directed_orientation():
    g = Graph.from_edges(2, [0], [1], directed=True)
    m = pool(g, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert m.tolist() == [[0, 1], [0, 0]]


def test_signature_mass(small_model):
    g = generate_random_graph(RandomGraphSpec(m=40, seed=8))
    sig = embed_graph(g, small_model)
    assert sig.matrix.shape == (4, 4) and sig.vector.shape == (16,)
    assert np.all(sig.matrix >= 0)
    assert abs(sig.matrix.sum() - 2 * g.n_edges) <= 1e-6


def test_signature_mass_directed(directed_model):
    g = generate_random_graph(RandomGraphSpec(m=40, seed=8, directed=True))
    assert abs(embed_graph(g, directed_model).matrix.sum() - g.n_edges) <= 1e-6


def test_signature_permutation_invariant(small_model):
    g = generate_random_graph(RandomGraphSpec(m=40, seed=9))
    h = g.permute(np.random.default_rng(0).permutation(40))
    assert np.abs(embed_graph(g, small_model).matrix - embed_graph(h, small_model).matrix).max() <= 1e-9


def test_embed_many(small_model, directed_model):
    g = generate_random_graph(RandomGraphSpec(m=30, seed=1))
    bad = Graph.from_edges(2, [0], [1], directed=True)
    mat, errors = embed_many([g, bad, g], small_model)
    assert mat.shape == (3, 16)
    assert np.array_equal(mat[0], mat[2])
    assert errors and errors[0][0] == 1 and np.isnan(mat[1]).all()
    empty, errs = embed_many([], small_model)
    assert empty.shape == (0, 16) and errs == []


def test_missing_graph_model():
    from isirgn.train import TrainConfig, train
    model = train(TrainConfig(d=1, c=2, g=2, m=10, p=2))
    with pytest.raises(ValueError, match="graph-level"):
        embed_graph(triangle(), model)


def test_labeled_embeddings_differ_by_label(labeled_model):
    g0 = Graph.from_edges(4, [0, 1, 2], [1, 2, 3], edge_labels=[0, 0, 0], node_labels=[0, 0, 0, 0])
    g1 = Graph.from_edges(4, [0, 1, 2], [1, 2, 3], edge_labels=[0, 0, 0], node_labels=[0, 0, 0, 1])
    a = node_representation(g0, labeled_model)
    b = node_representation(g1, labeled_model)
    assert not np.allclose(a, b)


def test_csv_roundtrip(tmp_path, small_model):
    emb = embed_nodes(triangle(), small_model)
    write_embeddings_csv(emb, tmp_path / "e.csv")
    back = read_embeddings_csv(tmp_path / "e.csv")
    assert back.node_ids == [0, 1, 2]
    assert np.array_equal(back.values, emb.values)
    assert (tmp_path / "e.csv").read_text().splitlines()[0].startswith("node_id,e0,e1")


def test_bin_roundtrip(tmp_path):
    x = np.random.default_rng(0).normal(size=(5, 3))
    write_embeddings_bin(x, tmp_path / "e.bin")
    raw = (tmp_path / "e.bin").read_bytes()
    assert raw[:8] == b"ISGNEMB1"
    assert int.from_bytes(raw[8:16], "little") == 5 and int.from_bytes(raw[16:24], "little") == 3
    assert np.array_equal(read_embeddings_bin(tmp_path / "e.bin"), x)


def test_threads_equal(small_model):
    g = generate_random_graph(RandomGraphSpec(m=9000, seed=3, max_degree_factor=3))
    serial = embed_nodes(g, small_model, threads=1).values
    parallel = embed_nodes(g, small_model, threads=4).values
    assert np.abs(serial - parallel).max() <= 1e-9
