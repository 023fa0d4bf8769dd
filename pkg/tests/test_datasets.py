import numpy as np
from hypothesis import given, settings, strategies as st

from isirgn.datasets import MOTIFS, edges_to_graph, motif_ring, refinement_classes
from oracles import wl_classes


def test_motif_ring_size():
    n, edges = motif_ring(2)
    assert n == 16 + 2 * sum(size for size, _ in MOTIFS.values())
    assert len(edges) == 16 + 16 + 2 * sum(len(e) for _, e in MOTIFS.values())


def test_ring_nodes_periodic():
    n, edges = motif_ring(3)
    cls = refinement_classes(edges_to_graph(n, edges))
    assert [cls[i] for i in range(8)] == [cls[i] for i in range(8, 16)]
    assert len(set(cls[:8].tolist())) == 8


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.data())
def test_refinement_matches_oracle_partition(n, data):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True, min_size=1))
    ours = refinement_classes(edges_to_graph(n, edges))
    ref = np.array(wl_classes(n, edges))
    same_ours = ours[:, None] == ours[None, :]
    same_ref = ref[:, None] == ref[None, :]
    assert (same_ours == same_ref).all()
