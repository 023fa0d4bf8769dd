"""Inferential structural node and graph embeddings.

Models are trained once on synthetic random graphs and then applied to
unseen graphs without refitting.
"""

from .graph import Graph, RandomGraphSpec, degree_vector, generate_random_graph, load_edge_list, save_edge_list
from .infer import GraphSignature, NodeEmbedding, embed_graph, embed_many, embed_nodes, node_representation
from .mlkit import IncrementalPCA, MiniBatchKMeans, Scaler
from .train import SirgnModel, TrainConfig, roll_forward, train

__all__ = [
    "Graph", "RandomGraphSpec", "degree_vector", "generate_random_graph", "load_edge_list",
    "save_edge_list", "GraphSignature", "NodeEmbedding", "embed_graph", "embed_many",
    "embed_nodes", "node_representation", "IncrementalPCA", "MiniBatchKMeans", "Scaler",
    "SirgnModel", "TrainConfig", "roll_forward", "train",
]
