"""Model training on streams of synthetic random graphs."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .core import (aggregate, attach_node_labels, block_width, degree_init,
                   vertex_description)
from .graph import Graph, RandomGraphSpec, generate_random_graph
from .mlkit import IncrementalPCA, MiniBatchKMeans, Scaler

log = logging.getLogger(__name__)

# stream identifiers for seed derivation
_SCALER, _KMEANS, _FULL, _PCA, _PCA_SCALER, _GRAPH_KMEANS, _KMEANS_INIT = range(7)


class VariantMismatchError(ValueError):
    """Graph and model disagree on directedness or labels."""


@dataclass(frozen=True)
class TrainConfig:
    g: int = 200
    m: int = 5000
    d: int = 10
    c: int = 100
    p: int = 100
    w: int = 0
    t: int = 100
    directed: bool = False
    nnl: int = 0
    nel: int = 0
    master_seed: int = 0
    max_degree_factor: float = 10

    def __post_init__(self):
        problems = []
        if self.d < 1:
            problems.append("depth d must be >= 1")
        if self.c < 2:
            problems.append("clusters c must be >= 2")
        if self.g < 1:
            problems.append("graphs g must be >= 1")
        if not 1 <= self.p <= self.c * self.d:
            problems.append(f"pca p must be in [1, c*d={self.c * self.d}]")
        if self.w < 0 or self.w == 1:
            problems.append("graph clusters w must be 0 (disabled) or >= 2")
        if self.t < 1:
            problems.append("k-means iterations t must be >= 1")
        if self.nnl < 0 or self.nel < 0:
            problems.append("label counts must be >= 0")
        if self.m < max(2, self.c, self.w):
            problems.append(f"graph size m must be >= max(2, c, w) = {max(2, self.c, self.w)}")
        if self.max_degree_factor < 1:
            problems.append("max_degree_factor must be >= 1")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def level_width(self) -> int:
        """Columns of one level's aggregation output."""
        return block_width(self.c, self.directed, self.nel)

    @property
    def level_input_width(self) -> int:
        return self.level_width + self.nnl

    @property
    def full_width(self) -> int:
        return self.level_width * self.d

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass
class SirgnModel:
    config: TrainConfig
    scalers: list[Scaler] = field(default_factory=list)
    kmeans: list[MiniBatchKMeans] = field(default_factory=list)
    full_scaler: Scaler | None = None
    pca: IncrementalPCA | None = None
    pca_scaler: Scaler | None = None
    graph_kmeans: MiniBatchKMeans | None = None

    @property
    def depth(self) -> int:
        return len(self.kmeans)

    def check_graph(self, g: Graph) -> None:
        cfg = self.config
        if g.directed != cfg.directed:
            want = "directed" if cfg.directed else "undirected"
            have = "directed" if g.directed else "undirected"
            raise VariantMismatchError(f"model was trained on {want} graphs, got a {have} graph")
        if cfg.nnl > 0:
            if g.node_labels is None:
                raise VariantMismatchError(f"model expects node labels (nnl={cfg.nnl})")
            if g.n_node_labels > cfg.nnl:
                raise VariantMismatchError(
                    f"graph uses {g.n_node_labels} node labels, model was trained with {cfg.nnl}")
        if cfg.nel > 0:
            if g.edge_labels is None:
                raise VariantMismatchError(f"model expects edge labels (nel={cfg.nel})")
            if g.n_edge_labels > cfg.nel:
                raise VariantMismatchError(
                    f"graph uses {g.n_edge_labels} edge labels, model was trained with {cfg.nel}")


def level_input(g: Graph, structural, nnl: int) -> np.ndarray:
    return attach_node_labels(structural, g.node_labels, nnl) if nnl else structural


def run_levels(g: Graph, model: SirgnModel, n_levels: int | None = None,
               threads: int | None = None) -> tuple[np.ndarray, list[np.ndarray]]:
    """Push the degree initialization through ``n_levels`` rounds of
    scale, describe and aggregate.

    Returns the last structural matrix and the list of per-round
    aggregation outputs.
    """
    cfg = model.config
    n_levels = model.depth if n_levels is None else n_levels
    x = degree_init(g, cfg.c, cfg.nel)
    blocks = []
    for lvl in range(n_levels):
        dv = vertex_description(level_input(g, x, cfg.nnl), model.kmeans[lvl],
                                model.scalers[lvl], threads)
        x = aggregate(g, dv, cfg.nel, threads)
        blocks.append(x)
    return x, blocks


def roll_forward(g: Graph, model: SirgnModel, level: int, threads: int | None = None) -> np.ndarray:
    """Input seen by the level-``level`` scaler and k-means for graph ``g``."""
    x, _ = run_levels(g, model, level, threads)
    return level_input(g, x, model.config.nnl)


def concatenated(g: Graph, model: SirgnModel, threads: int | None = None) -> np.ndarray:
    """Pre-scaling concatenation of all ``d`` aggregation outputs."""
    _, blocks = run_levels(g, model, threads=threads)
    return np.hstack(blocks)


def stream_seed(master_seed: int, stream: int, level: int, index: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(stream, level, index))
    return int(ss.generate_state(1, np.uint64)[0])


def training_graph(cfg: TrainConfig, stream: int, level: int, index: int) -> Graph:
    return generate_random_graph(RandomGraphSpec(
        m=cfg.m, max_degree_factor=cfg.max_degree_factor,
        seed=stream_seed(cfg.master_seed, stream, level, index),
        directed=cfg.directed, nnl=cfg.nnl, nel=cfg.nel))


def train(cfg: TrainConfig, threads: int | None = None) -> SirgnModel:
    """Fit every model component, each on its own stream of ``cfg.g`` random graphs."""
    model = SirgnModel(config=cfg)
    for lvl in range(cfg.d):
        t0 = time.perf_counter()
        scaler = Scaler(cfg.level_input_width)
        for j in range(cfg.g):
            scaler.partial_fit(roll_forward(training_graph(cfg, _SCALER, lvl, j), model, lvl, threads))
        km = MiniBatchKMeans(cfg.c, cfg.t, seed=stream_seed(cfg.master_seed, _KMEANS_INIT, lvl, 0))
        for j in range(cfg.g):
            x = roll_forward(training_graph(cfg, _KMEANS, lvl, j), model, lvl, threads)
            km.partial_fit(scaler.transform(x))
        model.scalers.append(scaler)
        model.kmeans.append(km)
        log.info("level %d trained in %.2fs", lvl, time.perf_counter() - t0)

    t0 = time.perf_counter()
    model.full_scaler = Scaler(cfg.full_width)
    for j in range(cfg.g):
        model.full_scaler.partial_fit(concatenated(training_graph(cfg, _FULL, 0, j), model, threads))
    pca = IncrementalPCA(cfg.p, cfg.full_width)
    for j in range(cfg.g):
        x = concatenated(training_graph(cfg, _PCA, 0, j), model, threads)
        pca.partial_fit(model.full_scaler.transform(x))
    model.pca = pca.finalize()
    log.info("full scaler and PCA trained in %.2fs", time.perf_counter() - t0)

    if cfg.w > 0:
        from .infer import embed_nodes

        t0 = time.perf_counter()
        model.pca_scaler = Scaler(cfg.p)
        for j in range(cfg.g):
            g = training_graph(cfg, _PCA_SCALER, 0, j)
            model.pca_scaler.partial_fit(embed_nodes(g, model, threads).values)
        gk = MiniBatchKMeans(cfg.w, cfg.t, seed=stream_seed(cfg.master_seed, _KMEANS_INIT, cfg.d, 0))
        for j in range(cfg.g):
            g = training_graph(cfg, _GRAPH_KMEANS, 0, j)
            gk.partial_fit(model.pca_scaler.transform(embed_nodes(g, model, threads).values))
        model.graph_kmeans = gk
        log.info("graph model trained in %.2fs", time.perf_counter() - t0)
    return model
