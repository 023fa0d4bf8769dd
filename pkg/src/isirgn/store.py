"""Single-file model container.

Layout (all integers little-endian)::

    magic            6 bytes  b"ISGN1\\0"
    version          u32
    manifest_len     u64
    manifest         UTF-8 JSON: {"config": {...}, "arrays": [{name, rows, cols, offset}, ...]}
    payload          row-major float64 arrays, offsets relative to payload start
    crc32            u32 over the payload bytes
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
import zlib
from pathlib import Path

import numpy as np

from .mlkit import IncrementalPCA, MiniBatchKMeans, Scaler
from .train import SirgnModel, TrainConfig

MAGIC = b"ISGN1\0"
VERSION = 1
_HEAD = struct.Struct("<6sIQ")


class ModelFormatError(ValueError):
    pass


def _scaler_arrays(prefix, s: Scaler):
    return [(f"{prefix}.count", np.array([[float(s.count)]])),
            (f"{prefix}.mean", s.mean[None, :]),
            (f"{prefix}.m2", s.m2[None, :])]


def _kmeans_arrays(prefix, k: MiniBatchKMeans):
    return [(f"{prefix}.centroids", k.centroids),
            (f"{prefix}.counts", k.counts[None, :])]


def model_arrays(model: SirgnModel) -> list[tuple[str, np.ndarray]]:
    """Arrays in canonical order: level scalers, level k-means, full scaler,
    PCA, PCA scaler, graph k-means."""
    arrays = []
    for i, s in enumerate(model.scalers):
        arrays += _scaler_arrays(f"scaler.{i}", s)
    for i, k in enumerate(model.kmeans):
        arrays += _kmeans_arrays(f"kmeans.{i}", k)
    arrays += _scaler_arrays("full_scaler", model.full_scaler)
    pca = model.pca
    arrays += [("pca.count", np.array([[float(pca.count)]])),
               ("pca.mean", pca.mean[None, :]),
               ("pca.components", pca.components),
               ("pca.explained_variance", pca.explained_variance[None, :])]
    if model.pca_scaler is not None:
        arrays += _scaler_arrays("pca_scaler", model.pca_scaler)
    if model.graph_kmeans is not None:
        arrays += _kmeans_arrays("graph_kmeans", model.graph_kmeans)
    return arrays


def to_bytes(model: SirgnModel) -> bytes:
    directory, chunks, offset = [], [], 0
    for name, arr in model_arrays(model):
        arr = np.ascontiguousarray(arr, dtype="<f8")
        directory.append({"name": name, "rows": arr.shape[0], "cols": arr.shape[1],
                          "offset": offset})
        chunks.append(arr.tobytes())
        offset += arr.nbytes
    manifest = json.dumps({"config": model.config.to_dict(), "arrays": directory},
                          sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(chunks)
    return (_HEAD.pack(MAGIC, VERSION, len(manifest)) + manifest + payload
            + struct.pack("<I", zlib.crc32(payload)))


def save(model: SirgnModel, path) -> None:
    """Write atomically (temp file in the target directory, then rename)."""
    path = Path(path)
    data = to_bytes(model)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def from_bytes(data: bytes) -> SirgnModel:
    if len(data) < _HEAD.size:
        raise ModelFormatError("truncated model file (header)")
    magic, version, mlen = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    if version != VERSION:
        raise ModelFormatError(f"unsupported model format version {version} (expected {VERSION})")
    start = _HEAD.size + mlen
    if len(data) < start + 4:
        raise ModelFormatError("truncated model file (manifest)")
    try:
        manifest = json.loads(data[_HEAD.size:start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupt manifest: {exc}") from None
    payload = data[start:-4]
    (crc,) = struct.unpack("<I", data[-4:])
    directory = manifest["arrays"]
    expected = sum(e["rows"] * e["cols"] * 8 for e in directory)
    if len(payload) != expected:
        raise ModelFormatError(
            f"truncated model file: payload has {len(payload)} bytes, directory needs {expected}")
    if zlib.crc32(payload) != crc:
        raise ModelFormatError("CRC mismatch: model payload is corrupt")

    arrays, end = {}, 0
    for e in sorted(directory, key=lambda e: e["offset"]):
        if e["offset"] < end:
            raise ModelFormatError(f"array {e['name']} overlaps its predecessor")
        n = e["rows"] * e["cols"] * 8
        end = e["offset"] + n
        arrays[e["name"]] = np.frombuffer(payload, dtype="<f8", count=e["rows"] * e["cols"],
                                          offset=e["offset"]).reshape(e["rows"], e["cols"]).astype(np.float64)
    try:
        cfg = TrainConfig.from_dict(manifest["config"])
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid config in manifest: {exc}") from None
    return _assemble(cfg, arrays)


def _get(arrays, name, shape):
    if name not in arrays:
        raise ModelFormatError(f"missing array {name}")
    a = arrays[name]
    if a.shape != shape:
        raise ModelFormatError(f"array {name} has shape {a.shape}, expected {shape}")
    return a


def _scaler(arrays, prefix, dim):
    s = Scaler(dim)
    s.count = int(_get(arrays, f"{prefix}.count", (1, 1))[0, 0])
    s.mean = _get(arrays, f"{prefix}.mean", (1, dim))[0].copy()
    s.m2 = _get(arrays, f"{prefix}.m2", (1, dim))[0].copy()
    return s


def _kmeans(arrays, prefix, c, dim, t):
    k = MiniBatchKMeans(c, t)
    k.dim = dim
    k.centroids = _get(arrays, f"{prefix}.centroids", (c, dim)).copy()
    k.counts = _get(arrays, f"{prefix}.counts", (1, c))[0].copy()
    return k


def _assemble(cfg: TrainConfig, arrays) -> SirgnModel:
    model = SirgnModel(config=cfg)
    for i in range(cfg.d):
        model.scalers.append(_scaler(arrays, f"scaler.{i}", cfg.level_input_width))
    for i in range(cfg.d):
        model.kmeans.append(_kmeans(arrays, f"kmeans.{i}", cfg.c, cfg.level_input_width, cfg.t))
    model.full_scaler = _scaler(arrays, "full_scaler", cfg.full_width)
    pca = IncrementalPCA(cfg.p, cfg.full_width)
    pca.count = int(_get(arrays, "pca.count", (1, 1))[0, 0])
    pca.mean = _get(arrays, "pca.mean", (1, cfg.full_width))[0].copy()
    pca.components = _get(arrays, "pca.components", (cfg.p, cfg.full_width)).copy()
    pca.explained_variance = _get(arrays, "pca.explained_variance", (1, cfg.p))[0].copy()
    model.pca = pca
    if cfg.w > 0:
        model.pca_scaler = _scaler(arrays, "pca_scaler", cfg.p)
        model.graph_kmeans = _kmeans(arrays, "graph_kmeans", cfg.w, cfg.p, cfg.t)
    return model


def load(path) -> SirgnModel:
    return from_bytes(Path(path).read_bytes())
