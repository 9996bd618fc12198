"""Binary checkpoint format for both sequence models.

Layout (little-endian throughout):

    bytes 0..3    magic "BLCP"
    bytes 4..7    format version (u32)
    bytes 8..15   header length in bytes (u64)
    header        UTF-8 JSON, sorted keys: model config, normalization
                  stats, caller metadata and a tensor directory
                  [{name, shape, offset, nbytes}] with offsets relative
                  to the payload start
    payload       row-major float64 tensor data, concatenated in
                  directory order

Two checkpoints of the same model state are byte-identical: the header
carries no timestamps and JSON keys are sorted.  See
docs/checkpoint_format.md.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .lstm import LstmConfig, LstmModel
from .normalize import NormStats
from .transformer import TransformerConfig, TransformerModel

MAGIC = b"BLCP"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def model_from_config(config: dict):
    """Rebuild an untrained model instance from its config_dict()."""
    kind = config.get("kind")
    seed = config.get("seed", 0)
    fields = {k: v for k, v in config.items() if k not in ("kind", "seed")}
    if kind == "transformer":
        return TransformerModel(TransformerConfig(**fields), seed=seed)
    if kind == "lstm":
        return LstmModel(LstmConfig(**fields), seed=seed)
    raise CheckpointError(f"unknown model kind {kind!r}")


def save_checkpoint(path, model, norm_stats: NormStats, meta: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    params = model.parameters()
    directory = []
    offset = 0
    blobs = []
    for name in sorted(params):
        arr = np.ascontiguousarray(params[name].data, dtype="<f8")
        blob = arr.tobytes()
        directory.append({"name": name, "shape": list(arr.shape),
                          "offset": offset, "nbytes": len(blob)})
        blobs.append(blob)
        offset += len(blob)
    header = {
        "config": model.config_dict(),
        "norm_stats": norm_stats.to_dict(),
        "meta": dict(meta or {}),
        "tensors": directory,
    }
    header_bytes = json.dumps(header, sort_keys=True,
                              separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        for blob in blobs:
            fh.write(blob)
    return path


def read_header(path) -> dict:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: bad magic {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise CheckpointError(f"{path}: unsupported version {version}")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        return json.loads(fh.read(hlen).decode("utf-8"))


def load_checkpoint(path):
    """Returns (model, norm_stats, meta) with parameters restored."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: bad magic {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != VERSION:
            raise CheckpointError(f"{path}: unsupported version {version}")
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        payload = fh.read()

    model = model_from_config(header["config"])
    params = model.parameters()
    seen = set()
    for entry in header["tensors"]:
        name = entry["name"]
        if name not in params:
            raise CheckpointError(f"{path}: unexpected tensor {name!r}")
        shape = tuple(entry["shape"])
        start, nbytes = entry["offset"], entry["nbytes"]
        if params[name].data.shape != shape:
            raise CheckpointError(
                f"{path}: tensor {name} shape {shape} != model {params[name].data.shape}")
        if int(np.prod(shape, dtype=np.int64)) * 8 != nbytes:
            raise CheckpointError(
                f"{path}: tensor {name} payload {nbytes} bytes does not match "
                f"shape {shape}")
        arr = np.frombuffer(payload[start:start + nbytes], dtype="<f8").reshape(shape)
        params[name].data = arr.astype(np.float64).copy()
        seen.add(name)
    missing = set(params) - seen
    if missing:
        raise CheckpointError(f"{path}: missing tensors {sorted(missing)[:3]}...")
    norm = NormStats.from_dict(header["norm_stats"])
    return model, norm, header.get("meta", {})
