"""Exact JSON serialization for model state.

Arrays are stored as base64-encoded little-endian bytes with an explicit
dtype and shape, so save/load round-trips are bit-identical. Checkpoints
are JSON envelopes carrying a format version, a model kind tag, the model
state and free-form metadata.
"""

from __future__ import annotations

import base64
import json

import numpy as np

FORMAT_VERSION = 1


def encode_array(a):
    a = np.ascontiguousarray(a)
    le = a.astype(a.dtype.newbyteorder("<"), copy=False)
    return {
        "dtype": le.dtype.str,
        "shape": list(a.shape),
        "data": base64.b64encode(le.tobytes()).decode("ascii"),
    }


def decode_array(d):
    raw = base64.b64decode(d["data"])
    a = np.frombuffer(raw, dtype=np.dtype(d["dtype"]))
    return a.reshape(d["shape"]).astype(np.dtype(d["dtype"]).newbyteorder("="))


def save_checkpoint(kind, state, path, meta=None):
    envelope = {
        "format": FORMAT_VERSION,
        "kind": kind,
        "meta": meta or {},
        "state": state,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(envelope, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path):
    """Returns (kind, state, meta); rejects unknown format versions."""
    with open(path, encoding="utf-8") as fh:
        envelope = json.load(fh)
    version = envelope.get("format")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format {version!r}")
    return envelope["kind"], envelope["state"], envelope.get("meta", {})
