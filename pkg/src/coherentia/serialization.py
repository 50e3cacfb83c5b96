"""JSON encoding of the numeric types used across the package.

Complex scalars are stored as [re, im] pairs; matrices row-major as
{"rows", "cols", "entries"}; vectors as {"dim", "amplitudes"}.  Dumps are
canonical: single line, sorted keys, so identical values produce identical
bytes and diffs stay readable.
"""

from __future__ import annotations

import json

import numpy as np

from . import linalg
from .interferometer import InterferometerConfig
from .resource import IncompleteBasis, KrausChannel


def _entries(a: np.ndarray) -> list:
    flat = np.asarray(a, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _from_entries(entries, shape) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    expected = int(np.prod(shape))
    if arr.size != expected:
        raise ValueError(f"expected {expected} entries, got {arr.size}")
    return arr.reshape(shape)


def matrix_to_dict(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("matrix_to_dict needs a 2-d array")
    return {"rows": a.shape[0], "cols": a.shape[1], "entries": _entries(a)}


def matrix_from_dict(d: dict) -> np.ndarray:
    return _from_entries(d["entries"], (int(d["rows"]), int(d["cols"])))


def vector_to_dict(v: np.ndarray) -> dict:
    v = linalg.as_vector(v)
    return {"dim": v.size, "amplitudes": _entries(v)}


def vector_from_dict(d: dict) -> np.ndarray:
    return _from_entries(d["amplitudes"], (int(d["dim"]),))


def basis_to_dict(basis: IncompleteBasis) -> dict:
    return {"dim": basis.dim, "vectors": [vector_to_dict(v) for v in basis.vectors]}


def basis_from_dict(d: dict) -> IncompleteBasis:
    vecs = [vector_from_dict(v) for v in d["vectors"]]
    return IncompleteBasis(int(d["dim"]), np.array(vecs))


def channel_to_dict(channel: KrausChannel) -> dict:
    return {"dim": channel.dim, "kraus": [matrix_to_dict(k) for k in channel.kraus_ops]}


def channel_from_dict(d: dict) -> KrausChannel:
    ops = [matrix_from_dict(k) for k in d["kraus"]]
    return KrausChannel(int(d["dim"]), np.array(ops))


def interferometer_config_to_dict(cfg: InterferometerConfig) -> dict:
    return {
        "amplitudes": vector_to_dict(cfg.amplitudes),
        "detectors": matrix_to_dict(cfg.detector_states),
    }


def interferometer_config_from_dict(d: dict) -> InterferometerConfig:
    return InterferometerConfig(vector_from_dict(d["amplitudes"]), matrix_from_dict(d["detectors"]))


def dumps(obj) -> str:
    """Canonical one-line JSON: sorted keys, no insignificant whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def loads(text: str):
    return json.loads(text)


def load_path(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
