"""Trained-smoother file format.

Layout::

    MSKIT-SMOOTHER-v1\\n
    <header length: little-endian uint64>
    <header: UTF-8 JSON, sorted keys>
    <parameter block: little-endian float64, tensors in header order>
"""

import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from mskit.core.adaptive_net import check_compatible
from mskit.core.errors import ModelFormatError
from mskit.models.schemas import AdaptiveSmootherParams, GlobalSmootherParams, SmootherArchitecture
from mskit.utils.files import require_file, write_bytes_atomic

MAGIC = b"MSKIT-SMOOTHER-v1\n"
FORMAT_VERSION = 1

SmootherModel = Union[AdaptiveSmootherParams, GlobalSmootherParams]


def _tensors(model: SmootherModel) -> list[tuple[str, str, np.ndarray]]:
    if isinstance(model, GlobalSmootherParams):
        return [("params", "logits", model.logits)]
    named = [("params", name, value) for name, value in sorted(model.params.items())]
    named += [("buffers", name, value) for name, value in sorted(model.buffers.items())]
    return named


def model_header(model: SmootherModel) -> dict[str, Any]:
    """JSON header describing a model and its tensor layout."""
    tensors = [
        {"group": group, "name": name, "shape": list(value.shape)} for group, name, value in _tensors(model)
    ]
    if isinstance(model, GlobalSmootherParams):
        return {
            "format_version": FORMAT_VERSION,
            "regime": "global",
            "k": model.k,
            "c_in": None,
            "normalized": True,
            "seed": model.seed,
            "tensors": tensors,
        }
    arch = model.architecture
    return {
        "format_version": FORMAT_VERSION,
        "regime": "adaptive",
        "architecture": arch.model_dump(mode="json"),
        "k": arch.k,
        "c_in": arch.c_in,
        "normalized": True,
        "seed": model.seed,
        "parameter_count": model.parameter_count,
        "tensors": tensors,
    }


def model_to_bytes(model: SmootherModel) -> bytes:
    """Serialize a model; identical models give identical bytes."""
    header = json.dumps(model_header(model), sort_keys=True, separators=(",", ":")).encode("utf-8")
    block = b"".join(np.ascontiguousarray(value, dtype="<f8").tobytes() for _, _, value in _tensors(model))
    return MAGIC + np.array([len(header)], dtype="<u8").tobytes() + header + block


def save_model(model: SmootherModel, path: Path) -> None:
    """Write a model file atomically."""
    write_bytes_atomic(path, model_to_bytes(model))


def model_from_bytes(data: bytes) -> SmootherModel:
    """
    Parse a model file.

    Raises:
        ModelFormatError: On a bad magic string, header or parameter block.
    """
    if not data.startswith(MAGIC):
        raise ModelFormatError("not a smoother model file (bad magic string)")
    offset = len(MAGIC)
    if len(data) < offset + 8:
        raise ModelFormatError("truncated model file (missing header length)")
    header_length = int(np.frombuffer(data, dtype="<u8", count=1, offset=offset)[0])
    offset += 8
    try:
        header = json.loads(data[offset : offset + header_length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ModelFormatError(f"invalid model header: {e}")
    offset += header_length

    block = data[offset:]
    if len(block) % 8:
        raise ModelFormatError("parameter block is not a whole number of float64 values")
    values = np.frombuffer(block, dtype="<f8").astype(np.float64)

    tensors: dict[str, dict[str, np.ndarray]] = {"params": {}, "buffers": {}}
    position = 0
    try:
        for entry in header["tensors"]:
            shape = tuple(int(n) for n in entry["shape"])
            size = int(np.prod(shape, dtype=np.int64))
            if position + size > values.size:
                raise ModelFormatError(f"parameter block too short for tensor '{entry['name']}'")
            tensors[entry["group"]][entry["name"]] = values[position : position + size].reshape(shape).copy()
            position += size
        if position != values.size:
            raise ModelFormatError(f"parameter block has {values.size - position} unexpected trailing values")

        if header["regime"] == "global":
            return GlobalSmootherParams(
                k=int(header["k"]), logits=tensors["params"]["logits"], seed=int(header["seed"])
            )
        if header["regime"] == "adaptive":
            arch = SmootherArchitecture.model_validate(header["architecture"])
            model = AdaptiveSmootherParams(
                architecture=arch,
                params=tensors["params"],
                buffers=tensors["buffers"],
                seed=int(header["seed"]),
            )
            check_compatible(model, arch)
            return model
        raise ModelFormatError(f"unknown regime '{header['regime']}'")
    except ModelFormatError:
        raise
    except Exception as e:
        raise ModelFormatError(f"invalid model file: {e}")


def load_model_file(path: Path) -> SmootherModel:
    """Read a model file written by ``save_model``."""
    require_file(path)
    return model_from_bytes(path.read_bytes())
