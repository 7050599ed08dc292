"""
Tests for the trained-smoother file format.

How to run:
    pytest mskit/tests/test_model_file.py -v
"""

import json

import numpy as np
import pytest

from mskit.core.adaptive_net import init_adaptive_params
from mskit.core.errors import ModelFormatError
from mskit.core.model_file import MAGIC, load_model_file, model_from_bytes, model_to_bytes, save_model
from mskit.models.schemas import AdaptiveSmootherParams, GlobalSmootherParams


def split_model(data: bytes) -> tuple[dict, bytes]:
    length = int(np.frombuffer(data, dtype="<u8", count=1, offset=len(MAGIC))[0])
    start = len(MAGIC) + 8
    return json.loads(data[start : start + length]), data[start + length :]


def test_adaptive_model_survives_save_and_load(tmp_path):
    """Test that every tensor and the architecture come back unchanged."""
    model = init_adaptive_params(seed=4)
    model.buffers["bn2.running_var"] = np.linspace(0.5, 2.0, 32)
    path = tmp_path / "adaptive.model"

    save_model(model, path)
    loaded = load_model_file(path)

    assert isinstance(loaded, AdaptiveSmootherParams)
    assert loaded.architecture == model.architecture
    assert loaded.seed == 4
    for group in ("params", "buffers"):
        for name, value in getattr(model, group).items():
            assert np.array_equal(getattr(loaded, group)[name], value), name


def test_global_model_survives_save_and_load(tmp_path):
    """Test the global regime."""
    model = GlobalSmootherParams(k=5, logits=np.array([0.1, -0.2, 0.3, 0.0, 1.5]), seed=2)
    path = tmp_path / "global.model"

    save_model(model, path)
    loaded = load_model_file(path)

    assert isinstance(loaded, GlobalSmootherParams)
    assert loaded.k == 5
    assert np.array_equal(loaded.logits, model.logits)


def test_header_describes_the_model():
    """Test the header fields and tensor order."""
    data = model_to_bytes(init_adaptive_params())
    header, _ = split_model(data)

    assert data.startswith(MAGIC)
    assert header["regime"] == "adaptive"
    assert header["k"] == 5
    assert header["c_in"] == 4
    assert header["parameter_count"] == 6293
    names = [entry["name"] for entry in header["tensors"]]
    groups = [entry["group"] for entry in header["tensors"]]
    assert groups.index("buffers") == 18
    assert names[:18] == sorted(names[:18])


def test_identical_models_give_identical_bytes():
    """Test that serialization is deterministic."""
    assert model_to_bytes(init_adaptive_params(seed=1)) == model_to_bytes(init_adaptive_params(seed=1))
    assert model_to_bytes(init_adaptive_params(seed=1)) != model_to_bytes(init_adaptive_params(seed=2))


def test_bad_magic():
    """Test that other files are rejected."""
    with pytest.raises(ModelFormatError, match="bad magic"):
        model_from_bytes(b"not a model")


def test_truncated_parameter_block():
    """Test that a short parameter block is reported."""
    data = model_to_bytes(init_adaptive_params())

    with pytest.raises(ModelFormatError):
        model_from_bytes(data[:-8])
    with pytest.raises(ModelFormatError, match="whole number"):
        model_from_bytes(data[:-3])


def test_trailing_values():
    """Test that extra parameters are reported."""
    data = model_to_bytes(init_adaptive_params()) + np.zeros(2).tobytes()

    with pytest.raises(ModelFormatError, match="2 unexpected trailing values"):
        model_from_bytes(data)


def test_header_shape_mismatch():
    """Test that tensor shapes are checked against the architecture."""
    header, block = split_model(model_to_bytes(init_adaptive_params()))
    header["architecture"]["k"] = 7
    header["k"] = 7
    text = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    data = MAGIC + np.array([len(text)], dtype="<u8").tobytes() + text + block

    with pytest.raises(ModelFormatError):
        model_from_bytes(data)


def test_missing_model_file(tmp_path):
    """Test that a missing model file raises FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        load_model_file(tmp_path / "none.model")
