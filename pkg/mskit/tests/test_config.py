"""
Tests for settings, structured-input loading and file utilities.

Tests helpers for:
- Environment-driven settings
- YAML/JSON model loading
- Atomic writes and frame listing
- Ordered thread fan-out

How to run:
    pytest mskit/tests/test_config.py -v
"""

import threading

import pytest
from pydantic import ValidationError

from mskit.core.config import Settings, get_settings, resolve_threads
from mskit.core.errors import ConfigError
from mskit.models.schemas import AugmentSpec, RegionMap, SyntheticDatasetSpec
from mskit.utils.config import load_model, save_model_yaml
from mskit.utils.files import list_frame_files, read_json, write_json, write_text_atomic
from mskit.utils.parallel import gather_ordered


@pytest.fixture(autouse=True)
def clean_env(tmp_path, monkeypatch):
    """Run without MSKIT_ variables or a stray .env file."""
    for field in Settings.model_fields:
        monkeypatch.delenv(f"MSKIT_{field.upper()}", raising=False)
    monkeypatch.chdir(tmp_path)


# ============================================================================
# SETTINGS TESTS
# ============================================================================


def test_settings_defaults():
    """Test default settings."""
    settings = get_settings()

    assert settings.threads == 1
    assert settings.seed == 0
    assert settings.log_level == "info"
    assert settings.epsilon == 1e-5
    assert settings.smoothing_width == 5


def test_settings_from_environment(monkeypatch):
    """Test MSKIT_ overrides."""
    monkeypatch.setenv("MSKIT_SEED", "42")
    monkeypatch.setenv("MSKIT_LOG_LEVEL", "debug")

    settings = get_settings()

    assert settings.seed == 42
    assert settings.log_level == "debug"


def test_settings_from_dotenv(tmp_path):
    """Test that a .env file in the working directory is read."""
    (tmp_path / ".env").write_text("MSKIT_EPSILON=0.001\n")

    assert get_settings().epsilon == 0.001


def test_even_smoothing_width_rejected():
    """Test that K must be odd."""
    with pytest.raises(ValidationError, match="K must be odd"):
        Settings(smoothing_width=4)


def test_threads_must_be_positive(monkeypatch):
    """Test the thread-count lower bound."""
    monkeypatch.setenv("MSKIT_THREADS", "0")

    with pytest.raises(ValidationError):
        get_settings()


def test_resolve_threads_uses_flag():
    """Test that the flag is used when MSKIT_THREADS is unset."""
    assert resolve_threads(3) == 3
    assert resolve_threads(0) == 1


def test_resolve_threads_environment_wins(monkeypatch):
    """Test that MSKIT_THREADS overrides the flag."""
    monkeypatch.setenv("MSKIT_THREADS", "4")

    assert resolve_threads(1) == 4
    assert resolve_threads(8) == 4


# ============================================================================
# MODEL LOADING TESTS
# ============================================================================


def test_load_yaml_model(tmp_path):
    """Test loading a dataset spec from YAML."""
    path = tmp_path / "spec.yaml"
    path.write_text("num_sequences: 12\nframes: 30\nseed: 9\n")

    spec = load_model(path, SyntheticDatasetSpec)

    assert (spec.num_sequences, spec.frames, spec.seed) == (12, 30, 9)
    assert spec.points == SyntheticDatasetSpec().points


def test_load_json_model(tmp_path):
    """Test that JSON files load through the same path."""
    path = tmp_path / "regions.json"
    path.write_text('{"regions": {"lip": [3, 1, 2, 1]}, "mouth_corners": [1, 3]}')

    region_map = load_model(path, RegionMap)

    assert region_map.regions == {"lip": [1, 2, 3]}
    assert region_map.mouth_corners == (1, 3)


def test_empty_file_gives_defaults(tmp_path):
    """Test that an empty file validates as an empty mapping."""
    path = tmp_path / "augment.yaml"
    path.write_text("")

    assert load_model(path, AugmentSpec) == AugmentSpec()


def test_save_and_reload_yaml(tmp_path):
    """Test saving a model as YAML and loading it back."""
    spec = AugmentSpec(erode_dilate_radius_range=(-3, 1), shift_range=2, seed=5)
    path = tmp_path / "augment.yaml"

    save_model_yaml(spec, path)

    assert load_model(path, AugmentSpec) == spec


def test_invalid_yaml(tmp_path):
    """Test that unparsable YAML is a ConfigError."""
    path = tmp_path / "bad.yaml"
    path.write_text("frames: [1, 2\n")

    with pytest.raises(ConfigError, match="invalid YAML/JSON"):
        load_model(path, SyntheticDatasetSpec)


def test_non_mapping_yaml(tmp_path):
    """Test that a top-level list is rejected."""
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")

    with pytest.raises(ConfigError, match="expected a mapping"):
        load_model(path, SyntheticDatasetSpec)


def test_validation_failure_names_the_field(tmp_path):
    """Test that validation errors point at the offending field."""
    path = tmp_path / "augment.yaml"
    path.write_text("shift_range: -1\n")

    with pytest.raises(ConfigError, match="shift_range"):
        load_model(path, AugmentSpec)


def test_missing_model_file(tmp_path):
    """Test that a missing file raises FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / "absent.yaml", AugmentSpec)


# ============================================================================
# FILE TESTS
# ============================================================================


def test_write_text_atomic(tmp_path):
    """Test that writes replace the target and leave no temp files."""
    path = tmp_path / "nested" / "out.txt"

    write_text_atomic(path, "first\n")
    write_text_atomic(path, "second\n")

    assert path.read_text() == "second\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.txt"]


def test_write_and_read_json(tmp_path):
    """Test JSON round trip."""
    path = tmp_path / "data.json"

    write_json(path, {"msi": 1.5, "regions": ["lip"]})

    assert read_json(path) == {"msi": 1.5, "regions": ["lip"]}
    assert path.read_text().endswith("\n")


def test_write_json_rejects_nan(tmp_path):
    """Test that NaN never reaches a JSON file."""
    path = tmp_path / "nan.json"

    with pytest.raises(TypeError):
        write_json(path, {"value": float("nan")})
    assert not path.exists()


def test_list_frame_files(tmp_path):
    """Test frame listing in index order, ignoring other files."""
    for index in (2, 0, 1):
        (tmp_path / f"frame_{index:06d}.png").write_bytes(b"")
    (tmp_path / "frame_x.png").write_bytes(b"")

    files = list_frame_files(tmp_path)

    assert [f.name for f in files] == ["frame_000000.png", "frame_000001.png", "frame_000002.png"]


def test_list_frame_files_errors(tmp_path):
    """Test missing directories and too few frames."""
    with pytest.raises(FileNotFoundError):
        list_frame_files(tmp_path / "absent")

    (tmp_path / "frame_000000.png").write_bytes(b"")
    with pytest.raises(ValueError, match="at least 2"):
        list_frame_files(tmp_path)


# ============================================================================
# PARALLEL TESTS
# ============================================================================


def test_gather_ordered_keeps_input_order():
    """Test that results line up with inputs for any thread count."""
    items = list(range(20))

    for threads in (1, 2, 5):
        assert gather_ordered(lambda x: x * x, items, threads) == [x * x for x in items]


def test_gather_ordered_uses_worker_threads():
    """Test that threads > 1 runs work off the calling thread."""
    main = threading.get_ident()

    idents = gather_ordered(lambda _: threading.get_ident(), range(4), threads=2)

    assert all(ident != main for ident in idents)


def test_gather_ordered_propagates_errors():
    """Test that a worker exception reaches the caller."""

    def fail_on_three(x: int) -> int:
        if x == 3:
            raise ConfigError("bad item 3")
        return x

    with pytest.raises(ConfigError, match="bad item 3"):
        gather_ordered(fail_on_three, list(range(6)), threads=3)


def test_gather_ordered_rejects_zero_threads():
    """Test the thread-count check."""
    with pytest.raises(ValueError, match="threads must be >= 1"):
        gather_ordered(abs, [1], threads=0)
