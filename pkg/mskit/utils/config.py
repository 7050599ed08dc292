"""Loading of user-supplied structured inputs (region maps, dataset and augment specs)."""

from pathlib import Path
from typing import TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from mskit.core.errors import ConfigError
from mskit.utils.files import require_file, write_text_atomic

ModelT = TypeVar("ModelT", bound=BaseModel)


def load_model(path: Path, model_type: type[ModelT]) -> ModelT:
    """
    Load a YAML (or JSON) file into a pydantic model.

    Args:
        path: File to read. JSON is valid YAML, so both formats work.
        model_type: Pydantic model to validate against.

    Returns:
        Validated model instance.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ConfigError: If the file is not valid YAML or fails validation.
    """
    require_file(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML/JSON: {e}")

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level, got {type(data).__name__}")

    try:
        return model_type.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"{path}: invalid {model_type.__name__} ({problems})")


def save_model_yaml(model: BaseModel, path: Path) -> None:
    """
    Save a pydantic model as YAML.

    Args:
        model: Model to save.
        path: Destination file.
    """
    data = model.model_dump(mode="json")
    write_text_atomic(path, yaml.safe_dump(data, default_flow_style=False, sort_keys=False))
