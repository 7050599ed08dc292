"""File I/O utilities for mskit.

All writers go through a temporary file in the destination directory followed by
``os.replace``, so a failed command never leaves a partial output behind.
"""

import json
import os
import re
import shutil
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import numpy as np
from PIL import Image


def ensure_dir(path: Path) -> None:
    """
    Ensure directory exists, create if it doesn't.

    Args:
        path: Directory path.
    """
    path.mkdir(parents=True, exist_ok=True)


def require_file(file_path: Path) -> Path:
    """
    Check that an input file exists.

    Args:
        file_path: Path to file.

    Returns:
        The same path.

    Raises:
        FileNotFoundError: If file doesn't exist.
    """
    if not file_path.exists() or not file_path.is_file():
        raise FileNotFoundError(f"no such file: {file_path}")
    return file_path


def write_bytes_atomic(file_path: Path, content: bytes) -> None:
    """
    Write bytes to file atomically.

    Args:
        file_path: Destination path.
        content: Bytes to write.

    Raises:
        IOError: If file can't be written.
    """
    ensure_dir(file_path.parent)
    fd, tmp_name = tempfile.mkstemp(dir=file_path.parent, prefix=f".{file_path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(content)
        os.replace(tmp_name, file_path)
    except Exception as e:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise IOError(f"Failed to write file {file_path}: {e}")


def write_text_atomic(file_path: Path, content: str) -> None:
    """
    Write text content to file atomically (UTF-8, ``\\n`` newlines).

    Args:
        file_path: Destination path.
        content: Content to write.
    """
    write_bytes_atomic(file_path, content.encode("utf-8"))


@contextmanager
def staged_dir(directory: Path) -> Iterator[Path]:
    """
    Build a directory's contents in a hidden sibling and move them in on success.

    A new directory is renamed into place in one step; files staged for an
    existing directory replace their namesakes one by one. On failure the
    staging directory is removed and ``directory`` is left as it was.

    Args:
        directory: Final output directory.

    Yields:
        Staging directory to write into.
    """
    ensure_dir(directory.parent)
    staging = Path(tempfile.mkdtemp(dir=directory.parent, prefix=f".{directory.name}.", suffix=".tmp"))
    try:
        yield staging
        if directory.exists():
            for path in sorted(staging.iterdir()):
                os.replace(path, directory / path.name)
            staging.rmdir()
        else:
            os.replace(staging, directory)
    finally:
        if staging.exists():
            shutil.rmtree(staging)


def dumps_json(data: Any, indent: int = 2) -> str:
    """Serialize data to JSON text with a trailing newline."""
    return json.dumps(data, indent=indent, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(file_path: Path, data: Any, indent: int = 2) -> None:
    """
    Write data to JSON file atomically.

    Args:
        file_path: Path to JSON file.
        data: Data to write (must be JSON-serializable, no NaN/inf).
        indent: Indentation spaces (default: 2).

    Raises:
        TypeError: If data is not JSON-serializable.
    """
    try:
        text = dumps_json(data, indent=indent)
    except (TypeError, ValueError) as e:
        raise TypeError(f"Data is not JSON-serializable: {e}")
    write_text_atomic(file_path, text)


def read_json(file_path: Path) -> Any:
    """
    Read and parse JSON file.

    Args:
        file_path: Path to JSON file.

    Returns:
        Parsed JSON data.

    Raises:
        FileNotFoundError: If file doesn't exist.
        json.JSONDecodeError: If JSON is invalid.
    """
    require_file(file_path)
    with open(file_path, encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise json.JSONDecodeError(f"Invalid JSON in {file_path}: {e.msg}", e.doc, e.pos)


# ============================================================================
# PNG I/O
# ============================================================================


def read_png(file_path: Path) -> np.ndarray:
    """
    Read a PNG as float pixels in [0, 1].

    Grayscale images give an H×W array, colour images an H×W×3 array.

    Args:
        file_path: Path to PNG file.

    Returns:
        float64 array scaled by 1/255.
    """
    require_file(file_path)
    with Image.open(file_path) as img:
        if img.mode in ("L", "1", "I", "I;16", "P", "LA"):
            data = np.asarray(img.convert("L"), dtype=np.float64)
        else:
            data = np.asarray(img.convert("RGB"), dtype=np.float64)
    return data / 255.0


def write_png(file_path: Path, pixels: np.ndarray) -> None:
    """
    Write float pixels in [0, 1] as an 8-bit PNG.

    Args:
        file_path: Destination path.
        pixels: H×W (grayscale) or H×W×3 (RGB) array.
    """
    data = np.clip(np.rint(np.asarray(pixels, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)
    image = Image.fromarray(data)

    ensure_dir(file_path.parent)
    fd, tmp_name = tempfile.mkstemp(dir=file_path.parent, prefix=f".{file_path.name}.", suffix=".png")
    os.close(fd)
    try:
        image.save(tmp_name, format="PNG")
        os.replace(tmp_name, file_path)
    except Exception as e:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise IOError(f"Failed to write PNG {file_path}: {e}")


_FRAME_PATTERN = re.compile(r"^frame_(\d{6})\.png$")


def list_frame_files(directory: Path) -> list[Path]:
    """
    List ``frame_%06d.png`` files in index order.

    Args:
        directory: Directory holding the frames.

    Returns:
        Frame paths sorted by index.

    Raises:
        FileNotFoundError: If directory doesn't exist.
        ValueError: If frame indices are not contiguous or fewer than two frames exist.
    """
    if not directory.exists():
        raise FileNotFoundError(f"no such file or directory: {directory}")
    if not directory.is_dir():
        raise NotADirectoryError(f"Not a directory: {directory}")

    indexed: list[tuple[int, Path]] = []
    for path in directory.iterdir():
        match = _FRAME_PATTERN.match(path.name)
        if match and path.is_file():
            indexed.append((int(match.group(1)), path))
    indexed.sort()

    if len(indexed) < 2:
        raise ValueError(f"Need at least 2 frame_%06d.png files in {directory}, found {len(indexed)}")

    first = indexed[0][0]
    for offset, (index, _) in enumerate(indexed):
        if index != first + offset:
            raise ValueError(
                f"Non-contiguous frame indices in {directory}: "
                f"expected {first + offset:06d}, found {index:06d}"
            )

    return [path for _, path in indexed]
