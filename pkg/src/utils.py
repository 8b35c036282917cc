"""Utility functions for validation and formatting."""
import os
from pathlib import Path
from typing import Iterable, List

from src.prng import MASK64


def validate_inputs(paths: Iterable[Path]) -> List[Path]:
    """Validate that every input path exists.

    Args:
        paths: Files or folders given by the user

    Returns:
        The paths as Path objects

    Raises:
        FileNotFoundError: If any path is missing
    """
    resolved = [Path(p) for p in paths]
    missing = [str(p) for p in resolved if not p.exists()]
    if missing:
        raise FileNotFoundError(f"Missing inputs: {', '.join(missing)}")
    if not resolved:
        raise ValueError("At least one input path is required")
    return resolved


def parse_key_number(text: str) -> int:
    """Parse a key number given as decimal or 0x-prefixed hex.

    Raises:
        ValueError: If it is not an unsigned 64-bit integer
    """
    value = int(str(text).strip(), 0)
    if not 0 <= value <= MASK64:
        raise ValueError(f"key number must be between 0 and {MASK64}")
    return value


def format_size(num_bytes: int) -> str:
    """Format a byte count for display.

    Args:
        num_bytes: Size in bytes

    Returns:
        Formatted string such as "843.0 KiB"
    """
    if num_bytes < 1024:
        return f"{num_bytes} B"
    if num_bytes < 1024 * 1024:
        return f"{num_bytes / 1024:.1f} KiB"
    return f"{num_bytes / (1024 * 1024):.2f} MiB"


def shred(path: Path) -> None:
    """Overwrite a file (or every file under a folder) with zeros, then delete it."""
    path = Path(path)
    if path.is_dir():
        for child in sorted(path.rglob("*"), reverse=True):
            if child.is_file():
                shred(child)
            elif child.is_dir():
                child.rmdir()
        path.rmdir()
        return
    size = path.stat().st_size
    with open(path, "r+b") as f:
        f.write(b"\x00" * size)
        f.flush()
        os.fsync(f.fileno())
    path.unlink()
