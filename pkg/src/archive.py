"""SVA1 container: packs files with relative paths into one byte stream.

Layout (little-endian throughout)::

    "SVA1" | count:u32 | count x (path_len:u16 | path | size:u64 | crc32:u32 | payload)

Store-only, no compression. Every entry carries its own CRC-32 so a wrong
key or a tampered stream fails loudly instead of producing garbage files.
"""

import logging
import os
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Sequence

from src.errors import FormatError, IntegrityError, UnsafePathError

logger = logging.getLogger(__name__)

MAGIC = b"SVA1"
MAX_PATH_BYTES = 0xFFFF

_HEAD = struct.Struct("<4sI")
_PATH_LEN = struct.Struct("<H")
_ENTRY_META = struct.Struct("<QI")


def crc32(data: bytes) -> int:
    """CRC-32 (reflected poly 0xEDB88320, init and final XOR 0xFFFFFFFF)."""
    return zlib.crc32(data) & 0xFFFFFFFF


def validate_path(path: str) -> bytes:
    """Check an archive path and return its UTF-8 encoding.

    Raises:
        UnsafePathError: If the path is empty, absolute, too long, contains NUL,
            a backslash, or an empty, "." or ".." segment.
    """
    if not isinstance(path, str) or not path:
        raise UnsafePathError("archive path must be a non-empty string")
    if "\x00" in path:
        raise UnsafePathError(f"archive path contains NUL: {path!r}")
    if "\\" in path:
        raise UnsafePathError(f"archive path must use forward slashes: {path!r}")
    drive = path[:1].isascii() and path[:1].isalpha() and path[1:2] == ":" and path[2:3] in ("", "/")
    if path.startswith("/") or drive:
        raise UnsafePathError(f"archive path is absolute: {path!r}")
    for segment in path.split("/"):
        if segment in ("", ".", ".."):
            raise UnsafePathError(f"archive path has an illegal segment: {path!r}")
    encoded = path.encode("utf-8")
    if len(encoded) > MAX_PATH_BYTES:
        raise UnsafePathError(f"archive path longer than {MAX_PATH_BYTES} bytes")
    return encoded


@dataclass(frozen=True)
class ArchiveEntry:
    """One file inside the container."""

    path: str
    payload: bytes
    crc32: int = field(default=-1)

    def __post_init__(self):
        validate_path(self.path)
        object.__setattr__(self, "payload", bytes(self.payload))
        if self.crc32 == -1:
            object.__setattr__(self, "crc32", crc32(self.payload))
        elif self.crc32 != crc32(self.payload):
            raise IntegrityError(f"CRC mismatch for {self.path}")


def pack(entries: Sequence[ArchiveEntry]) -> bytes:
    """Serialize entries, in the given order, into an SVA1 stream.

    Raises:
        FormatError: On duplicate paths.
        UnsafePathError: On an invalid path.
    """
    seen = set()
    parts = [_HEAD.pack(MAGIC, len(entries))]
    for entry in entries:
        encoded = validate_path(entry.path)
        if entry.path in seen:
            raise FormatError(f"duplicate archive path: {entry.path}")
        seen.add(entry.path)
        parts.append(_PATH_LEN.pack(len(encoded)))
        parts.append(encoded)
        parts.append(_ENTRY_META.pack(len(entry.payload), entry.crc32))
        parts.append(entry.payload)
    blob = b"".join(parts)
    logger.debug("packed %d entries into %d bytes", len(entries), len(blob))
    return blob


def unpack(blob: bytes) -> List[ArchiveEntry]:
    """Parse an SVA1 stream, re-verifying every entry CRC.

    Raises:
        FormatError: Bad magic, truncation, trailing bytes, undecodable or
            duplicate paths.
        UnsafePathError: A path that could escape the destination.
        IntegrityError: A payload whose CRC does not match, naming the path.
    """
    view = memoryview(blob)
    if len(view) < _HEAD.size:
        raise FormatError("archive shorter than its header")
    magic, count = _HEAD.unpack_from(view, 0)
    if magic != MAGIC:
        raise FormatError(f"bad archive magic {bytes(magic)!r}")

    pos = _HEAD.size
    entries = []
    seen = set()
    for index in range(count):
        if pos + _PATH_LEN.size > len(view):
            raise FormatError(f"archive truncated in entry {index}")
        (path_len,) = _PATH_LEN.unpack_from(view, pos)
        pos += _PATH_LEN.size
        if pos + path_len + _ENTRY_META.size > len(view):
            raise FormatError(f"archive truncated in entry {index}")
        try:
            path = bytes(view[pos:pos + path_len]).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"entry {index} path is not UTF-8") from exc
        pos += path_len
        validate_path(path)
        if path in seen:
            raise FormatError(f"duplicate archive path: {path}")
        seen.add(path)

        size, stored_crc = _ENTRY_META.unpack_from(view, pos)
        pos += _ENTRY_META.size
        if pos + size > len(view):
            raise FormatError(f"archive truncated in payload of {path}")
        payload = bytes(view[pos:pos + size])
        pos += size
        if crc32(payload) != stored_crc:
            raise IntegrityError(f"CRC mismatch for {path}")
        entries.append(ArchiveEntry(path, payload, stored_crc))

    if pos != len(view):
        raise FormatError(f"{len(view) - pos} trailing bytes after archive")
    return entries


def collect_entries(paths: Iterable[Path]) -> List[ArchiveEntry]:
    """Walk files and folders into entries sorted by path.

    A file argument is stored under its basename; a folder argument keeps its
    own name as the first path segment. Empty folders are not represented.
    """
    roots = [Path(p) for p in paths]
    entries = {}
    found = []
    for root in roots:
        if root.is_dir():
            root = root.resolve()
            for dirpath, _, filenames in os.walk(root):
                for name in filenames:
                    full = Path(dirpath) / name
                    found.append((full.relative_to(root.parent).as_posix(), full))
        elif root.is_file():
            found.append((root.name, root))
        else:
            raise FileNotFoundError(f"input not found: {root}")

    for rel, full in found:
        if rel in entries:
            raise FormatError(f"two inputs map to the same archive path: {rel}")
        entries[rel] = full

    collected = []
    for rel in sorted(entries):
        collected.append(ArchiveEntry(rel, entries[rel].read_bytes()))
    logger.info("collected %d files from %d inputs", len(collected), len(roots))
    return collected


def write_entries(entries: Sequence[ArchiveEntry], dest: Path) -> List[Path]:
    """Write entries below ``dest``, creating folders as needed.

    All paths are checked before the first file is written.

    Raises:
        UnsafePathError: If any entry would resolve outside ``dest``.
        FormatError: If two entries share a path, or one entry is a file where
            another needs a folder.
    """
    dest = Path(dest)
    root = dest.resolve()
    targets = []
    for entry in entries:
        validate_path(entry.path)
        target = (root / entry.path).resolve()
        if root != target and root not in target.parents:
            raise UnsafePathError(f"archive path escapes destination: {entry.path}")
        targets.append(target)

    planned = set()
    for entry, target in zip(entries, targets):
        if target in planned:
            raise FormatError(f"archive holds {entry.path} twice")
        planned.add(target)
    for entry, target in zip(entries, targets):
        clash = next((p for p in target.parents if p in planned), None)
        if clash is not None:
            raise FormatError(f"archive path {entry.path} lies below the file {clash.relative_to(root)}")

    for entry, target in zip(entries, targets):
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(entry.payload)
    return targets
