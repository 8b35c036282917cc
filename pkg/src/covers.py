"""Cover objects: 24-bit BMP and PCM WAV parsing, writing and capacity.

A cover keeps its original bytes untouched and records which byte offsets
are carriers, i.e. bytes whose low bits may be rewritten. Headers, BMP row
padding, the high bytes of 16-bit samples and unknown RIFF chunks are never
carriers, so serialize(parse(raw)) == raw.
"""

import logging
import struct
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

import numpy as np

from src.errors import ConfigError, FormatError, UnsupportedCoverError

logger = logging.getLogger(__name__)

HEADER_SIZE = 24
HEADER_CARRIERS = HEADER_SIZE * 8

_BMP_FILE_HEADER = struct.Struct("<2sIHHI")
_BMP_INFO_HEADER = struct.Struct("<IiiHHIIiiII")
_RIFF_HEAD = struct.Struct("<4sI4s")
_CHUNK_HEAD = struct.Struct("<4sI")
_FMT = struct.Struct("<HHIIHH")


class CoverKind(str, Enum):
    BMP24 = "BMP24"
    WAV_PCM8 = "WAV_PCM8"
    WAV_PCM16 = "WAV_PCM16"


@dataclass(frozen=True)
class BmpInfo:
    width: int
    height: int
    bits_per_pixel: int
    pixel_offset: int
    row_size: int


@dataclass(frozen=True)
class WavInfo:
    sample_rate: int
    channels: int
    bits_per_sample: int
    data_offset: int
    data_size: int


@dataclass(frozen=True, eq=False)
class CoverObject:
    """Parsed cover. ``raw`` is the full file; ``carriers`` are offsets into it."""

    kind: CoverKind
    raw: bytes
    carriers: np.ndarray
    meta: Union[BmpInfo, WavInfo]

    @property
    def carrier_count(self) -> int:
        return int(self.carriers.size)

    def with_raw(self, raw: bytes) -> "CoverObject":
        """Same structure, different bytes (used by embed)."""
        if len(raw) != len(self.raw):
            raise ValueError("replacement bytes must keep the cover length")
        return replace(self, raw=bytes(raw))


@dataclass(frozen=True)
class CoverCapacity:
    carrier_count: int
    header_cost_bytes: int
    k1_bytes: int
    k2_bytes: int

    def payload_capacity_bytes(self, k: int) -> int:
        if k == 1:
            return self.k1_bytes
        if k == 2:
            return self.k2_bytes
        raise ConfigError(f"k must be 1 or 2, got {k}")


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _sniff_unsupported(raw: bytes) -> str:
    if raw.startswith(b"\x89PNG"):
        return "PNG covers are not supported (compressed pixel data)"
    if raw.startswith(b"\xff\xd8\xff"):
        return "JPEG covers are not supported (lossy)"
    if raw.startswith(b"ID3") or raw[:2] in (b"\xff\xfb", b"\xff\xf3", b"\xff\xf2"):
        return "MP3 covers are not supported (lossy)"
    return "unrecognized cover format (expected 24-bit BMP or PCM WAV)"


def _parse_bmp(raw: bytes) -> CoverObject:
    if len(raw) < _BMP_FILE_HEADER.size + _BMP_INFO_HEADER.size:
        raise FormatError("BMP shorter than its headers")
    _, _, _, _, pixel_offset = _BMP_FILE_HEADER.unpack_from(raw, 0)
    (info_size, width, height, planes, bpp, compression,
     _, _, _, _, _) = _BMP_INFO_HEADER.unpack_from(raw, _BMP_FILE_HEADER.size)

    if info_size < 40:
        raise UnsupportedCoverError(f"BMP info header of {info_size} bytes (OS/2 bitmap)")
    if bpp != 24:
        raise UnsupportedCoverError(f"BMP with {bpp} bits per pixel (only 24 supported)")
    if compression != 0:
        raise UnsupportedCoverError(f"compressed BMP (biCompression={compression})")
    if planes != 1:
        raise FormatError(f"BMP with {planes} planes")
    if width <= 0 or height == 0:
        raise FormatError(f"BMP with invalid dimensions {width}x{height}")
    if pixel_offset < _BMP_FILE_HEADER.size + info_size:
        raise FormatError("BMP pixel data overlaps its headers")

    rows = abs(height)
    # Each row is padded to a multiple of 4 bytes
    row_size = ((bpp * width + 31) // 32) * 4
    if pixel_offset + row_size * rows > len(raw):
        raise FormatError("BMP pixel data truncated")

    # File (row) order; bottom-up files start with the bottom row
    carriers = (
        pixel_offset
        + np.arange(rows, dtype=np.int64)[:, None] * row_size
        + np.arange(3 * width, dtype=np.int64)[None, :]
    ).ravel()
    meta = BmpInfo(width, height, bpp, pixel_offset, row_size)
    return CoverObject(CoverKind.BMP24, bytes(raw), _readonly(carriers), meta)


def _parse_wav(raw: bytes) -> CoverObject:
    if len(raw) < _RIFF_HEAD.size:
        raise FormatError("WAV shorter than its RIFF header")
    _, _, wave = _RIFF_HEAD.unpack_from(raw, 0)
    if wave != b"WAVE":
        raise UnsupportedCoverError(f"RIFF form {wave!r} is not WAVE")

    fmt = None
    data = None
    pos = _RIFF_HEAD.size
    while pos + _CHUNK_HEAD.size <= len(raw):
        chunk_id, size = _CHUNK_HEAD.unpack_from(raw, pos)
        body = pos + _CHUNK_HEAD.size
        if body + size > len(raw):
            raise FormatError(f"WAV chunk {chunk_id!r} truncated")
        if chunk_id == b"fmt ":
            if size < _FMT.size:
                raise FormatError("WAV fmt chunk too short")
            fmt = _FMT.unpack_from(raw, body)
        elif chunk_id == b"data":
            if fmt is None:
                raise FormatError("WAV data chunk before fmt chunk")
            data = (body, size)
        # chunks are word aligned
        pos = body + size + (size & 1)

    if fmt is None or data is None:
        raise FormatError("WAV missing fmt or data chunk")
    audio_format, channels, rate, _, block_align, bits = fmt
    if audio_format != 1:
        raise UnsupportedCoverError(f"non-PCM WAV (audioFormat={audio_format})")
    if bits not in (8, 16):
        raise UnsupportedCoverError(f"WAV with {bits} bits per sample (only 8 or 16 supported)")
    if channels < 1:
        raise FormatError("WAV with no channels")

    data_offset, data_size = data
    sample_bytes = bits // 8
    samples = data_size // sample_bytes
    if bits == 8:
        kind = CoverKind.WAV_PCM8
        carriers = data_offset + np.arange(samples, dtype=np.int64)
    else:
        # Little-endian samples: the low byte comes first
        kind = CoverKind.WAV_PCM16
        carriers = data_offset + 2 * np.arange(samples, dtype=np.int64)

    meta = WavInfo(rate, channels, bits, data_offset, data_size)
    return CoverObject(kind, bytes(raw), _readonly(carriers), meta)


def parse_cover(raw: bytes) -> CoverObject:
    """Detect and parse a 24-bit BMP or PCM WAV cover.

    Raises:
        UnsupportedCoverError: Recognized but unusable covers (8-bit or compressed
            BMP, non-PCM or 24-bit WAV, PNG, JPEG, MP3, anything else).
        FormatError: Malformed or truncated headers.
    """
    raw = bytes(raw)
    if raw[:2] == b"BM":
        cover = _parse_bmp(raw)
    elif raw[:4] == b"RIFF":
        cover = _parse_wav(raw)
    else:
        raise UnsupportedCoverError(_sniff_unsupported(raw))
    logger.debug("parsed %s cover: %d carriers", cover.kind.value, cover.carrier_count)
    return cover


def serialize_cover(cover: CoverObject) -> bytes:
    """Bytes of the cover, headers and unknown chunks verbatim."""
    return bytes(cover.raw)


def payload_capacity(carrier_count: int, k: int) -> int:
    if k not in (1, 2):
        raise ConfigError(f"k must be 1 or 2, got {k}")
    return max(0, (carrier_count - HEADER_CARRIERS) * k // 8)


def capacity(cover: CoverObject, k: int) -> CoverCapacity:
    """Payload capacity; the header is always charged at one bit per carrier.

    Raises:
        ConfigError: If k is not 1 or 2.
    """
    if k not in (1, 2):
        raise ConfigError(f"k must be 1 or 2, got {k}")
    n = cover.carrier_count
    return CoverCapacity(n, HEADER_SIZE, payload_capacity(n, 1), payload_capacity(n, 2))


# -----------------------------
# Writers (fixtures and bench covers)
# -----------------------------

def build_bmp24(pixels: np.ndarray) -> bytes:
    """Write a bottom-up 24-bit BMP.

    Args:
        pixels: uint8 array of shape (height, width, 3) in B, G, R order,
            top row first.
    """
    pixels = np.asarray(pixels, dtype=np.uint8)
    height, width, _ = pixels.shape
    row_size = ((24 * width + 31) // 32) * 4
    rows = np.zeros((height, row_size), dtype=np.uint8)
    rows[:, : 3 * width] = pixels[::-1].reshape(height, 3 * width)
    image = rows.tobytes()

    offset = _BMP_FILE_HEADER.size + _BMP_INFO_HEADER.size
    file_header = _BMP_FILE_HEADER.pack(b"BM", offset + len(image), 0, 0, offset)
    info_header = _BMP_INFO_HEADER.pack(40, width, height, 1, 24, 0, len(image), 2835, 2835, 0, 0)
    return file_header + info_header + image


def build_wav(samples: np.ndarray, sample_rate: int = 8000, bits: int = 16, extra_chunks=()) -> bytes:
    """Write a PCM WAV file.

    Args:
        samples: (frames,) or (frames, channels) array; uint8 for 8-bit,
            int16 for 16-bit.
        sample_rate: Frames per second.
        bits: 8 or 16.
        extra_chunks: (chunk_id, body) pairs appended after the data chunk.
    """
    samples = np.asarray(samples)
    channels = 1 if samples.ndim == 1 else samples.shape[1]
    dtype = np.uint8 if bits == 8 else np.dtype("<i2")
    data = samples.astype(dtype).tobytes()
    block_align = channels * bits // 8
    fmt = _FMT.pack(1, channels, sample_rate, sample_rate * block_align, block_align, bits)

    chunks = [_CHUNK_HEAD.pack(b"fmt ", len(fmt)) + fmt, _CHUNK_HEAD.pack(b"data", len(data)) + data]
    if len(data) & 1:
        chunks.append(b"\x00")
    for chunk_id, body in extra_chunks:
        chunks.append(_CHUNK_HEAD.pack(chunk_id, len(body)) + body + (b"\x00" if len(body) & 1 else b""))
    body = b"".join(chunks)
    return _RIFF_HEAD.pack(b"RIFF", 4 + len(body), b"WAVE") + body
