"""LSB embedding and extraction over a cover's carrier bytes.

Bit layout inside the carriers:

- carriers[0:192] hold the 24-byte StegoHeader, one bit per carrier (k=1),
  in natural order, MSB of each byte first;
- carriers[192:] are payload slots, visited in the order given by
  derive_permutation; each visited slot takes the next k payload bits,
  MSB-first, in its k lowest bits.
"""

import logging
import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from src.archive import crc32
from src.covers import HEADER_CARRIERS, HEADER_SIZE, CoverObject, payload_capacity
from src.errors import CapacityError, ConfigError, FormatError, IntegrityError, NotStegoError
from src.prng import MASK64, outputs, prng_next

logger = logging.getLogger(__name__)

MAGIC = b"SVH1"
VERSION = 1
FLAG_ENCRYPTED = 0x01

_HEADER_BODY = struct.Struct("<4sBBBBQI")
_HEADER_CRC = struct.Struct("<I")


@dataclass(frozen=True)
class StegoHeader:
    k: int
    payload_len: int
    payload_crc32: int
    flags: int = FLAG_ENCRYPTED
    version: int = VERSION

    @property
    def encrypted(self) -> bool:
        return bool(self.flags & FLAG_ENCRYPTED)

    def to_bytes(self) -> bytes:
        body = _HEADER_BODY.pack(MAGIC, self.version, self.k, self.flags, 0,
                                 self.payload_len, self.payload_crc32)
        return body + _HEADER_CRC.pack(crc32(body))

    @classmethod
    def from_bytes(cls, blob: bytes) -> "StegoHeader":
        """Decode and validate a header.

        Raises:
            NotStegoError: Bad magic or header CRC.
            FormatError: Valid CRC but unsupported version or k.
        """
        if len(blob) != HEADER_SIZE:
            raise NotStegoError("stego header must be 24 bytes")
        body = blob[:_HEADER_BODY.size]
        magic, version, k, flags, _, payload_len, payload_crc = _HEADER_BODY.unpack(body)
        (stored_crc,) = _HEADER_CRC.unpack_from(blob, _HEADER_BODY.size)
        if magic != MAGIC or crc32(body) != stored_crc:
            raise NotStegoError("no stego header found")
        if version != VERSION:
            raise FormatError(f"unsupported stego header version {version}")
        if k not in (1, 2):
            raise FormatError(f"stego header has invalid k={k}")
        return cls(k=k, payload_len=payload_len, payload_crc32=payload_crc,
                   flags=flags, version=version)


@dataclass(frozen=True)
class PermutationSpec:
    """Inputs of the carrier-visit order: the shared key number and the salt."""

    key_number: int
    perm_salt: bytes
    domain_size: int

    def __post_init__(self):
        if not 0 <= self.key_number <= MASK64:
            raise ConfigError("key number must be a 64-bit unsigned integer")
        if len(self.perm_salt) != 8:
            raise ConfigError("permutation salt must be 8 bytes")
        if self.domain_size < 0:
            raise ConfigError("permutation domain size must be non-negative")

    @classmethod
    def for_cover(cls, key_number: int, perm_salt: bytes, cover: CoverObject) -> "PermutationSpec":
        return cls(key_number, bytes(perm_salt), max(0, cover.carrier_count - HEADER_CARRIERS))


def replace_low_bits(byte: int, bits: int, k: int) -> int:
    """Replace the k lowest bits of ``byte`` with ``bits``."""
    mask = (1 << k) - 1
    return (byte & ~mask & 0xFF) | (bits & mask)


# Below this index the shuffle runs one swap at a time on a Python list.
_SEQUENTIAL_BELOW = 8192


def _disjoint_prefix(i_pos: np.ndarray, j_pos: np.ndarray, n: int) -> int:
    """Number of leading steps whose swaps touch pairwise distinct positions."""
    width = i_pos.size
    span = 2 * width
    touched = np.empty(span, dtype=np.int64)
    touched[0::2] = i_pos
    # a self-swap touches one position; park its second slot past the domain
    touched[1::2] = np.where(j_pos == i_pos, n + np.arange(width), j_pos)
    keys = np.sort(touched * span + np.arange(span))
    values = keys // span
    repeats = (keys[1:] % span)[values[1:] == values[:-1]]
    if repeats.size == 0:
        return width
    return int(repeats.min()) // 2


def _fisher_yates(n: int, swaps: np.ndarray) -> np.ndarray:
    """Apply swap t between positions n-1-t and swaps[t], in order, to the identity.

    Runs of consecutive swaps with no shared position commute, so each run
    is applied as one gather/scatter. Step t's j is at most its own i,
    which is below every earlier i, so runs are long while i is large.
    """
    perm = np.arange(n, dtype=np.int64)
    stop = max(0, n - _SEQUENTIAL_BELOW)
    t = 0
    while t < stop:
        top = n - 1 - t
        width = min(stop - t, max(64, math.isqrt(top)))
        i_pos = np.arange(top, top - width, -1, dtype=np.int64)
        j_pos = swaps[t:t + width]
        run = _disjoint_prefix(i_pos, j_pos, n)
        if run < width:
            i_pos, j_pos = i_pos[:run], j_pos[:run]
        held = perm[i_pos]
        perm[i_pos] = perm[j_pos]
        perm[j_pos] = held
        t += run

    head = perm[:min(n, _SEQUENTIAL_BELOW)].tolist()
    for i, j in zip(range(n - 1 - stop, 0, -1), swaps[stop:].tolist()):
        head[i], head[j] = head[j], head[i]
    perm[:len(head)] = head
    return perm


@lru_cache(maxsize=2)
def derive_permutation(spec: PermutationSpec) -> np.ndarray:
    """Slot-visit order: Fisher-Yates over [0, domain_size) driven by SplitMix64.

    The stream is seeded with the first SplitMix64 output of
    key_number XOR little-endian(perm_salt); for i from domain_size-1 down
    to 1, j = next_output mod (i+1) and positions i and j are swapped.

    The result is cached per PermutationSpec and returned read-only, so an extract
    right after an embed with the same key reuses the order.
    """
    n = spec.domain_size
    if n == 0:
        perm = np.zeros(0, dtype=np.int64)
    else:
        _, seed = prng_next(spec.key_number ^ int.from_bytes(spec.perm_salt, "little"))
        draws = outputs(seed, n - 1)
        bounds = np.arange(n, 1, -1, dtype=np.uint64)  # i + 1 for i = n-1 .. 1
        perm = _fisher_yates(n, (draws % bounds).astype(np.int64))
    perm.setflags(write=False)
    return perm


def _bits_to_groups(data: bytes, k: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if k == 1:
        return bits
    return (bits[0::2] << 1) | bits[1::2]


def _groups_to_bytes(groups: np.ndarray, k: int) -> bytes:
    groups = groups.astype(np.uint8)
    if k == 1:
        bits = groups & 1
    else:
        bits = np.empty(groups.size * 2, dtype=np.uint8)
        bits[0::2] = (groups >> 1) & 1
        bits[1::2] = groups & 1
    return np.packbits(bits).tobytes()


def _check_spec(cover: CoverObject, spec: PermutationSpec) -> None:
    expected = max(0, cover.carrier_count - HEADER_CARRIERS)
    if spec.domain_size != expected:
        raise ConfigError(
            f"permutation domain {spec.domain_size} does not match the cover's {expected} payload slots"
        )


def embed(
    cover: CoverObject,
    ciphertext: bytes,
    k: int,
    spec: PermutationSpec,
    flags: int = FLAG_ENCRYPTED,
) -> CoverObject:
    """Hide ``ciphertext`` in a copy of ``cover``.

    Args:
        cover: Parsed cover object.
        ciphertext: Payload bytes (already encrypted, or raw with flags=0).
        k: Bits replaced per payload carrier, 1 or 2.
        spec: Permutation inputs; domain_size must be carrier_count - 192.
        flags: Header flags; bit0 marks an encrypted payload.

    Returns:
        New CoverObject with modified carrier bytes.

    Raises:
        ConfigError: Invalid k or mismatched spec.
        CapacityError: Payload larger than the cover holds at k.
    """
    if k not in (1, 2):
        raise ConfigError(f"k must be 1 or 2, got {k}")
    _check_spec(cover, spec)
    have = payload_capacity(cover.carrier_count, k)
    if cover.carrier_count < HEADER_CARRIERS or len(ciphertext) > have:
        raise CapacityError(need=len(ciphertext), have=have)

    header = StegoHeader(k=k, payload_len=len(ciphertext), payload_crc32=crc32(ciphertext), flags=flags)
    raw = np.frombuffer(cover.raw, dtype=np.uint8).copy()

    head_pos = cover.carriers[:HEADER_CARRIERS]
    head_bits = _bits_to_groups(header.to_bytes(), 1)
    raw[head_pos] = (raw[head_pos] & 0xFE) | head_bits

    if ciphertext:
        groups = _bits_to_groups(bytes(ciphertext), k)
        slots = derive_permutation(spec)[: groups.size]
        pos = cover.carriers[HEADER_CARRIERS:][slots]
        mask = np.uint8((1 << k) - 1)
        raw[pos] = (raw[pos] & ~mask) | groups.astype(np.uint8)

    logger.info("embedded %d bytes at k=%d (capacity %d)", len(ciphertext), k, have)
    return cover.with_raw(raw.tobytes())


def read_header(stego: CoverObject) -> StegoHeader:
    """Read the header from the first 192 carriers without any key.

    Raises:
        NotStegoError: Too few carriers, bad magic or header CRC.
        FormatError: Unsupported version/k, or payload_len beyond capacity.
    """
    if stego.carrier_count < HEADER_CARRIERS:
        raise NotStegoError("object too small to hold a stego header")
    raw = np.frombuffer(stego.raw, dtype=np.uint8)
    head_bits = raw[stego.carriers[:HEADER_CARRIERS]] & 1
    header = StegoHeader.from_bytes(np.packbits(head_bits).tobytes())
    have = payload_capacity(stego.carrier_count, header.k)
    if header.payload_len > have:
        raise FormatError(f"header claims {header.payload_len} bytes but the object holds {have}")
    return header


def extract(stego: CoverObject, spec: PermutationSpec) -> bytes:
    """Recover the embedded payload.

    Raises:
        NotStegoError: No valid header.
        FormatError: Header payload length beyond capacity.
        IntegrityError: Payload CRC mismatch (wrong key number, wrong key
            file, or tampering).
    """
    header = read_header(stego)
    _check_spec(stego, spec)
    k = header.k
    count = header.payload_len * 8 // k

    payload = b""
    if count:
        raw = np.frombuffer(stego.raw, dtype=np.uint8)
        slots = derive_permutation(spec)[:count]
        groups = raw[stego.carriers[HEADER_CARRIERS:][slots]] & np.uint8((1 << k) - 1)
        payload = _groups_to_bytes(groups, k)

    if crc32(payload) != header.payload_crc32:
        raise IntegrityError("payload CRC mismatch (wrong key number or key file, or tampering)")
    return payload
