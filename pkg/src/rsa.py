"""Textbook RSA: deterministic key generation, raw exponentiation, key files.

This is an educational implementation. Raw RSA with ad-hoc padding is not
semantically secure and nothing here is constant-time.
"""

import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from src.archive import crc32
from src.errors import ConfigError, FormatError
from src.prng import SplitMix64

logger = logging.getLogger(__name__)

SUPPORTED_BITS = (512, 768, 1024, 2048)
PUBLIC_EXPONENT = 65537
MILLER_RABIN_ROUNDS = 40

PUBLIC_MAGIC = b"SVP1"
PRIVATE_MAGIC = b"SVS1"

_SMALL_PRIMES = [p for p in range(3, 2000, 2) if all(p % q for q in range(3, int(p ** 0.5) + 1, 2))]


@dataclass(frozen=True)
class RsaPublicKey:
    n: int
    e: int

    @property
    def modulus_len(self) -> int:
        return (self.n.bit_length() + 7) // 8


@dataclass(frozen=True)
class RsaKeyPair:
    n: int
    e: Optional[int]
    d: int
    bit_length: int

    @property
    def modulus_len(self) -> int:
        return (self.n.bit_length() + 7) // 8

    @property
    def public(self) -> RsaPublicKey:
        if self.e is None:
            raise ConfigError("this key pair was loaded without its public exponent")
        return RsaPublicKey(self.n, self.e)


def rsa_raw(m: int, exponent: int, n: int) -> int:
    """Compute m**exponent mod n by left-to-right square-and-multiply.

    Raises:
        ValueError: If m is outside [0, n).
    """
    if not 0 <= m < n:
        raise ValueError("message representative out of range [0, n)")
    result = 1 % n
    for bit in bin(exponent)[2:]:
        result = (result * result) % n
        if bit == "1":
            result = (result * m) % n
    return result


def is_probable_prime(n: int, rng: SplitMix64, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Miller-Rabin with bases drawn from ``rng``."""
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if not n & 1:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False

    r, s = 0, n - 1
    while s % 2 == 0:
        r += 1
        s //= 2
    for _ in range(rounds):
        a = 2 + rng.randbelow(n - 3)
        x = pow(a, s, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def _random_prime(bits: int, rng: SplitMix64, rounds: int) -> int:
    while True:
        candidate = rng.randbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate, rng, rounds):
            return candidate


def rsa_keygen(
    bit_length: int,
    rng_seed: int,
    e: int = PUBLIC_EXPONENT,
    rounds: int = MILLER_RABIN_ROUNDS,
) -> RsaKeyPair:
    """Generate a key pair deterministically from ``rng_seed``.

    Args:
        bit_length: Modulus size, one of 512, 768, 1024, 2048.
        rng_seed: 64-bit seed for the SplitMix64 stream.
        e: Public exponent.
        rounds: Miller-Rabin rounds per candidate.

    Returns:
        RsaKeyPair with d = e^-1 mod lcm(p-1, q-1).

    Raises:
        ConfigError: If bit_length is not supported.
    """
    if bit_length not in SUPPORTED_BITS:
        raise ConfigError(f"RSA modulus size must be one of {SUPPORTED_BITS}, got {bit_length}")

    rng = SplitMix64(rng_seed)
    half = bit_length // 2
    p = _random_prime(half, rng, rounds)
    while True:
        q = _random_prime(bit_length - half, rng, rounds)
        if q == p:
            continue
        lam = math.lcm(p - 1, q - 1)
        if math.gcd(e, lam) == 1:
            break

    n = p * q
    d = pow(e, -1, lam)
    logger.info("generated %d-bit RSA modulus (fingerprint %08x)", n.bit_length(), fingerprint(n))
    return RsaKeyPair(n=n, e=e, d=d, bit_length=bit_length)


def fingerprint(n: int) -> int:
    """crc32 of the modulus' big-endian bytes."""
    return crc32(n.to_bytes((n.bit_length() + 7) // 8, "big"))


# -----------------------------
# Direct blockwise RSA (bench only)
# -----------------------------

def rsa_encrypt_blocks(data: bytes, key: RsaPublicKey) -> bytes:
    """Encrypt a whole payload with raw RSA, chunk by chunk.

    Output is an 8-byte little-endian plaintext length followed by one
    modulus_len-byte ciphertext per (modulus_len - 1)-byte chunk.
    """
    k = key.modulus_len
    chunk = k - 1
    parts = [struct.pack("<Q", len(data))]
    for start in range(0, len(data), chunk):
        m = int.from_bytes(data[start:start + chunk], "big")
        parts.append(rsa_raw(m, key.e, key.n).to_bytes(k, "big"))
    return b"".join(parts)


def rsa_decrypt_blocks(blob: bytes, key: RsaKeyPair) -> bytes:
    """Inverse of :func:`rsa_encrypt_blocks`."""
    k = key.modulus_len
    chunk = k - 1
    if len(blob) < 8 or (len(blob) - 8) % k:
        raise FormatError("RSA block stream has a bad length")
    (length,) = struct.unpack_from("<Q", blob, 0)
    out = []
    remaining = length
    for start in range(8, len(blob), k):
        c = int.from_bytes(blob[start:start + k], "big")
        size = min(chunk, remaining)
        out.append(rsa_raw(c, key.d, key.n).to_bytes(size, "big"))
        remaining -= size
    if remaining:
        raise FormatError("RSA block stream shorter than its declared length")
    return b"".join(out)


# -----------------------------
# SVP1 / SVS1 key pair files
# -----------------------------

def _encode_ints(magic: bytes, values: List[int]) -> bytes:
    parts = [magic]
    for value in values:
        raw = value.to_bytes(max(1, (value.bit_length() + 7) // 8), "big")
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
    return b"".join(parts)


def _decode_ints(blob: bytes, magic: bytes, count: int) -> List[int]:
    if blob[:4] != magic:
        raise FormatError(f"bad key magic {blob[:4]!r}, expected {magic!r}")
    pos = 4
    values = []
    for _ in range(count):
        if pos + 2 > len(blob):
            raise FormatError("key file truncated")
        (size,) = struct.unpack_from("<H", blob, pos)
        pos += 2
        if pos + size > len(blob):
            raise FormatError("key file truncated")
        values.append(int.from_bytes(blob[pos:pos + size], "big"))
        pos += size
    if pos != len(blob):
        raise FormatError("trailing bytes in key file")
    return values


def encode_public(key: RsaPublicKey) -> bytes:
    return _encode_ints(PUBLIC_MAGIC, [key.n, key.e])


def encode_private(key: RsaKeyPair) -> bytes:
    return _encode_ints(PRIVATE_MAGIC, [key.n, key.d])


def decode_public(blob: bytes) -> RsaPublicKey:
    n, e = _decode_ints(blob, PUBLIC_MAGIC, 2)
    return RsaPublicKey(n, e)


def decode_private(blob: bytes) -> RsaKeyPair:
    n, d = _decode_ints(blob, PRIVATE_MAGIC, 2)
    return RsaKeyPair(n=n, e=None, d=d, bit_length=((n.bit_length() + 7) // 8) * 8)


def save_public(key: RsaPublicKey, path: Path) -> None:
    Path(path).write_bytes(encode_public(key))


def save_private(key: RsaKeyPair, path: Path) -> None:
    Path(path).write_bytes(encode_private(key))


def load_public(path: Path) -> RsaPublicKey:
    return decode_public(Path(path).read_bytes())


def load_private(path: Path) -> RsaKeyPair:
    return decode_private(Path(path).read_bytes())
