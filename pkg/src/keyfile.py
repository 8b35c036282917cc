"""Session secret and the SVK1 key file that carries it RSA-wrapped.

Key file layout::

    "SVK1" | modulus_len:u16 LE | wrapped (modulus_len bytes, big-endian integer)

The wrapped integer is raw RSA over 0x00 0x02 <nonzero filler> 0x00 <24-byte secret>.
"""

import secrets
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from src.errors import ConfigError, FormatError, WrongKeyError
from src.prng import SplitMix64
from src.rsa import RsaKeyPair, RsaPublicKey, rsa_raw

MAGIC = b"SVK1"
SECRET_SIZE = 24
MIN_FILLER = 8

_HEAD = struct.Struct("<4sH")


@dataclass(frozen=True)
class SessionSecret:
    des_key: bytes
    perm_salt: bytes
    iv: bytes

    def __post_init__(self):
        for name in ("des_key", "perm_salt", "iv"):
            if len(getattr(self, name)) != 8:
                raise ValueError(f"{name} must be 8 bytes")

    def to_bytes(self) -> bytes:
        return self.des_key + self.perm_salt + self.iv

    @classmethod
    def from_bytes(cls, blob: bytes) -> "SessionSecret":
        if len(blob) != SECRET_SIZE:
            raise ValueError(f"session secret must be {SECRET_SIZE} bytes")
        return cls(blob[0:8], blob[8:16], blob[16:24])

    @classmethod
    def generate(cls, rng: Optional[SplitMix64] = None) -> "SessionSecret":
        """Fresh secret from system entropy, or from ``rng`` for reproducible runs."""
        blob = rng.randbytes(SECRET_SIZE) if rng is not None else secrets.token_bytes(SECRET_SIZE)
        return cls.from_bytes(blob)


@dataclass(frozen=True)
class KeyFile:
    wrapped: bytes

    @property
    def modulus_len(self) -> int:
        return len(self.wrapped)

    def to_bytes(self) -> bytes:
        return _HEAD.pack(MAGIC, len(self.wrapped)) + self.wrapped

    @classmethod
    def from_bytes(cls, blob: bytes) -> "KeyFile":
        if len(blob) < _HEAD.size:
            raise FormatError("key file truncated")
        magic, size = _HEAD.unpack_from(blob, 0)
        if magic != MAGIC:
            raise FormatError(f"bad key file magic {magic!r}")
        if len(blob) != _HEAD.size + size:
            raise FormatError(
                f"key file holds {len(blob) - _HEAD.size} bytes, header says {size}"
            )
        return cls(bytes(blob[_HEAD.size:]))

    def save(self, path: Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: Path) -> "KeyFile":
        return cls.from_bytes(Path(path).read_bytes())


def _nonzero_filler(count: int, rng: SplitMix64) -> bytes:
    out = bytearray()
    while len(out) < count:
        out.extend(b for b in rng.randbytes(count) if b)
    return bytes(out[:count])


def wrap_session(secret: SessionSecret, pub: RsaPublicKey, rng_seed: Optional[int] = None) -> KeyFile:
    """Pad and RSA-encrypt the session secret into a key file.

    Args:
        secret: The 24-byte session secret.
        pub: Recipient public key.
        rng_seed: Seed for the padding filler; system entropy when None.

    Raises:
        ConfigError: If the modulus is too small for the padded secret.
    """
    k = pub.modulus_len
    filler_len = k - 3 - SECRET_SIZE
    if k * 8 < 512 or filler_len < MIN_FILLER:
        raise ConfigError(f"RSA modulus of {pub.n.bit_length()} bits is too small to wrap a session")

    seed = rng_seed if rng_seed is not None else secrets.randbits(64)
    filler = _nonzero_filler(filler_len, SplitMix64(seed))
    framed = b"\x00\x02" + filler + b"\x00" + secret.to_bytes()
    c = rsa_raw(int.from_bytes(framed, "big"), pub.e, pub.n)
    return KeyFile(c.to_bytes(k, "big"))


def unwrap_session(kf: KeyFile, priv: RsaKeyPair) -> SessionSecret:
    """Recover the session secret from a key file.

    Raises:
        WrongKeyError: If the key file was not made for this private key or is
            corrupted (the padding frame does not check out).
    """
    k = priv.modulus_len
    if kf.modulus_len != k:
        raise WrongKeyError("key file does not match the private key size")
    c = int.from_bytes(kf.wrapped, "big")
    if c >= priv.n:
        raise WrongKeyError("key file does not match the private key")

    framed = rsa_raw(c, priv.d, priv.n).to_bytes(k, "big")
    if framed[0] != 0 or framed[1] != 2:
        raise WrongKeyError("key file padding is invalid (wrong private key?)")
    sep = framed.find(b"\x00", 2)
    if sep < 2 + MIN_FILLER or len(framed) - sep - 1 != SECRET_SIZE:
        raise WrongKeyError("key file padding is invalid (wrong private key?)")
    return SessionSecret.from_bytes(framed[sep + 1:])
