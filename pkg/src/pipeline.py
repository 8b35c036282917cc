"""The full hide/unhide chain: files -> archive -> DES-CBC -> key file -> LSB embed, and back."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from src.archive import ArchiveEntry, collect_entries, pack, unpack, write_entries
from src.covers import CoverCapacity, CoverObject, capacity, parse_cover, serialize_cover
from src.des import Direction, des_cbc
from src.errors import ConfigError, WrongKeyError
from src.keyfile import KeyFile, SessionSecret, unwrap_session, wrap_session
from src.metrics import DistortionReport, distortion
from src.prng import SplitMix64
from src.rsa import RsaKeyPair, RsaPublicKey, load_private, load_public
from src.stego import FLAG_ENCRYPTED, PermutationSpec, StegoHeader, embed, extract, read_header
from src.utils import shred, validate_inputs

logger = logging.getLogger(__name__)

CIPHERS = ("des-hybrid", "none")
PLAIN_SALT = bytes(8)
ARCHIVE_NAME = "decrypted.sva"


@dataclass
class PipelineConfig:
    """Everything one embed or extract run needs."""

    cover_path: Optional[Path] = None
    input_paths: List[Path] = field(default_factory=list)
    output_path: Optional[Path] = None
    key_file_path: Optional[Path] = None
    public_key_path: Optional[Path] = None
    private_key_path: Optional[Path] = None
    key_number: Optional[int] = None
    k: int = 1
    cipher: str = "des-hybrid"
    rng_seed: Optional[int] = None
    des_engine: str = "pycryptodome"
    shred: bool = False
    keep_archive: bool = False

    def validate(self) -> None:
        if self.key_number is None:
            raise ConfigError("a key number is required")
        if self.k not in (1, 2):
            raise ConfigError(f"k must be 1 or 2, got {self.k}")
        if self.cipher not in CIPHERS:
            raise ConfigError(f"cipher must be one of {CIPHERS}, got {self.cipher!r}")


@dataclass
class EmbedResult:
    stego: CoverObject
    key_file: Optional[KeyFile]
    payload_len: int
    capacity: CoverCapacity
    report: DistortionReport


@dataclass
class ExtractResult:
    entries: List[ArchiveEntry]
    payload_len: int
    written: List[Path]


def seal(
    blob: bytes,
    cipher: str,
    pub: Optional[RsaPublicKey],
    rng_seed: Optional[int] = None,
    des_engine: str = "pycryptodome",
) -> Tuple[bytes, Optional[KeyFile], bytes]:
    """Encrypt an archive blob for embedding.

    Returns:
        Tuple of (ciphertext, key file or None, permutation salt).
    """
    if cipher == "none":
        return blob, None, PLAIN_SALT
    if pub is None:
        raise ConfigError("des-hybrid needs a public key")

    rng = SplitMix64(rng_seed) if rng_seed is not None else None
    secret = SessionSecret.generate(rng)
    wrap_seed = rng.next_u64() if rng is not None else None
    ciphertext = des_cbc(blob, secret.des_key, secret.iv, Direction.ENCRYPT, engine=des_engine)
    key_file = wrap_session(secret, pub, wrap_seed)
    return ciphertext, key_file, secret.perm_salt


def hide(
    cover: CoverObject,
    blob: bytes,
    key_number: int,
    k: int,
    cipher: str = "des-hybrid",
    pub: Optional[RsaPublicKey] = None,
    rng_seed: Optional[int] = None,
    des_engine: str = "pycryptodome",
) -> Tuple[CoverObject, Optional[KeyFile], int]:
    """In-memory embed of an archive blob. Returns (stego, key file, payload length)."""
    ciphertext, key_file, salt = seal(blob, cipher, pub, rng_seed, des_engine)
    flags = FLAG_ENCRYPTED if key_file is not None else 0
    spec = PermutationSpec.for_cover(key_number, salt, cover)
    stego = embed(cover, ciphertext, k, spec, flags=flags)
    return stego, key_file, len(ciphertext)


def reveal(
    stego: CoverObject,
    key_number: int,
    key_file: Optional[KeyFile] = None,
    priv: Optional[RsaKeyPair] = None,
    des_engine: str = "pycryptodome",
) -> Tuple[List[ArchiveEntry], StegoHeader]:
    """In-memory extract. Nothing is written, so a failure leaves no partial output.

    Raises:
        NotStegoError, WrongKeyError, IntegrityError, FormatError: see the
        underlying modules.
    """
    header = read_header(stego)
    if header.encrypted:
        if key_file is None or priv is None:
            raise WrongKeyError("this object carries an encrypted payload; a key file and private key are required")
        secret = unwrap_session(key_file, priv)
        salt = secret.perm_salt
    else:
        secret = None
        salt = PLAIN_SALT

    payload = extract(stego, PermutationSpec.for_cover(key_number, salt, stego))
    if secret is not None:
        payload = des_cbc(payload, secret.des_key, secret.iv, Direction.DECRYPT, engine=des_engine)
    return unpack(payload), header


def _check_outside_inputs(inputs: Sequence[Path], *targets: Optional[Path]) -> None:
    """Refuse output paths that shredding ``inputs`` would destroy."""
    roots = [Path(p).resolve() for p in inputs]
    for target in targets:
        if target is None:
            continue
        resolved = Path(target).resolve()
        for root in roots:
            if resolved == root or root in resolved.parents:
                raise ConfigError(f"{target} lies inside {root}, which --shred would destroy")


def embed_files(cfg: PipelineConfig) -> EmbedResult:
    """Run the embedding chain on disk and write the stego and key files."""
    cfg.validate()
    if cfg.cover_path is None or cfg.output_path is None:
        raise ConfigError("cover and output paths are required")
    inputs = validate_inputs(cfg.input_paths)
    if cfg.shred:
        _check_outside_inputs(inputs, cfg.output_path, cfg.key_file_path)
    pub = None
    if cfg.cipher == "des-hybrid":
        if cfg.public_key_path is None or cfg.key_file_path is None:
            raise ConfigError("des-hybrid needs --public-key and --key-file")
        pub = load_public(cfg.public_key_path)

    cover = parse_cover(Path(cfg.cover_path).read_bytes())
    entries = collect_entries(inputs)
    blob = pack(entries)
    logger.info("archive of %d files, %d bytes", len(entries), len(blob))

    stego, key_file, payload_len = hide(
        cover, blob, cfg.key_number, cfg.k, cfg.cipher, pub, cfg.rng_seed, cfg.des_engine
    )
    Path(cfg.output_path).write_bytes(serialize_cover(stego))
    if key_file is not None:
        key_file.save(cfg.key_file_path)

    if cfg.shred:
        for path in inputs:
            logger.info("shredding %s", path)
            shred(path)

    return EmbedResult(stego, key_file, payload_len, capacity(cover, cfg.k), distortion(cover, stego))


def extract_files(cfg: PipelineConfig) -> ExtractResult:
    """Run the extraction chain and write the recovered tree under output_path."""
    if cfg.key_number is None:
        raise ConfigError("a key number is required")
    if cfg.cover_path is None or cfg.output_path is None:
        raise ConfigError("stego and destination paths are required")

    stego = parse_cover(Path(cfg.cover_path).read_bytes())
    key_file = KeyFile.load(cfg.key_file_path) if cfg.key_file_path is not None else None
    priv = load_private(cfg.private_key_path) if cfg.private_key_path is not None else None

    entries, header = reveal(stego, cfg.key_number, key_file, priv, cfg.des_engine)
    if cfg.keep_archive and any(entry.path == ARCHIVE_NAME for entry in entries):
        raise ConfigError(f"an extracted file is named {ARCHIVE_NAME}; extract without --keep-archive")
    dest = Path(cfg.output_path)
    dest.mkdir(parents=True, exist_ok=True)
    written = write_entries(entries, dest)
    if cfg.keep_archive:
        (dest / ARCHIVE_NAME).write_bytes(pack(entries))
    logger.info("extracted %d files", len(written))
    return ExtractResult(entries, header.payload_len, written)
