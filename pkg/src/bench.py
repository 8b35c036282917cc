"""Timing harness comparing hybrid, direct-RSA and DES-only pipelines."""

import logging
import math
import time
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from src.covers import HEADER_CARRIERS, CoverObject, build_bmp24, parse_cover
from src.des import Direction, des_cbc
from src.errors import ConfigError, IntegrityError
from src.keyfile import SessionSecret, unwrap_session, wrap_session
from src.prng import SplitMix64
from src.rsa import rsa_decrypt_blocks, rsa_encrypt_blocks, rsa_keygen
from src.stego import PermutationSpec, derive_permutation, embed, extract

logger = logging.getLogger(__name__)

MODES = ("hybrid", "rsa-direct", "des-only")
PHASES = ("encrypt", "embed", "extract", "decrypt")
CSV_COLUMNS = ["size_bytes", "mode", "phase", "seconds"]


def make_bench_cover(payload_len: int, k: int, seed: int = 0) -> CoverObject:
    """Random square 24-bit BMP big enough for ``payload_len`` bytes in any mode."""
    # direct RSA grows the payload by 1/63 at 512 bits, plus its length prefix
    worst = math.ceil(payload_len * 64 / 63) + 64
    carriers = HEADER_CARRIERS + math.ceil(worst * 8 / k)
    side = max(8, math.ceil(math.sqrt(math.ceil(carriers / 3))))
    pixels = np.random.default_rng(seed).integers(0, 256, size=(side, side, 3), dtype=np.uint8)
    return parse_cover(build_bmp24(pixels))


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


def _run_once(mode, payload, cover, k, keypair, key_number, seed, des_engine) -> Dict[str, float]:
    # each run pays for its own slot order; extract reuses the one embed derived
    derive_permutation.cache_clear()
    rng = SplitMix64(seed)
    secret = SessionSecret.generate(rng)
    times = {}

    if mode == "hybrid":
        def encrypt(data):
            return des_cbc(data, secret.des_key, secret.iv, Direction.ENCRYPT, des_engine), \
                wrap_session(secret, keypair.public, seed)

        (ciphertext, key_file), times["encrypt"] = _timed(encrypt, payload)
    elif mode == "des-only":
        ciphertext, times["encrypt"] = _timed(
            des_cbc, payload, secret.des_key, secret.iv, Direction.ENCRYPT, des_engine
        )
    else:
        ciphertext, times["encrypt"] = _timed(rsa_encrypt_blocks, payload, keypair.public)

    spec = PermutationSpec.for_cover(key_number, secret.perm_salt, cover)
    stego, times["embed"] = _timed(embed, cover, ciphertext, k, spec)
    recovered, times["extract"] = _timed(extract, stego, spec)

    if mode == "hybrid":
        def decrypt(data):
            opened = unwrap_session(key_file, keypair)
            return des_cbc(data, opened.des_key, opened.iv, Direction.DECRYPT, des_engine)

        plain, times["decrypt"] = _timed(decrypt, recovered)
    elif mode == "des-only":
        plain, times["decrypt"] = _timed(
            des_cbc, recovered, secret.des_key, secret.iv, Direction.DECRYPT, des_engine
        )
    else:
        plain, times["decrypt"] = _timed(rsa_decrypt_blocks, recovered, keypair)

    if plain != payload:
        raise IntegrityError(f"{mode} round trip did not reproduce the payload")
    return times


def run_bench(
    sizes: Sequence[int],
    modes: Sequence[str] = MODES,
    repetitions: int = 1,
    rsa_bits: int = 512,
    k: int = 2,
    seed: int = 0,
    des_engine: str = "pycryptodome",
) -> pd.DataFrame:
    """Time encrypt, embed, extract and decrypt for every (size, mode, repetition).

    Args:
        sizes: Payload sizes in bytes (each >= 1).
        modes: Any of "hybrid", "rsa-direct", "des-only".
        repetitions: Runs per (size, mode).
        rsa_bits: RSA modulus size for hybrid wrapping and direct mode.
        k: Embedding depth.
        seed: Seed for payloads, session secrets and the RSA key.
        des_engine: DES engine passed to des_cbc.

    Returns:
        DataFrame with columns size_bytes, mode, repetition, phase, seconds; the
        phases are encrypt, embed, extract, decrypt, crypto (encrypt + decrypt)
        and total.
    """
    if any(size < 1 for size in sizes):
        raise ConfigError("bench sizes must be at least 1 byte")
    unknown = set(modes) - set(MODES)
    if unknown:
        raise ConfigError(f"unknown bench modes: {sorted(unknown)}")
    if repetitions < 1:
        raise ConfigError("repetitions must be at least 1")

    keypair = rsa_keygen(rsa_bits, seed)
    rows: List[Dict] = []
    for size in sizes:
        cover = make_bench_cover(size, k, seed)
        for mode in modes:
            for rep in range(repetitions):
                run_seed = seed + 1000 * rep + size
                payload = np.random.default_rng(run_seed).bytes(size)
                times = _run_once(mode, payload, cover, k, keypair, run_seed, run_seed, des_engine)
                times["crypto"] = times["encrypt"] + times["decrypt"]
                times["total"] = sum(times[p] for p in PHASES)
                logger.info("bench %s %d bytes rep %d: %.4f s", mode, size, rep, times["total"])
                for phase, seconds in times.items():
                    rows.append({
                        "size_bytes": size,
                        "mode": mode,
                        "repetition": rep,
                        "phase": phase,
                        "seconds": seconds,
                    })
    return pd.DataFrame(rows)


def to_csv(results: pd.DataFrame) -> str:
    """CSV text with header size_bytes,mode,phase,seconds."""
    return results[CSV_COLUMNS].to_csv(index=False)


def summary_table(results: pd.DataFrame) -> str:
    """Mean seconds per size and mode for the crypto and total phases, as a text table."""
    summary = (
        results[results["phase"].isin(["crypto", "total"])]
        .groupby(["size_bytes", "mode", "phase"])["seconds"]
        .mean()
        .unstack("phase")
        .reset_index()
    )
    return summary.to_markdown(index=False, floatfmt=".4f")
