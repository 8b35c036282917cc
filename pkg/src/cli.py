"""Command-line surface: keygen, embed, extract, capacity, inspect, diff, bench.

Exit codes: 0 ok, 1 usage/config, 2 I/O, 3 capacity, 4 unsupported cover,
5 integrity failure (wrong key number or key file), 6 not a stego object or
malformed stego file, 7 unsafe path in archive, 8 audit failure.
"""

import argparse
import logging
import secrets
import sys
from pathlib import Path
from typing import List, Optional

from src.bench import MODES, run_bench, summary_table, to_csv
from src.config import load_settings, setup_logging
from src.covers import capacity, parse_cover
from src.des import ENGINES
from src.errors import (
    AuditError,
    CapacityError,
    ConfigError,
    FormatError,
    IntegrityError,
    NotStegoError,
    UnsafePathError,
    UnsupportedCoverError,
    WrongKeyError,
)
from src.metrics import distortion, format_kv, format_report, lsb_diff_report
from src.pipeline import CIPHERS, PipelineConfig, embed_files, extract_files
from src.plotting import save_timing_chart
from src.rsa import SUPPORTED_BITS, fingerprint, rsa_keygen, save_private, save_public
from src.stego import read_header
from src.utils import format_size, parse_key_number

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CAPACITY = 3
EXIT_UNSUPPORTED = 4
EXIT_INTEGRITY = 5
EXIT_NOT_STEGO = 6
EXIT_UNSAFE_PATH = 7
EXIT_AUDIT = 8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as exit status 1."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text: str) -> int:
    return parse_key_number(text)


def _k(text: str) -> int:
    value = int(text)
    if value not in (1, 2):
        raise argparse.ArgumentTypeError("k must be 1 or 2")
    return value


def build_parser(settings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")

    p = _Parser(prog="stegovault", description="Hide encrypted files and folders in BMP/WAV covers")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_key = sub.add_parser("keygen", parents=[common], help="Generate an RSA key pair")
    p_key.add_argument("--bits", type=int, default=settings["rsa"]["bits"])
    p_key.add_argument("--public-key", dest="out_pub", type=Path, required=True)
    p_key.add_argument("--private-key", dest="out_priv", type=Path, required=True)
    p_key.add_argument("--seed", type=_seed, default=None, help="Seed for a reproducible key pair")
    p_key.set_defaults(e=settings["rsa"]["public_exponent"], rounds=settings["rsa"]["miller_rabin_rounds"])

    p_emb = sub.add_parser("embed", parents=[common], help="Hide files and folders in a cover")
    p_emb.add_argument("--cover", type=Path, required=True)
    p_emb.add_argument("--input", dest="inputs", type=Path, nargs="+", required=True)
    p_emb.add_argument("--output", type=Path, required=True, help="Stego file to write")
    p_emb.add_argument("--key-file", type=Path, help="Key file to write")
    p_emb.add_argument("--public-key", type=Path)
    p_emb.add_argument("--key-number", type=parse_key_number, required=True)
    p_emb.add_argument("--k", type=_k, default=settings["stego"]["k"])
    p_emb.add_argument("--cipher", choices=CIPHERS, default=settings["cipher"]["default"])
    p_emb.add_argument("--rng-seed", type=_seed, default=None)
    p_emb.add_argument("--des-engine", choices=ENGINES, default=settings["cipher"]["des_engine"])
    p_emb.add_argument("--shred", action="store_true", help="Overwrite and delete inputs after embedding")

    p_ext = sub.add_parser("extract", parents=[common], help="Recover files from a stego object")
    p_ext.add_argument("--stego", type=Path, required=True)
    p_ext.add_argument("--output", type=Path, required=True, help="Destination folder")
    p_ext.add_argument("--key-file", type=Path)
    p_ext.add_argument("--private-key", type=Path)
    p_ext.add_argument("--key-number", type=parse_key_number, required=True)
    p_ext.add_argument("--des-engine", choices=ENGINES, default=settings["cipher"]["des_engine"])
    p_ext.add_argument("--keep-archive", action="store_true", help="Also write the decrypted container")

    p_cap = sub.add_parser("capacity", parents=[common], help="Show how much a cover can hold")
    p_cap.add_argument("--cover", type=Path, required=True)
    p_cap.add_argument("--k", type=_k, default=settings["stego"]["k"])

    p_ins = sub.add_parser("inspect", parents=[common], help="Show the stego header, if any")
    p_ins.add_argument("--stego", type=Path, required=True)

    p_diff = sub.add_parser("diff", parents=[common], help="Distortion report and bit audit")
    p_diff.add_argument("--cover", type=Path, required=True)
    p_diff.add_argument("--stego", type=Path, required=True)
    p_diff.add_argument("--k", type=_k, default=settings["stego"]["k"])
    p_diff.add_argument("--format", choices=("text", "kv"), default="text")

    bench = settings["bench"]
    p_bench = sub.add_parser("bench", parents=[common], help="Time RSA vs. DES pipelines")
    p_bench.add_argument("--sizes", type=int, nargs="+", default=bench["sizes"])
    p_bench.add_argument("--modes", nargs="+", choices=MODES, default=bench["modes"])
    p_bench.add_argument("--repetitions", type=int, default=bench["repetitions"])
    p_bench.add_argument("--rsa-bits", type=int, default=bench["rsa_bits"])
    p_bench.add_argument("--k", type=_k, default=bench["k"])
    p_bench.add_argument("--seed", type=_seed, default=0)
    p_bench.add_argument("--des-engine", choices=ENGINES, default=settings["cipher"]["des_engine"])
    p_bench.add_argument("--csv", type=Path, help="Write CSV here instead of stdout")
    p_bench.add_argument("--plot", type=Path, help="Write a timing chart (PNG)")
    return p


# -----------------------------
# Commands
# -----------------------------

def cmd_keygen(args) -> int:
    if args.bits not in SUPPORTED_BITS:
        raise UsageError(f"--bits must be one of {SUPPORTED_BITS}")
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    pair = rsa_keygen(args.bits, seed, e=args.e, rounds=args.rounds)
    save_public(pair.public, args.out_pub)
    save_private(pair, args.out_priv)
    print(f"modulus bits: {pair.n.bit_length()}")
    print(f"fingerprint: {fingerprint(pair.n):08x}")
    return EXIT_OK


def cmd_embed(args) -> int:
    cfg = PipelineConfig(
        cover_path=args.cover,
        input_paths=list(args.inputs),
        output_path=args.output,
        key_file_path=args.key_file,
        public_key_path=args.public_key,
        key_number=args.key_number,
        k=args.k,
        cipher=args.cipher,
        rng_seed=args.rng_seed,
        des_engine=args.des_engine,
        shred=args.shred,
    )
    result = embed_files(cfg)
    total = result.capacity.payload_capacity_bytes(cfg.k)
    print(f"capacity used: {result.payload_len}/{total} bytes (k={cfg.k})")
    print(f"PSNR: {result.report.psnr_db:.2f} dB")
    print(f"Hiding done: {args.output}")
    return EXIT_OK


def cmd_extract(args) -> int:
    cfg = PipelineConfig(
        cover_path=args.stego,
        output_path=args.output,
        key_file_path=args.key_file,
        private_key_path=args.private_key,
        key_number=args.key_number,
        des_engine=args.des_engine,
        keep_archive=args.keep_archive,
    )
    result = extract_files(cfg)
    print(f"total length of data received: {result.payload_len} bytes")
    print(f"Un-hide done: {len(result.written)} files written to {args.output}")
    return EXIT_OK


def cmd_capacity(args) -> int:
    cover = parse_cover(args.cover.read_bytes())
    cap = capacity(cover, args.k)
    print(f"kind: {cover.kind.value}")
    print(f"carriers: {cap.carrier_count}")
    print(f"header cost: {cap.header_cost_bytes} bytes")
    size = cap.payload_capacity_bytes(args.k)
    print(f"capacity (k={args.k}): {size} bytes ({format_size(size)})")
    return EXIT_OK


def cmd_inspect(args) -> int:
    stego = parse_cover(args.stego.read_bytes())
    try:
        header = read_header(stego)
    except NotStegoError:
        print("no stego header found")
        return EXIT_NOT_STEGO
    print(f"version: {header.version}")
    print(f"k: {header.k}")
    print(f"encrypted: {'yes' if header.encrypted else 'no'}")
    print(f"payload_len: {header.payload_len}")
    print(f"payload_crc32: {header.payload_crc32:08x}")
    return EXIT_OK


def cmd_diff(args) -> int:
    cover = parse_cover(args.cover.read_bytes())
    stego = parse_cover(args.stego.read_bytes())
    report = distortion(cover, stego)
    print(format_kv(report) if args.format == "kv" else format_report(report))
    changes = lsb_diff_report(cover, stego, args.k)
    if args.format == "kv":
        print("audit=ok")
    else:
        print(f"Audit: OK ({len(changes)} bytes changed, all within the low {args.k} bits of carriers)")
    return EXIT_OK


def cmd_bench(args) -> int:
    results = run_bench(
        args.sizes,
        modes=args.modes,
        repetitions=args.repetitions,
        rsa_bits=args.rsa_bits,
        k=args.k,
        seed=args.seed,
        des_engine=args.des_engine,
    )
    print(summary_table(results))
    csv_text = to_csv(results)
    if args.csv is not None:
        args.csv.write_text(csv_text)
    else:
        print()
        print(csv_text, end="")
    if args.plot is not None:
        save_timing_chart(results, args.plot)
    return EXIT_OK


COMMANDS = {
    "keygen": cmd_keygen,
    "embed": cmd_embed,
    "extract": cmd_extract,
    "capacity": cmd_capacity,
    "inspect": cmd_inspect,
    "diff": cmd_diff,
    "bench": cmd_bench,
}


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command, and map failures to exit codes."""
    try:
        settings = load_settings()
        args = build_parser(settings).parse_args(argv)
        setup_logging(settings, args.verbose)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, str(exc))
    except CapacityError as exc:
        return _fail(EXIT_CAPACITY, f"payload too large: need {exc.need} bytes, have {exc.have} bytes")
    except UnsupportedCoverError as exc:
        return _fail(EXIT_UNSUPPORTED, f"unsupported cover: {exc}")
    except (IntegrityError, WrongKeyError) as exc:
        logger.debug("integrity failure: %s", exc)
        return _fail(EXIT_INTEGRITY, "integrity failure: wrong key number or key file")
    except UnsafePathError as exc:
        return _fail(EXIT_UNSAFE_PATH, f"unsafe path in archive: {exc}")
    except NotStegoError as exc:
        return _fail(EXIT_NOT_STEGO, str(exc))
    except FormatError as exc:
        return _fail(EXIT_NOT_STEGO, f"malformed input: {exc}")
    except AuditError as exc:
        return _fail(EXIT_AUDIT, f"audit failed: {exc}")
    except OSError as exc:
        return _fail(EXIT_IO, str(exc))
    except (ConfigError, ValueError) as exc:
        return _fail(EXIT_USAGE, str(exc))
