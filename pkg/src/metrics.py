"""Distortion metrics (MSE/PSNR) and a bit-level audit of cover vs. stego."""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.covers import CoverKind, CoverObject
from src.errors import AuditError, ConfigError


@dataclass(frozen=True)
class DistortionReport:
    mse: float
    psnr_db: float
    bytes_changed: int
    max_abs_delta: int
    changed_outside_carriers: int


def _check_same_shape(cover: CoverObject, stego: CoverObject) -> None:
    if cover.kind != stego.kind or len(cover.raw) != len(stego.raw) or cover.meta != stego.meta:
        raise ConfigError("cover and stego objects differ in kind or dimensions")
    if not np.array_equal(cover.carriers, stego.carriers):
        raise ConfigError("cover and stego objects have different carrier layouts")


def _carrier_mask(obj: CoverObject) -> np.ndarray:
    mask = np.zeros(len(obj.raw), dtype=bool)
    mask[obj.carriers] = True
    return mask


def _signal(obj: CoverObject) -> Tuple[np.ndarray, int]:
    """Values the MSE is measured on, plus their peak value."""
    raw = np.frombuffer(obj.raw, dtype=np.uint8)
    if obj.kind is CoverKind.WAV_PCM16:
        start = obj.meta.data_offset
        samples = obj.carriers.size
        values = np.frombuffer(obj.raw, dtype="<i2", count=samples, offset=start)
        return values.astype(np.float64), 65535
    return raw[obj.carriers].astype(np.float64), 255


def distortion(cover: CoverObject, stego: CoverObject) -> DistortionReport:
    """Compare a stego object to its cover.

    MSE is taken over the carrier region only (pixel channels, 8-bit samples,
    or full 16-bit sample values for 16-bit WAV); PSNR uses MAX = 255, or
    65535 for 16-bit WAV.

    Raises:
        ConfigError: If the two objects do not share kind and shape.
    """
    _check_same_shape(cover, stego)
    a, peak = _signal(cover)
    b, _ = _signal(stego)
    mse = float(np.mean((a - b) ** 2)) if a.size else 0.0
    psnr = math.inf if mse == 0 else 10 * math.log10(peak ** 2 / mse)

    ra = np.frombuffer(cover.raw, dtype=np.uint8).astype(np.int16)
    rb = np.frombuffer(stego.raw, dtype=np.uint8).astype(np.int16)
    changed = ra != rb
    outside = changed & ~_carrier_mask(cover)
    max_delta = int(np.abs(ra - rb).max()) if ra.size else 0
    return DistortionReport(
        mse=mse,
        psnr_db=psnr,
        bytes_changed=int(changed.sum()),
        max_abs_delta=max_delta,
        changed_outside_carriers=int(outside.sum()),
    )


def lsb_diff_report(cover: CoverObject, stego: CoverObject, k: int) -> List[Tuple[int, int, int]]:
    """List every differing byte as (offset, cover_byte, stego_byte).

    Raises:
        ConfigError: Mismatched objects or invalid k.
        AuditError: A difference outside the k low bits or outside the carriers.
    """
    if k not in (1, 2):
        raise ConfigError(f"k must be 1 or 2, got {k}")
    _check_same_shape(cover, stego)
    ra = np.frombuffer(cover.raw, dtype=np.uint8)
    rb = np.frombuffer(stego.raw, dtype=np.uint8)
    offsets = np.flatnonzero(ra != rb)

    outside = offsets[~_carrier_mask(cover)[offsets]]
    if outside.size:
        raise AuditError(f"{outside.size} bytes changed outside carriers, first at offset {int(outside[0])}")
    high = offsets[((ra[offsets] ^ rb[offsets]) >> k) != 0]
    if high.size:
        raise AuditError(f"{high.size} bytes changed above the low {k} bits, first at offset {int(high[0])}")

    return [(int(o), int(ra[o]), int(rb[o])) for o in offsets]


def format_report(report: DistortionReport) -> str:
    """Line-oriented rendering for people."""
    psnr = "inf" if math.isinf(report.psnr_db) else f"{report.psnr_db:.2f} dB"
    return "\n".join([
        f"MSE:                      {report.mse:.4f}",
        f"PSNR:                     {psnr}",
        f"Bytes changed:            {report.bytes_changed}",
        f"Max byte delta:           {report.max_abs_delta}",
        f"Changed outside carriers: {report.changed_outside_carriers}",
    ])


def format_kv(report: DistortionReport) -> str:
    """key=value block for scripts."""
    psnr = "inf" if math.isinf(report.psnr_db) else f"{report.psnr_db:.4f}"
    return "\n".join([
        f"mse={report.mse:.6f}",
        f"psnr_db={psnr}",
        f"bytes_changed={report.bytes_changed}",
        f"max_abs_delta={report.max_abs_delta}",
        f"changed_outside_carriers={report.changed_outside_carriers}",
    ])
