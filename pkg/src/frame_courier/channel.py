"""Seeded player->screen->recorder degradation simulator.

Models the artifacts the real channel shows: frame duplication from the
recorder's higher FPS (sample-and-hold), random frame loss, the desktop
margin around the player window, per-pixel compression offsets, border
smearing, and recorder luma gain.  Everything is driven by one seed, so
identical (input, config) pairs produce identical output.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

import numpy as np

from .pipeline import decode_sequence, encode_file
from .errors import CodecError, IncompleteRecovery
from .raster import CodecSpec
from .videoio import FrameSequence

# 3x3 smoothing kernel for the compression-artifact model.  The center
# weight is calibrated so a pixel at a block border is pulled at most
# 255*3/45 = 17 (edges) or 255*5/45 = 28 (corners) toward its neighbors,
# i.e. inside the 3..30 offset band real recordings show.  A uniform box
# kernel would shift border pixels by up to 170 and break decoding of
# minority cells outright.
BLUR_KERNEL = np.array([[1, 1, 1], [1, 37, 1], [1, 1, 1]], dtype=np.uint16)
BLUR_WEIGHT = int(BLUR_KERNEL.sum())

SWEEP_CSV_HEADER = ("config_id", "success_rate", "dup_mean", "parity_fail_mean")


@dataclass(frozen=True)
class ChannelConfig:
    """Degradation parameters; defaults mirror a 60 FPS recorder with the
    observed +-30 pixel offsets and nothing else."""

    record_fps: Union[int, Fraction] = 60
    drop_probability: float = 0.0
    noise_amplitude: int = 30
    blur: bool = False
    shift_x: int = 0
    shift_y: int = 0
    canvas_margin: int = 0
    luma_gain: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if Fraction(self.record_fps) <= 0:
            raise ValueError("record_fps must be positive")
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError("drop_probability must be in [0, 1]")
        if not 0 <= self.noise_amplitude <= 255:
            raise ValueError("noise_amplitude must be in [0, 255]")
        if self.canvas_margin < 0:
            raise ValueError("canvas_margin must be non-negative")
        if self.luma_gain <= 0:
            raise ValueError("luma_gain must be positive")


def _paste(frame: np.ndarray, margin: int, shift_x: int, shift_y: int) -> np.ndarray:
    h, w = frame.shape
    canvas = np.zeros((h + 2 * margin, w + 2 * margin), dtype=np.uint8)
    y0 = margin + shift_y
    x0 = margin + shift_x
    # clip to the canvas, like a recorder cropping at the selection border
    sy0, sx0 = max(0, -y0), max(0, -x0)
    dy0, dx0 = max(0, y0), max(0, x0)
    dy1 = min(canvas.shape[0], y0 + h)
    dx1 = min(canvas.shape[1], x0 + w)
    if dy1 > dy0 and dx1 > dx0:
        canvas[dy0:dy1, dx0:dx1] = frame[sy0:sy0 + dy1 - dy0, sx0:sx0 + dx1 - dx0]
    return canvas


def _blur(frame: np.ndarray) -> np.ndarray:
    # center-plus-box form of BLUR_KERNEL, evaluated separably
    padded = np.pad(frame, 1, mode="edge").astype(np.uint16)
    rows = padded[:-2] + padded[1:-1] + padded[2:]
    acc = rows[:, :-2] + rows[:, 1:-1] + rows[:, 2:]
    acc += np.uint16(BLUR_KERNEL[1, 1] - 1) * padded[1:-1, 1:-1]
    return ((acc + BLUR_WEIGHT // 2) // BLUR_WEIGHT).astype(np.uint8)


def apply_channel(seq: FrameSequence, cfg: ChannelConfig) -> FrameSequence:
    """Degrade a frame sequence; deterministic for a fixed (input, config)."""
    rng = np.random.default_rng(cfg.seed)
    reps = round(Fraction(cfg.record_fps) / seq.fps)
    recorded = [frame for frame in seq.frames for _ in range(reps)]

    if cfg.drop_probability > 0 and recorded:
        keep = rng.random(len(recorded)) >= cfg.drop_probability
        recorded = [f for f, k in zip(recorded, keep) if k]

    gain_lut = None
    if cfg.luma_gain != 1.0:
        gain_lut = np.clip(np.rint(np.arange(256) * cfg.luma_gain), 0, 255).astype(np.uint8)

    out = []
    amp = cfg.noise_amplitude
    for frame in recorded:
        degraded = np.asarray(frame, dtype=np.uint8)
        if cfg.canvas_margin or cfg.shift_x or cfg.shift_y:
            degraded = _paste(degraded, cfg.canvas_margin, cfg.shift_x, cfg.shift_y)
        if amp:
            noise = rng.integers(-amp, amp + 1, size=degraded.shape, dtype=np.int16)
            degraded = np.clip(degraded.astype(np.int16) + noise, 0, 255).astype(np.uint8)
        if cfg.blur:
            degraded = _blur(degraded)
        if gain_lut is not None:
            degraded = gain_lut[degraded]
        out.append(degraded)
    return FrameSequence(frames=out, fps=Fraction(cfg.record_fps))


@dataclass
class SweepRow:
    """Aggregate outcome of the seeded trials for one channel config."""

    config_id: int
    success_rate: float
    dup_mean: float
    parity_fail_mean: float


def sweep(payload: bytes, spec: CodecSpec, grid: list, trials: int) -> list[SweepRow]:
    """Run seeded encode->channel->decode trials for every config.

    Trial t of a config uses seed ^ t, so trials are independent but the
    whole sweep is reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    encoded = encode_file(payload, spec)
    rows = []
    for config_id, cfg in enumerate(grid):
        successes = 0
        dups = []
        parity_fails = []
        for trial in range(trials):
            degraded = apply_channel(encoded, replace(cfg, seed=cfg.seed ^ trial))
            try:
                recovered, report = decode_sequence(degraded, spec)
                if recovered == bytes(payload):
                    successes += 1
            except IncompleteRecovery as exc:
                report = exc.report
            except CodecError:
                report = None
            if report is not None:
                dups.append(report.duplicates_merged)
                parity_fails.append(report.parity_failed)
        rows.append(SweepRow(
            config_id=config_id,
            success_rate=successes / trials,
            dup_mean=float(np.mean(dups)) if dups else 0.0,
            parity_fail_mean=float(np.mean(parity_fails)) if parity_fails else 0.0,
        ))
    return rows


def sweep_to_csv(rows: list) -> str:
    """Render sweep rows as CSV with the stable four-column schema."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for row in rows:
        writer.writerow([
            row.config_id,
            f"{row.success_rate:.6g}",
            f"{row.dup_mean:.6g}",
            f"{row.parity_fail_mean:.6g}",
        ])
    return buf.getvalue()
