"""Command-line surface: encode, decode, simulate and bench subcommands.

Every behavior is a thin call into the library; flags mirror the CodecSpec
and ChannelConfig fields one-to-one, and output files are written
atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

import numpy as np

from .channel import ChannelConfig, apply_channel
from .errors import CodecError, CorruptPayload, IncompleteRecovery, IoFailure, TruncatedFrame
from .pipeline import DecodeReport, decode_sequence, encode_file
from .raster import CodecSpec
from .videoio import FrameSequence, read_y4m, write_y4m

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCOMPLETE = 2
EXIT_IO = 3

TRANSCODE_HINTS = (
    "ffmpeg -i out.y4m -pix_fmt yuv420p out.mp4",
    "ffmpeg -i recorded.mov -vf format=gray recorded.y4m",
)

BENCH_CSV_HEADER = "size_bytes,unique_frames,scheduled_frames,video_bytes,encode_ms,decode_ms"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_spec_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("codec geometry")
    group.add_argument("--data-rows", type=int, default=CodecSpec.data_rows)
    group.add_argument("--data-cols", type=int, default=CodecSpec.data_cols)
    group.add_argument("--label-cols", type=int, default=CodecSpec.label_cols)
    group.add_argument("--scale", type=int, default=CodecSpec.block_scale,
                       help="pixels per cell side")
    group.add_argument("--inner-wall", type=int, default=CodecSpec.inner_wall)
    group.add_argument("--outer-wall", type=int, default=CodecSpec.outer_wall)
    group.add_argument("--fps", type=int, default=CodecSpec.fps)
    group.add_argument("--body-repeat", type=int, default=CodecSpec.body_repeat)
    group.add_argument("--head-repeat", type=int, default=CodecSpec.head_repeat)


def _add_channel_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("channel degradation")
    group.add_argument("--record-fps", type=Fraction, default=Fraction(60))
    group.add_argument("--drop", type=float, default=0.0,
                       help="per-frame drop probability")
    group.add_argument("--noise", type=int, default=30,
                       help="uniform +- pixel offset amplitude")
    group.add_argument("--blur", action="store_true",
                       help="apply the 3x3 compression-artifact kernel")
    group.add_argument("--shift-x", type=int, default=0)
    group.add_argument("--shift-y", type=int, default=0)
    group.add_argument("--margin", type=int, default=0,
                       help="desktop margin pixels per side")
    group.add_argument("--gain", type=float, default=1.0)
    group.add_argument("--seed", type=int, default=0)


def _spec_from_args(args: argparse.Namespace) -> CodecSpec:
    return CodecSpec(
        data_rows=args.data_rows,
        data_cols=args.data_cols,
        label_cols=args.label_cols,
        block_scale=args.scale,
        inner_wall=args.inner_wall,
        outer_wall=args.outer_wall,
        fps=args.fps,
        body_repeat=args.body_repeat,
        head_repeat=args.head_repeat,
    )


def _channel_from_args(args: argparse.Namespace) -> ChannelConfig:
    return ChannelConfig(
        record_fps=args.record_fps,
        drop_probability=args.drop,
        noise_amplitude=args.noise,
        blur=args.blur,
        shift_x=args.shift_x,
        shift_y=args.shift_y,
        canvas_margin=args.margin,
        luma_gain=args.gain,
        seed=args.seed,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frame-courier",
                     description="Encode files to symbol-frame videos and back.")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", parents=[], help="file -> .y4m video")
    enc.add_argument("-i", "--input", required=True)
    enc.add_argument("-o", "--output", required=True)
    _add_spec_flags(enc)

    dec = sub.add_parser("decode", help=".y4m recording -> file")
    dec.add_argument("-i", "--input", required=True)
    dec.add_argument("-o", "--output", required=True)
    dec.add_argument("--report", help="also write the decode report as JSON")
    dec.add_argument("-v", "--verbose", action="store_true",
                     help="print the full decode report")
    _add_spec_flags(dec)

    sim = sub.add_parser("simulate", help="degrade a .y4m through the channel model")
    sim.add_argument("-i", "--input", required=True)
    sim.add_argument("-o", "--output", required=True)
    _add_channel_flags(sim)

    bench = sub.add_parser("bench", help="encode/decode timing sweep over payload sizes")
    bench.add_argument("--sizes", required=True,
                       help="comma-separated payload sizes in bytes")
    bench.add_argument("-o", "--output", help="CSV path (default stdout)")
    bench.add_argument("--channel", action="store_true",
                       help="pass frames through the channel before decoding")
    _add_spec_flags(bench)
    _add_channel_flags(bench)
    return parser


def _atomic_write(path: str, writer) -> int:
    """Write through a temp file in the destination directory, then rename."""
    target = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent or Path("."),
                                    prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            written = writer(handle)
        os.replace(tmp_name, target)
        return written
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _read_recording(path: str) -> FrameSequence:
    with open(path, "rb") as handle:
        try:
            return read_y4m(handle)
        except TruncatedFrame as exc:
            print(f"warning: {exc}; continuing with {len(exc.frames)} complete frames",
                  file=sys.stderr)
            return FrameSequence(frames=exc.frames, fps=exc.fps)


def _print_transcode_hints(path: str) -> None:
    print(f"{path}: compressed video containers are not read directly.",
          file=sys.stderr)
    print("Transcode with ffmpeg first:", file=sys.stderr)
    for hint in TRANSCODE_HINTS:
        print(f"  {hint}", file=sys.stderr)


def _report_dict(report: DecodeReport) -> dict:
    payload = asdict(report)
    payload["success"] = report.success
    return payload


def _report_text(report: DecodeReport) -> str:
    lines = [
        f"frames scanned:    {report.frames_scanned}",
        f"containers found:  {report.containers_found}",
        f"parity passed:     {report.parity_passed}",
        f"parity failed:     {report.parity_failed}",
        f"duplicates merged: {report.duplicates_merged}",
        f"voted total:       {report.voted_total}",
        f"missing indices:   {report.missing_indices}",
        f"recovered bytes:   {report.recovered_bytes}",
        f"status:            {'ok' if report.success else 'incomplete'}",
    ]
    return "\n".join(lines)


def _write_report(report: DecodeReport, path: str) -> None:
    data = json.dumps(_report_dict(report), indent=2) + "\n"
    _atomic_write(path, lambda handle: handle.write(data.encode("utf-8")))


def _cmd_encode(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args)
    payload = Path(args.input).read_bytes()
    seq = encode_file(payload, spec)
    written = _atomic_write(args.output, lambda handle: write_y4m(seq, handle))
    unique = 8 * len(payload) // spec.cells_per_frame + 1
    print(f"unique frames:    {unique}")
    print(f"scheduled frames: {len(seq.frames)}")
    print(f"duration:         {seq.duration_seconds:.1f} s at {spec.fps} FPS")
    print(f"bytes written:    {written}")
    return EXIT_OK


def _cmd_decode(args: argparse.Namespace) -> int:
    if Path(args.input).suffix.lower() in (".mp4", ".mov"):
        _print_transcode_hints(args.input)
        return EXIT_USAGE
    spec = _spec_from_args(args)
    seq = _read_recording(args.input)
    try:
        payload, report = decode_sequence(seq, spec)
    except (IncompleteRecovery, CorruptPayload) as exc:
        report = exc.report
        print(f"decode failed: {exc}", file=sys.stderr)
        if report is not None:
            print(_report_text(report))
            if args.report:
                _write_report(report, args.report)
        return EXIT_INCOMPLETE
    _atomic_write(args.output, lambda handle: handle.write(payload))
    if args.verbose:
        print(_report_text(report))
    else:
        print(f"recovered {len(payload)} bytes from {report.frames_scanned} frames "
              f"-> {args.output}")
    if args.report:
        _write_report(report, args.report)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    if Path(args.input).suffix.lower() in (".mp4", ".mov"):
        _print_transcode_hints(args.input)
        return EXIT_USAGE
    seq = _read_recording(args.input)
    degraded = apply_channel(seq, _channel_from_args(args))
    _atomic_write(args.output, lambda handle: write_y4m(degraded, handle))
    print(f"{len(seq.frames)} frames -> {len(degraded.frames)} degraded frames "
          f"at {degraded.fps} FPS")
    return EXIT_OK


class _CountingSink:
    """Byte sink that measures output size without storing it."""

    def write(self, data: bytes) -> int:
        return len(data)


def _cmd_bench(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args)
    try:
        sizes = [int(part) for part in args.sizes.split(",") if part]
    except ValueError:
        print(f"bad --sizes value: {args.sizes}", file=sys.stderr)
        return EXIT_USAGE
    if not sizes:
        print("--sizes must name at least one payload size", file=sys.stderr)
        return EXIT_USAGE

    rng = np.random.default_rng(args.seed)
    lines = [BENCH_CSV_HEADER]
    for size in sizes:
        payload = rng.bytes(size)
        start = time.perf_counter()
        seq = encode_file(payload, spec)
        encode_ms = (time.perf_counter() - start) * 1000.0
        video_bytes = write_y4m(seq, _CountingSink())
        recorded = apply_channel(seq, _channel_from_args(args)) if args.channel else seq
        start = time.perf_counter()
        recovered, _ = decode_sequence(recorded, spec)
        decode_ms = (time.perf_counter() - start) * 1000.0
        if recovered != payload:
            print(f"bench: decode mismatch at size {size}", file=sys.stderr)
            return EXIT_INCOMPLETE
        unique = 8 * size // spec.cells_per_frame + 1
        lines.append(f"{size},{unique},{len(seq.frames)},{video_bytes},"
                     f"{encode_ms:.3f},{decode_ms:.3f}")
    csv_text = "\n".join(lines) + "\n"
    if args.output:
        _atomic_write(args.output, lambda handle: handle.write(csv_text.encode("ascii")))
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


_COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "simulate": _cmd_simulate,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (OSError, IoFailure) as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except CodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())
