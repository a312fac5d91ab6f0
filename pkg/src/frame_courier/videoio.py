"""Frame sequences with timing, the repetition schedule, and YUV4MPEG2 I/O.

YUV4MPEG2 (mono colorspace) is the native container: uncompressed,
self-describing and byte-deterministic, so golden files stay stable and
any transcoder can turn it into a playable MP4 and back.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import BinaryIO, Union

import numpy as np

from .errors import EmptyInput, IoFailure, MalformedHeader, ShapeMismatch, TruncatedFrame
from .raster import CodecSpec

_HEADER_MAGIC = b"YUV4MPEG2"
_FRAME_MAGIC = b"FRAME"
_MAX_LINE = 4096


@dataclass
class FrameSequence:
    """Ordered grayscale frames, all the same size, at a rational FPS."""

    frames: list = field(default_factory=list)
    fps: Fraction = Fraction(5)

    def __post_init__(self) -> None:
        self.fps = Fraction(self.fps)
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        shapes = {f.shape for f in self.frames}
        if len(shapes) > 1:
            raise ShapeMismatch(f"frames have mixed shapes: {sorted(shapes)}")

    @property
    def duration_seconds(self) -> float:
        return float(len(self.frames) / self.fps)


def schedule_frames(containers: list, spec: CodecSpec) -> FrameSequence:
    """Apply the repetition schedule: head_repeat extra copies of the first
    frame (player cache loss), then body_repeat copies of the whole list
    (random frame loss)."""
    if not containers:
        raise EmptyInput("no container frames to schedule")
    frames = [containers[0]] * spec.head_repeat + list(containers) * spec.body_repeat
    return FrameSequence(frames=frames, fps=Fraction(spec.fps))


def write_y4m(seq: FrameSequence, sink: BinaryIO) -> int:
    """Write the sequence as mono YUV4MPEG2; returns bytes written.

    Output is deterministic: identical sequences produce identical bytes.
    """
    if not seq.frames:
        raise EmptyInput("refusing to write an empty sequence")
    h, w = seq.frames[0].shape
    fps = Fraction(seq.fps)
    header = f"YUV4MPEG2 W{w} H{h} F{fps.numerator}:{fps.denominator} Ip A1:1 Cmono\n"
    written = 0
    try:
        written += sink.write(header.encode("ascii"))
        for frame in seq.frames:
            plane = np.ascontiguousarray(frame, dtype=np.uint8)
            written += sink.write(_FRAME_MAGIC + b"\n")
            written += sink.write(plane.tobytes())
    except OSError as exc:
        raise IoFailure(f"write failed: {exc}") from exc
    return written


def _read_line(source: BinaryIO) -> tuple[bytes, bool]:
    """Read up to a newline. Returns (payload, saw_newline); payload may be
    empty at a clean EOF."""
    buf = bytearray()
    while len(buf) < _MAX_LINE:
        ch = source.read(1)
        if not ch:
            return bytes(buf), False
        if ch == b"\n":
            return bytes(buf), True
        buf += ch
    raise MalformedHeader("unterminated header line")


def _parse_header(line: bytes) -> tuple[int, int, Fraction, str]:
    tokens = line.split(b" ")
    if tokens[0] != _HEADER_MAGIC:
        raise MalformedHeader(f"bad magic {tokens[0]!r}")
    width = height = None
    fps = None
    colorspace = "420"
    for token in tokens[1:]:
        if not token:
            continue
        tag, value = token[:1], token[1:]
        try:
            if tag == b"W":
                width = int(value)
            elif tag == b"H":
                height = int(value)
            elif tag == b"F":
                num, den = value.split(b":")
                fps = Fraction(int(num), int(den))
            elif tag == b"C":
                colorspace = value.decode("ascii")
            # I, A, X and unknown parameters are tolerated and ignored
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedHeader(f"bad header token {token!r}") from exc
    if not width or not height or width < 0 or height < 0:
        raise MalformedHeader("missing or invalid W/H")
    if fps is None or fps <= 0:
        raise MalformedHeader("missing or invalid frame rate")
    return width, height, fps, colorspace


def read_y4m(source: Union[BinaryIO, bytes]) -> FrameSequence:
    """Read a mono or 420-family YUV4MPEG2 stream, keeping only luma.

    Raises MalformedHeader for unsupported files and TruncatedFrame (which
    carries all complete frames) when the stream ends mid-frame.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    line, terminated = _read_line(source)
    if not terminated:
        raise MalformedHeader("stream ends inside the file header")
    width, height, fps, colorspace = _parse_header(line)

    if colorspace == "mono":
        chroma_bytes = 0
    elif colorspace.startswith("420"):
        if width % 2 or height % 2:
            raise MalformedHeader(f"odd dimensions for C{colorspace}")
        chroma_bytes = 2 * (width // 2) * (height // 2)
    else:
        raise MalformedHeader(f"unsupported colorspace C{colorspace}")

    luma_bytes = width * height
    frames: list = []
    while True:
        line, terminated = _read_line(source)
        if not line and not terminated:
            return FrameSequence(frames=frames, fps=fps)
        if not terminated:
            raise TruncatedFrame("stream ends inside a frame header", frames, fps)
        if not line.startswith(_FRAME_MAGIC):
            raise MalformedHeader(f"expected FRAME record, got {line[:16]!r}")
        luma = source.read(luma_bytes)
        if len(luma) < luma_bytes:
            raise TruncatedFrame(
                f"frame {len(frames)} ends after {len(luma)}/{luma_bytes} luma bytes",
                frames, fps,
            )
        frames.append(np.frombuffer(luma, dtype=np.uint8).reshape(height, width))
        if chroma_bytes:
            chroma = source.read(chroma_bytes)
            if len(chroma) < chroma_bytes:
                raise TruncatedFrame(
                    f"frame {len(frames) - 1} ends inside its chroma planes",
                    frames[:-1], fps,
                )
