"""Exception types raised across the codec."""

from __future__ import annotations


class CodecError(Exception):
    """Base class for all frame-courier errors."""


class PrefixNotByteAligned(CodecError):
    """Recovered bit prefix does not divide into whole bytes."""


class IndexOutOfRange(CodecError):
    """Frame index / total outside the 32-bit label range."""


class ShapeMismatch(CodecError):
    """Array dimensions do not match the codec geometry."""


class EmptyInput(CodecError):
    """Operation requires at least one frame."""


class IoFailure(CodecError):
    """Underlying stream write failed."""


class MalformedHeader(CodecError):
    """Stream is not a YUV4MPEG2 file this reader supports."""


class TruncatedFrame(CodecError):
    """Stream ended mid-frame; carries every complete frame read so far.

    A recorder that dies mid-write (QuickTime's unfinished last frame)
    produces exactly this; the schedule's body repetition makes the loss
    recoverable downstream.
    """

    def __init__(self, message: str, frames: list, fps):
        super().__init__(message)
        self.frames = frames
        self.fps = fps


class ContainerNotFound(CodecError):
    """No white region qualifies as the container wall (transition frame)."""


class DegenerateBox(CodecError):
    """Located region is too small to carry one pixel per symbol block."""


class FileTooLarge(CodecError):
    """Payload needs more frames than the 32-bit frame counter allows."""


class NoConsistentTotal(CodecError):
    """Frame candidates do not agree on a total frame count."""


class IncompleteRecovery(CodecError):
    """Decode finished without one valid copy of every data frame."""

    def __init__(self, message: str, report):
        super().__init__(message)
        self.report = report


class CorruptPayload(CodecError):
    """Recovered cells violate the payload layout (bad END placement or
    a bit prefix that is not byte aligned)."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
