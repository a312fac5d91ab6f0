"""Byte payloads <-> ternary symbol streams.

Every file is treated as a flat bit sequence, expanded MSB-first into
ZERO/ONE symbols, chunked into frame-sized grids and terminated by END
padding.  Symbols carry their canonical pixel value (0, 255, 128) so a
grid of symbols is also a legal grayscale raster.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import TYPE_CHECKING

import numpy as np

from .errors import PrefixNotByteAligned

if TYPE_CHECKING:
    from .raster import CodecSpec


class Symbol(IntEnum):
    """Ternary cell value; the enum value is the canonical pixel level."""

    ZERO = 0
    ONE = 255
    END = 128


SYMBOL_VALUES = (int(Symbol.ZERO), int(Symbol.ONE), int(Symbol.END))


@dataclass
class DataFrameGrid:
    """One frame worth of payload cells plus its position in the sequence.

    `cells` is a (rows, cols) uint8 array of Symbol values.  Grids built by
    `chunk_to_frames` additionally guarantee that everything at or after
    the first END cell (row-major) is END.
    """

    cells: np.ndarray
    frame_index: int
    total_frames: int

    def __post_init__(self) -> None:
        self.cells = np.asarray(self.cells, dtype=np.uint8)
        if self.cells.ndim != 2:
            raise ValueError("cells must be a 2-D symbol grid")
        if not 0 <= self.frame_index < self.total_frames:
            raise ValueError(
                f"frame_index {self.frame_index} outside [0, {self.total_frames})"
            )


def bytes_to_symbols(payload: bytes) -> np.ndarray:
    """Expand bytes MSB-first into a flat uint8 array of ZERO/ONE values."""
    raw = np.frombuffer(bytes(payload), dtype=np.uint8)
    bits = np.unpackbits(raw)
    return bits * np.uint8(Symbol.ONE)


def symbols_to_bytes(symbols: np.ndarray) -> bytes:
    """Pack the ZERO/ONE prefix before the first END back into bytes.

    Raises PrefixNotByteAligned when the prefix length is not a multiple
    of eight, which signals a corrupted or truncated recovery.
    """
    arr = np.asarray(symbols, dtype=np.uint8).ravel()
    ends = np.flatnonzero(arr == Symbol.END)
    prefix = arr[: ends[0]] if ends.size else arr
    if prefix.size % 8 != 0:
        raise PrefixNotByteAligned(
            f"bit prefix of length {prefix.size} does not divide into bytes"
        )
    bits = (prefix == Symbol.ONE).astype(np.uint8)
    return np.packbits(bits).tobytes()


def chunk_to_frames(symbols: np.ndarray, spec: "CodecSpec") -> list[DataFrameGrid]:
    """Split a ZERO/ONE stream into frame grids, padding the tail with END.

    A payload that exactly fills its last frame gets one extra all-END
    frame, so the decoder always observes a stop signal.
    """
    arr = np.asarray(symbols, dtype=np.uint8).ravel()
    if arr.size and bool((arr == Symbol.END).any()):
        raise ValueError("payload symbols must not contain END")
    cells = spec.cells_per_frame
    total = arr.size // cells + 1
    padded = np.full(total * cells, Symbol.END, dtype=np.uint8)
    padded[: arr.size] = arr
    grids = padded.reshape(total, spec.data_rows, spec.data_cols)
    return [
        DataFrameGrid(cells=grids[i], frame_index=i, total_frames=total)
        for i in range(total)
    ]
