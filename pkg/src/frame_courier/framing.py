"""Label grid protocol: frame index / total counters and the two parity
columns that let the decoder reject damaged frames.

Column layout (fixed 8-column protocol):

  0, 1, 4, 5  reserved, all ZERO
  2           frame index, 32-bit big-endian, tiled down the column
  3           total frame count, same encoding
  6           per-column XOR parity of the data grid
  7           per-row XOR parity of data row r, folded with column 6 row r

END cells count as 0 for parity, so all-END padding frames carry all-ZERO
parity columns.  The tiled counter copies are majority-voted on decode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bitstream import Symbol
from .errors import IndexOutOfRange, ShapeMismatch
from .raster import CodecSpec

LABEL_COLS = 8
COUNTER_BITS = 32
COL_INDEX = 2
COL_TOTAL = 3
COL_COL_PARITY = 6
COL_ROW_PARITY = 7
RESERVED_COLS = (0, 1, 4, 5)


@dataclass
class FrameCandidate:
    """A parsed frame: full info grid plus the label votes and parity verdict."""

    info: np.ndarray
    voted_index: Optional[int]
    voted_total: Optional[int]
    parity_ok: bool


def _require_label_geometry(spec: CodecSpec) -> None:
    if spec.label_cols != LABEL_COLS:
        raise ShapeMismatch(f"label protocol needs {LABEL_COLS} columns")
    if spec.data_rows % COUNTER_BITS != 0:
        raise ShapeMismatch(
            f"data_rows must be a multiple of {COUNTER_BITS} to tile the counters"
        )


def _counter_column(value: int, rows: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(value.to_bytes(4, "big"), dtype=np.uint8))
    return np.tile(bits, rows // COUNTER_BITS)


def _vote_counter(column_bits: np.ndarray) -> int:
    copies = column_bits.reshape(-1, COUNTER_BITS)
    votes = copies.sum(axis=0) * 2 > copies.shape[0]
    return int.from_bytes(np.packbits(votes.astype(np.uint8)).tobytes(), "big")


def _parity_bits(data_bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    col_parity = np.bitwise_xor.reduce(data_bits, axis=0)
    row_parity = np.bitwise_xor.reduce(data_bits, axis=1) ^ col_parity
    return col_parity, row_parity


def build_label_grid(frame_index: int, total: int, data: np.ndarray,
                     spec: CodecSpec) -> np.ndarray:
    """Build the (rows, 8) label grid for one data frame."""
    _require_label_geometry(spec)
    if not 0 <= frame_index < total < 2 ** COUNTER_BITS:
        raise IndexOutOfRange(f"need 0 <= {frame_index} < {total} < 2^{COUNTER_BITS}")
    cells = np.asarray(data, dtype=np.uint8)
    if cells.shape != (spec.data_rows, spec.data_cols):
        raise ShapeMismatch(f"data {cells.shape} != {(spec.data_rows, spec.data_cols)}")

    bits = np.zeros((spec.data_rows, LABEL_COLS), dtype=np.uint8)
    bits[:, COL_INDEX] = _counter_column(frame_index, spec.data_rows)
    bits[:, COL_TOTAL] = _counter_column(total, spec.data_rows)
    col_parity, row_parity = _parity_bits((cells == Symbol.ONE).astype(np.uint8))
    bits[:, COL_COL_PARITY] = col_parity
    bits[:, COL_ROW_PARITY] = row_parity
    return bits * np.uint8(Symbol.ONE)


def parse_label_grid(label: np.ndarray, data: np.ndarray,
                     spec: CodecSpec) -> FrameCandidate:
    """Vote the counters and verify both parity columns.

    Always returns a candidate; a parity failure is reported through
    `parity_ok`, never raised.
    """
    _require_label_geometry(spec)
    label_cells = np.asarray(label, dtype=np.uint8)
    data_cells = np.asarray(data, dtype=np.uint8)
    if label_cells.shape != (spec.data_rows, LABEL_COLS):
        raise ShapeMismatch(f"label {label_cells.shape} != {(spec.data_rows, LABEL_COLS)}")
    if data_cells.shape != (spec.data_rows, spec.data_cols):
        raise ShapeMismatch(f"data {data_cells.shape} != {(spec.data_rows, spec.data_cols)}")

    label_bits = (label_cells == Symbol.ONE).astype(np.uint8)
    voted_index = _vote_counter(label_bits[:, COL_INDEX])
    voted_total = _vote_counter(label_bits[:, COL_TOTAL])

    col_parity, row_parity = _parity_bits((data_cells == Symbol.ONE).astype(np.uint8))
    parity_ok = bool(
        np.array_equal(col_parity, label_bits[:, COL_COL_PARITY])
        and np.array_equal(row_parity, label_bits[:, COL_ROW_PARITY])
    )
    return FrameCandidate(
        info=compose_info_grid(data_cells, label_cells),
        voted_index=voted_index,
        voted_total=voted_total,
        parity_ok=parity_ok,
    )


def compose_info_grid(data: np.ndarray, label: np.ndarray) -> np.ndarray:
    """Join data and label grids horizontally (label on the right)."""
    d = np.asarray(data, dtype=np.uint8)
    l = np.asarray(label, dtype=np.uint8)
    if d.ndim != 2 or l.ndim != 2 or d.shape[0] != l.shape[0]:
        raise ShapeMismatch(f"cannot join {d.shape} with {l.shape}")
    return np.hstack([d, l])


def split_info_grid(info: np.ndarray, spec: CodecSpec) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of compose_info_grid."""
    grid = np.asarray(info, dtype=np.uint8)
    if grid.shape != (spec.data_rows, spec.cols_total):
        raise ShapeMismatch(f"info {grid.shape} != {(spec.data_rows, spec.cols_total)}")
    return grid[:, : spec.data_cols], grid[:, spec.data_cols:]
