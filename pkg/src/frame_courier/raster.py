"""Symbol grids <-> pixel rasters: block scaling, container walls,
mean-pooling and ternary quantization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitstream import Symbol
from .errors import ShapeMismatch

# Quantization cutpoints: nearest of the canonical levels {0, 128, 255},
# with both midpoints handled by integer comparison (64 and 192).
ZERO_END_CUT = 64
END_ONE_CUT = 192


@dataclass(frozen=True)
class CodecSpec:
    """All geometry and timing parameters of the visual channel.

    Cell dimensions are symbol counts; wall thicknesses are in cells.
    The defaults produce a 570x530 px container frame at 5 FPS.
    """

    data_rows: int = 96
    data_cols: int = 96
    label_cols: int = 8
    block_scale: int = 5
    inner_wall: int = 2   # white, cells
    outer_wall: int = 3   # black, cells
    fps: int = 5
    body_repeat: int = 2
    head_repeat: int = 10

    def __post_init__(self) -> None:
        for name in ("data_rows", "data_cols", "label_cols", "block_scale", "fps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("inner_wall", "outer_wall", "body_repeat", "head_repeat"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def cols_total(self) -> int:
        return self.data_cols + self.label_cols

    @property
    def cells_per_frame(self) -> int:
        return self.data_rows * self.data_cols

    @property
    def content_width(self) -> int:
        return self.cols_total * self.block_scale

    @property
    def content_height(self) -> int:
        return self.data_rows * self.block_scale

    @property
    def inner_box_width(self) -> int:
        """Outer boundary of the white inner wall, px."""
        return (self.cols_total + 2 * self.inner_wall) * self.block_scale

    @property
    def inner_box_height(self) -> int:
        return (self.data_rows + 2 * self.inner_wall) * self.block_scale

    @property
    def container_width(self) -> int:
        return (self.cols_total + 2 * (self.inner_wall + self.outer_wall)) * self.block_scale

    @property
    def container_height(self) -> int:
        return (self.data_rows + 2 * (self.inner_wall + self.outer_wall)) * self.block_scale


def scale_up(info: np.ndarray, spec: CodecSpec) -> np.ndarray:
    """Replicate every cell into a block_scale x block_scale pixel block."""
    grid = np.asarray(info, dtype=np.uint8)
    if grid.shape != (spec.data_rows, spec.cols_total):
        raise ShapeMismatch(
            f"info grid {grid.shape} != {(spec.data_rows, spec.cols_total)}"
        )
    s = spec.block_scale
    return np.repeat(np.repeat(grid, s, axis=0), s, axis=1)


def wrap_container(content: np.ndarray, spec: CodecSpec) -> np.ndarray:
    """Surround the content raster with the white inner and black outer walls."""
    frame = np.asarray(content, dtype=np.uint8)
    if frame.shape != (spec.content_height, spec.content_width):
        raise ShapeMismatch(
            f"content {frame.shape} != {(spec.content_height, spec.content_width)}"
        )
    inner = spec.inner_wall * spec.block_scale
    outer = spec.outer_wall * spec.block_scale
    framed = np.pad(frame, inner, constant_values=int(Symbol.ONE))
    return np.pad(framed, outer, constant_values=int(Symbol.ZERO))


def strip_container(container: np.ndarray, spec: CodecSpec) -> np.ndarray:
    """Inverse of wrap_container on a native-scale container frame."""
    frame = np.asarray(container)
    expected = (spec.container_height, spec.container_width)
    if frame.shape != expected:
        raise ShapeMismatch(f"container {frame.shape} != {expected}")
    walls = (spec.inner_wall + spec.outer_wall) * spec.block_scale
    return frame[walls:-walls, walls:-walls]


def mean_pool(content: np.ndarray, spec: CodecSpec) -> np.ndarray:
    """Average every block_scale x block_scale block down to one value."""
    frame = np.asarray(content)
    s = spec.block_scale
    if frame.ndim != 2 or frame.shape[0] % s or frame.shape[1] % s:
        raise ShapeMismatch(f"frame {frame.shape} is not a multiple of {s}x{s} blocks")
    rows, cols = frame.shape[0] // s, frame.shape[1] // s
    return frame.reshape(rows, s, cols, s).mean(axis=(1, 3))


def quantize_ternary(value: float) -> Symbol:
    """Snap one pooled value to the nearest canonical symbol level."""
    if value < ZERO_END_CUT:
        return Symbol.ZERO
    if value < END_ONE_CUT:
        return Symbol.END
    return Symbol.ONE


def quantize_ternary_grid(values: np.ndarray) -> np.ndarray:
    """Vectorized quantize_ternary; returns a uint8 grid of Symbol values."""
    vals = np.asarray(values)
    out = np.full(vals.shape, Symbol.END, dtype=np.uint8)
    out[vals < ZERO_END_CUT] = Symbol.ZERO
    out[vals >= END_ONE_CUT] = Symbol.ONE
    return out
