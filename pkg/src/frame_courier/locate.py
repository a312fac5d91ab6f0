"""Per-frame decode front-end: denoise, binarize, find the container
walls in an arbitrary recording, and resample the payload region back to
the canonical raster."""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .errors import ContainerNotFound, DegenerateBox, ShapeMismatch
from .raster import CodecSpec

# Selection rules for the container component: its bounding box must cover
# at least this fraction of the frame and sit within this relative band of
# the expected white-wall aspect ratio.
MIN_AREA_FRACTION = 0.10
ASPECT_TOLERANCE = 0.12

# Boxes below this fraction of the canonical wall size cannot carry one
# pixel per symbol block and are rejected outright.
MIN_BOX_FRACTION = 0.20

_CONNECT_8 = np.ones((3, 3), dtype=bool)


class RegionBox(NamedTuple):
    """Axis-aligned pixel rectangle inside a frame."""

    left: int
    top: int
    width: int
    height: int


def median_denoise(frame: np.ndarray) -> np.ndarray:
    """3x3 median filter with edge replication at the borders.

    Implemented as the 19-exchange median-of-9 min/max network, which runs
    entirely in uint8 and needs no sorting buffers.
    """
    img = np.asarray(frame, dtype=np.uint8)
    if img.ndim != 2:
        raise ShapeMismatch("median filter expects a 2-D frame")
    h, w = img.shape
    padded = np.pad(img, 1, mode="edge")
    p = [padded[r:r + h, c:c + w] for r in range(3) for c in range(3)]

    def sort2(i: int, j: int) -> None:
        a, b = p[i], p[j]
        p[i] = np.minimum(a, b)
        p[j] = np.maximum(a, b)

    sort2(1, 2); sort2(4, 5); sort2(7, 8)
    sort2(0, 1); sort2(3, 4); sort2(6, 7)
    sort2(1, 2); sort2(4, 5); sort2(7, 8)
    sort2(0, 3); sort2(5, 8); sort2(4, 7)
    sort2(3, 6); sort2(1, 4); sort2(2, 5)
    sort2(4, 7); sort2(4, 2); sort2(6, 4)
    sort2(4, 2)
    return p[4]


def binarize(frame: np.ndarray) -> np.ndarray:
    """Threshold to pure black/white: <=127 becomes 0, >127 becomes 255."""
    img = np.asarray(frame)
    return np.where(img > 127, np.uint8(255), np.uint8(0))


def locate_container(binary: np.ndarray, spec: CodecSpec) -> RegionBox:
    """Find the outer boundary of the white inner wall in a binarized frame.

    Connected white components (8-connectivity) are filtered by bounding
    box area (>= 10% of the frame) and aspect ratio (within 12% of the
    wall's width:height); the largest qualifying box wins.
    """
    img = np.asarray(binary)
    if img.ndim != 2:
        raise ShapeMismatch("expected a 2-D binary frame")
    labels, count = ndimage.label(img != 0, structure=_CONNECT_8)
    if count == 0:
        raise ContainerNotFound("frame contains no white pixels")

    frame_area = img.shape[0] * img.shape[1]
    expected_ratio = spec.inner_box_width / spec.inner_box_height
    best: RegionBox | None = None
    best_area = 0
    for rows, cols in ndimage.find_objects(labels):
        height = rows.stop - rows.start
        width = cols.stop - cols.start
        area = height * width
        if area < MIN_AREA_FRACTION * frame_area:
            continue
        ratio = width / height
        if abs(ratio - expected_ratio) > ASPECT_TOLERANCE * expected_ratio:
            continue
        if area > best_area:
            best_area = area
            best = RegionBox(left=cols.start, top=rows.start, width=width, height=height)
    if best is None:
        raise ContainerNotFound("no component passes the area and aspect filters")
    return best


@lru_cache(maxsize=32)
def _area_weights(src: int, dst: int) -> np.ndarray:
    """(dst, src) row matrix of exact fractional-overlap averaging weights."""
    scale = src / dst
    weights = np.zeros((dst, src))
    for i in range(dst):
        lo = i * scale
        hi = (i + 1) * scale
        k0 = int(np.floor(lo))
        k1 = min(int(np.ceil(hi)), src)
        for k in range(k0, k1):
            overlap = min(hi, k + 1) - max(lo, k)
            if overlap > 0:
                weights[i, k] = overlap
    weights /= scale
    weights.setflags(write=False)
    return weights


def resample_area(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Area-average resampling to an arbitrary size (float64 output)."""
    src = np.asarray(img, dtype=np.float64)
    h, w = src.shape
    if (h, w) == (out_h, out_w):
        return src
    return _area_weights(h, out_h) @ src @ _area_weights(w, out_w).T


def normalize_region(frame: np.ndarray, box: RegionBox, spec: CodecSpec) -> np.ndarray:
    """Map the located box back to the canonical content raster.

    The boxed region of the denoised grayscale frame is area-resampled to
    the canonical wall-boundary size, then the white inner wall is cut off,
    leaving the scaled info-grid region.
    """
    img = np.asarray(frame)
    if box.width <= 0 or box.height <= 0:
        raise ValueError(f"degenerate box {box}")
    if (box.left < 0 or box.top < 0
            or box.left + box.width > img.shape[1]
            or box.top + box.height > img.shape[0]):
        raise ValueError(f"box {box} exceeds frame {img.shape}")
    if (box.width < MIN_BOX_FRACTION * spec.inner_box_width
            or box.height < MIN_BOX_FRACTION * spec.inner_box_height):
        raise DegenerateBox(f"box {box.width}x{box.height} below the usable minimum")

    region = img[box.top:box.top + box.height, box.left:box.left + box.width]
    wall = spec.inner_wall * spec.block_scale
    if (box.height, box.width) == (spec.inner_box_height, spec.inner_box_width):
        return region[wall:-wall, wall:-wall]  # native scale, no resample
    resampled = resample_area(region, spec.inner_box_height, spec.inner_box_width)
    return resampled[wall:-wall, wall:-wall]
