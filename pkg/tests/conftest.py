import numpy as np
import pytest

from frame_courier import CodecSpec


@pytest.fixture
def spec() -> CodecSpec:
    return CodecSpec()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0xC0DEC)


def random_symbol_grid(rng: np.random.Generator, rows: int = 96, cols: int = 96,
                       values=(0, 255)) -> np.ndarray:
    return rng.choice(np.array(values, dtype=np.uint8), size=(rows, cols))


def rescale_exact(img: np.ndarray, num: int, den: int) -> np.ndarray:
    """Exact rational rescaling by num/den: integer upsample then block
    means.  Independent of the library's resampler; black-pads the bottom
    and right edges when den does not divide the upsampled size."""

    def pad_for(dim: int) -> int:
        pad = 0
        while ((dim + pad) * num) % den:
            pad += 1
        return pad

    padded = np.pad(img, ((0, pad_for(img.shape[0])), (0, pad_for(img.shape[1]))))
    up = np.repeat(np.repeat(padded, num, axis=0), num, axis=1).astype(np.float64)
    h, w = up.shape
    pooled = up.reshape(h // den, den, w // den, den).mean(axis=(1, 3))
    return np.rint(pooled).astype(np.uint8)


def embed_on_canvas(img: np.ndarray, margin: int, shift_x: int = 0,
                    shift_y: int = 0) -> np.ndarray:
    """Paste a frame onto a black desktop-like canvas with the given margin
    per side, offset by (shift_x, shift_y)."""
    h, w = img.shape
    canvas = np.zeros((h + 2 * margin, w + 2 * margin), dtype=np.uint8)
    canvas[margin + shift_y:margin + shift_y + h,
           margin + shift_x:margin + shift_x + w] = img
    return canvas
