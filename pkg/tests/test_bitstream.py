import numpy as np
import pytest

from frame_courier import Symbol, bytes_to_symbols, chunk_to_frames, symbols_to_bytes
from frame_courier.errors import PrefixNotByteAligned

Z, O, E = Symbol.ZERO, Symbol.ONE, Symbol.END


def brute_force_chunks(bits: list, cells: int) -> list:
    """Independent chunker: pure-python padding and slicing."""
    padded = list(bits)
    padded += [int(E)] * (cells - len(padded) % cells if len(padded) % cells else 0)
    if len(padded) == len(bits):  # exact multiple (or empty): forced END frame
        padded += [int(E)] * cells
    return [padded[i:i + cells] for i in range(0, len(padded), cells)]


def test_hex_e3_expands_msb_first():
    out = bytes_to_symbols(b"\xe3")
    assert out.tolist() == [O, O, O, Z, Z, Z, O, O]


def test_empty_payload_expands_to_nothing():
    assert bytes_to_symbols(b"").size == 0


def test_all_zero_and_all_one_bytes():
    out = bytes_to_symbols(b"\x00\xff")
    assert out.tolist() == [Z] * 8 + [O] * 8


def test_pack_e3_back():
    symbols = np.array([O, O, O, Z, Z, Z, O, O, E, E], dtype=np.uint8)
    assert symbols_to_bytes(symbols) == b"\xe3"


def test_lone_end_is_empty_file():
    assert symbols_to_bytes(np.array([E], dtype=np.uint8)) == b""


def test_seven_bits_cannot_pack():
    symbols = np.array([O] * 7 + [E], dtype=np.uint8)
    with pytest.raises(PrefixNotByteAligned):
        symbols_to_bytes(symbols)


def test_symbols_after_first_end_are_ignored():
    symbols = np.array([Z] * 8 + [E] + [O] * 5, dtype=np.uint8)
    assert symbols_to_bytes(symbols) == b"\x00"


@pytest.mark.parametrize("n_bits,expected_frames", [
    (0, 1),            # forced all-END frame
    (1, 1),
    (9215, 1),
    (9216, 2),         # exact multiple: full frame + all-END frame
    (9217, 2),
    (2 * 9216, 3),
    (1_048_576, 114),  # 128 KiB file: 113 full + 1 partial
])
def test_frame_count_formula(n_bits, expected_frames, spec, rng):
    bits = rng.integers(0, 2, n_bits, dtype=np.uint8) * np.uint8(O)
    frames = chunk_to_frames(bits, spec)
    assert len(frames) == expected_frames
    assert [f.frame_index for f in frames] == list(range(expected_frames))
    assert all(f.total_frames == expected_frames for f in frames)
    assert all(f.cells.shape == (96, 96) for f in frames)
    # cross-check against the independent chunker
    oracle = brute_force_chunks(bits.tolist(), spec.cells_per_frame)
    assert len(oracle) == expected_frames
    flat = np.concatenate([f.cells.ravel() for f in frames])
    assert flat.tolist() == [cell for chunk in oracle for cell in chunk]


def test_chunk_rejects_end_symbols(spec):
    with pytest.raises(ValueError):
        chunk_to_frames(np.array([E], dtype=np.uint8), spec)


def test_empty_chunk_is_one_all_end_frame(spec):
    frames = chunk_to_frames(np.array([], dtype=np.uint8), spec)
    assert len(frames) == 1
    assert bool((frames[0].cells == E).all())


@pytest.mark.parametrize("size", [0, 1, 7, 100, 1152, 2304, 50_000])
def test_roundtrip_through_frames(size, spec, rng):
    payload = rng.bytes(size)
    frames = chunk_to_frames(bytes_to_symbols(payload), spec)
    flat = np.concatenate([f.cells.ravel() for f in frames])
    assert symbols_to_bytes(flat) == payload


def test_end_position_invariant(spec, rng):
    payload = rng.bytes(1000)
    symbols = bytes_to_symbols(payload)
    frames = chunk_to_frames(symbols, spec)
    flat = np.concatenate([f.cells.ravel() for f in frames])
    first_end = int(np.flatnonzero(flat == E)[0])
    assert first_end == symbols.size
    assert np.array_equal(flat[:first_end], symbols)
    assert bool((flat[first_end:] == E).all())
