import numpy as np
import pytest

from frame_courier import (
    ChannelConfig,
    CodecSpec,
    FrameSequence,
    Symbol,
    apply_channel,
    build_label_grid,
    decode_sequence,
    encode_file,
    parse_label_grid,
    reconcile_candidates,
    scale_up,
    wrap_container,
)
from frame_courier import pipeline
from frame_courier.errors import (
    CorruptPayload,
    FileTooLarge,
    IncompleteRecovery,
    NoConsistentTotal,
)
from frame_courier.framing import compose_info_grid

from conftest import random_symbol_grid

Z, O, E = Symbol.ZERO, Symbol.ONE, Symbol.END


def make_candidate(data, index, total, spec, flip=None):
    cells = data.copy()
    if flip is not None:
        r, c = flip
        cells[r, c] = O if cells[r, c] == Z else Z
    label = build_label_grid(index, total, data, spec)
    return parse_label_grid(label, cells, spec)


@pytest.mark.parametrize("size", [0, 1, 7, 100, 5000])
def test_clean_roundtrip(size, spec):
    payload = np.random.default_rng(size).bytes(size)
    recovered, report = decode_sequence(encode_file(payload, spec), spec, workers=1)
    assert recovered == payload
    assert report.success
    assert report.voted_total == 8 * size // spec.cells_per_frame + 1
    assert report.missing_indices == []
    assert report.recovered_bytes == size


def test_encode_is_deterministic(spec, rng):
    payload = rng.bytes(3000)
    a = encode_file(payload, spec)
    b = encode_file(payload, spec)
    assert len(a.frames) == len(b.frames)
    assert all(np.array_equal(x, y) for x, y in zip(a.frames, b.frames))


def test_empty_file_schedule_length(spec):
    seq = encode_file(b"", spec)
    assert len(seq.frames) == 10 + 2 * 1


def test_drop_first_copy_pattern(spec):
    payload = np.random.default_rng(3).bytes(4000)
    seq = encode_file(payload, spec)
    total = 8 * len(payload) // spec.cells_per_frame + 1
    # first occurrence of frame 0 is schedule position 0; frame i>0 first
    # appears at head_repeat + i
    first_positions = {0} | {spec.head_repeat + i for i in range(1, total)}
    frames = [f for i, f in enumerate(seq.frames) if i not in first_positions]
    recovered, report = decode_sequence(
        FrameSequence(frames=frames, fps=seq.fps), spec, workers=1)
    assert recovered == payload
    assert report.duplicates_merged > 0


def test_two_copies_merge_count(spec):
    payload = np.random.default_rng(4).bytes(3000)
    lean = CodecSpec(head_repeat=0, body_repeat=2)
    seq = encode_file(payload, lean)
    recovered, report = decode_sequence(seq, lean, workers=1)
    total = 8 * len(payload) // lean.cells_per_frame + 1
    assert recovered == payload
    assert report.duplicates_merged == total


def test_all_black_sequence_fails_cleanly(spec):
    frames = [np.zeros((530, 570), dtype=np.uint8)] * 6
    with pytest.raises(IncompleteRecovery) as excinfo:
        decode_sequence(FrameSequence(frames=frames, fps=5), spec, workers=1)
    report = excinfo.value.report
    assert report.containers_found == 0
    assert report.frames_scanned == 6
    assert not report.success


def test_missing_index_reported(spec):
    payload = np.random.default_rng(5).bytes(3000)  # 3 data frames
    lean = CodecSpec(head_repeat=0, body_repeat=1)
    seq = encode_file(payload, lean)
    assert len(seq.frames) == 3
    frames = [seq.frames[0], seq.frames[2]]  # lose every copy of index 1
    with pytest.raises(IncompleteRecovery) as excinfo:
        decode_sequence(FrameSequence(frames=frames, fps=5), lean, workers=1)
    assert excinfo.value.report.missing_indices == [1]
    assert excinfo.value.report.voted_total == 3


def test_reconcile_prefers_parity_clean_copy(spec, rng):
    data = random_symbol_grid(rng)
    bad = make_candidate(data, 0, 1, spec, flip=(10, 11))
    good = make_candidate(data, 0, 1, spec)
    assert not bad.parity_ok and good.parity_ok
    grids = reconcile_candidates([bad, good], spec)
    assert len(grids) == 1
    assert np.array_equal(grids[0].cells, data)


@pytest.mark.parametrize("trial", range(20))
def test_reconcile_majority_repair(trial, spec):
    rng = np.random.default_rng(5000 + trial)
    data = random_symbol_grid(rng)
    positions = set()
    while len(positions) < 3:
        positions.add((int(rng.integers(0, 96)), int(rng.integers(0, 96))))
    copies = [make_candidate(data, 2, 5, spec, flip=pos) for pos in positions]
    assert not any(c.parity_ok for c in copies)
    grids = reconcile_candidates(copies, spec)
    assert len(grids) == 1
    assert grids[0].frame_index == 2
    assert grids[0].total_frames == 5
    assert np.array_equal(grids[0].cells, data)


def test_reconcile_unrepairable_group_is_missing(spec, rng):
    data = random_symbol_grid(rng)
    # two disagreeing parity-broken copies cannot form a majority
    copies = [make_candidate(data, 0, 2, spec, flip=(1, 1)),
              make_candidate(data, 0, 2, spec, flip=(2, 2))]
    clean_other = make_candidate(random_symbol_grid(rng), 1, 2, spec)
    grids = reconcile_candidates(copies + [clean_other], spec)
    assert [g.frame_index for g in grids] == [1]


def test_reconcile_total_votes(spec, rng):
    data = random_symbol_grid(rng)
    cands = [make_candidate(data, 0, 3, spec),
             make_candidate(data, 0, 3, spec),
             make_candidate(data, 0, 7, spec)]
    grids = reconcile_candidates(cands, spec)
    assert grids[0].total_frames == 3


def test_reconcile_tied_totals_raise(spec, rng):
    data = random_symbol_grid(rng)
    cands = [make_candidate(data, 0, 3, spec), make_candidate(data, 0, 7, spec)]
    with pytest.raises(NoConsistentTotal):
        reconcile_candidates(cands, spec)


def test_reconcile_empty_raises(spec):
    with pytest.raises(NoConsistentTotal):
        reconcile_candidates([], spec)


def test_order_independence(spec):
    payload = np.random.default_rng(6).bytes(2500)
    seq = encode_file(payload, spec)
    perm = np.random.default_rng(7).permutation(len(seq.frames))
    shuffled = FrameSequence(frames=[seq.frames[i] for i in perm], fps=seq.fps)
    recovered, _ = decode_sequence(shuffled, spec, workers=1)
    assert recovered == payload


def _single_frame_sequence(data, spec):
    label = build_label_grid(0, 1, data, spec)
    frame = wrap_container(scale_up(compose_info_grid(data, label), spec), spec)
    return FrameSequence(frames=[frame], fps=5)


def test_corrupt_payload_unaligned_prefix(spec):
    data = np.full((96, 96), E, dtype=np.uint8)
    data.ravel()[:7] = O  # 7 bits cannot form a byte
    with pytest.raises(CorruptPayload):
        decode_sequence(_single_frame_sequence(data, spec), spec, workers=1)


def test_corrupt_payload_data_after_end(spec):
    data = np.full((96, 96), Z, dtype=np.uint8)
    data.ravel()[0] = E
    data.ravel()[1:9] = O
    with pytest.raises(CorruptPayload):
        decode_sequence(_single_frame_sequence(data, spec), spec, workers=1)


def test_file_too_large_guard(spec):
    class _Huge(bytes):
        def __len__(self) -> int:
            return 5 * 10 ** 12

    with pytest.raises(FileTooLarge):
        encode_file(_Huge(), spec)


def test_report_invariants_on_lossy_channel(spec):
    payload = np.random.default_rng(8).bytes(2000)
    seq = encode_file(payload, spec)
    cfg = ChannelConfig(record_fps=10, drop_probability=0.3, noise_amplitude=30, seed=21)
    recovered, report = decode_sequence(apply_channel(seq, cfg), spec, workers=1)
    assert recovered == payload
    assert report.parity_passed + report.parity_failed <= report.containers_found
    assert report.containers_found <= report.frames_scanned


def test_worker_pool_matches_serial(spec, monkeypatch):
    monkeypatch.setattr(pipeline, "_POOL_MIN_FRAMES", 4)
    monkeypatch.delenv(pipeline.WORKERS_ENV, raising=False)
    payload = np.random.default_rng(9).bytes(2000)
    seq = encode_file(payload, spec)
    serial_bytes, serial_report = decode_sequence(seq, spec, workers=1)
    pooled_bytes, pooled_report = decode_sequence(seq, spec, workers=2)
    assert serial_bytes == pooled_bytes == payload
    assert serial_report == pooled_report


def test_worker_resolution_respects_env(monkeypatch):
    monkeypatch.setenv(pipeline.WORKERS_ENV, "1")
    assert pipeline._resolve_workers(None) == 1
    assert pipeline._resolve_workers(8) == 1
    monkeypatch.setenv(pipeline.WORKERS_ENV, "0")
    assert pipeline._resolve_workers(None) == (pipeline.os.cpu_count() or 1)
    monkeypatch.delenv(pipeline.WORKERS_ENV)
    assert pipeline._resolve_workers(3) == 3
