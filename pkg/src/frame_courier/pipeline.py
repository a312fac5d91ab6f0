"""End-to-end orchestration: file -> scheduled frame sequence, and a
recorded sequence -> file, with duplicate reconciliation and diagnostics.

The decode front-end is embarrassingly parallel; with more than one worker
it fans frame chunks out to a process pool.  Results are merged in frame
order, so worker count never changes the outcome.
"""

from __future__ import annotations

import os
from collections import Counter, OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import multiprocessing
import numpy as np

from .bitstream import DataFrameGrid, Symbol, bytes_to_symbols, chunk_to_frames, symbols_to_bytes
from .errors import (
    ContainerNotFound,
    CorruptPayload,
    DegenerateBox,
    FileTooLarge,
    IncompleteRecovery,
    NoConsistentTotal,
    PrefixNotByteAligned,
)
from .framing import (
    FrameCandidate,
    build_label_grid,
    compose_info_grid,
    parse_label_grid,
    split_info_grid,
)
from .locate import binarize, locate_container, median_denoise, normalize_region
from .raster import CodecSpec, mean_pool, quantize_ternary_grid, scale_up, wrap_container
from .videoio import FrameSequence, schedule_frames

WORKERS_ENV = "FRAME_COURIER_THREADS"
_POOL_MIN_FRAMES = 128  # below this, pool startup costs more than it saves
_COUNTER_LIMIT = 2 ** 32


@dataclass
class DecodeReport:
    """Aggregate decode diagnostics."""

    frames_scanned: int = 0
    containers_found: int = 0
    parity_passed: int = 0
    parity_failed: int = 0
    duplicates_merged: int = 0
    voted_total: Optional[int] = None
    missing_indices: list = field(default_factory=list)
    recovered_bytes: int = 0

    @property
    def success(self) -> bool:
        return self.voted_total is not None and not self.missing_indices


def encode_file(payload: bytes, spec: CodecSpec = CodecSpec()) -> FrameSequence:
    """Encode a file into the scheduled container frame sequence."""
    total = 8 * len(payload) // spec.cells_per_frame + 1
    if total >= _COUNTER_LIMIT:
        raise FileTooLarge(f"payload needs {total} frames, counter holds < {_COUNTER_LIMIT}")
    grids = chunk_to_frames(bytes_to_symbols(bytes(payload)), spec)
    containers = []
    for grid in grids:
        label = build_label_grid(grid.frame_index, grid.total_frames, grid.cells, spec)
        info = compose_info_grid(grid.cells, label)
        containers.append(wrap_container(scale_up(info, spec), spec))
    return schedule_frames(containers, spec)


def _scan_frame(frame: np.ndarray, spec: CodecSpec) -> tuple[bool, Optional[FrameCandidate]]:
    """Front-end for one recorded frame: (container_found, candidate)."""
    denoised = median_denoise(frame)
    try:
        box = locate_container(binarize(denoised), spec)
    except ContainerNotFound:
        return False, None
    try:
        content = normalize_region(denoised, box, spec)
    except DegenerateBox:
        return True, None
    cells = quantize_ternary_grid(mean_pool(content, spec))
    data, label = split_info_grid(cells, spec)
    return True, parse_label_grid(label, data, spec)


def _scan_chunk(frames: list, spec: CodecSpec) -> list:
    return [_scan_frame(frame, spec) for frame in frames]


def _resolve_workers(workers: Optional[int]) -> int:
    cpus = os.cpu_count() or 1
    requested = cpus if workers is None else workers
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        cap = int(env)
        requested = min(requested, cpus if cap == 0 else cap)
    return max(1, requested)


def _scan_sequence(frames: list, spec: CodecSpec, workers: int) -> list:
    if workers <= 1 or len(frames) < _POOL_MIN_FRAMES:
        return _scan_chunk(frames, spec)
    chunk = max(16, -(-len(frames) // (workers * 4)))
    chunks = [frames[i:i + chunk] for i in range(0, len(frames), chunk)]
    ctx = multiprocessing.get_context("fork" if os.name == "posix" else "spawn")
    results = []
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        for part in pool.map(_scan_chunk, chunks, [spec] * len(chunks)):
            results.extend(part)
    return results


def _majority_total(candidates: list) -> int:
    votes = Counter(
        c.voted_total for c in candidates
        if c.voted_total is not None and c.voted_total >= 1
    )
    if not votes:
        raise NoConsistentTotal("no usable total-frame votes")
    top = max(votes.values())
    winners = [value for value, count in votes.items() if count == top]
    if len(winners) > 1:
        raise NoConsistentTotal(f"totals tied: {sorted(winners)}")
    return winners[0]


def _cellwise_majority(infos: list) -> np.ndarray:
    stack = np.stack(infos)
    counts = np.stack([(stack == value).sum(axis=0) for value in (0, 128, 255)])
    return np.array([0, 128, 255], dtype=np.uint8)[counts.argmax(axis=0)]


def _group_by_index(candidates: list, total: int) -> "OrderedDict[int, list]":
    groups: "OrderedDict[int, list]" = OrderedDict()
    for cand in candidates:
        if cand.voted_index is not None and 0 <= cand.voted_index < total:
            groups.setdefault(cand.voted_index, []).append(cand)
    return groups


def reconcile_candidates(candidates: list, spec: CodecSpec = CodecSpec()) -> list:
    """Merge duplicate frame candidates into one data frame per index.

    Within a group the first parity-clean candidate (scan order) wins; if
    none passes, a cellwise majority vote over the group is re-parsed and
    accepted only when parity then holds.  Groups that stay invalid are
    simply absent from the result.
    """
    total = _majority_total(candidates)
    recovered = []
    for index, group in _group_by_index(candidates, total).items():
        cells = None
        for cand in group:
            if cand.parity_ok:
                cells, _ = split_info_grid(cand.info, spec)
                break
        if cells is None:
            repaired = _cellwise_majority([cand.info for cand in group])
            data, label = split_info_grid(repaired, spec)
            reparsed = parse_label_grid(label, data, spec)
            if reparsed.parity_ok and reparsed.voted_index == index:
                cells = data
        if cells is not None:
            recovered.append(DataFrameGrid(cells=cells, frame_index=index, total_frames=total))
    return sorted(recovered, key=lambda grid: grid.frame_index)


def decode_sequence(seq: FrameSequence, spec: CodecSpec = CodecSpec(),
                    workers: Optional[int] = None) -> tuple[bytes, DecodeReport]:
    """Recover the original file from a (possibly degraded) recording.

    Raises IncompleteRecovery when frames are missing or no total wins the
    vote, and CorruptPayload when the recovered cells cannot form a file;
    both carry the diagnostic report.
    """
    results = _scan_sequence(seq.frames, spec, _resolve_workers(workers))
    candidates = [cand for _, cand in results if cand is not None]
    report = DecodeReport(
        frames_scanned=len(seq.frames),
        containers_found=sum(1 for found, _ in results if found),
        parity_passed=sum(1 for c in candidates if c.parity_ok),
        parity_failed=sum(1 for c in candidates if not c.parity_ok),
    )

    try:
        total = _majority_total(candidates)
    except NoConsistentTotal as exc:
        raise IncompleteRecovery(str(exc), report) from exc
    report.voted_total = total
    groups = _group_by_index(candidates, total)
    report.duplicates_merged = sum(len(group) - 1 for group in groups.values())

    grids = reconcile_candidates(candidates, spec)
    recovered_indices = {grid.frame_index for grid in grids}
    report.missing_indices = [i for i in range(total) if i not in recovered_indices]
    if report.missing_indices:
        raise IncompleteRecovery(
            f"{len(report.missing_indices)} of {total} data frames unrecovered", report
        )

    stream = np.concatenate([grid.cells.ravel() for grid in grids])
    ends = np.flatnonzero(stream == Symbol.END)
    if ends.size and bool((stream[ends[0]:] != Symbol.END).any()):
        raise CorruptPayload("payload symbols found after the END marker", report)
    try:
        payload = symbols_to_bytes(stream)
    except PrefixNotByteAligned as exc:
        raise CorruptPayload(str(exc), report) from exc
    report.recovered_bytes = len(payload)
    return payload, report
