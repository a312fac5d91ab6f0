"""frame-courier: a file <-> video visual-channel codec and channel test bench.

Encode any file into a sequence of black/white/gray symbol frames wrapped
in a detectable container, and recover the file byte-exactly from a
degraded re-recording of that video.
"""

from . import errors
from .bitstream import (
    DataFrameGrid,
    Symbol,
    bytes_to_symbols,
    chunk_to_frames,
    symbols_to_bytes,
)
from .channel import ChannelConfig, SweepRow, apply_channel, sweep, sweep_to_csv
from .framing import (
    FrameCandidate,
    build_label_grid,
    compose_info_grid,
    parse_label_grid,
    split_info_grid,
)
from .locate import (
    RegionBox,
    binarize,
    locate_container,
    median_denoise,
    normalize_region,
    resample_area,
)
from .pipeline import (
    DecodeReport,
    decode_sequence,
    encode_file,
    reconcile_candidates,
)
from .raster import (
    CodecSpec,
    mean_pool,
    quantize_ternary,
    quantize_ternary_grid,
    scale_up,
    strip_container,
    wrap_container,
)
from .videoio import FrameSequence, read_y4m, schedule_frames, write_y4m

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "CodecSpec",
    "DataFrameGrid",
    "DecodeReport",
    "FrameCandidate",
    "FrameSequence",
    "RegionBox",
    "SweepRow",
    "Symbol",
    "apply_channel",
    "binarize",
    "build_label_grid",
    "bytes_to_symbols",
    "chunk_to_frames",
    "compose_info_grid",
    "decode_sequence",
    "encode_file",
    "errors",
    "locate_container",
    "mean_pool",
    "median_denoise",
    "normalize_region",
    "parse_label_grid",
    "quantize_ternary",
    "quantize_ternary_grid",
    "read_y4m",
    "reconcile_candidates",
    "resample_area",
    "scale_up",
    "schedule_frames",
    "split_info_grid",
    "strip_container",
    "sweep",
    "sweep_to_csv",
    "symbols_to_bytes",
    "wrap_container",
    "write_y4m",
]
