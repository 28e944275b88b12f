"""Streaming summarization of parallel time series via functional-boxplot
micro-clusters: an on-line windowed micro-clustering phase plus an off-line
snapshot-based slot summarization phase."""

__version__ = "0.1.0"

from .core import (ConfigurationError, Curve, DataError, FbpStreamError,
                   InconsistencyError, QueryError, StreamBatch, TimeGrid,
                   Window, canonicalize)
from .depth import DepthResult, band_depth, compute_depth, modified_band_depth
from .engine import EngineConfig, RunReport, StreamEngine
from .fboxplot import (FenceConfig, FunctionalBoxplot, build_fbp,
                       central_region, mean_fbp)
from .ingest import IngestConfig, Regime, SynthSpec, generate_synth, read_batches
from .macrocluster import MacroSummary, macro_cluster, summarize_slot
from .smoothing import SmoothingConfig, smooth_batch, smooth_subsequence
from .snapshot import (SlotEntry, SlotSummary, Snapshot, SnapshotRecord,
                       recover_slot, select_snapshots, take_snapshot)
from .stream import (AllocationOutcome, FbpMicroCluster, MicroClusterStore,
                     StructuralEvent, compute_threshold, fbp_distance,
                     process_window)
from .svg import SvgStyle, render_fbp_svg

__all__ = [
    "__version__",
    "AllocationOutcome", "ConfigurationError", "Curve", "DataError",
    "DepthResult", "EngineConfig", "FbpMicroCluster", "FbpStreamError",
    "FenceConfig", "FunctionalBoxplot", "IngestConfig", "InconsistencyError",
    "MacroSummary", "MicroClusterStore", "QueryError", "Regime", "RunReport",
    "SlotEntry", "SlotSummary", "SmoothingConfig", "Snapshot",
    "SnapshotRecord", "StreamBatch", "StreamEngine", "StructuralEvent",
    "SvgStyle", "SynthSpec", "TimeGrid", "Window",
    "band_depth", "build_fbp", "canonicalize", "central_region",
    "compute_depth", "compute_threshold", "fbp_distance", "generate_synth",
    "macro_cluster", "mean_fbp", "modified_band_depth", "process_window",
    "read_batches", "recover_slot", "render_fbp_svg", "select_snapshots",
    "smooth_batch", "smooth_subsequence", "summarize_slot", "take_snapshot",
]
