"""Run-level orchestration of the on-line phase.

A :class:`StreamEngine` owns one micro-cluster store, applies the
smooth/build/allocate step to every incoming window, and keeps a snapshot
catalog on the configured schedule.  The time axis is the window index; a
snapshot with ``taken_at = t`` captures the state after the first ``t``
windows, so the catalog always starts with an empty snapshot at time 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ConfigurationError, DataError, StreamBatch, Window
from .fboxplot import FenceConfig
from .smoothing import SmoothingConfig
from .snapshot import Snapshot, take_snapshot
from .stream import AllocationOutcome, MicroClusterStore, process_window


@dataclass(frozen=True)
class EngineConfig:
    """Everything the on-line phase needs, with the documented defaults."""

    window_size: int = 30
    k_max: int = 50
    t_star: int = 50
    snapshot_every: int = 10
    depth_kind: str = "mbd"
    fence: FenceConfig = field(default_factory=FenceConfig)
    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)

    def __post_init__(self) -> None:
        if self.window_size < 2:
            raise ConfigurationError(
                f"window_size must be >= 2, got {self.window_size}")
        if self.snapshot_every < 1:
            raise ConfigurationError(
                f"snapshot_every must be >= 1, got {self.snapshot_every}")
        if self.depth_kind not in ("mbd", "bd"):
            raise ConfigurationError(
                f"depth_kind must be 'mbd' or 'bd', got {self.depth_kind!r}")
        # smoothing basis bounds depend on the window size; fail fast here
        self.smoothing.resolve_basis_size(self.window_size)


@dataclass(frozen=True)
class RunReport:
    """Aggregate outcome of a run, matching the printed allocation table."""

    windows_processed: int
    final_k: int
    allocations: tuple[tuple[int, int, int], ...]  # (cluster id, n_allocated, last_update)
    creates: int
    merges: int
    discards: int
    discarded_weight: int
    wall_time_s: float | None = None


class StreamEngine:
    """Single-writer pipeline state: store, window counter, snapshot catalog."""

    def __init__(self, config: EngineConfig) -> None:
        self.config = config
        self.store = MicroClusterStore(
            k_max=config.k_max, t_star=config.t_star, window_size=config.window_size)
        self.windows_processed = 0
        self.n_streams: int | None = None
        self.snapshots: list[Snapshot] = [take_snapshot(self.store, 0)]

    def process_rows(self, rows: np.ndarray) -> tuple[AllocationOutcome, Snapshot | None]:
        """Apply one window's raw block (n_streams x window_size)."""
        batch = StreamBatch(Window(self.windows_processed, self.config.window_size),
                            np.asarray(rows, dtype=np.float64))
        return self.process_batch(batch)

    def process_batch(self, batch: StreamBatch) -> tuple[AllocationOutcome, Snapshot | None]:
        if batch.window.index_j != self.windows_processed:
            raise DataError(
                f"expected window {self.windows_processed}, got {batch.window.index_j}")
        if self.n_streams is None:
            self.n_streams = batch.n_streams
        elif batch.n_streams != self.n_streams:
            raise DataError(
                f"stream count changed from {self.n_streams} to {batch.n_streams}")
        outcome = process_window(self.store, batch, self.config.smoothing,
                                 self.config.depth_kind, self.config.fence)
        self.windows_processed += 1
        snap = None
        if self.windows_processed % self.config.snapshot_every == 0:
            snap = take_snapshot(self.store, self.windows_processed)
            self.snapshots.append(snap)
        return outcome, snap

    def take_snapshot_now(self) -> Snapshot:
        """Snapshot the current state; reuses the latest one if up to date."""
        if self.snapshots and self.snapshots[-1].taken_at == self.windows_processed:
            return self.snapshots[-1]
        snap = take_snapshot(self.store, self.windows_processed)
        self.snapshots.append(snap)
        return snap

    def report(self, wall_time_s: float | None = None) -> RunReport:
        events = self.store.event_log
        return RunReport(
            windows_processed=self.windows_processed,
            final_k=len(self.store),
            allocations=tuple((c.id, c.n_allocated, c.last_update)
                              for c in self.store.clusters),
            creates=sum(1 for e in events if e.kind == "create"),
            merges=sum(1 for e in events if e.kind == "merge"),
            discards=sum(1 for e in events if e.kind == "discard"),
            discarded_weight=self.store.discarded_total(),
            wall_time_s=wall_time_s,
        )


def format_report(report: RunReport) -> str:
    """Aligned, deterministic text form of a run report (no wall time)."""
    lines = [
        f"windows processed : {report.windows_processed}",
        f"clusters (K)      : {report.final_k}",
        f"creates           : {report.creates}",
        f"merges            : {report.merges}",
        f"discards          : {report.discards}",
        f"discarded weight  : {report.discarded_weight}",
        "",
        f"{'cluster':>8}  {'n_allocated':>12}  {'last_update':>12}",
    ]
    for cid, n, tl in report.allocations:
        lines.append(f"{cid:>8}  {n:>12}  {tl:>12}")
    return "\n".join(lines) + "\n"


def report_to_tsv(report: RunReport) -> str:
    lines = ["cluster_id\tn_allocated\tlast_update"]
    for cid, n, tl in report.allocations:
        lines.append(f"{cid}\t{n}\t{tl}")
    return "\n".join(lines) + "\n"
