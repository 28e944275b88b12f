"""Timestamped snapshots of the micro-cluster store and slot recovery.

Snapshots are plain text (format ``FBPSNAP v1``) so they can be archived,
diffed, and shipped between processes; values are written with 17
significant digits, which round-trips IEEE doubles exactly.  The state of a
time slot is recovered from the two snapshots closest to its ends by a
component-by-component weighted difference of the centroids.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Curve, DataError, InconsistencyError, QueryError, TimeGrid, Window
from .fboxplot import FunctionalBoxplot
from .stream import MicroClusterStore

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SnapshotRecord:
    cluster_id: int
    n_allocated: int
    last_update: int
    centroid: FunctionalBoxplot


@dataclass(frozen=True)
class Snapshot:
    """Immutable copy of every cluster record at one time instant."""

    taken_at: int
    window_size: int
    records: tuple[SnapshotRecord, ...]
    format_version: int = FORMAT_VERSION


@dataclass(frozen=True)
class SlotEntry:
    cluster_id: int
    weight: int
    centroid: FunctionalBoxplot


@dataclass(frozen=True)
class SlotSummary:
    """Per-cluster activity recovered for one time slot."""

    entries: tuple[SlotEntry, ...]
    slot: tuple[int, int]


def take_snapshot(store: MicroClusterStore, t_now: int) -> Snapshot:
    """Deep, immutable copy of the store's cluster records.

    Must be called at a quiescent point (between windows); the store is not
    modified.
    """
    records = []
    for c in store.clusters:
        # normalize provenance to what the wire format carries, so that
        # serialize-then-deserialize is the identity on records
        centroid = _rebuild_fbp(c.centroid.component_matrix().copy(),
                                Window(max(c.last_update, 0), c.centroid.width),
                                c.n_allocated)
        records.append(SnapshotRecord(c.id, c.n_allocated, c.last_update, centroid))
    w = store.window_size if store.window_size is not None else 0
    return Snapshot(taken_at=t_now, window_size=w, records=tuple(records))


def _rebuild_fbp(matrix: np.ndarray, window: Window, n_source: int) -> FunctionalBoxplot:
    grid = TimeGrid(matrix.shape[1])
    curves = [Curve(grid, row) for row in matrix]
    return FunctionalBoxplot(*curves, window=window, n_source_curves=n_source)


def _format_row(values: np.ndarray) -> str:
    return " ".join(f"{v:.17g}" for v in values)


def dumps(snapshot: Snapshot) -> str:
    """Serialize to the line-oriented FBPSNAP v1 text format."""
    lines = [f"FBPSNAP v{snapshot.format_version} taken_at={snapshot.taken_at} "
             f"w={snapshot.window_size} k={len(snapshot.records)}"]
    for rec in snapshot.records:
        lines.append(f"cluster id={rec.cluster_id} n={rec.n_allocated} tl={rec.last_update}")
        for component in rec.centroid.components():
            lines.append(_format_row(component.values))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Snapshot:
    """Parse FBPSNAP v1 text; inverse of :func:`dumps`, bit-exact on values."""
    lines = text.splitlines()
    if not lines:
        raise DataError("empty snapshot document")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "FBPSNAP" or header[1] != f"v{FORMAT_VERSION}":
        raise DataError(f"bad snapshot header: {lines[0]!r}")
    try:
        taken_at = int(header[2].removeprefix("taken_at="))
        w = int(header[3].removeprefix("w="))
    except ValueError as exc:
        raise DataError(f"bad snapshot header: {lines[0]!r}") from exc
    records = []
    pos = 1
    while pos < len(lines):
        fields = lines[pos].split()
        if len(fields) != 4 or fields[0] != "cluster":
            raise DataError(f"bad cluster line {pos + 1}: {lines[pos]!r}")
        try:
            cid = int(fields[1].removeprefix("id="))
            n = int(fields[2].removeprefix("n="))
            tl = int(fields[3].removeprefix("tl="))
        except ValueError as exc:
            raise DataError(f"bad cluster line {pos + 1}: {lines[pos]!r}") from exc
        if len(lines) - pos - 1 < 5:
            raise DataError(f"truncated snapshot: cluster id={cid}")
        rows = []
        for k in range(5):
            try:
                row = np.array([float(tok) for tok in lines[pos + 1 + k].split()])
            except ValueError as exc:
                raise DataError(f"bad value row at line {pos + 2 + k}") from exc
            if row.shape[0] != w:
                raise DataError(
                    f"row at line {pos + 2 + k} has {row.shape[0]} values, expected {w}")
            rows.append(row)
        centroid = _rebuild_fbp(np.stack(rows), Window(max(tl, 0), w), n)
        records.append(SnapshotRecord(cid, n, tl, centroid))
        pos += 6
    ids = [r.cluster_id for r in records]
    if len(set(ids)) != len(ids):
        raise DataError("duplicate cluster ids in snapshot")
    return Snapshot(taken_at=taken_at, window_size=w, records=tuple(records))


def snapshot_filename(taken_at: int) -> str:
    return f"snap_{taken_at:08d}.fbpsnap"


def save(snapshot: Snapshot, directory: Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / snapshot_filename(snapshot.taken_at)
    path.write_text(dumps(snapshot), encoding="utf-8", newline="\n")
    return path


def load_catalog(directory: Path) -> list[Snapshot]:
    """Load every ``*.fbpsnap`` file of a directory, ordered by time."""
    directory = Path(directory)
    if not directory.is_dir():
        raise QueryError(f"snapshot directory {directory} does not exist")
    snaps = [loads(p.read_text(encoding="utf-8"))
             for p in sorted(directory.glob("*.fbpsnap"))]
    return sorted(snaps, key=lambda s: s.taken_at)


def select_snapshots(catalog: Sequence[Snapshot], t_lo: int, t_hi: int) -> tuple[Snapshot, Snapshot]:
    """The snapshots temporally closest to the two ends of a slot.

    Ties go to the earlier snapshot.  A slot whose two ends resolve to the
    same or inverted snapshots cannot be recovered.
    """
    if not catalog:
        raise QueryError("snapshot catalog is empty")
    ordered = sorted(catalog, key=lambda s: s.taken_at)
    lower = min(ordered, key=lambda s: (abs(s.taken_at - t_lo), s.taken_at))
    upper = min(ordered, key=lambda s: (abs(s.taken_at - t_hi), s.taken_at))
    if lower.taken_at >= upper.taken_at:
        raise QueryError(
            f"degenerate slot [{t_lo}, {t_hi}]: resolved snapshots "
            f"{lower.taken_at} and {upper.taken_at}")
    return lower, upper


def recover_slot(lower: Snapshot, upper: Snapshot) -> SlotSummary:
    """Remove pre-slot history from the upper snapshot's centroids.

    Clusters present in both snapshots contribute the weighted difference
    ``(n_u * c_u - n_l * c_l) / (n_u - n_l)`` with weight ``n_u - n_l``;
    clusters born within the slot enter as-is; clusters untouched during the
    slot are omitted.  A cluster whose count decreased signals a merge or
    discard between the snapshots and raises :class:`InconsistencyError`.
    """
    if lower.taken_at >= upper.taken_at:
        raise QueryError("lower snapshot must precede the upper snapshot")
    lower_by_id = {r.cluster_id: r for r in lower.records}
    entries = []
    for rec in sorted(upper.records, key=lambda r: r.cluster_id):
        prev = lower_by_id.get(rec.cluster_id)
        if prev is None:
            entries.append(SlotEntry(rec.cluster_id, rec.n_allocated, rec.centroid))
            continue
        if rec.n_allocated < prev.n_allocated:
            raise InconsistencyError(
                f"cluster {rec.cluster_id} shrank from {prev.n_allocated} to "
                f"{rec.n_allocated} between snapshots {lower.taken_at} and "
                f"{upper.taken_at}; a merge or discard occurred (see the event log)")
        if rec.n_allocated == prev.n_allocated:
            continue
        n_u, n_l = rec.n_allocated, prev.n_allocated
        matrix = (n_u * rec.centroid.component_matrix()
                  - n_l * prev.centroid.component_matrix()) / (n_u - n_l)
        centroid = _rebuild_fbp(matrix, rec.centroid.window, max(1, n_u - n_l))
        entries.append(SlotEntry(rec.cluster_id, n_u - n_l, centroid))
    return SlotSummary(entries=tuple(entries), slot=(lower.taken_at, upper.taken_at))
