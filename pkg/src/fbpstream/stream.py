"""On-line phase: boxplot distance, the micro-cluster store, and allocation.

One micro-cluster keeps a centroid boxplot (the running mean of everything
allocated to it), an allocation count, and the stamp of its last update.
An incoming window's boxplot joins the nearest cluster when its distance is
below the global threshold (the minimum distance between centroids);
otherwise it starts a new cluster.  When the store is full, a stale cluster
is discarded, or failing that, the two nearest clusters are merged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, DataError, StreamBatch
from .fboxplot import FenceConfig, FunctionalBoxplot, build_fbp, mean_fbp
from .smoothing import SmoothingConfig, smooth_batch


def _trapezoid_weights(w: int) -> np.ndarray:
    wts = np.ones(w)
    wts[0] = wts[-1] = 0.5
    return wts


def fbp_distance(a: FunctionalBoxplot, b: FunctionalBoxplot) -> float:
    """Sum over the five component pairs of the L2 distance between them.

    Each component term is sqrt of the integral of the squared pointwise
    difference, evaluated by the trapezoidal rule on the canonical unit-step
    grid.  This is a metric on grid-sampled boxplots.
    """
    if a.width != b.width:
        raise DataError(
            f"cannot compare boxplots on grids of sizes {a.width} and {b.width}")
    diff = a.component_matrix() - b.component_matrix()
    sq_integrals = (diff * diff) @ _trapezoid_weights(a.width)
    return float(np.sqrt(sq_integrals).sum())


def _distances_to(stack: np.ndarray, stacks: np.ndarray) -> np.ndarray:
    """Distances from one (5, w) component stack to many (k, 5, w) stacks."""
    diff = stacks - stack[None, :, :]
    sq = (diff * diff) @ _trapezoid_weights(stack.shape[1])
    return np.sqrt(sq).sum(axis=1)


@dataclass
class FbpMicroCluster:
    """Centroid boxplot, allocation count, and last-update window stamp."""

    id: int
    centroid: FunctionalBoxplot
    n_allocated: int
    last_update: int


@dataclass(frozen=True)
class StructuralEvent:
    """One create/merge/discard, with the allocation weight involved."""

    t: int
    kind: str  # "create" | "merge" | "discard"
    ids: tuple[int, ...]
    n: int


@dataclass(frozen=True)
class AllocationOutcome:
    kind: str  # "assigned" | "created" | "created_after_evict"
    cluster_id: int
    evicted: StructuralEvent | None = None


class MicroClusterStore:
    """Bounded set of micro-clusters maintained in stream order.

    Single-writer: exactly one caller applies ``allocate`` in window order.
    The threshold is recomputed only on structural changes (create, merge,
    discard), not on plain allocations.
    """

    def __init__(self, k_max: int = 50, t_star: int = 50,
                 window_size: int | None = None) -> None:
        if k_max < 2:
            raise ConfigurationError(f"k_max must be >= 2, got {k_max}")
        if t_star < 1:
            raise ConfigurationError(f"t_star must be >= 1, got {t_star}")
        self.k_max = k_max
        self.t_star = t_star
        self.window_size = window_size
        self.clusters: list[FbpMicroCluster] = []
        self.threshold: float | None = None
        self.event_log: list[StructuralEvent] = []
        self._next_id = 1
        self._last_t: int | None = None

    def __len__(self) -> int:
        return len(self.clusters)

    def _centroid_stacks(self) -> np.ndarray:
        return np.stack([c.centroid.component_matrix() for c in self.clusters])

    def _pairwise_centroid_distances(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Upper-triangle centroid distances, same arithmetic as fbp_distance."""
        stacks = self._centroid_stacks()
        i_idx, j_idx = np.triu_indices(len(self.clusters), k=1)
        diff = stacks[i_idx] - stacks[j_idx]
        sq = (diff * diff) @ _trapezoid_weights(stacks.shape[2])
        return i_idx, j_idx, np.sqrt(sq).sum(axis=1)

    def _recompute_threshold(self) -> None:
        if len(self.clusters) < 2:
            self.threshold = None
            return
        _, _, dists = self._pairwise_centroid_distances()
        self.threshold = float(dists.min())

    def _log(self, event: StructuralEvent) -> StructuralEvent:
        self.event_log.append(event)
        return event

    def _create(self, fbp: FunctionalBoxplot, t_now: int) -> int:
        cid = self._next_id
        self._next_id += 1
        self.clusters.append(FbpMicroCluster(cid, fbp, 1, t_now))
        self._log(StructuralEvent(t_now, "create", (cid,), 1))
        self._recompute_threshold()
        return cid

    def allocate(self, fbp: FunctionalBoxplot, t_now: int) -> AllocationOutcome:
        """Allocate one window's boxplot: join the nearest cluster if its
        distance is below the threshold, otherwise start a new cluster.

        With fewer than two clusters the threshold is undefined, so incoming
        boxplots create clusters until there are two (bootstrap rule).
        """
        if self.window_size is None:
            self.window_size = fbp.width
        elif fbp.width != self.window_size:
            raise DataError(
                f"boxplot width {fbp.width} does not match store window size {self.window_size}")
        if self._last_t is not None and t_now <= self._last_t:
            raise ValueError(
                f"allocation timestamps must be strictly increasing ({t_now} after {self._last_t})")
        self._last_t = t_now

        if len(self.clusters) >= 2:
            dists = _distances_to(fbp.component_matrix(), self._centroid_stacks())
            best = min(range(len(self.clusters)),
                       key=lambda i: (dists[i], self.clusters[i].id))
            if dists[best] < self.threshold:
                cluster = self.clusters[best]
                cluster.centroid = mean_fbp(
                    [cluster.centroid, fbp], [cluster.n_allocated, 1])
                cluster.n_allocated += 1
                cluster.last_update = t_now
                return AllocationOutcome("assigned", cluster.id)

        evicted = None
        if len(self.clusters) == self.k_max:
            evicted = self.evict_or_merge(t_now)
        cid = self._create(fbp, t_now)
        if evicted is not None:
            return AllocationOutcome("created_after_evict", cid, evicted)
        return AllocationOutcome("created", cid)

    def evict_or_merge(self, t_now: int) -> StructuralEvent:
        """Make room for a pending creation: discard the stalest cluster
        older than ``t_star``, or merge the two nearest clusters."""
        if not self.clusters:
            raise ValueError("evict_or_merge on an empty store")
        ages = [(t_now - c.last_update, c) for c in self.clusters]
        stale = [(age, c) for age, c in ages if age > self.t_star]
        if stale:
            _, victim = max(stale, key=lambda pair: (pair[0], -pair[1].id))
            self.clusters.remove(victim)
            event = self._log(StructuralEvent(
                t_now, "discard", (victim.id,), victim.n_allocated))
        else:
            i_idx, j_idx, dists = self._pairwise_centroid_distances()
            pairs = [(dists[p], self.clusters[i].id, self.clusters[j].id, i, j)
                     for p, (i, j) in enumerate(zip(i_idx, j_idx))]
            _, _, _, i, j = min(pairs)
            keep, gone = self.clusters[i], self.clusters[j]
            total = keep.n_allocated + gone.n_allocated
            keep.centroid = mean_fbp([keep.centroid, gone.centroid],
                                     [keep.n_allocated, gone.n_allocated])
            keep.n_allocated = total
            keep.last_update = max(keep.last_update, gone.last_update)
            self.clusters.remove(gone)
            event = self._log(StructuralEvent(
                t_now, "merge", (keep.id, gone.id), total))
        self._recompute_threshold()
        return event

    def allocation_total(self) -> int:
        return sum(c.n_allocated for c in self.clusters)

    def discarded_total(self) -> int:
        return sum(e.n for e in self.event_log if e.kind == "discard")


def compute_threshold(clusters: list[FbpMicroCluster]) -> float:
    """Minimum pairwise distance between cluster centroids."""
    if len(clusters) < 2:
        raise ValueError("the threshold is undefined for fewer than two clusters")
    best = None
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            d = fbp_distance(clusters[i].centroid, clusters[j].centroid)
            best = d if best is None else min(best, d)
    return float(best)


def events_to_text(events: list[StructuralEvent]) -> str:
    """Render the structural event log as tab-delimited text for audit."""
    lines = ["t\tkind\tids\tn"]
    for e in events:
        lines.append(f"{e.t}\t{e.kind}\t{','.join(str(i) for i in e.ids)}\t{e.n}")
    return "\n".join(lines) + "\n"


def process_window(store: MicroClusterStore, batch: StreamBatch,
                   smoothing: SmoothingConfig = SmoothingConfig(),
                   depth_kind: str = "mbd",
                   fence: FenceConfig = FenceConfig()) -> AllocationOutcome:
    """Full per-window step: smooth the batch, build its boxplot, allocate."""
    curves = smooth_batch(batch, smoothing)
    fbp = build_fbp(curves, batch.window, depth_kind, fence)
    return store.allocate(fbp, batch.window.index_j)
