"""Off-line phase: weighted k-means-style grouping of recovered centroids.

Inputs are the slot-active micro-cluster centroids with their allocation
counts as weights.  The algorithm alternates nearest-centroid allocation
with a component-by-component weighted-average centroid update, and tracks
the weighted heterogeneity (sum of boxplot distances to the assigned macro
centroid, each multiplied by its weight).  An iteration that fails to
improve the criterion is rolled back, so the reported per-iteration values
never increase.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Curve, TimeGrid
from .fboxplot import FunctionalBoxplot
from .snapshot import SlotSummary, Snapshot, recover_slot, select_snapshots
from .stream import _trapezoid_weights


@dataclass(frozen=True)
class MacroSummary:
    """Final time-slot summaries: macro centroids plus the input partition."""

    centroids: tuple[FunctionalBoxplot, ...]
    labels: tuple[int, ...]
    delta: float
    iterations: int
    input_ids: tuple[int, ...]
    input_weights: tuple[int, ...]
    delta_trace: tuple[float, ...]


def _pairwise_to_centroids(stacks: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(m, c) distance matrix between input stacks and centroid stacks."""
    quad = _trapezoid_weights(stacks.shape[2])
    diff = stacks[:, None, :, :] - centroids[None, :, :, :]
    sq = (diff * diff) @ quad
    return np.sqrt(sq).sum(axis=2)


def _assign(stacks: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # np.argmin takes the first minimum, i.e. the lowest macro index on ties
    return np.argmin(_pairwise_to_centroids(stacks, centroids), axis=1)


def _repair_empties(labels: np.ndarray, stacks: np.ndarray, centroids: np.ndarray,
                    weights: np.ndarray) -> np.ndarray:
    """Give every empty macro cluster the input farthest (weighted) from its
    current centroid, never emptying the donor cluster."""
    n_clusters = centroids.shape[0]
    for c in range(n_clusters):
        if np.any(labels == c):
            continue
        counts = np.bincount(labels, minlength=n_clusters)
        dists = _pairwise_to_centroids(stacks, centroids)
        cost = weights * dists[np.arange(len(labels)), labels]
        movable = counts[labels] >= 2
        cost = np.where(movable, cost, -np.inf)
        labels = labels.copy()
        labels[int(np.argmax(cost))] = c
    return labels


def _weighted_means(stacks: np.ndarray, weights: np.ndarray, labels: np.ndarray,
                    n_clusters: int) -> np.ndarray:
    """Anchored, normalized accumulation: scaling every weight by a common
    factor leaves the result bit-identical, and a cluster of identical
    members reproduces the member exactly."""
    out = np.empty((n_clusters,) + stacks.shape[1:])
    for c in range(n_clusters):
        members = np.flatnonzero(labels == c)
        shares = weights[members] / weights[members].sum()
        base = stacks[members[0]]
        acc = np.zeros_like(base)
        for share, idx in zip(shares, members):
            acc += share * (stacks[idx] - base)
        out[c] = base + acc
    return out


def _cost(stacks: np.ndarray, weights: np.ndarray, labels: np.ndarray,
          centroids: np.ndarray) -> float:
    dists = _pairwise_to_centroids(stacks, centroids)
    return float((weights * dists[np.arange(len(labels)), labels]).sum())


def _farthest_first(stacks: np.ndarray, weights: np.ndarray, n_clusters: int,
                    seed: int) -> np.ndarray:
    """Seeded weighted farthest-first traversal.

    The first center is drawn with probability proportional to the weights;
    each further center is drawn proportionally to weight times distance to
    the nearest chosen center, so restarts with different seeds explore
    genuinely different spreads.
    """
    rng = np.random.default_rng(seed)
    m = stacks.shape[0]
    chosen = [int(rng.choice(m, p=weights / weights.sum()))]
    min_dist = _pairwise_to_centroids(stacks, stacks[[chosen[0]]])[:, 0]
    while len(chosen) < n_clusters:
        score = weights * min_dist
        score[chosen] = 0.0
        total = score.sum()
        if total > 0:
            nxt = int(rng.choice(m, p=score / total))
        else:  # all remaining inputs coincide with a chosen center
            nxt = min(i for i in range(m) if i not in chosen)
        chosen.append(nxt)
        min_dist = np.minimum(min_dist,
                              _pairwise_to_centroids(stacks, stacks[[nxt]])[:, 0])
    return stacks[chosen].copy()


def _stack_to_fbp(matrix: np.ndarray, template: FunctionalBoxplot,
                  weight: int) -> FunctionalBoxplot:
    grid = TimeGrid(matrix.shape[1])
    curves = [Curve(grid, row) for row in matrix]
    return FunctionalBoxplot(*curves, window=template.window,
                             n_source_curves=max(1, weight))


def _optimize_once(stacks: np.ndarray, weights: np.ndarray, n_clusters: int,
                   init_seed: int, max_iter: int, tol: float):
    """One allocation/averaging run from a seeded initialization.

    Stops on label stability, on a relative criterion decrease below ``tol``,
    or after ``max_iter`` iterations; a worsening iteration is rolled back
    before stopping, so the recorded per-iteration criterion never increases.
    """
    centroids = _farthest_first(stacks, weights, n_clusters, init_seed)
    labels = _assign(stacks, centroids)
    labels = _repair_empties(labels, stacks, centroids, weights)
    centroids = _weighted_means(stacks, weights, labels, n_clusters)
    delta = _cost(stacks, weights, labels, centroids)
    trace = [delta]

    for _ in range(1, max_iter):
        new_labels = _assign(stacks, centroids)
        new_labels = _repair_empties(new_labels, stacks, centroids, weights)
        if np.array_equal(new_labels, labels):
            break
        new_centroids = _weighted_means(stacks, weights, new_labels, n_clusters)
        new_delta = _cost(stacks, weights, new_labels, new_centroids)
        if new_delta > delta:
            break  # roll back: keep the previous, better state
        labels, centroids = new_labels, new_centroids
        improvement = delta - new_delta
        delta = new_delta
        trace.append(delta)
        if improvement <= tol * max(delta, 1e-30):
            break
    return labels, centroids, delta, trace


def macro_cluster(inputs: SlotSummary, n_clusters: int, seed: int = 0,
                  max_iter: int = 100, tol: float = 1e-6,
                  n_init: int = 10) -> MacroSummary:
    """Partition slot-active centroids into ``n_clusters`` weighted groups.

    Runs ``n_init`` seeded initializations and keeps the run with the lowest
    criterion; deterministic given the seed.
    """
    entries = list(inputs.entries)
    m = len(entries)
    if n_clusters < 1:
        raise ValueError(f"n_clusters must be >= 1, got {n_clusters}")
    if n_clusters > m:
        raise ValueError(f"n_clusters={n_clusters} exceeds the {m} available inputs")
    if n_init < 1:
        raise ValueError(f"n_init must be >= 1, got {n_init}")
    stacks = np.stack([e.centroid.component_matrix() for e in entries])
    weights = np.asarray([e.weight for e in entries], dtype=np.float64)

    init_seeds = np.random.default_rng(seed).integers(0, 2**63 - 1, size=n_init)
    labels = centroids = trace = None
    delta = np.inf
    for init_seed in init_seeds:
        run = _optimize_once(stacks, weights, n_clusters, int(init_seed),
                             max_iter, tol)
        if run[2] < delta:
            labels, centroids, delta, trace = run

    macro = tuple(
        _stack_to_fbp(centroids[c],
                      entries[int(np.argmax(labels == c))].centroid,
                      int(weights[labels == c].sum()))
        for c in range(n_clusters))
    return MacroSummary(
        centroids=macro,
        labels=tuple(int(v) for v in labels),
        delta=delta,
        iterations=len(trace),
        input_ids=tuple(e.cluster_id for e in entries),
        input_weights=tuple(e.weight for e in entries),
        delta_trace=tuple(trace),
    )


def summarize_slot(catalog: Sequence[Snapshot], t_lo: int, t_hi: int,
                   n_clusters: int, seed: int = 0, max_iter: int = 100,
                   tol: float = 1e-6, n_init: int = 10) -> MacroSummary:
    """Select the slot's snapshots, recover its activity, and macro-cluster.

    A slot with no activity yields an empty summary without running the
    clustering step.
    """
    lower, upper = select_snapshots(catalog, t_lo, t_hi)
    slot = recover_slot(lower, upper)
    if not slot.entries:
        return MacroSummary(centroids=(), labels=(), delta=0.0, iterations=0,
                            input_ids=(), input_weights=(), delta_trace=())
    return macro_cluster(slot, n_clusters, seed=seed, max_iter=max_iter,
                         tol=tol, n_init=n_init)
