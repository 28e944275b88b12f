"""Functional boxplots: five-curve summaries of one window's curve set.

The five components, ordered pointwise from bottom to top, are the lower
whisker envelope, the lower bound of the 50% central region, the median
curve, the upper bound of the central region, and the upper whisker
envelope.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Curve, DataError, Window
from .depth import DepthResult, compute_depth

COMPONENT_NAMES = ("envelope_min", "box_lower", "median", "box_upper", "envelope_max")


@dataclass(frozen=True, eq=False)
class FunctionalBoxplot:
    """Five component curves plus provenance of the summarized window."""

    envelope_min: Curve
    box_lower: Curve
    median: Curve
    box_upper: Curve
    envelope_max: Curve
    window: Window
    n_source_curves: int

    def __post_init__(self) -> None:
        grid = self.median.grid
        for name in COMPONENT_NAMES:
            if getattr(self, name).grid != grid:
                raise DataError("all five components must share one grid")
        if self.n_source_curves < 1:
            raise DataError("n_source_curves must be >= 1")

    @property
    def width(self) -> int:
        return len(self.median.grid)

    def components(self) -> tuple[Curve, Curve, Curve, Curve, Curve]:
        return (self.envelope_min, self.box_lower, self.median,
                self.box_upper, self.envelope_max)

    def component_matrix(self) -> np.ndarray:
        """The five component value rows stacked into a read-only (5, w)
        array; cached, since boxplots are immutable."""
        cached = self.__dict__.get("_matrix")
        if cached is None:
            cached = np.stack([c.values for c in self.components()])
            cached.setflags(write=False)
            object.__setattr__(self, "_matrix", cached)
        return cached

    def is_ordered(self, tol: float = 0.0) -> bool:
        m = self.component_matrix()
        return bool(np.all(np.diff(m, axis=0) >= -tol))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FunctionalBoxplot):
            return NotImplemented
        return (self.window == other.window
                and self.n_source_curves == other.n_source_curves
                and np.array_equal(self.component_matrix(), other.component_matrix()))


@dataclass(frozen=True)
class FenceConfig:
    """Whisker rule: how far beyond the box a curve may go before it is
    dropped from the envelope."""

    fence_factor: float = 1.5
    outlier_removal: bool = True

    def __post_init__(self) -> None:
        if not self.fence_factor >= 0:
            raise DataError(f"fence_factor must be >= 0, got {self.fence_factor}")


def central_region(curves: Sequence[Curve], depth: DepthResult) -> tuple[Curve, Curve]:
    """Pointwise min/max band of the ceil(n/2) deepest curves."""
    n = len(curves)
    if n == 0:
        raise ValueError("central region requires at least one curve")
    if depth.ranking.shape[0] != n:
        raise ValueError("depth result does not match the curve set")
    deepest = depth.ranking[: (n + 1) // 2]
    block = np.stack([curves[i].values for i in deepest])
    grid = curves[0].grid
    return Curve(grid, block.min(axis=0)), Curve(grid, block.max(axis=0))


def build_fbp(curves: Sequence[Curve], window: Window, depth_kind: str = "mbd",
              fence: FenceConfig = FenceConfig()) -> FunctionalBoxplot:
    """Construct the functional boxplot of one window's curves.

    The median is the deepest curve.  With outlier removal on, a curve is an
    outlier as soon as it leaves the box inflated by ``fence_factor`` box
    heights at any single grid point; the whisker envelopes are the pointwise
    min/max of the remaining curves.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("cannot build a functional boxplot from zero curves")
    depth = compute_depth(curves, depth_kind)
    box_lower, box_upper = central_region(curves, depth)
    median = curves[int(depth.ranking[0])]

    values = np.stack([c.values for c in curves])
    if fence.outlier_removal and np.isfinite(fence.fence_factor):
        height = box_upper.values - box_lower.values
        hi_fence = box_upper.values + fence.fence_factor * height
        lo_fence = box_lower.values - fence.fence_factor * height
        outlier = np.any((values > hi_fence) | (values < lo_fence), axis=1)
        keep = values[~outlier]
        if keep.shape[0] == 0:  # degenerate guard; the deepest set never trips the fence
            env_lo, env_hi = box_lower.values, box_upper.values
        else:
            env_lo, env_hi = keep.min(axis=0), keep.max(axis=0)
    else:
        env_lo, env_hi = values.min(axis=0), values.max(axis=0)

    grid = curves[0].grid
    return FunctionalBoxplot(
        envelope_min=Curve(grid, env_lo),
        box_lower=box_lower,
        median=median,
        box_upper=box_upper,
        envelope_max=Curve(grid, env_hi),
        window=window,
        n_source_curves=len(curves),
    )


def mean_fbp(fbps: Sequence[FunctionalBoxplot], weights: Sequence[float]) -> FunctionalBoxplot:
    """Weighted pointwise mean of functional boxplots, component by component."""
    fbps = list(fbps)
    if not fbps:
        raise ValueError("mean_fbp requires at least one boxplot")
    if len(weights) != len(fbps):
        raise ValueError("one weight per boxplot is required")
    wts = np.asarray(weights, dtype=np.float64)
    if np.any(wts <= 0):
        raise ValueError("weights must be positive")
    width = fbps[0].width
    for f in fbps:
        if f.width != width:
            raise DataError("cannot average boxplots on grids of different sizes")
    stacks = [f.component_matrix() for f in fbps]
    # anchored accumulation: exact when all inputs coincide, and every grid
    # point sees the same operation sequence (BLAS reductions do not)
    base = stacks[0]
    acc = np.zeros_like(base)
    for w, stack in zip(wts, stacks):
        acc += w * (stack - base)
    avg = base + acc / wts.sum()
    grid = fbps[0].median.grid
    return FunctionalBoxplot(
        envelope_min=Curve(grid, avg[0]),
        box_lower=Curve(grid, avg[1]),
        median=Curve(grid, avg[2]),
        box_upper=Curve(grid, avg[3]),
        envelope_max=Curve(grid, avg[4]),
        window=fbps[-1].window,
        n_source_curves=max(1, int(round(float(wts.sum())))),
    )
