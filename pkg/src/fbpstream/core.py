"""Shared domain types: canonical grids, curves, windows, and stream batches.

Every window of the stream is re-indexed onto the canonical domain
``{0, 1, ..., w-1}``; the shift that aligns two equal-size windows is fully
determined, so aligned comparison is plain pointwise comparison.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FbpStreamError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(FbpStreamError):
    """Invalid configuration or parameter value (CLI exit code 2)."""


class DataError(FbpStreamError):
    """Malformed or inconsistent input data (CLI exit code 3)."""


class QueryError(FbpStreamError):
    """A snapshot/slot query that cannot be answered (CLI exit code 4)."""


class InconsistencyError(QueryError):
    """Snapshot pair cannot be reconciled, e.g. a merge or discard occurred
    between the two snapshots of a slot query."""


def _readonly(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Canonical sampling grid of a window: points 0, 1, ..., w-1."""

    window_size_w: int

    def __post_init__(self) -> None:
        if self.window_size_w < 1:
            raise ConfigurationError(
                f"window size must be positive, got {self.window_size_w}")

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.window_size_w, dtype=np.float64)

    def __len__(self) -> int:
        return self.window_size_w


@dataclass(frozen=True, eq=False)
class Curve:
    """A real-valued function sampled on a canonical grid."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = _readonly(self.values)
        if values.ndim != 1 or values.shape[0] != len(self.grid):
            raise DataError(
                f"curve has {values.shape} values for a grid of length {len(self.grid)}")
        if not np.all(np.isfinite(values)):
            raise DataError("curve values must be finite")
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> "Curve":
        return Curve(self.grid, values)

    def __add__(self, other: "Curve") -> "Curve":
        if self.grid != other.grid:
            raise DataError("cannot add curves on different grids")
        return Curve(self.grid, self.values + other.values)

    def __mul__(self, scalar: float) -> "Curve":
        return Curve(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Curve):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class Window:
    """One non-overlapping window of the global time axis."""

    index_j: int
    size: int

    def __post_init__(self) -> None:
        if self.index_j < 0:
            raise ConfigurationError(f"window index must be >= 0, got {self.index_j}")
        if self.size < 1:
            raise ConfigurationError(f"window size must be positive, got {self.size}")

    @property
    def start_time(self) -> int:
        return self.index_j * self.size


@dataclass(frozen=True, eq=False)
class StreamBatch:
    """The raw values of all streams within one window: an (n, w) block."""

    window: Window
    raw: np.ndarray

    def __post_init__(self) -> None:
        raw = _readonly(self.raw)
        if raw.ndim != 2:
            raise DataError(f"batch must be 2-d (streams x samples), got shape {raw.shape}")
        if raw.shape[1] != self.window.size:
            raise DataError(
                f"batch rows have {raw.shape[1]} samples, window size is {self.window.size}")
        if raw.shape[0] < 1:
            raise DataError("batch must contain at least one stream")
        if not np.all(np.isfinite(raw)):
            raise DataError("batch values must be finite")
        object.__setattr__(self, "raw", raw)

    @property
    def n_streams(self) -> int:
        return int(self.raw.shape[0])


def canonicalize(window: Window) -> TimeGrid:
    """Map a window onto the canonical grid {0, ..., w-1}.

    Two windows of equal size map to the identical grid, so curves from
    different windows are compared pointwise after this re-indexing.
    """
    if window.size <= 1:
        raise ConfigurationError(
            f"window size must exceed 1 for a canonical grid, got {window.size}")
    return TimeGrid(window.size)
