from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fbpstream.core import Curve, TimeGrid, Window
from fbpstream.fboxplot import FunctionalBoxplot, build_fbp


def make_curves(rng: np.random.Generator, n: int, w: int, scale: float = 1.0,
                integer: bool = False) -> list[Curve]:
    grid = TimeGrid(w)
    if integer:
        values = rng.integers(-8, 9, size=(n, w)).astype(float)
    else:
        values = rng.normal(0.0, scale, size=(n, w))
    return [Curve(grid, row) for row in values]


def random_fbp(rng: np.random.Generator, w: int = 30, window_idx: int = 0,
               scale: float = 1.0) -> FunctionalBoxplot:
    """A valid boxplot built by pointwise-sorting five random rows."""
    rows = np.sort(rng.normal(0.0, scale, size=(5, w)), axis=0)
    grid = TimeGrid(w)
    return FunctionalBoxplot(*[Curve(grid, r) for r in rows],
                             window=Window(window_idx, w), n_source_curves=5)


def built_fbp(rng: np.random.Generator, n: int = 6, w: int = 30,
              window_idx: int = 0) -> FunctionalBoxplot:
    return build_fbp(make_curves(rng, n, w), Window(window_idx, w))


def constant_fbp(value: float, w: int = 30, window_idx: int = 0,
                 n_source: int = 1) -> FunctionalBoxplot:
    grid = TimeGrid(w)
    comps = [Curve(grid, np.full(w, float(value))) for _ in range(5)]
    return FunctionalBoxplot(*comps, window=Window(window_idx, w),
                             n_source_curves=n_source)


def planted_slot(seed: int, m: int, n_groups: int, w: int = 8,
                 separation: float = 2.0, scale: float = 1.0):
    """Slot-like inputs around planted group levels, with boundary noise."""
    from fbpstream.snapshot import SlotEntry, SlotSummary

    rng = np.random.default_rng(seed)
    centers = separation * np.arange(n_groups)
    entries = []
    for i in range(m):
        rows = np.sort(rng.normal(centers[i % n_groups], scale, (5, w)), axis=0)
        grid = TimeGrid(w)
        fbp = FunctionalBoxplot(*[Curve(grid, r) for r in rows],
                                window=Window(0, w), n_source_curves=5)
        entries.append(SlotEntry(i + 1, int(rng.integers(1, 9)), fbp))
    return SlotSummary(entries=tuple(entries), slot=(0, 10))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
