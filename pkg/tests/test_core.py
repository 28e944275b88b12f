import numpy as np
import pytest

from fbpstream.core import (ConfigurationError, Curve, DataError, StreamBatch,
                            TimeGrid, Window, canonicalize)


def test_canonicalize_small_window():
    grid = canonicalize(Window(0, 3))
    assert list(grid.points) == [0.0, 1.0, 2.0]
    assert len(grid) == 3


def test_equal_size_windows_share_one_grid():
    assert canonicalize(Window(0, 30)) == canonicalize(Window(5, 30))


def test_canonical_grid_default_window():
    grid = canonicalize(Window(2, 30))
    pts = grid.points
    assert len(pts) == 30
    assert pts.max() == 29.0
    assert np.all(np.diff(pts) == 1.0)


def test_canonicalize_rejects_degenerate_windows():
    with pytest.raises(ConfigurationError):
        canonicalize(Window(0, 1))
    with pytest.raises(ConfigurationError):
        Window(0, 0)


def test_window_start_time_is_nonoverlapping():
    assert Window(0, 30).start_time == 0
    assert Window(7, 30).start_time == 210


def test_curve_validation():
    grid = TimeGrid(4)
    with pytest.raises(DataError):
        Curve(grid, np.array([1.0, 2.0]))
    with pytest.raises(DataError):
        Curve(grid, np.array([1.0, np.nan, 0.0, 0.0]))
    with pytest.raises(DataError):
        Curve(grid, np.array([1.0, np.inf, 0.0, 0.0]))


def test_curve_values_are_immutable():
    curve = Curve(TimeGrid(3), np.array([1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        curve.values[0] = 9.0


def test_curve_arithmetic_exact():
    grid = TimeGrid(5)
    a = Curve(grid, np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
    b = Curve(grid, np.array([0.5, 0.25, -1.0, 2.0, 0.0]))
    assert np.array_equal((a + b).values, a.values + b.values)
    assert np.array_equal((2.0 * a).values, a.values * 2.0)
    with pytest.raises(DataError):
        a + Curve(TimeGrid(4), np.zeros(4))


def test_batch_validation():
    with pytest.raises(DataError):
        StreamBatch(Window(0, 5), np.zeros((2, 4)))
    with pytest.raises(DataError):
        StreamBatch(Window(0, 4), np.zeros(4))
    with pytest.raises(DataError):
        StreamBatch(Window(0, 4), np.full((2, 4), np.nan))
    batch = StreamBatch(Window(0, 4), np.arange(8.0).reshape(2, 4))
    assert batch.n_streams == 2
