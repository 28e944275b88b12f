import numpy as np
import pytest

from fbpstream.core import ConfigurationError, DataError, StreamBatch, TimeGrid, Window
from fbpstream.smoothing import SmoothingConfig, _fitter, smooth_batch, smooth_subsequence

GRID30 = TimeGrid(30)
T30 = np.arange(30.0)


@pytest.mark.parametrize("basis_size", [1, 2, 3, 4, 6, 10, 30])
def test_constant_is_reproduced(basis_size):
    curve = smooth_subsequence(np.full(30, 5.0), GRID30,
                               SmoothingConfig(basis_size=basis_size))
    assert np.allclose(curve.values, 5.0, atol=1e-9)


@pytest.mark.parametrize("basis_size", [2, 3, 4, 8, 30])
def test_line_in_span_is_reproduced(basis_size):
    raw = 2.0 * T30 + 1.0
    curve = smooth_subsequence(raw, GRID30, SmoothingConfig(basis_size=basis_size))
    assert np.max(np.abs(curve.values - raw)) < 1e-9


@pytest.mark.parametrize("basis_size", [4, 6, 10, 15])
def test_any_curve_in_span_is_reproduced(rng, basis_size):
    design, _ = _fitter(30, basis_size, 0.0)
    raw = design @ rng.normal(size=basis_size)
    curve = smooth_subsequence(raw, GRID30, SmoothingConfig(basis_size=basis_size))
    assert np.max(np.abs(curve.values - raw)) < 1e-9


def test_noisy_sine_fit_stays_close_to_truth():
    clean = np.sin(2 * np.pi * T30 / 30)
    cfg = SmoothingConfig(basis_size=8)
    for seed in range(100):
        noisy = clean + np.random.default_rng(seed).normal(0.0, 0.3, 30)
        fit = smooth_subsequence(noisy, GRID30, cfg).values
        assert np.sqrt(np.mean((fit - clean) ** 2)) < 0.3


def test_nested_basis_never_increases_rss(rng):
    # degrees 0..3 are nested polynomial spaces; 4 -> 5 -> 7 -> 11 are cubic
    # splines with nested dyadic knot sets
    raw = rng.normal(size=30).cumsum()

    def rss(k):
        fit = smooth_subsequence(raw, GRID30, SmoothingConfig(basis_size=k)).values
        return float(((fit - raw) ** 2).sum())

    chain = [rss(k) for k in (1, 2, 3, 4, 5, 7, 11)]
    for bigger_basis, smaller_basis in zip(chain[1:], chain):
        assert bigger_basis <= smaller_basis + 1e-9


def test_penalty_pulls_fit_away_from_data(rng):
    raw = rng.normal(size=30).cumsum()
    cfg0 = SmoothingConfig(basis_size=10, penalty_lambda=0.0)
    cfg1 = SmoothingConfig(basis_size=10, penalty_lambda=50.0)
    rss0 = ((smooth_subsequence(raw, GRID30, cfg0).values - raw) ** 2).sum()
    rss1 = ((smooth_subsequence(raw, GRID30, cfg1).values - raw) ** 2).sum()
    assert rss1 >= rss0


def test_disabled_passes_values_through_verbatim(rng):
    raw = rng.normal(size=30)
    curve = smooth_subsequence(raw, GRID30, SmoothingConfig(enabled=False))
    assert np.array_equal(curve.values, raw)


def test_config_errors():
    with pytest.raises(ConfigurationError):
        smooth_subsequence(np.zeros(30), GRID30, SmoothingConfig(basis_size=31))
    with pytest.raises(ConfigurationError):
        smooth_subsequence(np.zeros(30), GRID30, SmoothingConfig(basis_size=0))
    with pytest.raises(ConfigurationError):
        smooth_subsequence(np.zeros(30), GRID30, SmoothingConfig(penalty_lambda=-1.0))
    with pytest.raises(DataError):
        smooth_subsequence(np.array([np.nan] * 30), GRID30, SmoothingConfig())
    with pytest.raises(DataError):
        smooth_subsequence(np.zeros(10), GRID30, SmoothingConfig())


def test_default_basis_size_tracks_window():
    assert SmoothingConfig().resolve_basis_size(30) == 10
    assert SmoothingConfig().resolve_basis_size(8) == 6
    assert SmoothingConfig().resolve_basis_size(3) == 1


def test_batch_of_constants():
    batch = StreamBatch(Window(0, 30), np.stack([np.full(30, 1.0), np.full(30, 2.0)]))
    curves = smooth_batch(batch, SmoothingConfig(basis_size=5))
    assert np.allclose(curves[0].values, 1.0, atol=1e-9)
    assert np.allclose(curves[1].values, 2.0, atol=1e-9)


def test_batch_disabled_equals_raw_rows(rng):
    batch = StreamBatch(Window(0, 30), rng.normal(size=(4, 30)))
    curves = smooth_batch(batch, SmoothingConfig(enabled=False))
    for i, curve in enumerate(curves):
        assert np.array_equal(curve.values, batch.raw[i])


def test_batch_matches_per_stream_fit(rng):
    batch = StreamBatch(Window(0, 30), rng.normal(size=(7, 30)))
    cfg = SmoothingConfig(basis_size=9)
    curves = smooth_batch(batch, cfg)
    for i, curve in enumerate(curves):
        assert np.array_equal(curve.values,
                              smooth_subsequence(batch.raw[i], GRID30, cfg).values)


def test_paper_scale_batch(rng):
    batch = StreamBatch(Window(0, 30), rng.normal(size=(77, 30)))
    curves = smooth_batch(batch, SmoothingConfig())
    assert len(curves) == 77
    assert all(len(c.values) == 30 for c in curves)
