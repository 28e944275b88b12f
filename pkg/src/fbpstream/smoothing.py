"""Penalized least-squares smoothing of raw subsequences.

Each raw window is modeled as a smooth trend plus zero-mean residuals.  The
trend is fit on a piecewise-polynomial (B-spline) basis with equally spaced
knots; the roughness penalty is the squared second difference of the basis
coefficients, so ``penalty_lambda=0`` is plain least squares.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import cho_factor, cho_solve

from .core import ConfigurationError, Curve, DataError, StreamBatch, TimeGrid, canonicalize


@dataclass(frozen=True)
class SmoothingConfig:
    """Basis size, roughness-penalty weight, and an escape hatch.

    ``basis_size=None`` resolves to ``min(10, w-2)`` for a window of size w.
    With ``enabled=False`` the raw values are passed through verbatim, which
    makes exact end-to-end pipeline tests possible.
    """

    basis_size: int | None = None
    penalty_lambda: float = 0.0
    enabled: bool = True

    def resolve_basis_size(self, w: int) -> int:
        k = self.basis_size if self.basis_size is not None else min(10, max(1, w - 2))
        if k < 1:
            raise ConfigurationError(f"basis_size must be >= 1, got {k}")
        if k > w:
            raise ConfigurationError(f"basis_size {k} exceeds window size {w}")
        if not np.isfinite(self.penalty_lambda) or self.penalty_lambda < 0:
            raise ConfigurationError(
                f"penalty_lambda must be a finite nonnegative real, got {self.penalty_lambda}")
        return k


@lru_cache(maxsize=64)
def _fitter(w: int, basis_size: int, penalty_lambda: float):
    """Design matrix and the smoother ("hat") matrix of the penalized fit."""
    x = np.arange(w, dtype=np.float64)
    degree = min(3, basis_size - 1)
    n_interior = basis_size - degree - 1
    interior = np.linspace(0.0, w - 1.0, n_interior + 2)[1:-1]
    knots = np.concatenate([np.zeros(degree + 1), interior,
                            np.full(degree + 1, float(w - 1))])
    design = BSpline.design_matrix(x, knots, degree, extrapolate=False).toarray()
    gram = design.T @ design
    if basis_size >= 3 and penalty_lambda > 0:
        d2 = np.diff(np.eye(basis_size), n=2, axis=0)
        gram = gram + penalty_lambda * (d2.T @ d2)
    hat = design @ cho_solve(cho_factor(gram), design.T)
    return design, hat


def smooth_subsequence(raw: np.ndarray, grid: TimeGrid, cfg: SmoothingConfig) -> Curve:
    """Fit one raw subsequence and return the fitted curve on ``grid``."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 1 or raw.shape[0] != len(grid):
        raise DataError(f"raw subsequence has shape {raw.shape}, expected ({len(grid)},)")
    if not np.all(np.isfinite(raw)):
        raise DataError("raw subsequence contains non-finite values")
    if not cfg.enabled:
        return Curve(grid, raw)
    basis_size = cfg.resolve_basis_size(len(grid))
    _, hat = _fitter(len(grid), basis_size, float(cfg.penalty_lambda))
    return Curve(grid, hat @ raw)


def smooth_batch(batch: StreamBatch, cfg: SmoothingConfig) -> list[Curve]:
    """Fit every stream of one window; output order matches stream order."""
    grid = canonicalize(batch.window)
    curves = []
    for i in range(batch.n_streams):
        try:
            curves.append(smooth_subsequence(batch.raw[i], grid, cfg))
        except DataError as exc:
            raise DataError(f"stream {i}: {exc}") from exc
    return curves
