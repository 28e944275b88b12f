"""Reading multi-series sources window by window, and synthetic streams.

Two layouts are accepted: ``wide`` (one row per time instant, one value
column per series) and ``long`` (``time, series_id, value`` rows grouped by
time).  Batches are produced lazily so memory stays proportional to one
window regardless of stream length; a trailing partial window is dropped.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Mapping

import numpy as np

from .core import ConfigurationError, DataError, StreamBatch, Window

_GENERATORS = ("constant", "sine", "spike-mixture")


@dataclass(frozen=True)
class IngestConfig:
    """Source location and shape of the incoming data."""

    path: str | None = None  # None reads standard input (wide layout only)
    layout: str = "wide"
    window_size: int = 30
    delimiter: str = ","
    has_header: bool = False

    def __post_init__(self) -> None:
        if self.window_size < 2:
            raise ConfigurationError(
                f"window size must be >= 2, got {self.window_size}")
        if self.layout not in ("wide", "long"):
            raise ConfigurationError(f"unknown layout {self.layout!r}")
        if self.layout == "long" and self.path is None:
            raise ConfigurationError("standard input is accepted in wide layout only")
        if len(self.delimiter) != 1:
            raise ConfigurationError("delimiter must be a single character")


def _parse_float(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise DataError(f"line {line_no}: non-numeric value {token.strip()!r}") from None


def _wide_rows(lines: Iterator[tuple[int, str]], cfg: IngestConfig) -> Iterator[list[float]]:
    n_cols = None
    for line_no, line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        tokens = stripped.split(cfg.delimiter)
        if n_cols is None:
            n_cols = len(tokens)
        elif len(tokens) != n_cols:
            raise DataError(
                f"line {line_no}: expected {n_cols} columns, found {len(tokens)}")
        yield [_parse_float(tok, line_no) for tok in tokens]


def _long_rows(lines: Iterator[tuple[int, str]], cfg: IngestConfig) -> Iterator[list[float]]:
    """Collapse ``time, series_id, value`` rows into wide rows, one per time."""
    series_order: list[str] | None = None
    current_time: str | None = None
    block: dict[str, float] = {}
    block_line = 0

    def flush() -> list[float]:
        assert series_order is not None
        if set(block) != set(series_order):
            raise DataError(
                f"line {block_line}: timestamp {current_time!r} covers series "
                f"{sorted(block)} but the stream has {sorted(series_order)}")
        return [block[s] for s in series_order]

    for line_no, line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        tokens = stripped.split(cfg.delimiter)
        if len(tokens) != 3:
            raise DataError(f"line {line_no}: long layout needs 3 columns, found {len(tokens)}")
        t, sid, value = tokens[0].strip(), tokens[1].strip(), tokens[2]
        if current_time is None:
            current_time = t
        if t != current_time:
            if series_order is None:
                series_order = list(block)
            yield flush()
            current_time, block = t, {}
        if sid in block:
            raise DataError(f"line {line_no}: duplicate series {sid!r} at time {t!r}")
        block[sid] = _parse_float(value, line_no)
        block_line = line_no
    if block:
        if series_order is None:
            series_order = list(block)
        yield flush()


def read_batches(cfg: IngestConfig, source: IO[str] | None = None) -> Iterator[StreamBatch]:
    """Yield complete windows in order; the trailing partial window is dropped."""
    if source is not None:
        yield from _batches_from(source, cfg)
        return
    if cfg.path is None:
        import sys
        yield from _batches_from(sys.stdin, cfg)
        return
    path = Path(cfg.path)
    if not path.is_file():
        raise DataError(f"input file {path} does not exist")
    with path.open("r", encoding="utf-8") as handle:
        yield from _batches_from(handle, cfg)


def _batches_from(handle: IO[str], cfg: IngestConfig) -> Iterator[StreamBatch]:
    lines = ((i + 1, line) for i, line in enumerate(handle))
    if cfg.has_header:
        next(lines, None)
    rows = _wide_rows(lines, cfg) if cfg.layout == "wide" else _long_rows(lines, cfg)
    w = cfg.window_size
    pending: list[list[float]] = []
    n_streams = None
    index = 0
    for row in rows:
        if n_streams is None:
            n_streams = len(row)
        pending.append(row)
        if len(pending) == w:
            block = np.asarray(pending, dtype=np.float64).T  # (n, w)
            yield StreamBatch(Window(index, w), block)
            index += 1
            pending = []


@dataclass(frozen=True)
class Regime:
    """One homogeneous stretch of the synthetic stream, in window units."""

    start_window: int
    end_window: int
    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    noise_sd: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _GENERATORS:
            raise ConfigurationError(
                f"unknown generator {self.kind!r}, expected one of {_GENERATORS}")
        if self.end_window <= self.start_window:
            raise ConfigurationError(
                f"regime [{self.start_window}, {self.end_window}) is empty")
        if self.noise_sd < 0:
            raise ConfigurationError("noise_sd must be >= 0")


@dataclass(frozen=True)
class SynthSpec:
    """Deterministic synthetic stream: regimes must tile the window axis."""

    n_streams: int
    window_size: int
    regimes: tuple[Regime, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_streams < 1:
            raise ConfigurationError("n_streams must be >= 1")
        if self.window_size < 2:
            raise ConfigurationError("window_size must be >= 2")
        if not self.regimes:
            raise ConfigurationError("at least one regime is required")
        ordered = sorted(self.regimes, key=lambda r: r.start_window)
        if ordered[0].start_window != 0:
            raise ConfigurationError("regimes must start at window 0")
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.start_window != prev.end_window:
                raise ConfigurationError(
                    f"regimes must tile the window axis without overlap: "
                    f"[{prev.start_window}, {prev.end_window}) then "
                    f"[{cur.start_window}, {cur.end_window})")
        object.__setattr__(self, "regimes", tuple(ordered))

    @property
    def n_windows(self) -> int:
        return self.regimes[-1].end_window

    @property
    def total_length(self) -> int:
        return self.n_windows * self.window_size

    def window_labels(self) -> np.ndarray:
        """Regime index of each window, for validating recovered groupings."""
        labels = np.empty(self.n_windows, dtype=int)
        for k, regime in enumerate(self.regimes):
            labels[regime.start_window:regime.end_window] = k
        return labels


def _stream_offsets(n: int, spread: float) -> np.ndarray:
    if n == 1:
        return np.zeros((1, 1))
    centered = np.arange(n) - (n - 1) / 2.0
    return (spread * centered / (n - 1))[:, None]


def synth_values(spec: SynthSpec) -> np.ndarray:
    """The full (n_streams, total_length) value matrix, deterministic by seed."""
    rng = np.random.default_rng(spec.seed)
    n, w = spec.n_streams, spec.window_size
    out = np.empty((n, spec.total_length))
    for regime in spec.regimes:
        lo, hi = regime.start_window * w, regime.end_window * w
        t = np.arange(lo, hi, dtype=np.float64)[None, :]
        p = regime.params
        spread = float(p.get("spread", 0.0))
        if regime.kind == "constant":
            base = float(p.get("level", 0.0)) + np.zeros_like(t)
        elif regime.kind == "sine":
            period = float(p.get("period", w))
            base = (float(p.get("level", 0.0))
                    + float(p.get("amplitude", 1.0)) * np.sin(2 * np.pi * t / period))
        else:  # spike-mixture
            spikes = rng.random((n, hi - lo)) < float(p.get("spike_prob", 0.1))
            base = (float(p.get("base", 0.0))
                    + spikes * rng.exponential(float(p.get("spike_scale", 1.0)), (n, hi - lo)))
        block = base + _stream_offsets(n, spread)
        if regime.noise_sd > 0:
            block = block + rng.normal(0.0, regime.noise_sd, (n, hi - lo))
        out[:, lo:hi] = block
    return out


def synth_batches(spec: SynthSpec) -> Iterator[StreamBatch]:
    """Window-sized batches of the synthetic stream, without touching disk."""
    values = synth_values(spec)
    w = spec.window_size
    for j in range(spec.n_windows):
        yield StreamBatch(Window(j, w), values[:, j * w:(j + 1) * w])


def generate_synth(spec: SynthSpec, path: Path, delimiter: str = ",") -> Path:
    """Materialize the synthetic stream as a wide-layout text file."""
    values = synth_values(spec)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for t in range(values.shape[1]):
            handle.write(delimiter.join(f"{v:.17g}" for v in values[:, t]))
            handle.write("\n")
    return path


def parse_synth_spec(text: str) -> SynthSpec:
    """Build a :class:`SynthSpec` from its JSON document form."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid synthetic spec JSON: {exc}") from exc
    try:
        regimes = tuple(
            Regime(
                start_window=int(r["start_window"]),
                end_window=int(r["end_window"]),
                kind=str(r["kind"]),
                params={str(k): float(v) for k, v in r.get("params", {}).items()},
                noise_sd=float(r.get("noise_sd", 0.0)),
            )
            for r in doc["regimes"])
        return SynthSpec(
            n_streams=int(doc["n_streams"]),
            window_size=int(doc.get("window_size", 30)),
            regimes=regimes,
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"invalid synthetic spec: {exc!r}") from exc
