"""Time-series container, CSV ingestion, resampling and subsequence distances."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

JITTER_TOLERANCE = 0.01
CONSTANT_STD = 1e-12


class SeriesError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled real-valued series.

    ``values`` is stored as a read-only float64 array so instances can be
    shared freely between workers.
    """

    values: np.ndarray
    start_time: float = 0.0
    period: float = 1.0
    name: str = "series"

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(arr)):
            raise SeriesError(f"{self.name}: series contains NaN or inf")
        if not self.period > 0:
            raise SeriesError(f"{self.name}: period must be positive, got {self.period}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_time", float(self.start_time))
        object.__setattr__(self, "period", float(self.period))

    def __len__(self) -> int:
        return self.values.shape[0]

    def time_at(self, index) -> float:
        return self.start_time + index * self.period

    def subsequence(self, start_index: int, length: int) -> "Subsequence":
        return Subsequence(self, int(start_index), int(length))

    def windows(self, length: int) -> np.ndarray:
        """All length-``length`` windows as a read-only (n-length+1, length) view."""
        return np.lib.stride_tricks.sliding_window_view(self.values, length)


@dataclass(frozen=True)
class Subsequence:
    source: TimeSeries = field(repr=False)
    start_index: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise SeriesError(f"subsequence length must be positive, got {self.length}")
        if self.start_index < 0 or self.start_index + self.length > len(self.source):
            raise SeriesError(
                f"subsequence [{self.start_index}, {self.start_index + self.length}) "
                f"outside series of length {len(self.source)}"
            )

    @property
    def values(self) -> np.ndarray:
        return self.source.values[self.start_index:self.start_index + self.length]

    @property
    def end_index(self) -> int:
        """Index of the last sample (inclusive)."""
        return self.start_index + self.length - 1

    @property
    def start_time(self) -> float:
        return self.source.time_at(self.start_index)

    @property
    def end_time(self) -> float:
        return self.source.time_at(self.end_index)

    @classmethod
    def from_values(cls, values, name="template", period=1.0) -> "Subsequence":
        ts = TimeSeries(values, period=period, name=name)
        return cls(ts, 0, len(ts))


def _parse_float(cell: str, row: int, what: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise SeriesError(f"row {row}: non-numeric {what} {cell!r}") from None
    if not math.isfinite(value):
        raise SeriesError(f"row {row}: non-finite {what} {cell!r}")
    return value


def _resolve_column(col, header, ncols):
    if col is None:
        return None
    if isinstance(col, int) or (isinstance(col, str) and col.lstrip("-").isdigit()):
        idx = int(col)
        if not -ncols <= idx < ncols:
            raise SeriesError(f"column index {idx} out of range for {ncols} columns")
        return idx % ncols
    if header is None:
        raise SeriesError(f"column {col!r} given by name but file has no header")
    try:
        return header.index(col)
    except ValueError:
        raise SeriesError(f"column {col!r} not in header {header}") from None


def load_csv(path, column=None, timestamp_column=None, name: str | None = None) -> TimeSeries:
    """Read one series from a CSV file.

    ``column`` and ``timestamp_column`` accept a header name or an integer
    index. When ``column`` is omitted the last column is used, and a
    two-column file is read as (timestamp, value). A first row whose value
    cell does not parse as a number is treated as a header. Without
    timestamps the period defaults to 1.0.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise SeriesError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise SeriesError(f"{path}: empty file")

    ncols = len(rows[0])
    header = None
    first_row = 1
    probe = _resolve_column(column, [c.strip() for c in rows[0]], ncols) if column is not None else ncols - 1
    try:
        float(rows[0][probe])
    except (ValueError, IndexError):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_row = 2
    if not rows:
        raise SeriesError(f"{path}: no data rows")

    if column is None:
        vcol = ncols - 1
        if timestamp_column is None and ncols == 2:
            timestamp_column = 0
    else:
        vcol = _resolve_column(column, header, ncols)
    tcol = _resolve_column(timestamp_column, header, ncols)

    values = np.empty(len(rows))
    stamps = np.empty(len(rows)) if tcol is not None else None
    for k, row in enumerate(rows):
        rownum = k + first_row
        if len(row) <= max(vcol, tcol if tcol is not None else 0):
            raise SeriesError(f"{path}: row {rownum}: missing value")
        if not row[vcol].strip():
            raise SeriesError(f"{path}: row {rownum}: missing value")
        values[k] = _parse_float(row[vcol].strip(), rownum, "value")
        if stamps is not None:
            stamps[k] = _parse_float(row[tcol].strip(), rownum, "timestamp")

    start, period = 0.0, 1.0
    if stamps is not None:
        start = float(stamps[0])
        if len(stamps) > 1:
            deltas = np.diff(stamps)
            if np.any(deltas <= 0):
                bad = int(np.argmax(deltas <= 0)) + first_row + 1
                raise SeriesError(f"{path}: row {bad}: timestamps not strictly increasing")
            period = float(np.median(deltas))
            off = np.abs(deltas - period) > JITTER_TOLERANCE * period
            if np.any(off):
                bad = int(np.argmax(off)) + first_row + 1
                raise SeriesError(f"{path}: row {bad}: uneven sampling beyond 1% jitter")
    return TimeSeries(values, start_time=start, period=period, name=name or path.stem)


def save_csv(series: TimeSeries, path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "value"])
        for i, v in enumerate(series.values):
            w.writerow([repr(series.time_at(i)), repr(float(v))])


def resample(series: TimeSeries, new_period: float) -> TimeSeries:
    """Downsample by bucket means; a trailing partial bucket is dropped."""
    if new_period < series.period:
        raise SeriesError(f"cannot upsample from period {series.period} to {new_period}")
    ratio = new_period / series.period
    size = int(round(ratio))
    if abs(ratio - size) > 1e-9 * ratio:
        raise SeriesError(f"new period {new_period} is not a multiple of {series.period}")
    nbuckets = len(series) // size
    if nbuckets == 0:
        raise SeriesError("series shorter than one resampling bucket")
    out = series.values[:nbuckets * size].reshape(nbuckets, size).mean(axis=1)
    return TimeSeries(out, start_time=series.start_time, period=new_period, name=series.name)


def znormalize(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64)
    if x.shape[0] < 2:
        raise SeriesError("z-normalization needs at least 2 samples")
    sd = x.std()
    if sd < CONSTANT_STD:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def vector_distance(a, b, normalize: bool = False) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise SeriesError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if normalize:
        a, b = znormalize(a), znormalize(b)
    diff = a - b
    return float(np.sqrt(np.dot(diff, diff)))


def distance(a: Subsequence, b: Subsequence, normalize: bool = False) -> float:
    """Euclidean distance between two equal-length subsequences."""
    if a.length != b.length:
        raise SeriesError(f"length mismatch: {a.length} vs {b.length}")
    return vector_distance(a.values, b.values, normalize)


def distance_profile(series: TimeSeries, template, normalize: bool = False,
                     chunk: int = 1 << 14) -> np.ndarray:
    """Distance from ``template`` to every window of ``series``.

    Windows are differenced directly (no dot-product expansion) so values
    agree with :func:`vector_distance` to rounding.
    """
    t = np.asarray(template, dtype=np.float64)
    m = t.shape[0]
    if m > len(series):
        raise SeriesError(f"template length {m} exceeds series length {len(series)}")
    win = series.windows(m)
    if normalize:
        t = znormalize(t)
    out = np.empty(win.shape[0])
    for lo in range(0, win.shape[0], chunk):
        w = win[lo:lo + chunk]
        if normalize:
            mu = w.mean(axis=1, keepdims=True)
            sd = w.std(axis=1, keepdims=True)
            flat = sd[:, 0] < CONSTANT_STD
            sd[flat] = 1.0
            w = (w - mu) / sd
            w[flat] = 0.0
        diff = w - t
        out[lo:lo + chunk] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return out
