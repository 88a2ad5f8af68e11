"""Sliding-window search for all non-overlapping template-like occurrences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import SeriesError, TimeSeries, distance_profile, vector_distance


@dataclass(frozen=True)
class Occurrence:
    start_index: int
    length: int
    dist: float
    time: float
    end_time: float

    @property
    def end_index(self) -> int:
        return self.start_index + self.length - 1


def _greedy(starts: np.ndarray, dists: np.ndarray, length: int, n_starts: int) -> np.ndarray:
    order = np.lexsort((starts, dists))
    blocked = np.zeros(n_starts, dtype=bool)
    keep = []
    for k in order:
        s = starts[k]
        if blocked[s]:
            continue
        keep.append(k)
        blocked[max(0, s - length + 1):s + length] = True
    return np.array(sorted(keep, key=lambda k: starts[k]), dtype=np.int64)


def remove_overlaps(candidates, length: int, series: TimeSeries | None = None) -> list[Occurrence]:
    """Greedy overlap removal: smallest distance first, ties by start.

    ``candidates`` is an iterable of ``(start_index, dist)``. Two windows
    overlap when their starts differ by less than ``length``. When no
    series is given, occurrence times are the start indices.
    """
    cands = list(candidates)
    if not cands:
        return []
    starts = np.array([c[0] for c in cands], dtype=np.int64)
    dists = np.array([c[1] for c in cands], dtype=np.float64)
    keep = _greedy(starts, dists, length, int(starts.max()) + 1)
    return [_occurrence(series, int(starts[k]), length, float(dists[k])) for k in keep]


def _occurrence(series, start, length, dist):
    if series is None:
        return Occurrence(start, length, dist, float(start), float(start + length - 1))
    return Occurrence(start, length, dist, series.time_at(start), series.time_at(start + length - 1))


def scan_similar(series: TimeSeries, template, threshold: float,
                 normalize: bool = False) -> list[Occurrence]:
    """All non-overlapping windows with distance strictly below ``threshold``.

    Scores every window against the template, keeps those under the
    threshold, then removes overlaps greedily by distance. Returned
    occurrences are sorted by start index.
    """
    t = np.asarray(getattr(template, "values", template), dtype=np.float64)
    m = t.shape[0]
    if m > len(series):
        raise SeriesError(f"template length {m} exceeds series length {len(series)}")
    prof = distance_profile(series, t, normalize)
    starts = np.flatnonzero(prof < threshold)
    if starts.size == 0:
        return []
    win = series.windows(m)
    # restate kept distances with the scalar metric so stored values are reproducible
    dists = np.array([vector_distance(win[s], t, normalize) for s in starts])
    ok = dists < threshold
    starts, dists = starts[ok], dists[ok]
    if starts.size == 0:
        return []
    keep = _greedy(starts, dists, m, win.shape[0])
    return [_occurrence(series, int(starts[k]), m, float(dists[k])) for k in keep]
