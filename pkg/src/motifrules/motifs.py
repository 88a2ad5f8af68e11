"""Exact closest-pair motif discovery and roughness ranking.

One O(n^2) sweep over the diagonals ``j - i >= length`` of the pairwise
distance matrix yields each window's nearest-neighbour distance. Those
values only bound the answer once earlier motifs start excluding regions,
so rows are recomputed exactly when they reach the front; the final pick
recomputes exact distances for every pair within rounding tolerance of the
minimum, which makes the result identical to exhaustive search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .series import SeriesError, Subsequence, TimeSeries, distance, distance_profile

@dataclass(frozen=True)
class Motif:
    template: Subsequence
    partner: Subsequence
    pair_distance: float
    roughness: float

    @property
    def length(self) -> int:
        return self.template.length


@njit(cache=True)
def _pair_sq(x, i, j, m, mu, sd, normalize):
    s = 0.0
    if normalize:
        ci = sd[i] < 1e-12
        cj = sd[j] < 1e-12
        for t in range(m):
            a = 0.0 if ci else (x[i + t] - mu[i]) / sd[i]
            b = 0.0 if cj else (x[j + t] - mu[j]) / sd[j]
            s += (a - b) * (a - b)
    else:
        for t in range(m):
            d = x[i + t] - x[j + t]
            s += d * d
    return s


@njit(cache=True)
def _nn_profile(x, m, mu, sd, normalize):
    """Squared distance from each window to its nearest non-overlapping window.

    Window sums are updated incrementally along each diagonal, so values
    carry a small rounding drift; callers treat them as approximate.
    """
    nw = x.shape[0] - m + 1
    prof = np.full(nw, np.inf)
    fm = float(m)
    s = 0.0
    qt = 0.0
    for k in range(m, nw):
        if normalize:
            qt = 0.0
            for t in range(m):
                qt += x[t] * x[k + t]
        else:
            s = _pair_sq(x, 0, k, m, mu, sd, normalize)
        for i in range(nw - k):
            j = i + k
            if i > 0:
                if normalize:
                    qt += x[i + m - 1] * x[j + m - 1] - x[i - 1] * x[j - 1]
                else:
                    d_in = x[i + m - 1] - x[j + m - 1]
                    d_out = x[i - 1] - x[j - 1]
                    s += d_in * d_in - d_out * d_out
            if normalize:
                ci = sd[i] < 1e-12
                cj = sd[j] < 1e-12
                if ci and cj:
                    val = 0.0
                elif ci or cj:
                    val = fm
                else:
                    corr = (qt - fm * mu[i] * mu[j]) / (fm * sd[i] * sd[j])
                    val = 2.0 * fm * (1.0 - corr)
            else:
                val = s
            if val < 0.0:
                val = 0.0
            if val < prof[i]:
                prof[i] = val
            if val < prof[j]:
                prof[j] = val
    return prof


class _PairSearch:
    """Closest allowed pair with lazy exact refresh of stale profile rows."""

    def __init__(self, series: TimeSeries, length: int, normalize: bool):
        self.series = series
        self.m = length
        self.normalize = normalize
        x = np.ascontiguousarray(series.values)
        if normalize:
            # shift-invariant metric; centring limits cancellation in the dot products
            x = x - x.mean()
        win = np.lib.stride_tricks.sliding_window_view(x, length)
        mu, sd = win.mean(axis=1), win.std(axis=1)
        self.bound = _nn_profile(x, length, mu, sd, normalize)
        nw = self.bound.shape[0]
        self.fresh = np.zeros(nw, dtype=bool)
        self.blocked = np.zeros(nw, dtype=bool)
        if normalize:
            self.tol = 1e-7 * 4.0 * length
        else:
            self.tol = 1e-9 * length * float(np.max(np.abs(series.values))) ** 2
        self.tol += 1e-12
        self.idx = np.arange(nw)

    def _row(self, i):
        sq = distance_profile(self.series, self.series.values[i:i + self.m], self.normalize) ** 2
        sq[np.abs(self.idx - i) < self.m] = np.inf
        sq[self.blocked] = np.inf
        return sq

    def next_pair(self):
        rows = {}
        while True:
            allowed = ~self.blocked
            if not allowed.any():
                return None
            lb = np.where(allowed, self.bound, np.inf)
            pmin = lb.min()
            if not np.isfinite(pmin):
                return None
            cand = np.flatnonzero(lb <= pmin + 2 * self.tol)
            stale = cand[~self.fresh[cand]]
            if stale.size == 0:
                break
            for i in stale:
                rows[i] = self._row(i)
                self.bound[i] = rows[i].min()
                self.fresh[i] = True
        best_sq = self.bound[cand].min()
        best = None
        for i in cand:
            if self.bound[i] > best_sq + self.tol:
                continue
            row = rows[i] if i in rows else self._row(i)
            for j in np.flatnonzero(row <= best_sq + self.tol):
                a, b = (i, j) if i < j else (j, i)
                key = (distance(self.series.subsequence(a, self.m),
                                self.series.subsequence(b, self.m), self.normalize), int(a), int(b))
                if best is None or key < best:
                    best = key
                if best[0] == 0.0:
                    break
            if best is not None and best[0] == 0.0:
                # later rows cannot beat a zero distance at a larger index
                break
        return best

    def exclude(self, start):
        self.blocked[max(0, start - self.m + 1):start + self.m] = True
        self.fresh[:] = False


def roughness(sub) -> float:
    """Total variation of a subsequence (or plain array)."""
    v = sub.values if isinstance(sub, Subsequence) else np.asarray(sub, dtype=np.float64)
    if v.shape[0] < 2:
        raise SeriesError("roughness needs at least 2 samples")
    return float(np.abs(np.diff(v)).sum())


def find_motifs(series: TimeSeries, length: int, count: int,
                normalize: bool = False) -> list[Motif]:
    """Return up to ``count`` successive closest non-overlapping pairs.

    Each later motif avoids every window overlapping a member (template or
    partner) of an earlier one. Ties on distance go to the smallest
    (start1, start2).
    """
    n = len(series)
    if length < 1 or count < 1:
        raise SeriesError("length and count must be positive")
    if length > n:
        raise SeriesError(f"motif length {length} exceeds series length {n}")
    if n < 2 * length:
        raise SeriesError(f"series of length {n} too short for two non-overlapping windows of {length}")
    search = _PairSearch(series, length, normalize)
    motifs: list[Motif] = []
    while len(motifs) < count:
        found = search.next_pair()
        if found is None:
            break
        d, i, j = found
        template = series.subsequence(i, length)
        motifs.append(Motif(template, series.subsequence(j, length), d, roughness(template)))
        search.exclude(i)
        search.exclude(j)
    return motifs


def sort_top_k(motifs, k: int) -> list[Motif]:
    """Roughest ``k`` motifs; ties by pair distance, then template start."""
    ranked = sorted(motifs, key=lambda mo: (-mo.roughness, mo.pair_distance, mo.template.start_index))
    return ranked[:max(k, 0)]
