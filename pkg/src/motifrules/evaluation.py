"""Held-out evaluation: rule firing, best-match prediction and the Q metric.

Q compares the distance between the rule's consequent and the best match
inside the tau window after each firing against the same quantity after
uniformly random positions. Both sides use the identical best-in-window
predictor, so a rule whose firings carry no information about the
consequent series scores Q close to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .miner import Rule
from .series import Subsequence, TimeSeries, distance_profile


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Firing:
    fire_index: int
    fire_dist: float
    predicted_index: int
    predicted_dist: float


def fire_rule(rule: Rule, test_A: TimeSeries, normalize: bool = False) -> list[int]:
    """Start indices where the rule fires; firings never overlap."""
    m = rule.m_A.length
    if m > len(test_A):
        raise EvaluationError(f"antecedent length {m} exceeds test series length {len(test_A)}")
    prof = distance_profile(test_A, rule.m_A.values, normalize)
    hits = np.flatnonzero(prof < rule.theta)
    fires = []
    resume = 0
    for i in hits:
        if i >= resume:
            fires.append(int(i))
            resume = i + m
    return fires


def _window(test_B: TimeSeries, t_end: float, tau: float, length: int):
    """Inclusive range of consequent starts b with 0 < t(b) - t_end < tau."""
    last = len(test_B) - length
    lo = int(np.floor((t_end - test_B.start_time) / test_B.period)) + 1
    while lo > 0 and test_B.time_at(lo - 1) > t_end:
        lo -= 1
    while test_B.time_at(lo) <= t_end:
        lo += 1
    hi = int(np.ceil((t_end + tau - test_B.start_time) / test_B.period))
    while test_B.time_at(hi) - t_end >= tau:
        hi -= 1
    return max(lo, 0), min(hi, last)


def best_match_position(rule: Rule, test_B: TimeSeries, fire_end: float, tau: float | None = None,
                        normalize: bool = False, profile: np.ndarray | None = None):
    """Consequent-length window minimizing distance to the consequent.

    ``fire_end`` is the time of the antecedent's last sample. Candidate
    starts have a gap strictly between 0 and tau; the range is truncated
    at the series end and ties go to the earliest index.
    """
    tau = rule.tau if tau is None else tau
    m = rule.m_B.length
    lo, hi = _window(test_B, fire_end, tau, m)
    if hi < lo:
        raise EvaluationError(f"empty prediction window after time {fire_end}")
    if profile is None:
        profile = distance_profile(test_B, rule.m_B.values, normalize)
    k = lo + int(np.argmin(profile[lo:hi + 1]))
    return k, float(profile[k])


def _firings(rule, test_A, test_B, normalize):
    prof_a = distance_profile(test_A, rule.m_A.values, normalize)
    prof_b = distance_profile(test_B, rule.m_B.values, normalize)
    out = []
    for f in fire_rule(rule, test_A, normalize):
        t_end = test_A.time_at(f + rule.m_A.length - 1)
        try:
            k, d = best_match_position(rule, test_B, t_end, rule.tau, normalize, prof_b)
        except EvaluationError:
            continue  # firing too close to the end to predict anything
        out.append(Firing(f, float(prof_a[f]), k, d))
    return out, prof_b


def _random_baseline(rule, test_B, prof_b):
    """Best-in-window distance for every admissible random fire end in test_B."""
    m = rule.m_B.length
    width = int(np.ceil(rule.tau / test_B.period)) - 1
    if width < 1:
        raise EvaluationError("tau shorter than one sample period")
    last = len(test_B) - m
    first_end = min(rule.m_A.length - 1, last - 1)
    ends = np.arange(max(first_end, 0), last)
    if ends.size == 0:
        raise EvaluationError("test series too short for a random baseline")
    padded = np.concatenate([prof_b, np.full(width, np.inf)])
    win = np.lib.stride_tricks.sliding_window_view(padded[1:], width)
    # window for fire end e covers starts e+1 .. e+width
    return win[ends].min(axis=1)


def q_metric(rule: Rule, test_A: TimeSeries, test_B: TimeSeries, repetitions: int = 1000,
             rng_seed: int = 0, normalize: bool = False, firings=None, details: bool = False):
    """Average over repetitions of sum(d(m_B, u_i)) / sum(d(m_B, v_i))."""
    if firings is None:
        firings, prof_b = _firings(rule, test_A, test_B, normalize)
    else:
        prof_b = distance_profile(test_B, rule.m_B.values, normalize)
    if not firings:
        raise EvaluationError("rule never fires on the test data")
    numer = sum(f.predicted_dist for f in firings)
    baseline = _random_baseline(rule, test_B, prof_b)
    rng = np.random.default_rng(rng_seed)
    draws = rng.integers(0, baseline.shape[0], size=(repetitions, len(firings)))
    denom = baseline[draws].sum(axis=1)
    if np.any(denom <= 0):
        raise EvaluationError("random-position distances sum to zero (constant test series?)")
    q = float(np.mean(numer / denom))
    if details:
        return q, firings
    return q


def evaluate_rule(rule: Rule, test_A: TimeSeries, test_B: TimeSeries, repetitions: int = 1000,
                  rng_seed: int = 0, normalize: bool = False) -> dict:
    """Report dict: Q (None with a reason when undefined), firing count and firings."""
    firings, _ = _firings(rule, test_A, test_B, normalize)
    report = {
        "Q": None,
        "N_firings": len(firings),
        "firings": [{"fire_index": f.fire_index, "predicted_index": f.predicted_index,
                     "dist": f.predicted_dist} for f in firings],
    }
    try:
        report["Q"] = q_metric(rule, test_A, test_B, repetitions, rng_seed, normalize, firings)
    except EvaluationError as exc:
        report["error"] = str(exc)
    return report


def overlay(rule: Rule, test_B: TimeSeries, predicted_starts) -> np.ndarray:
    """Predicted consequent shapes laid over test_B (NaN elsewhere), for plotting."""
    out = np.full(len(test_B), np.nan)
    for k in predicted_starts:
        out[k:k + rule.m_B.length] = rule.m_B.values
    return out


# synthetic data -------------------------------------------------------------

def antecedent_shape(length: int, amplitude: float = 10.0) -> np.ndarray:
    t = np.arange(length) / length
    return amplitude * np.sin(2 * np.pi * 2.5 * t) * np.sin(np.pi * t)


def consequent_shape(length: int, amplitude: float = 10.0) -> np.ndarray:
    t = np.arange(length) / length
    return amplitude * (2 * ((3 * t) % 1.0) - 1)


@dataclass(frozen=True)
class Planted:
    series_a: TimeSeries
    series_b: TimeSeries
    rule: Rule
    a_starts: tuple
    b_starts: tuple
    gaps: tuple

    def __iter__(self):
        return iter((self.series_a, self.series_b, self.rule))

    def truth(self) -> dict:
        return {
            "n_instances": len(self.a_starts),
            "a_starts": list(self.a_starts),
            "b_starts": list(self.b_starts),
            "gaps": list(self.gaps),
            "tau": self.rule.tau,
            "theta": self.rule.theta,
            "antecedent": [float(v) for v in self.rule.m_A.values],
            "consequent": [float(v) for v in self.rule.m_B.values],
        }


def gen_synthetic(n: int, n_instances: int, gap_range=(10, 100), noise_sd: float = 0.5,
                  seed: int = 0, len_a: int = 50, len_b: int = 30, amplitude: float = 10.0,
                  step_sd: float = 1.0) -> Planted:
    """Two random walks with an antecedent shape planted in A and a consequent in B.

    Planted windows overwrite the background; the consequent starts
    ``gap`` samples after the antecedent's last sample, with ``gap`` drawn
    uniformly from ``gap_range`` (inclusive). Noise is added everywhere
    afterwards. Shapes do not depend on the seed, so different seeds give
    independent realizations of the same rule.
    """
    g_lo, g_hi = int(gap_range[0]), int(gap_range[1])
    if g_lo < 1 or g_hi < g_lo:
        raise ValueError(f"invalid gap range {gap_range}")
    if n_instances < 1:
        raise ValueError("need at least one instance")
    episode = len_a + g_hi + len_b
    slot = n // n_instances
    if slot < episode + 1:
        raise ValueError(f"cannot place {n_instances} episodes of up to {episode} samples in {n}")
    rng = np.random.default_rng(seed)
    a = np.cumsum(rng.normal(0.0, step_sd, n))
    b = np.cumsum(rng.normal(0.0, step_sd, n))
    shape_a = antecedent_shape(len_a, amplitude)
    shape_b = consequent_shape(len_b, amplitude)
    a_starts, b_starts, gaps = [], [], []
    for k in range(n_instances):
        gap = int(rng.integers(g_lo, g_hi + 1))
        offset = int(rng.integers(0, slot - episode))
        sa = k * slot + offset
        sb = sa + len_a - 1 + gap
        a[sa:sa + len_a] = shape_a
        b[sb:sb + len_b] = shape_b
        a_starts.append(sa)
        b_starts.append(sb)
        gaps.append(gap)
    if noise_sd > 0:
        a = a + rng.normal(0.0, noise_sd, n)
        b = b + rng.normal(0.0, noise_sd, n)
    ts_a = TimeSeries(a, name="T_A")
    ts_b = TimeSeries(b, name="T_B")
    longest = max(len_a, len_b)
    theta = 3.0 * noise_sd * np.sqrt(2 * longest) + 0.05 * amplitude * np.sqrt(longest)
    rule = Rule(Subsequence.from_values(shape_a, name="T_A"), Subsequence.from_values(shape_b, name="T_B"),
                tau=float(g_hi + 1), theta=float(theta))
    return Planted(ts_a, ts_b, rule, tuple(a_starts), tuple(b_starts), tuple(gaps))
