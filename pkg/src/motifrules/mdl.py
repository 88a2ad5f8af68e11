"""Digitization, description lengths and the MDL rule score.

All lengths are whole bits. The conditional cost of a sequence given a
reference is a Huffman code over the residual symbols plus ``b + 2`` bits
per distinct residual for the codebook.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

DEFAULT_BITS = 6


@dataclass(frozen=True)
class DigitalSeq:
    symbols: tuple
    bits: int
    lo: float
    hi: float

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class DigitConfig:
    """Shared digitization range; computed once per run from the training pair."""

    lo: float
    hi: float
    bits: int = DEFAULT_BITS

    @classmethod
    def from_series(cls, *series, bits: int = DEFAULT_BITS) -> "DigitConfig":
        lo = min(float(np.min(s.values)) for s in series)
        hi = max(float(np.max(s.values)) for s in series)
        return cls(lo, hi, bits)

    def digitize(self, sub) -> DigitalSeq:
        return digitize(sub, self.bits, self.lo, self.hi)


def digitize(sub, b: int, lo: float, hi: float) -> DigitalSeq:
    if not 2 <= b <= 16:
        raise ValueError(f"bits must be in [2, 16], got {b}")
    if lo > hi:
        raise ValueError(f"lo {lo} > hi {hi}")
    v = np.asarray(getattr(sub, "values", sub), dtype=np.float64)
    top = (1 << b) - 1
    if hi == lo:
        sym = np.zeros(v.shape[0], dtype=np.int64)
    else:
        sym = np.clip(np.rint((v - lo) / (hi - lo) * top), 0, top).astype(np.int64)
    return DigitalSeq(tuple(int(s) for s in sym), b, float(lo), float(hi))


def undigitize(seq: DigitalSeq) -> np.ndarray:
    top = (1 << seq.bits) - 1
    return seq.lo + np.asarray(seq.symbols, dtype=np.float64) / top * (seq.hi - seq.lo)


def dl(seq: DigitalSeq) -> int:
    """Literal cost: b bits per symbol."""
    return len(seq) * seq.bits


def huffman_code_lengths(freqs: dict) -> dict:
    """Code length per symbol of a Huffman code for the given frequencies."""
    if not freqs:
        return {}
    if len(freqs) == 1:
        return {s: 0 for s in freqs}
    # heap entries carry a tie-break counter and the symbols under each node
    heap = [(f, k, [s]) for k, (s, f) in enumerate(sorted(freqs.items()))]
    heapq.heapify(heap)
    depth = dict.fromkeys(freqs, 0)
    counter = len(heap)
    while len(heap) > 1:
        f1, _, s1 = heapq.heappop(heap)
        f2, _, s2 = heapq.heappop(heap)
        for s in s1 + s2:
            depth[s] += 1
        heapq.heappush(heap, (f1 + f2, counter, s1 + s2))
        counter += 1
    return depth


def _check_pair(x: DigitalSeq, y: DigitalSeq):
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if x.bits != y.bits:
        raise ValueError(f"cardinality mismatch: {x.bits} vs {y.bits} bits")


def dl_conditional(x: DigitalSeq, y: DigitalSeq) -> int:
    """Bits to encode ``x`` given ``y``: Huffman-coded residuals plus codebook."""
    _check_pair(x, y)
    if len(x) == 0:
        return 0
    freqs = Counter(a - b for a, b in zip(x.symbols, y.symbols))
    lengths = huffman_code_lengths(freqs)
    payload = sum(freqs[s] * lengths[s] for s in freqs)
    return payload + len(freqs) * (x.bits + 2)


def bit_saved(instance_consequent: DigitalSeq, rule_consequent: DigitalSeq) -> int:
    return dl(instance_consequent) - dl_conditional(instance_consequent, rule_consequent)


@dataclass(frozen=True)
class ScoredRule:
    rule: object
    match: object
    n_antecedents: int
    bits_saved: tuple = ()
    model_bits: int = 0
    graph: object = field(default=None, repr=False)

    def instances(self):
        """(antecedent occurrence, consequent occurrence, gap) per matched edge."""
        if self.graph is None:
            return []
        return [(self.graph.antecedents[e.i], self.graph.consequents[e.j], e.weight)
                for e in self.match.selected]

    @property
    def s(self) -> int:
        return self.match.cardinality

    @property
    def exact_score(self) -> Fraction:
        if self.s == 0:
            return Fraction(0)
        return Fraction(self.s, self.n_antecedents) * (sum(self.bits_saved) - self.model_bits)

    @property
    def score(self) -> float:
        return float(self.exact_score)


def score_rule(rule, match, n_antecedents: int, digits: DigitConfig,
               consequents=None, graph=None) -> ScoredRule:
    """Ratio-weighted sum of per-instance savings minus the consequent's own cost.

    ``consequents`` holds the matched consequent subsequences (anything
    with ``.values``), one per edge of ``match.selected``.
    """
    if n_antecedents <= 0:
        raise ValueError("n_antecedents must be positive")
    if match.cardinality > n_antecedents:
        raise ValueError(f"{match.cardinality} matched instances but only {n_antecedents} antecedents")
    consequents = list(consequents or [])
    if len(consequents) != match.cardinality:
        raise ValueError("need one consequent subsequence per selected instance")
    template = digits.digitize(rule.m_B)
    saved = tuple(bit_saved(digits.digitize(c), template) for c in consequents)
    return ScoredRule(rule, match, n_antecedents, saved, dl(template), graph)
