"""Top-K rule discovery over all antecedent/consequent motif pairs."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .matching import MatchResult, build_graph, match_noncrossing
from .mdl import DEFAULT_BITS, DigitConfig, ScoredRule, score_rule
from .motifs import Motif, find_motifs, sort_top_k
from .scan import scan_similar
from .series import SeriesError, Subsequence, TimeSeries

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rule:
    m_A: Subsequence
    m_B: Subsequence
    tau: float
    theta: float
    theta_b: float | None = None

    def __post_init__(self):
        if not (self.tau > 0 and self.theta > 0):
            raise ValueError(f"tau and theta must be positive (tau={self.tau}, theta={self.theta})")

    @property
    def consequent_threshold(self) -> float:
        return self.theta if self.theta_b is None else self.theta_b


@dataclass
class MinerConfig:
    motif_lengths: list = field(default_factory=lambda: [50, 30])
    k_motifs: int = 5
    k_rules: int = 5
    tau: float = 300.0
    theta: float = 5.0
    bits: int = DEFAULT_BITS
    normalize: bool = False
    theta_b: float | None = None
    # motifs found per length before roughness ranking keeps k_motifs
    motif_pool: int | None = None
    jobs: int = 1

    def __post_init__(self):
        self.motif_lengths = [int(m) for m in self.motif_lengths]
        if not self.motif_lengths or min(self.motif_lengths) < 2:
            raise ValueError("motif_lengths must be a non-empty list of integers >= 2")
        if self.k_motifs < 1 or self.k_rules < 0:
            raise ValueError("k_motifs must be >= 1 and k_rules >= 0")
        if not (self.tau > 0 and self.theta > 0):
            raise ValueError("tau and theta must be positive")
        if self.theta_b is not None and not self.theta_b > 0:
            raise ValueError("theta_b must be positive")
        if not 2 <= self.bits <= 16:
            raise ValueError("bits must be in [2, 16]")

    @property
    def pool_size(self) -> int:
        return self.motif_pool or 2 * self.k_motifs

    def to_dict(self) -> dict:
        return asdict(self)


def _empty_match() -> MatchResult:
    return MatchResult((), 0, 0.0)


def _score(rule, ants, cons, T_B, digits) -> ScoredRule:
    if not ants:
        return ScoredRule(rule, _empty_match(), 0, (), 0)
    graph = build_graph(ants, cons, rule.tau)
    match = match_noncrossing(graph)
    matched = [T_B.subsequence(cons[e.j].start_index, cons[e.j].length) for e in match.selected]
    return score_rule(rule, match, len(ants), digits, matched, graph)


def score_pair(m_A: Motif, m_B: Motif, T_A: TimeSeries, T_B: TimeSeries, cfg: MinerConfig,
               digits: DigitConfig | None = None) -> ScoredRule:
    """Scan both series, match instances and score the rule (m_A, m_B)."""
    if digits is None:
        digits = DigitConfig.from_series(T_A, T_B, bits=cfg.bits)
    rule = Rule(m_A.template, m_B.template, cfg.tau, cfg.theta, cfg.theta_b)
    ants = scan_similar(T_A, m_A.template, rule.theta, cfg.normalize)
    cons = scan_similar(T_B, m_B.template, rule.consequent_threshold, cfg.normalize)
    return _score(rule, ants, cons, T_B, digits)


def discover_motifs(series: TimeSeries, cfg: MinerConfig) -> list[Motif]:
    pool = []
    for m in cfg.motif_lengths:
        pool.extend(find_motifs(series, m, cfg.pool_size, cfg.normalize))
    return sort_top_k(pool, cfg.k_motifs)


def _rank_key(sr: ScoredRule):
    return (-sr.exact_score, sr.rule.m_A.start_index, sr.rule.m_B.start_index,
            sr.rule.m_A.length, sr.rule.m_B.length)


def _score_task(args):
    rule, ants, cons, T_B, digits = args
    return _score(rule, ants, cons, T_B, digits)


def find_top_rules(T_A: TimeSeries, T_B: TimeSeries, cfg: MinerConfig,
                   motifs_a=None, motifs_b=None) -> list[ScoredRule]:
    """Score every pair in M_A x M_B and return the ``k_rules`` best, descending."""
    longest = max(cfg.motif_lengths)
    for ts in (T_A, T_B):
        if len(ts) < 2 * longest:
            raise SeriesError(f"{ts.name}: length {len(ts)} shorter than twice the motif length {longest}")
    if cfg.k_rules == 0:
        return []
    digits = DigitConfig.from_series(T_A, T_B, bits=cfg.bits)
    M_A = motifs_a if motifs_a is not None else discover_motifs(T_A, cfg)
    M_B = motifs_b if motifs_b is not None else (M_A if T_B is T_A else discover_motifs(T_B, cfg))
    log.info("%s: %d motifs, %s: %d motifs", T_A.name, len(M_A), T_B.name, len(M_B))

    # each template is scanned once and reused across all pairs it appears in
    ant_occ = [scan_similar(T_A, m.template, cfg.theta, cfg.normalize) for m in M_A]
    theta_b = cfg.theta if cfg.theta_b is None else cfg.theta_b
    con_occ = [scan_similar(T_B, m.template, theta_b, cfg.normalize) for m in M_B]

    tasks = []
    for a, ma in enumerate(M_A):
        for b, mb in enumerate(M_B):
            rule = Rule(ma.template, mb.template, cfg.tau, cfg.theta, cfg.theta_b)
            tasks.append((rule, ant_occ[a], con_occ[b], T_B, digits))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            scored = list(pool.map(_score_task, tasks))
    else:
        scored = [_score_task(t) for t in tasks]
    scored.sort(key=_rank_key)
    return scored[:cfg.k_rules]


def _sub_dict(sub: Subsequence) -> dict:
    return {
        "series": sub.source.name,
        "start": sub.start_index,
        "length": sub.length,
        "period": sub.source.period,
        "values": [float(v) for v in sub.values],
    }


def rule_to_dict(sr: ScoredRule) -> dict:
    r = sr.rule
    return {
        "antecedent": _sub_dict(r.m_A),
        "consequent": _sub_dict(r.m_B),
        "tau": r.tau,
        "theta": r.theta,
        "theta_b": r.theta_b,
        "score": sr.score,
        "s": sr.s,
        "n_antecedents": sr.n_antecedents,
        "bits_saved": list(sr.bits_saved),
        "model_bits": sr.model_bits,
        "matched_instances": [
            {"a_start": a.start_index, "b_start": b.start_index, "gap": gap}
            for a, b, gap in sr.instances()
        ],
    }


def rule_from_dict(d: dict) -> Rule:
    def sub(part):
        return Subsequence.from_values(part["values"], name=part["series"], period=part.get("period", 1.0))

    return Rule(sub(d["antecedent"]), sub(d["consequent"]), float(d["tau"]), float(d["theta"]),
                d.get("theta_b"))
