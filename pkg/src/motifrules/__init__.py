"""Motif-based rule discovery for predicting real-valued time series."""

__version__ = "0.1.0"

from .evaluation import best_match_position, evaluate_rule, fire_rule, gen_synthetic, q_metric
from .matching import brute_force_match, build_graph, match_noncrossing
from .mdl import DigitConfig, bit_saved, digitize, dl, dl_conditional, score_rule
from .miner import MinerConfig, Rule, find_top_rules, score_pair
from .motifs import Motif, find_motifs, roughness, sort_top_k
from .scan import Occurrence, remove_overlaps, scan_similar
from .series import Subsequence, TimeSeries, distance, load_csv, resample, znormalize

__all__ = [
    "TimeSeries", "Subsequence", "load_csv", "resample", "distance", "znormalize",
    "Motif", "find_motifs", "roughness", "sort_top_k",
    "Occurrence", "scan_similar", "remove_overlaps",
    "build_graph", "match_noncrossing", "brute_force_match",
    "DigitConfig", "digitize", "dl", "dl_conditional", "bit_saved", "score_rule",
    "Rule", "MinerConfig", "score_pair", "find_top_rules",
    "fire_rule", "best_match_position", "q_metric", "evaluate_rule", "gen_synthetic",
]
