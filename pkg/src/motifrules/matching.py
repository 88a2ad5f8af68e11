"""Instance graph and lexicographically optimal non-crossing matching.

A feasible instance pairs antecedent occurrence ``i`` with consequent
occurrence ``j`` when the gap from the end of ``i`` to the start of ``j``
is strictly between 0 and ``tau``. The selected set must use each vertex
at most once and contain no crossed pair, so it is an order-preserving
partial alignment of the two time-sorted lists; a prefix dynamic program
finds it exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .scan import Occurrence

BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    weight: float


@dataclass
class MatchGraph:
    antecedents: list
    consequents: list
    edges: list
    tau: float
    _lookup: dict = field(default=None, repr=False, compare=False)

    @property
    def p(self) -> int:
        return len(self.antecedents)

    @property
    def q(self) -> int:
        return len(self.consequents)

    def edge(self, i, j):
        if self._lookup is None:
            self._lookup = {(e.i, e.j): e for e in self.edges}
        return self._lookup.get((i, j))

    @classmethod
    def from_weights(cls, p: int, q: int, weights: dict, tau: float = float("inf")) -> "MatchGraph":
        """Graph over abstract vertices; ``weights`` maps (i, j) to a gap."""
        edges = sorted((Edge(i, j, float(w)) for (i, j), w in weights.items()), key=lambda e: (e.i, e.j))
        return cls(list(range(p)), list(range(q)), edges, tau)


@dataclass(frozen=True)
class MatchResult:
    selected: tuple
    cardinality: int
    total_weight: float

    @property
    def pairs(self):
        return [(e.i, e.j) for e in self.selected]


def build_graph(ants: list[Occurrence], cons: list[Occurrence], tau: float) -> MatchGraph:
    """Feasible instances, with weight = consequent start time - antecedent end time."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    edges = []
    for i, a in enumerate(ants):
        for j, b in enumerate(cons):
            gap = b.time - a.end_time
            if 0 < gap < tau:
                edges.append(Edge(i, j, gap))
    return MatchGraph(list(ants), list(cons), edges, tau)


def _better(x, y):
    """Compare (count, weight, first_edge) triples; True if x is preferred."""
    if x[0] != y[0]:
        return x[0] > y[0]
    if x[1] != y[1]:
        return x[1] < y[1]
    if x[2] is None or y[2] is None:
        return False
    return x[2] < y[2]


def match_noncrossing(graph: MatchGraph) -> MatchResult:
    """Max-cardinality, then min-weight non-crossing matching.

    ``best[i][j]`` holds the optimum over antecedents ``i:`` and consequents
    ``j:`` as (count, weight, first edge). Remaining ties go to the
    lexicographically smallest edge list; because the tail after a fixed
    first edge is itself the optimum of a suffix state, comparing first
    edges is enough.
    """
    p, q = graph.p, graph.q
    empty = (0, 0.0, None)
    best = [[empty] * (q + 1) for _ in range(p + 1)]
    move = [[None] * (q + 1) for _ in range(p + 1)]
    for i in range(p - 1, -1, -1):
        for j in range(q - 1, -1, -1):
            opts = []
            e = graph.edge(i, j)
            if e is not None:
                tail = best[i + 1][j + 1]
                opts.append(((tail[0] + 1, e.weight + tail[1], (i, j)), "take"))
            opts.append((best[i + 1][j], "skip_a"))
            opts.append((best[i][j + 1], "skip_b"))
            choice = opts[0]
            for opt in opts[1:]:
                if _better(opt[0], choice[0]):
                    choice = opt
            best[i][j], move[i][j] = choice

    selected = []
    i = j = 0
    while i < p and j < q:
        m = move[i][j]
        if m == "take":
            selected.append(graph.edge(i, j))
            i, j = i + 1, j + 1
        elif m == "skip_a":
            i += 1
        else:
            j += 1
    count, weight, _ = best[0][0] if p and q else empty
    return MatchResult(tuple(selected), count, weight)


def _compatible(a: Edge, b: Edge) -> bool:
    return a.i != b.i and a.j != b.j and (a.i - b.i) * (a.j - b.j) > 0


def is_feasible(edges) -> bool:
    """Degree at most one per vertex and no crossed pair."""
    return all(_compatible(a, b) for a, b in itertools.combinations(edges, 2))


def brute_force_match(graph: MatchGraph) -> MatchResult:
    """Exhaustive enumeration of feasible edge subsets (small graphs only).

    The constraints are pairwise, so every superset of an infeasible set is
    infeasible and enumeration only ever extends feasible sets.
    """
    if graph.p > BRUTE_FORCE_LIMIT or graph.q > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT}x{BRUTE_FORCE_LIMIT} graphs")
    edges = sorted(graph.edges, key=lambda e: (e.i, e.j))
    best = [(0, 0.0, ())]

    def visit(start, chosen):
        if chosen:
            combo = tuple(chosen)
            w = sum(edges[k].weight for k in combo)
            cur = best[0]
            if (-len(combo), w, combo) < (-cur[0], cur[1], cur[2]):
                best[0] = (len(combo), w, combo)
        for k in range(start, len(edges)):
            if all(_compatible(edges[k], edges[c]) for c in chosen):
                chosen.append(k)
                visit(k + 1, chosen)
                chosen.pop()

    visit(0, [])
    count, weight, combo = best[0]
    return MatchResult(tuple(edges[k] for k in combo), count, weight)
