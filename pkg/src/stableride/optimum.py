"""Socially optimal assignments.

Covering every commuter by pair edges and self-loops at minimum total cost is
the same as choosing a matching of maximum total savings
``c_ii + c_jj - c_ij``: unmatched commuters ride alone. The matching is solved
exactly with the blossom algorithm in :mod:`stableride.matching`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError, InvariantError
from .matcher import Assignment
from .matching import max_weight_matching
from .planner import MatchingGraph
from .road import TOL

QUANTUM = 1e-9
EXACT_EDGE_LIMIT = 1500
MAX_COST = 1e12


@dataclass(frozen=True)
class SavingsGraph:
    nodes: tuple[int, ...]
    weighted_edges: tuple[tuple[int, int, float], ...]

    @classmethod
    def from_matching_graph(cls, g: MatchingGraph) -> "SavingsGraph":
        edges = tuple((i, j, g.self_cost(i) + g.self_cost(j) - c)
                      for (i, j), (c, _) in g.pair_edges.items())
        return cls(tuple(range(len(g))), edges)

    def positive(self) -> list[tuple[int, int, float]]:
        return [e for e in self.weighted_edges if e[2] > TOL]


def _check_magnitudes(g: MatchingGraph) -> None:
    worst = max([g.self_cost(k) for k in range(len(g))]
                + [c for c, _ in g.pair_edges.values()], default=0.0)
    if not math.isfinite(worst) or worst > MAX_COST:
        raise InputError(f"cost magnitude {worst} exceeds {MAX_COST:g}")


def social_optimum(g: MatchingGraph, exact_edge_limit: int = EXACT_EDGE_LIMIT) -> Assignment:
    """Minimum-cost feasible assignment.

    Savings are quantised to 1e-9. Up to ``exact_edge_limit`` positive-savings
    edges, each edge also gets a bonus ``2**(m - 1 - rank)`` (rank in pair
    order) below the savings scale, so that among optimal assignments the one
    with the lexicographically smallest sorted pair list wins. Larger graphs
    use the compiled solver with a linear rank bonus, which still prefers
    lower pair ids among equal-savings alternatives but is not a strict
    lexicographic guarantee.
    """
    _check_magnitudes(g)
    n = len(g)
    edges = sorted((i, j, s) for i, j, s in SavingsGraph.from_matching_graph(g).positive())
    m = len(edges)
    if m == 0:
        return Assignment.from_pairs(g, [])
    if m <= exact_edge_limit:
        scale = 1 << m
        weighted = [(i, j, round(s / QUANTUM) * scale + (1 << (m - 1 - r)))
                    for r, (i, j, s) in enumerate(edges)]
        mate = max_weight_matching(n, weighted, exact=True)
    else:
        bonus_scale = (n // 2) * m + 1
        top = max(s for _, _, s in edges)
        quantum = max(QUANTUM, top * bonus_scale / 2.0**60)
        weighted = [(i, j, round(s / quantum) * bonus_scale + (m - r))
                    for r, (i, j, s) in enumerate(edges)]
        mate = max_weight_matching(n, weighted, exact=False)
    pairs = [(v, u) for v, u in enumerate(mate) if u > v]
    return Assignment.from_pairs(g, pairs)


def brute_force_optimum(g: MatchingGraph, max_commuters: int = 12) -> Assignment:
    """Enumerate every feasible assignment; same tie-break as :func:`social_optimum`."""
    n = len(g)
    if n > max_commuters:
        raise InputError(f"brute force limited to {max_commuters} commuters, got {n}")
    _check_magnitudes(g)
    adj = g.adjacency
    selfc = [g.self_cost(k) for k in range(n)]
    best_cost = math.inf
    best_pairs: list[tuple[int, int]] = []
    used = [False] * n
    chosen: list[tuple[int, int]] = []

    def visit(k: int, cost: float) -> None:
        nonlocal best_cost, best_pairs
        while k < n and used[k]:
            k += 1
        if k == n:
            pairs = sorted(chosen)
            if cost < best_cost - TOL or (cost <= best_cost + TOL and pairs < best_pairs):
                best_cost, best_pairs = cost, pairs
            return
        used[k] = True
        visit(k + 1, cost + selfc[k])
        for j in adj[k]:
            if j > k and not used[j]:
                used[j] = True
                chosen.append((k, j))
                visit(k + 1, cost + g.edge(k, j)[0])
                chosen.pop()
                used[j] = False
        used[k] = False

    visit(0, 0.0)
    return Assignment.from_pairs(g, best_pairs)


def reduction_gap(a: Assignment, g: MatchingGraph) -> float:
    """``c(M) - (sum of standalone costs - sum of pair savings)``; zero up to rounding."""
    total_self = math.fsum(g.self_cost(k) for k in range(len(g)))
    savings = math.fsum(g.self_cost(i) + g.self_cost(j) - g.edge(i, j)[0] for i, j in a.pairs)
    return a.social_cost - (total_self - savings)


def check_optimal_not_above(stable: Assignment, optimum: Assignment) -> None:
    if optimum.social_cost > stable.social_cost + TOL:
        raise InvariantError("optimum costs more than a stable assignment")
