"""Stable ride-sharing assignments.

The proposal procedure is a roommates-style extension of deferred acceptance
in which every commuter may end up riding alone.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import networkx as nx

from .costsharing import Mechanism, PreferenceOrder, edge_payments
from .errors import InputError, InvariantError
from .planner import MatchingGraph
from .road import TOL

CYCLE_SEARCH_LENGTH = 12

Outcome = Literal["accepted", "rejected", "displaced"]


@dataclass(frozen=True)
class Assignment:
    """Pairs and singletons partitioning the commuters (graph indices)."""

    pairs: tuple[tuple[int, int], ...]
    singletons: tuple[int, ...]
    social_cost: float

    @classmethod
    def from_pairs(cls, g: MatchingGraph, pairs: Iterable[tuple[int, int]]) -> "Assignment":
        norm = sorted((min(p), max(p)) for p in pairs)
        used: set[int] = set()
        for i, j in norm:
            if i == j or i in used or j in used:
                raise InvariantError(f"commuter appears in two rides: ({i}, {j})")
            if not g.has_edge(i, j):
                raise InvariantError(f"no sharable ride for pair ({i}, {j})")
            used.update((i, j))
        singles = tuple(k for k in range(len(g)) if k not in used)
        cost = math.fsum([g.edge(i, j)[0] for i, j in norm] + [g.self_cost(k) for k in singles])
        return cls(tuple(norm), singles, cost)

    def partner(self) -> dict[int, int]:
        out = {k: k for k in self.singletons}
        for i, j in self.pairs:
            out[i], out[j] = j, i
        return out

    def commuters(self) -> set[int]:
        return set(self.singletons).union(*self.pairs) if self.pairs else set(self.singletons)

    def as_ids(self, g: MatchingGraph) -> dict:
        ids = g.ids
        return {"pairs": [[ids[i], ids[j]] for i, j in self.pairs],
                "singletons": [ids[k] for k in self.singletons],
                "social_cost": self.social_cost}


@dataclass(frozen=True)
class TraceStep:
    proposer: int
    proposee: int
    outcome: Outcome
    old_partner: int | None = None


@dataclass
class MatchTrace:
    rounds: list[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rounds)


class CyclicPreferenceError(RuntimeError):
    """Proposals ended in an unstable state and a cyclic preference exists."""

    def __init__(self, cycles: list[tuple[int, ...]], assignment: Assignment,
                 trace: MatchTrace, blocking: tuple[int, int] | None) -> None:
        super().__init__(f"cyclic preference detected: {cycles[0]}")
        self.cycles = cycles
        self.assignment = assignment
        self.trace = trace
        self.blocking = blocking


def _mutual_lists(prefs: dict[int, PreferenceOrder]) -> dict[int, list[int]]:
    acceptable = {k: set(p.partners) for k, p in prefs.items()}
    return {k: [j for j in p.partners if k in acceptable.get(j, ())] for k, p in prefs.items()}


def proposal_budget(prefs: dict[int, PreferenceOrder]) -> int:
    n = len(prefs)
    longest = max((len(p.ranked_options) for p in prefs.values()), default=0)
    return n * n * (1 + longest)


def replay_trace(trace: MatchTrace, n: int) -> list[tuple[int, int]]:
    """Rebuild the final pairs from a trace."""
    partner: list[int | None] = [None] * n
    for step in trace.rounds:
        if step.outcome == "rejected":
            continue
        i, j = step.proposer, step.proposee
        for k in (i, j):
            old = partner[k]
            if old is not None:
                partner[old] = None
        partner[i], partner[j] = j, i
    return sorted((i, j) for i, j in enumerate(partner) if j is not None and i < j)


def stable_match(prefs: dict[int, PreferenceOrder], g: MatchingGraph,
                 mech: Mechanism | str | None = None) -> tuple[Assignment, MatchTrace]:
    """Run the proposal procedure and verify the outcome.

    Unsuspended commuters are served from a FIFO queue seeded in id order;
    released commuters rejoin at the tail and restart from the top of their
    list. A commuter proposes down its list only to partners better than its
    current one and is suspended once it is held or has nobody left. Every
    accepted proposal resolves a blocking pair. ``mech`` enables the final stability check via
    :func:`find_blocking_pair`; without it the check uses the preference
    payments directly.

    Raises :class:`CyclicPreferenceError` when the proposal budget runs out or
    the result is not stable, and a cyclic preference explains it.
    """
    n = len(g)
    if set(prefs) != set(range(n)):
        raise InputError("preferences must cover every commuter of the graph")
    lists = _mutual_lists(prefs)
    rank = {k: {j: r for r, j in enumerate(lst)} for k, lst in lists.items()}
    worst = math.inf

    partner: list[int | None] = [None] * n
    ptr = [0] * n
    queued = [True] * n
    queue = deque(range(n))
    trace = MatchTrace()
    budget = proposal_budget(prefs)

    # The loop is a deterministic state machine over (partner, ptr, queue) at
    # each pop, so a repeated state means it would never stop. Brent's scheme
    # keeps one snapshot and an XOR hash of (k, partner, ptr) to spot repeats.
    def key(k: int) -> int:
        return hash((k, partner[k], ptr[k]))

    state_hash = 0
    for k in range(n):
        state_hash ^= key(k)
    snap_hash, snap, snap_len, next_snap, pops = None, None, 0, 1, 0

    def set_partner(k: int, v: int | None, reset: bool = False) -> None:
        nonlocal state_hash
        state_hash ^= key(k)
        partner[k] = v
        if reset:
            ptr[k] = 0
        state_hash ^= key(k)

    def release(k: int) -> None:
        # a released commuter starts over: partners that turned it down may be free now
        set_partner(k, None, reset=True)
        if not queued[k]:
            queued[k] = True
            queue.append(k)

    while queue:
        if state_hash == snap_hash and snap == (tuple(partner), tuple(ptr), tuple(queue)):
            # only commuters active during the repeating stretch can explain it
            active = {k for st in trace.rounds[snap_len:] for k in (st.proposer, st.proposee)}
            return _fail(prefs, g, partner, trace, mech, exhausted=True, active=active)
        pops += 1
        if pops == next_snap:
            snap_hash, snap = state_hash, (tuple(partner), tuple(ptr), tuple(queue))
            snap_len = len(trace)
            next_snap *= 2
        i = queue.popleft()
        queued[i] = False
        state_hash ^= key(i)
        mine = lists[i]
        while ptr[i] < len(mine):
            j = mine[ptr[i]]
            cur = partner[i]
            if cur is not None and rank[i][j] >= rank[i][cur]:
                break
            ptr[i] += 1
            if len(trace) >= budget:
                state_hash ^= key(i)
                return _fail(prefs, g, partner, trace, mech, exhausted=True)
            hold = partner[j]
            if hold is not None and rank[j].get(hold, worst) <= rank[j][i]:
                trace.rounds.append(TraceStep(i, j, "rejected"))
                continue
            if hold is not None:
                release(hold)
                trace.rounds.append(TraceStep(i, j, "displaced", hold))
            else:
                trace.rounds.append(TraceStep(i, j, "accepted"))
            if cur is not None:
                release(cur)
            partner[i] = j
            set_partner(j, i)
            break
        state_hash ^= key(i)

    return _fail(prefs, g, partner, trace, mech, exhausted=False)


def _fail(prefs, g, partner, trace, mech, exhausted: bool,
          active: set[int] | None = None) -> tuple[Assignment, MatchTrace]:
    """Verify the final state; return it if stable, raise otherwise."""
    pairs = [(i, j) for i, j in enumerate(partner) if j is not None and i < j]
    result = Assignment.from_pairs(g, pairs)
    blocking = (find_blocking_pair(result, mech, g) if mech is not None
                else _blocking_from_prefs(result, prefs))
    if blocking is None and not exhausted:
        return result, trace
    cycles = detect_cycles(prefs, limit=16, commuters=active, max_length=CYCLE_SEARCH_LENGTH)
    if not cycles and active is not None:
        cycles = detect_cycles(prefs, limit=16, max_length=CYCLE_SEARCH_LENGTH)
    if not cycles:
        what = "proposal budget exhausted" if exhausted else "unstable outcome"
        raise InvariantError(f"{what} without a cyclic preference; blocking pair {blocking}")
    raise CyclicPreferenceError(cycles, result, trace, blocking)


def _blocking_from_prefs(a: Assignment, prefs: dict[int, PreferenceOrder]) -> tuple[int, int] | None:
    partner = a.partner()
    lists = _mutual_lists(prefs)
    for i in sorted(lists):
        for j in lists[i]:
            if i < j and partner[i] != j:
                if (prefs[i].rank(j) < prefs[i].rank(partner[i])
                        and prefs[j].rank(i) < prefs[j].rank(partner[j])):
                    return (i, j)
    return None


def current_payments(a: Assignment, mech: Mechanism | str, g: MatchingGraph) -> list[float]:
    """What each commuter pays under ``a``; singletons pay their standalone cost."""
    pay = [g.self_cost(k) for k in range(len(g))]
    for i, j in a.pairs:
        pay[i], pay[j] = edge_payments(mech, g, i, j)
    return pay


def find_blocking_pair(a: Assignment, mech: Mechanism | str, g: MatchingGraph) -> tuple[int, int] | None:
    """First pair (ascending) that would both strictly pay less by sharing."""
    if a.commuters() != set(range(len(g))):
        raise InputError("assignment does not cover the graph's commuters")
    pay = current_payments(a, mech, g)
    partner = a.partner()
    for i, j in g.pair_edges:
        if partner[i] == j:
            continue
        p_i, p_j = edge_payments(mech, g, i, j)
        if p_i < pay[i] - TOL and p_j < pay[j] - TOL:
            return (i, j)
    return None


def _restricted_lists(prefs: dict[int, PreferenceOrder],
                      commuters: Iterable[int] | None) -> dict[int, list[int]]:
    lists = _mutual_lists(prefs)
    if commuters is None:
        return lists
    keep = set(commuters)
    return {b: [a for a in opts if a in keep] for b, opts in lists.items() if b in keep}


def _cyclic_nodes(lists: dict[int, list[int]]) -> set[tuple[int, int]]:
    """Nodes ``(a, b)`` of the prefers-over relation that lie on some cycle.

    The relation has up to quadratic size per commuter, so reachability is
    computed on an equivalent linear graph: a chain per commuter ``b`` in rank
    order, entered from ``(a, b)`` just below ``a`` and left towards ``(b, c)``.
    """
    aux = nx.DiGraph()
    for b, options in lists.items():
        for r, c in enumerate(options):
            aux.add_edge(("chain", b, r), ("pair", b, c))
            if r + 1 < len(options):
                aux.add_edge(("chain", b, r), ("chain", b, r + 1))
                aux.add_edge(("pair", c, b), ("chain", b, r + 1))
    out = set()
    for comp in nx.strongly_connected_components(aux):
        if len(comp) > 1:
            out.update((node[1], node[2]) for node in comp if node[0] == "pair")
    return out


def preference_digraph(prefs: dict[int, PreferenceOrder], commuters: Iterable[int] | None = None,
                       cyclic_only: bool = False) -> nx.DiGraph:
    """Directed "prefers-over" relation on mutually acceptable ordered pairs.

    Node ``(a, b)`` is commuter ``b`` considering partner ``a``; the arc
    ``(a, b) -> (b, c)`` means ``b`` prefers ``a`` to ``c``. ``commuters``
    restricts the relation to a subset; ``cyclic_only`` drops nodes that lie
    on no cycle.
    """
    lists = _restricted_lists(prefs, commuters)
    keep = _cyclic_nodes(lists) if cyclic_only else None
    dg = nx.DiGraph()
    for b, options in lists.items():
        if keep is not None:
            options = [a for a in options if (a, b) in keep or (b, a) in keep]
        for a in options:
            if keep is None or (a, b) in keep:
                dg.add_node((a, b))
        for x, y in itertools.combinations(options, 2):
            if keep is None or ((x, b) in keep and (b, y) in keep):
                dg.add_edge((x, b), (b, y))
    return dg


def is_cyclic_preference(prefs: dict[int, PreferenceOrder], cycle: Sequence[int]) -> bool:
    """Check the definition directly: each member prefers its predecessor to its successor."""
    s = len(cycle)
    if s < 3 or len(set(cycle)) != s:
        return False
    lists = _mutual_lists(prefs)
    for k, b in enumerate(cycle):
        before, after = cycle[k - 1], cycle[(k + 1) % s]
        opts = lists.get(b, [])
        if before not in opts or after not in opts or opts.index(before) >= opts.index(after):
            return False
    return True


def detect_cycles(prefs: dict[int, PreferenceOrder], limit: int | None = None,
                  commuters: Iterable[int] | None = None,
                  max_length: int | None = None) -> list[tuple[int, ...]]:
    """Cyclic preferences ``(i_1, ..., i_s)``, ``s >= 3``, over distinct commuters.

    ``i_1`` prefers ``i_s`` to ``i_2`` and each later ``i_k`` prefers
    ``i_{k-1}`` to ``i_{k+1}``. Each cycle is rotated to start at its smallest
    commuter. ``limit`` caps how many are returned, ``commuters`` restricts
    the search to a subset and ``max_length`` bounds the cycle length. An
    acyclic relation is recognised in linear time.
    """
    dg = preference_digraph(prefs, commuters, cyclic_only=True)
    if dg.number_of_nodes() == 0:
        return []
    found: set[tuple[int, ...]] = set()
    for cyc in nx.simple_cycles(dg, length_bound=max_length):
        seq = tuple(node[1] for node in cyc)
        if len(seq) < 3 or len(set(seq)) != len(seq):
            continue
        start = seq.index(min(seq))
        found.add(seq[start:] + seq[:start])
        if limit is not None and len(found) >= limit:
            break
    return sorted(found)
