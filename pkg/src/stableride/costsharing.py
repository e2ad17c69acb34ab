"""Budget-balanced cost sharing between two riders and the induced preferences."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InputError, InvariantError
from .planner import MatchingGraph, SharedRidePlan
from .road import TOL


class Mechanism(str, Enum):
    EQUAL = "eq"
    EGALITARIAN = "ega"
    PROPORTIONAL = "pp"
    SEGMENT_BASED = "sb"

    @classmethod
    def parse(cls, name: "str | Mechanism") -> "Mechanism":
        if isinstance(name, Mechanism):
            return name
        aliases = {m.name.lower().replace("_", "-"): m for m in cls}
        aliases.update({m.name.lower(): m for m in cls})
        try:
            return cls(name) if name in {m.value for m in cls} else aliases[name.lower()]
        except KeyError:
            raise InputError(f"unknown mechanism {name!r}; expected one of eq, ega, pp, sb") from None


ALL_MECHANISMS = tuple(Mechanism)


@dataclass(frozen=True)
class PaymentProfile:
    pair: tuple[str, str]
    payment_i: float
    payment_j: float
    utility_i: float
    utility_j: float

    def payment_of(self, commuter: str) -> float:
        return self.payment_i if commuter == self.pair[0] else self.payment_j

    def utility_of(self, commuter: str) -> float:
        return self.utility_i if commuter == self.pair[0] else self.utility_j


def _segment_based(plan: SharedRidePlan) -> dict[str, float]:
    """Each rider pays for the legs they are on; shared legs are split evenly."""
    if plan.kind == "standalone" or len(plan.segment_costs) != len(plan.stops) - 1:
        raise InvariantError("segment-based sharing needs a pair plan with per-leg costs")
    a, b = plan.order
    sa, da = plan.stop_index(a, "pickup"), plan.stop_index(a, "dropoff")
    sb, db = plan.stop_index(b, "pickup"), plan.stop_index(b, "dropoff")
    if plan.kind == "hitchhiking":
        # b carries a from s_a to d_a
        inner = plan.cost_between(sa, da) / 2
        return {a: inner, b: plan.cost_between(sb, sa) + inner + plan.cost_between(da, db)}
    middle = plan.cost_between(sb, da) / 2
    return {a: plan.cost_between(sa, sb) + middle, b: middle + plan.cost_between(da, db)}


def payments(mech: Mechanism | str, plan: SharedRidePlan, c_self_i: float, c_self_j: float,
             pair: tuple[str, str] | None = None) -> PaymentProfile:
    """Split ``plan.total_cost`` between the two riders.

    ``pair`` names ``(i, j)``, the riders that ``c_self_i`` and ``c_self_j``
    belong to; it defaults to the plan's riders in id order.
    """
    mech = Mechanism.parse(mech)
    if c_self_i <= 0 or c_self_j <= 0:
        raise InputError("standalone costs must be > 0")
    i, j = pair if pair is not None else plan.riders
    cost = plan.total_cost
    if mech is Mechanism.EQUAL:
        p_i = p_j = cost / 2
    elif mech is Mechanism.EGALITARIAN:
        p_i = (cost + c_self_i - c_self_j) / 2
        p_j = (cost + c_self_j - c_self_i) / 2
    elif mech is Mechanism.PROPORTIONAL:
        p_i = c_self_i * cost / (c_self_i + c_self_j)
        p_j = c_self_j * cost / (c_self_i + c_self_j)
    else:
        share = _segment_based(plan)
        p_i, p_j = share[i], share[j]
    return PaymentProfile((i, j), p_i, p_j, c_self_i - p_i, c_self_j - p_j)


def edge_payments(mech: Mechanism | str, g: MatchingGraph, i: int, j: int) -> tuple[float, float]:
    """Payments of commuters ``i`` and ``j`` (graph indices) on their pair edge."""
    _, plan = g.edge(i, j)
    prof = payments(mech, plan, g.self_cost(i), g.self_cost(j),
                    (g.commuters[i].commuter_id, g.commuters[j].commuter_id))
    return prof.payment_i, prof.payment_j


@dataclass(frozen=True)
class PreferenceOrder:
    """Options strictly better than riding alone, best first.

    ``ranked_options`` holds ``(partner_index, payment)``; the standalone ride
    is implicitly last. Options that only match the standalone cost are kept
    in ``tied_with_standalone`` and are never proposed to.
    """

    owner: int
    standalone_cost: float
    ranked_options: tuple[tuple[int, float], ...]
    tied_with_standalone: tuple[tuple[int, float], ...] = ()

    @property
    def partners(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.ranked_options)

    def rank(self, partner: int | None) -> int:
        """Position of ``partner`` (lower is better); standalone ranks last."""
        if partner is None or partner == self.owner:
            return len(self.ranked_options)
        for k, (p, _) in enumerate(self.ranked_options):
            if p == partner:
                return k
        return len(self.ranked_options) + 1


def build_preferences(mech: Mechanism | str, g: MatchingGraph) -> dict[int, PreferenceOrder]:
    """Rank each commuter's pair options by payment, truncated at standalone.

    Equal payments are ordered by partner id (the same rule for everyone).
    """
    mech = Mechanism.parse(mech)
    options: dict[int, list[tuple[float, int]]] = {k: [] for k in range(len(g))}
    for (i, j) in g.pair_edges:
        p_i, p_j = edge_payments(mech, g, i, j)
        options[i].append((p_i, j))
        options[j].append((p_j, i))
    prefs = {}
    for k, opts in options.items():
        c_self = g.self_cost(k)
        opts.sort()
        better = tuple((p, pay) for pay, p in opts if pay < c_self - TOL)
        tied = tuple((p, pay) for pay, p in opts if abs(pay - c_self) <= TOL)
        prefs[k] = PreferenceOrder(k, c_self, better, tied)
    return prefs


def negative_utility_flags(mech: Mechanism | str, g: MatchingGraph) -> list[tuple[tuple[str, str], str]]:
    """Pair edges on which a rider would pay more than riding alone."""
    mech = Mechanism.parse(mech)
    flags = []
    for (i, j) in g.pair_edges:
        p_i, p_j = edge_payments(mech, g, i, j)
        ids = (g.commuters[i].commuter_id, g.commuters[j].commuter_id)
        if g.self_cost(i) - p_i < -TOL:
            flags.append((ids, ids[0]))
        if g.self_cost(j) - p_j < -TOL:
            flags.append((ids, ids[1]))
    return flags
