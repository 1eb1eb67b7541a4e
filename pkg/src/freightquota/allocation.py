"""Shipper's capacity allocation (bounded continuous knapsack, greedy by margin).

Each iteration of the greedy is tagged with one of five cases describing the
state of the remaining capacity relative to the remaining suppliers:

    C1  remaining capacity covers every remaining supplier
    C2  capacity covers the largest remaining production
    C3  capacity sits between smallest and largest production; the top-margin
        supplier does not fit and takes all of it
    C4  capacity sits between smallest and largest production; the top-margin
        supplier fits
    C5  capacity is at most the smallest production; the top-margin supplier
        takes all of it

Legal successions: C1 -> C1, C2 -> C2..C5, C4 -> C3..C5; C3 and C5 end the run.
"""

from __future__ import annotations

import math
from typing import Sequence

from .market import (
    Allocation,
    DomainError,
    InvariantViolation,
    MarketScenario,
    TieRule,
    check_prices,
    rank_order,
)

CASES = ("C1", "C2", "C3", "C4", "C5")

# successor sets; an empty set marks a terminal case
CASE_SUCCESSORS = {
    "C1": {"C1"},
    "C2": {"C2", "C3", "C4", "C5"},
    "C3": set(),
    "C4": {"C3", "C4", "C5"},
    "C5": set(),
}


def _case(capacity: float, productions: Sequence[float], top_production: float) -> str:
    if math.fsum(productions) <= capacity:
        return "C1"
    if max(productions) <= capacity:
        return "C2"
    if top_production <= capacity:
        return "C4"
    if capacity <= min(productions):
        return "C5"
    return "C3"


def classify_case(remaining_capacity: float, productions: Sequence[float], margins: Sequence[float],
                  tolerance: float = 1e-9, tie_rule: TieRule | None = None) -> str:
    """Label the current allocator state with its case C1..C5.

    Args:
        remaining_capacity: Capacity not yet assigned.
        productions: Production of each supplier still waiting.
        margins: ``p - c`` of the same suppliers; the top one (after tie
            breaking) decides between the "fits" and "does not fit" cases.
    """
    if len(productions) != len(margins):
        raise DomainError("productions and margins differ in length")
    if not productions:
        return "C1"
    top = rank_order(margins, tolerance, tie_rule)[0]
    return _case(remaining_capacity, productions, productions[top])


def allocate(scenario: MarketScenario, prices: Sequence[float], *,
             include_unprofitable: bool = False) -> Allocation:
    """Maximize the shipper's profit at the given prices.

    Suppliers are served in descending order of ``p_i - c_i``; each takes
    ``min(remaining capacity, D_i)``. Suppliers whose margin is negative are
    left out because moving them loses money, unless ``include_unprofitable``
    asks for the plain greedy over everybody (the supplier grouper needs that).
    """
    prices = check_prices(scenario, prices)
    suppliers = scenario.suppliers
    tol = scenario.price_tolerance
    margins = [p - s.transport_cost for s, p in zip(suppliers, prices)]
    order = rank_order(margins, tol, scenario.tie_rule)
    if not include_unprofitable:
        order = [i for i in order if margins[i] >= -tol]

    quantities = [0.0] * len(suppliers)
    trace: list[tuple[str, str]] = []
    remaining = scenario.capacity
    for pos, i in enumerate(order):
        if remaining <= 0:
            break
        waiting = [suppliers[j].production for j in order[pos:]]
        trace.append((suppliers[i].id, _case(remaining, waiting, suppliers[i].production)))
        u = min(remaining, suppliers[i].production)
        quantities[i] = u
        remaining -= u
    return Allocation(tuple(quantities), tuple(trace))


def check_allocation(scenario: MarketScenario, alloc: Allocation) -> None:
    """Raise ``InvariantViolation`` unless 0 <= u_i <= D_i and sum u <= T."""
    if len(alloc.quantities) != len(scenario):
        raise InvariantViolation("allocation length differs from supplier count")
    for s, u in zip(scenario.suppliers, alloc.quantities):
        if u < 0 or u > s.production:
            raise InvariantViolation(f"{s.id}: shipped {u!r} outside [0, {s.production!r}]")
    if alloc.total > scenario.capacity * (1 + 1e-12):
        raise InvariantViolation(f"allocation {alloc.total!r} exceeds capacity {scenario.capacity!r}")
