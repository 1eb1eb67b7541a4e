"""Supplier grouping at price caps, with and without minimum quotas.

Every supplier bids at most its price cap ``S + g``; at those bids the shipper
serves suppliers in descending order of ``S + g - c``. The result splits the
market into three groups:

* ``G1`` ships all of its production,
* ``G2`` (at most one supplier) ships part of it,
* ``G3`` ships nothing beyond its quota.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .market import (
    DomainError,
    InvariantViolation,
    MarketScenario,
    SupplierSpec,
    check_quotas,
    rank_order,
)


class UnconstrainedPriceError(DomainError):
    """No lower-ranked competitor exists, so nothing caps the supplier's price."""


@dataclass(frozen=True)
class Grouping:
    """Partition of suppliers into G1/G2/G3 with the shipped quantities.

    Group tuples list ids in the order the grouper visited them.
    ``quantities`` and ``quotas`` follow scenario order; ``competitive`` is
    the part of each quantity won above the quota.
    """

    g1: tuple[str, ...]
    g2: tuple[str, ...]
    g3: tuple[str, ...]
    quantities: tuple[float, ...]
    competitive: tuple[float, ...]
    quotas: tuple[float, ...]
    order: tuple[str, ...]

    def group_of(self, supplier_id: str) -> int:
        for k, members in enumerate((self.g1, self.g2, self.g3), start=1):
            if supplier_id in members:
                return k
        raise DomainError(f"unknown supplier id {supplier_id!r}")

    def labels(self, ids: Sequence[str]) -> tuple[str, ...]:
        return tuple(f"G{self.group_of(i)}" for i in ids)


def price_cap(spec: SupplierSpec) -> float:
    """Indifference price S + g: above it the supplier prefers to keep its stock."""
    return spec.market_price + spec.inventory_cost


def grouping_order(scenario: MarketScenario) -> list[int]:
    """Supplier indices in descending ``S + g - c`` after tie breaking."""
    keys = [price_cap(s) - s.transport_cost for s in scenario.suppliers]
    return rank_order(keys, scenario.price_tolerance, scenario.tie_rule)


def _fill(capacity: float, productions: Sequence[float], order: Sequence[int],
          slack: float = 0.0) -> tuple[list[int], list[float]]:
    # slack absorbs rounding in T - sum(L) so an exact fit is not read as partial
    groups = [3] * len(productions)
    shares = [0.0] * len(productions)
    remaining = capacity
    for i in order:
        if remaining <= slack:
            break
        if productions[i] <= remaining + slack:
            groups[i] = 1
            shares[i] = productions[i]
            remaining = max(remaining - productions[i], 0.0)
        else:
            groups[i] = 2
            shares[i] = remaining
            remaining = 0.0
    return groups, shares


def _build(scenario: MarketScenario, groups: Sequence[int], shares: Sequence[float],
           quotas: Sequence[float], order: Sequence[int]) -> Grouping:
    ids = scenario.ids
    members = {1: [], 2: [], 3: []}
    for i in order:
        members[groups[i]].append(ids[i])
    return Grouping(
        g1=tuple(members[1]),
        g2=tuple(members[2]),
        g3=tuple(members[3]),
        quantities=tuple(q + s for q, s in zip(quotas, shares)),
        competitive=tuple(shares),
        quotas=tuple(quotas),
        order=tuple(ids[i] for i in order),
    )


def group_suppliers(scenario: MarketScenario) -> Grouping:
    """Categorize suppliers into G1/G2/G3 for an unregulated market."""
    order = grouping_order(scenario)
    productions = [s.production for s in scenario.suppliers]
    groups, shares = _fill(scenario.capacity, productions, order)
    return _build(scenario, groups, shares, [0.0] * len(scenario), order)


def group_suppliers_adjusted(scenario: MarketScenario, quotas: Sequence[float]) -> Grouping:
    """Categorize suppliers after minimum quotas are reserved.

    Quotas are shipped first; the leftover capacity ``T - sum(L)`` is shared
    over the leftover demands ``D_i - L_i`` exactly as in the unregulated
    case. A supplier holding a positive quota that wins nothing beyond it is
    placed in G3: it only ships its quota and pays cost price for it.
    """
    quotas = check_quotas(scenario, quotas)
    order = grouping_order(scenario)
    residual = [max(s.production - q, 0.0) for s, q in zip(scenario.suppliers, quotas)]
    capacity = max(scenario.capacity - math.fsum(quotas), 0.0)
    groups, shares = _fill(capacity, residual, order, 1e-12 * max(1.0, scenario.capacity))
    for i, q in enumerate(quotas):
        if q > 0 and shares[i] <= 0:
            groups[i] = 3
    return _build(scenario, groups, shares, quotas, order)


def optimal_price(scenario: MarketScenario, grouping: Grouping, supplier_id: str) -> float:
    """Best price for a G1 or G2 supplier: the highest cap among the next group down.

    A G1 supplier prices at the G2 cap (or the G3 cap when G2 is empty); the
    G2 supplier prices at the highest G3 cap.
    """
    group = grouping.group_of(supplier_id)
    caps = {s.id: price_cap(s) for s in scenario.suppliers}
    if group == 1:
        rivals = grouping.g2 or grouping.g3
    elif group == 2:
        rivals = grouping.g3
    else:
        raise DomainError(f"{supplier_id!r} is in G3 and has no competitive price")
    if not rivals:
        raise UnconstrainedPriceError(f"no lower-group competitor caps the price of {supplier_id!r}")
    return max(caps[r] for r in rivals)


def check_grouping(scenario: MarketScenario, grouping: Grouping) -> None:
    """Raise ``InvariantViolation`` if an unregulated grouping is inconsistent."""
    if len(grouping.g2) > 1:
        raise InvariantViolation(f"more than one partial supplier: {grouping.g2}")
    ids = scenario.ids
    everyone = grouping.g1 + grouping.g2 + grouping.g3
    if sorted(everyone) != sorted(ids):
        raise InvariantViolation("groups do not partition the suppliers")
    for s, u in zip(scenario.suppliers, grouping.quantities):
        k = grouping.group_of(s.id)
        if k == 1 and u != s.production:
            raise InvariantViolation(f"G1 supplier {s.id} ships {u!r} of {s.production!r}")
        if k == 2 and not 0 < u < s.production:
            raise InvariantViolation(f"G2 supplier {s.id} ships {u!r} of {s.production!r}")
        if k == 3 and u != 0 and not any(grouping.quotas):
            raise InvariantViolation(f"G3 supplier {s.id} ships {u!r} without a quota")
    if math.fsum(grouping.quantities) > scenario.capacity * (1 + 1e-12) + 1e-12:
        raise InvariantViolation("grouping ships more than the capacity")
