"""Social utility of quota plans and the regulator's search for minimum quotas.

With MRE non-binding, total social utility is independent of the shipping
prices (they are transfers between supplier and shipper). Per supplier:

    G1:  D (S + beta - c)
    G2:  (Q + L)(S + g + beta - c) - g D,   Q = (T - sum L) - sum_{G1} (D - L)
    G3:  L (S + g + beta - c) - g D

which is the same as ``sum_i u_i * w_i - sum_i g_i D_i`` with the social
margin ``w_i = S_i + g_i + beta_i - c_i``. The search uses the vectorized
second form; reports are built from the group-wise first form.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grouping import Grouping, group_suppliers, group_suppliers_adjusted, grouping_order
from .market import (
    DomainError,
    InvariantViolation,
    MarketScenario,
    SupplierSpec,
    check_quotas,
)

log = logging.getLogger(__name__)

_CHUNK = 1 << 18
_MAX_POLISH_ROUNDS = 200


@dataclass(frozen=True)
class SearchSummary:
    """How ``solve_summ`` reached its answer."""

    eligible: tuple[str, ...]
    searched: tuple[str, ...]
    resolution: int | None
    points_evaluated: int
    polish_rounds: int


@dataclass(frozen=True)
class SocialUtilityReport:
    """Social utility of one quota plan.

    ``breakdown`` maps ``"G1"``, ``"G2"``, ``"G3"`` to the private
    (supplier plus shipper) and social parts of that group's utility;
    ``terms`` gives each supplier's total contribution.
    """

    quotas: tuple[float, ...]
    grouping: Grouping
    pi_s: float
    q: float
    breakdown: dict[str, dict[str, float]]
    terms: dict[str, float]
    search: SearchSummary | None = field(default=None, compare=False)


def social_margin(spec: SupplierSpec) -> float:
    return spec.market_price + spec.inventory_cost + spec.social_weight - spec.transport_cost


def social_utility(scenario: MarketScenario, quotas: Sequence[float]) -> SocialUtilityReport:
    """Evaluate the regulator's objective for the quotas ``quotas``."""
    quotas = check_quotas(scenario, quotas)
    grouping = group_suppliers_adjusted(scenario, quotas)
    suppliers = scenario.suppliers
    index = {s.id: i for i, s in enumerate(suppliers)}
    q = (scenario.capacity - math.fsum(quotas)) - math.fsum(
        suppliers[index[k]].production - quotas[index[k]] for k in grouping.g1
    )

    breakdown = {f"G{k}": {"private": 0.0, "social": 0.0} for k in (1, 2, 3)}
    terms: dict[str, float] = {}
    parts: dict[str, list[tuple[float, float]]] = {"G1": [], "G2": [], "G3": []}
    for i, s in enumerate(suppliers):
        group = f"G{grouping.group_of(s.id)}"
        L = quotas[i]
        if group == "G1":
            shipped = s.production
            total = s.production * (s.market_price + s.social_weight - s.transport_cost)
        elif group == "G2":
            shipped = q + L
            total = shipped * social_margin(s) - s.inventory_cost * s.production
        else:
            shipped = L
            total = L * social_margin(s) - s.inventory_cost * s.production
        social = s.social_weight * shipped
        terms[s.id] = total
        parts[group].append((total - social, social))
    for group, rows in parts.items():
        breakdown[group]["private"] = math.fsum(r[0] for r in rows)
        breakdown[group]["social"] = math.fsum(r[1] for r in rows)
    pi_s = math.fsum(terms.values())
    return SocialUtilityReport(quotas, grouping, pi_s, q, breakdown, terms)


def check_report(scenario: MarketScenario, report: SocialUtilityReport) -> None:
    """Raise ``InvariantViolation`` if the report's parts do not add up."""
    total = math.fsum(v for part in report.breakdown.values() for v in part.values())
    if abs(total - report.pi_s) > 1e-6 * max(1.0, abs(report.pi_s)):
        raise InvariantViolation(f"breakdown sums to {total!r}, objective is {report.pi_s!r}")
    for sid in report.grouping.g2:
        i = scenario.index_of(sid)
        expected = report.q + report.quotas[i]
        if abs(report.grouping.quantities[i] - expected) > 1e-6 * max(1.0, expected):
            raise InvariantViolation(f"G2 supplier {sid} ships {report.grouping.quantities[i]!r}, expected {expected!r}")


def quota_eligible(scenario: MarketScenario, grouping: Grouping | None = None) -> frozenset[str]:
    """G3 suppliers whose social margin is at least the G2 supplier's.

    A G3 supplier with ``S + g + beta - c`` below the sum of the same quantity
    over G2 never deserves a minimum quota; everyone else in G3 is a
    candidate. ``grouping`` defaults to the unregulated grouping.
    """
    grouping = grouping if grouping is not None else group_suppliers(scenario)
    by_id = {s.id: s for s in scenario.suppliers}
    threshold = math.fsum(social_margin(by_id[k]) for k in grouping.g2)
    return frozenset(k for k in grouping.g3 if social_margin(by_id[k]) >= threshold)


def quota_free_suppliers(scenario: MarketScenario) -> frozenset[str]:
    """Suppliers whose optimal quota is zero regardless of the other quotas.

    Cutting supplier ``i``'s quota frees capacity that goes to the
    highest-ranked supplier with unmet demand, which is ``i`` itself or
    someone ranked above it. If every higher-ranked supplier has a social
    margin at least ``i``'s, the cut never lowers utility, so ``L_i = 0``.
    """
    order = grouping_order(scenario)
    w = [social_margin(s) for s in scenario.suppliers]
    tol = scenario.price_tolerance
    free = set()
    for pos, i in enumerate(order):
        if all(w[i] <= w[j] + tol for j in order[:pos]):
            free.add(scenario.suppliers[i].id)
    return frozenset(free)


class _Evaluator:
    """Vectorized objective ``sum u*w - sum g*D`` over batches of quota vectors."""

    def __init__(self, scenario: MarketScenario) -> None:
        sup = scenario.suppliers
        self.order = np.array(grouping_order(scenario), dtype=np.intp)
        self.D = np.array([s.production for s in sup], dtype=float)
        self.w = np.array([social_margin(s) for s in sup], dtype=float)
        self.T = scenario.capacity
        self.const = math.fsum(s.inventory_cost * s.production for s in sup)

    def __call__(self, L: np.ndarray) -> np.ndarray:
        residual = (self.D - L)[:, self.order]
        before = np.cumsum(residual, axis=1) - residual
        capacity = self.T - L.sum(axis=1)
        share = np.clip(capacity[:, None] - before, 0.0, residual)
        u = L.copy()
        u[:, self.order] += share
        return u @ self.w - self.const


def _tol(value: float) -> float:
    return 1e-12 * max(1.0, abs(value))


def _prefer(a: tuple[float, float, tuple], b: tuple[float, float, tuple] | None) -> bool:
    """True if candidate ``a`` beats ``b``: higher objective, then smaller total, then lexicographic."""
    if b is None:
        return True
    if a[0] > b[0] + _tol(b[0]):
        return True
    if a[0] < b[0] - _tol(b[0]):
        return False
    if a[1] < b[1] - _tol(b[1]):
        return True
    if a[1] > b[1] + _tol(b[1]):
        return False
    return a[2] < b[2]


def _best_row(L: np.ndarray, values: np.ndarray) -> int:
    top = values.max()
    rows = np.flatnonzero(values >= top - _tol(top))
    totals = L[rows].sum(axis=1)
    low = totals.min()
    rows = rows[totals <= low + _tol(low)]
    # np.lexsort sorts by the last key first
    keys = tuple(L[rows, j] for j in reversed(range(L.shape[1])))
    return int(rows[np.lexsort(keys)[0]])


def _axis_values(scenario: MarketScenario, i: int, resolution: int, integer: bool) -> np.ndarray:
    s = scenario.suppliers[i]
    upper = min(s.production, scenario.capacity)
    if scenario.quota_cap_fraction is not None:
        upper = min(upper, scenario.quota_cap_fraction * s.production)
    if integer:
        return np.arange(0, math.floor(upper + 1e-9) + 1, dtype=float)
    grid = np.linspace(0.0, s.production, resolution)
    extra = [0.0, upper, s.production, scenario.capacity]
    values = np.unique(np.concatenate([grid, extra]))
    return values[values <= upper]


def solve_summ(scenario: MarketScenario, resolution: int | None = None, *,
               integer: bool = False) -> SocialUtilityReport:
    """Search for the minimum-quota plan that maximizes social utility.

    Quotas of suppliers that can never profit from one (see
    ``quota_free_suppliers``) are fixed at zero. The remaining suppliers are
    searched on a grid of ``resolution`` points over ``[0, D_i]`` plus the
    points ``0``, ``D_i``, ``cap * D_i`` and ``T``, restricted to
    ``sum L <= T`` and the quota cap. The best grid point is then refined by
    coordinate moves to the breakpoints of the piecewise-linear objective.
    With ``integer=True`` the grid is every integer ``0..D_i`` instead.

    Ties go to the smaller total quota, then the lexicographically smaller
    vector, so the answer does not depend on evaluation order.
    """
    resolution = int(resolution if resolution is not None else scenario.grid_resolution)
    if resolution < 2:
        raise DomainError("grid resolution must be at least 2 points per supplier")
    n = len(scenario)
    ids = scenario.ids
    eligible = tuple(sorted(quota_eligible(scenario)))
    free = quota_free_suppliers(scenario)
    axes = [i for i in range(n) if ids[i] not in free]
    evaluate = _Evaluator(scenario)
    capacity = scenario.capacity

    best: tuple[float, float, tuple] | None = None
    points = 0
    if axes:
        values = [_axis_values(scenario, i, resolution, integer) for i in axes]
        shape = tuple(len(v) for v in values)
        total = math.prod(shape)
        if total > 50_000_000:
            log.warning("quota grid has %d points; consider a coarser resolution", total)
        for start in range(0, total, _CHUNK):
            idx = np.unravel_index(np.arange(start, min(start + _CHUNK, total)), shape)
            L = np.zeros((len(idx[0]), n))
            for k, i in enumerate(axes):
                L[:, i] = values[k][idx[k]]
            L = L[L.sum(axis=1) <= capacity + _tol(capacity)]
            if not len(L):
                continue
            points += len(L)
            vals = evaluate(L)
            r = _best_row(L, vals)
            cand = (float(vals[r]), float(L[r].sum()), tuple(L[r]))
            if _prefer(cand, best):
                best = cand
    else:
        L = np.zeros((1, n))
        best = (float(evaluate(L)[0]), 0.0, tuple(L[0]))
        points = 1

    rounds = 0
    if axes and best is not None:
        best, rounds, extra = _polish(scenario, evaluate, axes, best, integer)
        points += extra

    quotas = [float(x) for x in best[2]]
    report = social_utility(scenario, quotas)
    summary = SearchSummary(eligible, tuple(ids[i] for i in axes), None if integer else resolution, points, rounds)
    return SocialUtilityReport(report.quotas, report.grouping, report.pi_s, report.q,
                               report.breakdown, report.terms, summary)


def _polish(scenario: MarketScenario, evaluate: _Evaluator, axes: Sequence[int],
            best: tuple[float, float, tuple], integer: bool):
    """Coordinate ascent over the breakpoints of the objective along each searched axis."""
    sup = scenario.suppliers
    order = list(evaluate.order)
    cap = scenario.quota_cap_fraction
    points = 0
    for rounds in range(1, _MAX_POLISH_ROUNDS + 1):
        moved = False
        for i in axes:
            L = list(best[2])
            others = math.fsum(L[j] for j in range(len(L)) if j != i)
            upper = min(sup[i].production, scenario.capacity - others)
            if cap is not None:
                upper = min(upper, cap * sup[i].production)
            upper = max(upper, 0.0)
            cands = {0.0, upper}
            prefix = 0.0
            for j in order:
                if j != i:
                    cands.add(scenario.capacity - others - prefix)
                    prefix += sup[j].production - L[j]
            cands.add(scenario.capacity - others - prefix)
            if integer:
                cands = set(itertools.chain.from_iterable((math.floor(c), math.ceil(c)) for c in cands))
            row = sorted(min(max(c, 0.0), upper) for c in cands)
            if integer:
                row = [c for c in row if c == int(c)]
            M = np.tile(np.array(L, dtype=float), (len(row), 1))
            M[:, i] = row
            points += len(row)
            vals = evaluate(M)
            r = _best_row(M, vals)
            cand = (float(vals[r]), float(M[r].sum()), tuple(M[r]))
            if cand[0] > best[0] + _tol(best[0]):
                best = cand
                moved = True
        if not moved:
            return best, rounds, points
    return best, _MAX_POLISH_ROUNDS, points


def mre_price_bound(spec: SupplierSpec, shipped: float) -> float:
    """Highest price compatible with the supplier's MRE: ``MRE / u + c``.

    Returns ``math.inf`` when the supplier has no MRE.
    """
    if spec.mre is None:
        return math.inf
    if shipped <= 0:
        raise DomainError("the MRE price bound is undefined for a zero shipment")
    return spec.mre / shipped + spec.transport_cost


def mre_violations(scenario: MarketScenario, prices: Sequence[float], quantities: Sequence[float]) -> list[str]:
    """Ids of suppliers whose offered price breaks their MRE bound at the given shipment."""
    out = []
    for s, p, u in zip(scenario.suppliers, prices, quantities):
        if s.mre is None or u <= 0:
            continue
        if p > mre_price_bound(s, u) + scenario.price_tolerance:
            out.append(s.id)
    return out
