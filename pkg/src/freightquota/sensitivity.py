"""How social utility responds to the shipper's total capacity.

Ranking suppliers by ``S + g - c`` and accumulating their production gives
the regime breakpoints: below the first one only the top supplier ships
(regime A1), between the k-th and (k+1)-th the first k ship fully and the
next one partially, and past the total production everybody ships (the last
regime).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .grouping import grouping_order
from .market import DomainError, MarketScenario
from .regulator import solve_summ


@dataclass(frozen=True)
class SweepRow:
    capacity: float
    pi_s: float
    regime: str
    quotas: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    breakpoints: tuple[float, ...]

    def to_csv(self, delimiter: str = ",") -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        writer.writerow(["T", "pi_s", "regime"])
        for row in self.rows:
            writer.writerow([repr(row.capacity), repr(row.pi_s), row.regime])
        return buf.getvalue()


def regime_breakpoints(scenario: MarketScenario) -> tuple[float, ...]:
    """Cumulative production of the top 1, 2, ..., n suppliers by ``S + g - c``."""
    out, running = [], []
    for i in grouping_order(scenario):
        running.append(scenario.suppliers[i].production)
        out.append(math.fsum(running))
    return tuple(out)


def capacity_regime(scenario: MarketScenario, capacity: float) -> str:
    """Regime label ``A1`` .. ``A{n+1}`` for total capacity ``capacity``."""
    if capacity < 0 or math.isnan(capacity):
        raise DomainError(f"capacity must be nonnegative, got {capacity!r}")
    k = 1 + sum(1 for b in regime_breakpoints(scenario) if b <= capacity)
    return f"A{k}"


def sweep(scenario: MarketScenario, capacities: Iterable[float],
          resolution: int | None = None) -> SweepResult:
    """Optimal social utility at each capacity, tagged with its regime.

    Every point runs the quota search; when no supplier can use a quota the
    search collapses to the zero-quota plan.
    """
    capacities = [float(t) for t in capacities]
    if not capacities:
        raise DomainError("sweep needs at least one capacity value")
    rows = []
    for t in capacities:
        if t < 0:
            raise DomainError(f"capacity must be nonnegative, got {t!r}")
        sc = scenario.with_capacity(t)
        report = solve_summ(sc, resolution)
        rows.append(SweepRow(t, report.pi_s, capacity_regime(sc, t), report.quotas))
    return SweepResult(tuple(rows), regime_breakpoints(scenario))


def linspace(start: float, stop: float, steps: int) -> list[float]:
    """``steps`` equal intervals from ``start`` to ``stop`` (``steps + 1`` points)."""
    if steps < 1:
        raise DomainError("steps must be at least 1")
    return [start + (stop - start) * k / steps for k in range(steps + 1)]


def forward_differences(values: Sequence[float]) -> list[float]:
    return [b - a for a, b in zip(values, values[1:])]
