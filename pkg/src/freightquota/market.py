"""Domain types and elementary profit functions for a capacity-constrained freight market.

One shipping company with total capacity ``T`` serves a set of suppliers, each
holding ``production`` units of a single product. Suppliers offer a per-unit
shipping price; the shipper keeps ``price - transport_cost`` per unit moved and
the supplier earns ``market_price - price`` per unit sold, paying
``inventory_cost`` for every unit left behind.

All values are plain floats. Types are frozen dataclasses and every function is
pure, so nothing here needs locking.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

DEFAULT_TOLERANCE = 1e-9
DEFAULT_GRID = 51


class ModelError(ValueError):
    """Base class for errors raised by the engine."""


class DomainError(ModelError):
    """An argument lies outside the domain of an operation."""


class InfeasibleError(ModelError):
    """The input is well formed but admits no valid answer."""


class InvariantViolation(AssertionError):
    """An internal consistency check failed on a computed result."""


def _check_nonnegative(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or value < 0:
        raise DomainError(f"{name} must be a nonnegative number, got {value!r}")
    return value


@dataclass(frozen=True)
class SupplierSpec:
    """One supplier and its product.

    Attributes:
        id: Unique label within a scenario.
        production: Units ready to ship (D).
        market_price: Sale price per unit at destination (S).
        transport_cost: Shipper's cost per unit moved (c).
        inventory_cost: Holding cost per unit not shipped (g).
        social_weight: Money-equivalent social value of one shipped unit (beta).
        mre: Cap on the shipper's revenue from this product; ``None`` means
            the cap never binds.
    """

    id: str
    production: float
    market_price: float
    transport_cost: float
    inventory_cost: float
    social_weight: float = 0.0
    mre: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id.strip():
            raise DomainError("supplier id must be a non-empty string")
        for name in ("production", "market_price", "transport_cost", "inventory_cost", "social_weight"):
            object.__setattr__(self, name, _check_nonnegative(name, getattr(self, name)))
        if self.mre is not None:
            object.__setattr__(self, "mre", _check_nonnegative("mre", self.mre))

    @property
    def price_cap(self) -> float:
        """Highest price the supplier will ever offer (S + g)."""
        return self.market_price + self.inventory_cost

    @property
    def cap_margin(self) -> float:
        """Shipper's margin when the supplier bids its price cap (S + g - c)."""
        return self.price_cap - self.transport_cost

    @property
    def social_margin(self) -> float:
        """Per-unit contribution of a shipped unit to total social utility (S + g + beta - c)."""
        return self.price_cap + self.social_weight - self.transport_cost


@dataclass(frozen=True)
class TieRule:
    """How equal keys are ordered when ranking suppliers.

    ``seed=None`` keeps scenario order (lowest index first); an integer seed
    shuffles each group of tied suppliers with ``random.Random(seed)``.
    """

    seed: int | None = None

    @classmethod
    def parse(cls, text: str) -> "TieRule":
        text = text.strip()
        if text == "index":
            return cls()
        if text.startswith("seed:"):
            try:
                return cls(int(text[5:]))
            except ValueError:
                pass
        raise DomainError(f"tie rule must be 'index' or 'seed:<int>', got {text!r}")

    def __str__(self) -> str:
        return "index" if self.seed is None else f"seed:{self.seed}"


@dataclass(frozen=True)
class MarketScenario:
    """A supplier set sharing one shipper's capacity, plus regulation settings."""

    suppliers: tuple[SupplierSpec, ...]
    capacity: float
    quota_cap_fraction: float | None = None
    price_tolerance: float = DEFAULT_TOLERANCE
    tie_rule: TieRule = field(default_factory=TieRule)
    grid_resolution: int = DEFAULT_GRID

    def __post_init__(self) -> None:
        object.__setattr__(self, "suppliers", tuple(self.suppliers))
        object.__setattr__(self, "capacity", _check_nonnegative("capacity", self.capacity))
        object.__setattr__(self, "price_tolerance", _check_nonnegative("price_tolerance", self.price_tolerance))
        if self.quota_cap_fraction is not None:
            cap = float(self.quota_cap_fraction)
            if not 0.0 <= cap <= 1.0:
                raise DomainError(f"quota_cap_fraction must lie in [0, 1], got {cap!r}")
            object.__setattr__(self, "quota_cap_fraction", cap)
        if int(self.grid_resolution) < 2:
            raise DomainError("grid_resolution must be at least 2")
        seen: set[str] = set()
        for s in self.suppliers:
            if s.id in seen:
                raise DomainError(f"duplicate supplier id {s.id!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.suppliers)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.suppliers)

    @property
    def total_production(self) -> float:
        return math.fsum(s.production for s in self.suppliers)

    def index_of(self, supplier_id: str) -> int:
        for i, s in enumerate(self.suppliers):
            if s.id == supplier_id:
                return i
        raise DomainError(f"unknown supplier id {supplier_id!r}")

    def with_capacity(self, capacity: float) -> "MarketScenario":
        return replace(self, capacity=capacity)

    def with_cap(self, fraction: float | None) -> "MarketScenario":
        return replace(self, quota_cap_fraction=fraction)


@dataclass(frozen=True)
class Allocation:
    """Shipper's allocation: per-supplier quantities plus the case trace.

    ``trace`` holds one ``(supplier id, case label)`` pair per allocator
    iteration, in the order suppliers were served.
    """

    quantities: tuple[float, ...]
    trace: tuple[tuple[str, str], ...] = ()

    @property
    def total(self) -> float:
        return math.fsum(self.quantities)


def check_prices(scenario: MarketScenario, prices: Sequence[float]) -> tuple[float, ...]:
    """Validate a price vector against ``scenario`` and return it as a tuple."""
    if len(prices) != len(scenario):
        raise DomainError(f"expected {len(scenario)} prices, got {len(prices)}")
    return tuple(_check_nonnegative("price", p) for p in prices)


def check_quotas(scenario: MarketScenario, quotas: Sequence[float]) -> tuple[float, ...]:
    """Validate a quota vector: one entry per supplier, 0 <= L_i <= D_i, sum L <= T."""
    if len(quotas) != len(scenario):
        raise DomainError(f"expected {len(scenario)} quotas, got {len(quotas)}")
    out = tuple(_check_nonnegative("quota", q) for q in quotas)
    slack = scenario.price_tolerance
    for s, q in zip(scenario.suppliers, out):
        if q > s.production * (1 + 1e-12) + slack:
            raise DomainError(f"quota {q!r} for {s.id!r} exceeds production {s.production!r}")
    if math.fsum(out) > scenario.capacity * (1 + 1e-12) + slack:
        raise DomainError(f"total quota {math.fsum(out)!r} exceeds capacity {scenario.capacity!r}")
    return out


def rank_order(keys: Sequence[float], tolerance: float = DEFAULT_TOLERANCE,
               tie_rule: TieRule | None = None) -> list[int]:
    """Indices of ``keys`` sorted by descending value.

    Keys within ``tolerance`` of the first key of a run count as tied; ties are
    resolved by ``tie_rule``.
    """
    order = sorted(range(len(keys)), key=lambda i: (-keys[i], i))
    seed = tie_rule.seed if tie_rule is not None else None
    rng = random.Random(seed) if seed is not None else None
    out: list[int] = []
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and keys[order[start]] - keys[order[stop]] <= tolerance:
            stop += 1
        block = order[start:stop]
        if rng is None:
            block.sort()
        else:
            rng.shuffle(block)
        out.extend(block)
        start = stop
    return out


def supplier_profit(spec: SupplierSpec, price: float, shipped: float) -> float:
    """Supplier's profit: sales margin on shipped units minus holding cost on the rest."""
    if not 0.0 <= shipped <= spec.production:
        raise DomainError(f"shipped quantity {shipped!r} outside [0, {spec.production!r}]")
    return shipped * (spec.market_price - price) - spec.inventory_cost * (spec.production - shipped)


def transporter_profit(suppliers: Sequence[SupplierSpec], prices: Sequence[float],
                       alloc: Allocation | Iterable[float]) -> float:
    """Shipper's profit, the sum over suppliers of u_i * (p_i - c_i)."""
    quantities = tuple(alloc.quantities if isinstance(alloc, Allocation) else alloc)
    if not len(suppliers) == len(prices) == len(quantities):
        raise DomainError("suppliers, prices and quantities differ in length")
    return math.fsum(u * (p - s.transport_cost) for s, p, u in zip(suppliers, prices, quantities))
