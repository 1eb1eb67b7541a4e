"""Mixed-strategy equilibrium price distributions for the competing suppliers.

Suppliers that win capacity (G1 and G2) cannot sustain a pure-strategy price
equilibrium. Each instead randomizes its bid with a CDF ``F_i``. At a common
price ``p``, the indifference condition for supplier ``i`` reads

    prod_{j != i} F_j(p) = ell_i,    ell_i = o_i / (pi_i + pi'_i)

where ``o_i`` is its expected revenue and ``pi_i``, ``pi'_i`` its full- and
partial-shipment profits. Solving the ``n`` equations gives

    F_i(p) = ( prod_{j != i} ell_j / ell_i**(n - 2) ) ** (1 / (n - 1))

and the scale relation ``F_i * ell_i == F_j * ell_j``.

Expected revenues are inputs here; nothing in this module solves for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .market import DomainError, InfeasibleError


class InfeasibleProfileError(InfeasibleError):
    """The ratio profile implies a CDF value above one."""


@dataclass(frozen=True)
class MsneInput:
    """Ratios ``ell_i = o_i / (pi_i + pi'_i)`` for the ``n`` competing suppliers."""

    ell: tuple[float, ...]

    def __post_init__(self) -> None:
        ell = tuple(float(x) for x in self.ell)
        object.__setattr__(self, "ell", ell)
        if len(ell) < 2:
            raise DomainError("an equilibrium needs at least two competing suppliers")
        lower_ok = (lambda x: x >= 0.0) if len(ell) == 2 else (lambda x: x > 0.0)
        for x in ell:
            if math.isnan(x) or not lower_ok(x) or x > 1.0:
                raise DomainError(f"ratio {x!r} outside the admissible range for n={len(ell)}")

    @property
    def n(self) -> int:
        return len(self.ell)


@dataclass(frozen=True)
class IndifferenceCheck:
    ok: bool
    residuals: tuple[float, ...]


def msne_cdf_value(data: MsneInput, i: int, tolerance: float = 1e-12) -> float:
    """Equilibrium CDF value of supplier ``i``.

    Raises:
        InfeasibleProfileError: the value exceeds ``1 + tolerance``.
    """
    n, ell = data.n, data.ell
    if not 0 <= i < n:
        raise DomainError(f"supplier index {i} out of range for n={n}")
    rivals = math.prod(ell[j] for j in range(n) if j != i)
    value = (rivals / ell[i] ** (n - 2)) ** (1.0 / (n - 1))
    if value > 1.0 + tolerance:
        raise InfeasibleProfileError(f"F_{i} = {value!r} > 1: ratios do not form a mixed strategy")
    return value


def msne_cdf_values(data: MsneInput, tolerance: float = 1e-12) -> tuple[float, ...]:
    return tuple(msne_cdf_value(data, i, tolerance) for i in range(data.n))


def is_feasible(data: MsneInput, tolerance: float = 1e-12) -> bool:
    try:
        msne_cdf_values(data, tolerance)
    except InfeasibleProfileError:
        return False
    return True


def verify_indifference(data: MsneInput, cdf: Sequence[float], tolerance: float = 1e-12) -> IndifferenceCheck:
    """Check ``prod_{j != i} F_j == ell_i`` for every supplier; report the residuals."""
    if len(cdf) != data.n:
        raise DomainError(f"expected {data.n} CDF values, got {len(cdf)}")
    residuals = tuple(
        math.prod(cdf[j] for j in range(data.n) if j != i) - data.ell[i] for i in range(data.n)
    )
    return IndifferenceCheck(all(abs(r) <= tolerance for r in residuals), residuals)
