"""Scenario files, bundled data and report rendering.

A scenario file is CSV with a ``#``-prefixed ``key=value`` header::

    # capacity=650000000
    # cap=0.2
    # tie_rule=index
    # grid=51
    id,production,market_price,transport_cost,inventory_cost,social_weight,mre
    Crude Oil,128185505,15.3,1.297,0.79,0.1,

``capacity`` is required; ``cap``, ``tie_rule``, ``grid`` and ``tolerance``
are optional. Other ``#`` lines are comments. An empty ``mre`` cell means the
supplier has no MRE.
"""

from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .allocation import Allocation
from .grouping import Grouping
from .market import (
    DEFAULT_GRID,
    DEFAULT_TOLERANCE,
    DomainError,
    MarketScenario,
    ModelError,
    SupplierSpec,
    TieRule,
)
from .regulator import SocialUtilityReport

COLUMNS = ("id", "production", "market_price", "transport_cost", "inventory_cost", "social_weight", "mre")
REQUIRED = COLUMNS[:-1]
ALIASES = {"D": "production", "S": "market_price", "c": "transport_cost", "g": "inventory_cost",
           "beta": "social_weight", "MRE": "mre"}
HEADER_KEYS = ("capacity", "cap", "tie_rule", "grid", "tolerance")

BUNDLED = ("canadian.csv", "canadian_scenario2.csv")


class ScenarioParseError(ModelError):
    """A scenario or companion file could not be parsed.

    ``code`` is one of ``E_HEADER``, ``E_MISSING_COLUMN``, ``E_NOT_NUMERIC``,
    ``E_NEGATIVE``, ``E_DUPLICATE_ID`` or ``E_INVALID``.
    """

    def __init__(self, code: str, line: int, column: int, message: str) -> None:
        self.code, self.line, self.column, self.message = code, line, column, message
        super().__init__(f"line {line}, column {column}: {message} [{code}]")


def _number(text: str, name: str, line: int, column: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ScenarioParseError("E_NOT_NUMERIC", line, column, f"{name} is not a number: {text!r}") from None
    if math.isnan(value) or math.isinf(value):
        raise ScenarioParseError("E_NOT_NUMERIC", line, column, f"{name} must be finite: {text!r}")
    if value < 0:
        raise ScenarioParseError("E_NEGATIVE", line, column, f"negative {name.replace('_', ' ')}: {text}")
    return value


def parse_scenario(text: str) -> MarketScenario:
    """Parse scenario text; raise ``ScenarioParseError`` at the first problem."""
    header: dict[str, tuple[str, int]] = {}
    body: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            content = line[1:].strip()
            if "=" in content:
                key, _, value = content.partition("=")
                key = key.strip()
                if key not in HEADER_KEYS:
                    raise ScenarioParseError("E_HEADER", lineno, 1, f"unknown header key {key!r}")
                header[key] = (value.strip(), lineno)
            continue
        body.append((lineno, raw))

    if "capacity" not in header:
        raise ScenarioParseError("E_HEADER", 1, 1, "missing '# capacity=<T>' header")
    value, lineno = header["capacity"]
    capacity = _number(value, "capacity", lineno, 1)
    cap = None
    if header.get("cap", ("", 0))[0] not in ("", "none"):
        value, lineno = header["cap"]
        cap = _number(value, "cap", lineno, 1)
        if cap > 1:
            raise ScenarioParseError("E_INVALID", lineno, 1, f"cap must lie in [0, 1], got {value}")
    tie_rule = TieRule()
    if "tie_rule" in header:
        value, lineno = header["tie_rule"]
        try:
            tie_rule = TieRule.parse(value)
        except DomainError as exc:
            raise ScenarioParseError("E_HEADER", lineno, 1, str(exc)) from None
    grid = DEFAULT_GRID
    if "grid" in header:
        value, lineno = header["grid"]
        if not value.isdigit() or int(value) < 2:
            raise ScenarioParseError("E_HEADER", lineno, 1, f"grid must be an integer >= 2, got {value!r}")
        grid = int(value)
    tolerance = DEFAULT_TOLERANCE
    if "tolerance" in header:
        value, lineno = header["tolerance"]
        tolerance = _number(value, "tolerance", lineno, 1)

    suppliers = _parse_rows(body)
    return MarketScenario(tuple(suppliers), capacity, cap, tolerance, tie_rule, grid)


def _parse_rows(body: list[tuple[int, str]]) -> list[SupplierSpec]:
    if not body:
        return []
    rows = list(csv.reader([raw for _, raw in body]))
    lines = [n for n, _ in body]
    names = [ALIASES.get(c.strip(), c.strip()) for c in rows[0]]
    for name in REQUIRED:
        if name not in names:
            raise ScenarioParseError("E_MISSING_COLUMN", lines[0], len(names) + 1, f"missing column {name!r}")
    for col, name in enumerate(names, start=1):
        if name not in COLUMNS:
            raise ScenarioParseError("E_HEADER", lines[0], col, f"unknown column {name!r}")

    suppliers: list[SupplierSpec] = []
    seen: set[str] = set()
    for lineno, cells in zip(lines[1:], rows[1:]):
        if len(cells) < len(REQUIRED) or len(cells) > len(names):
            raise ScenarioParseError("E_MISSING_COLUMN", lineno, min(len(cells), len(names)) + 1,
                                     f"expected {len(names)} fields, found {len(cells)}")
        cells = cells + [""] * (len(names) - len(cells))
        record: dict[str, Any] = {}
        for col, (name, cell) in enumerate(zip(names, cells), start=1):
            cell = cell.strip()
            if name == "id":
                if not cell:
                    raise ScenarioParseError("E_INVALID", lineno, col, "empty supplier id")
                if cell in seen:
                    raise ScenarioParseError("E_DUPLICATE_ID", lineno, col, f"duplicate id {cell!r}")
                record["id"] = cell
            elif name == "mre":
                record["mre"] = _number(cell, name, lineno, col) if cell else None
            else:
                if not cell:
                    raise ScenarioParseError("E_MISSING_COLUMN", lineno, col, f"empty {name} field")
                record[name] = _number(cell, name, lineno, col)
        seen.add(record["id"])
        suppliers.append(SupplierSpec(**record))
    return suppliers


def format_scenario(scenario: MarketScenario) -> str:
    """Write ``scenario`` in the file format; ``parse_scenario`` reads it back unchanged."""
    buf = io.StringIO()
    buf.write(f"# capacity={scenario.capacity!r}\n")
    if scenario.quota_cap_fraction is not None:
        buf.write(f"# cap={scenario.quota_cap_fraction!r}\n")
    buf.write(f"# tie_rule={scenario.tie_rule}\n")
    buf.write(f"# grid={scenario.grid_resolution}\n")
    buf.write(f"# tolerance={scenario.price_tolerance!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for s in scenario.suppliers:
        writer.writerow([s.id, repr(s.production), repr(s.market_price), repr(s.transport_cost),
                         repr(s.inventory_cost), repr(s.social_weight), "" if s.mre is None else repr(s.mre)])
    return buf.getvalue()


def bundled_path(name: str):
    return resources.files("freightquota").joinpath("data", name)


def load_scenario(path: str | Path) -> MarketScenario:
    """Read a scenario file; bare bundled names such as ``canadian.csv`` also resolve."""
    p = Path(path)
    if not p.exists() and p.name in BUNDLED and len(p.parts) == 1:
        return parse_scenario(bundled_path(p.name).read_text(encoding="utf-8"))
    return parse_scenario(p.read_text(encoding="utf-8"))


def parse_vector(text: str, scenario: MarketScenario, what: str) -> tuple[float, ...]:
    """Read ``id,value`` lines (``#`` comments allowed) into a vector in scenario order.

    Suppliers that are not listed get 0.
    """
    values = {sid: 0.0 for sid in scenario.ids}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = next(csv.reader([line]))
        if len(cells) != 2:
            raise ScenarioParseError("E_MISSING_COLUMN", lineno, len(cells) + 1, f"expected 'id,{what}'")
        sid, cell = cells[0].strip(), cells[1].strip()
        if sid == "id" and lineno == 1:
            continue
        if sid not in values:
            raise ScenarioParseError("E_INVALID", lineno, 1, f"unknown supplier id {sid!r}")
        if sid in seen:
            raise ScenarioParseError("E_DUPLICATE_ID", lineno, 1, f"duplicate id {sid!r}")
        seen.add(sid)
        values[sid] = _number(cell, what, lineno, 2)
    return tuple(values[sid] for sid in scenario.ids)


# rendering ------------------------------------------------------------------

def _qty(x: float) -> str:
    return f"{x:,.0f}"


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max([len(h)] + [len(r[k]) for r in rows]) for k, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line.rstrip(), "  ".join("-" * w for w in widths)]
    for r in rows:
        out.append("  ".join(c.rjust(w) if k else c.ljust(w) for k, (c, w) in enumerate(zip(r, widths))).rstrip())
    return "\n".join(out) + "\n"


def grouping_table(scenario: MarketScenario, grouping: Grouping, baseline: Grouping | None = None) -> str:
    """Product / group / transported-amount table; with ``baseline`` both groupings are shown."""
    rows = []
    for s, u, q in zip(scenario.suppliers, grouping.quantities, grouping.quotas):
        group = f"G{grouping.group_of(s.id)}"
        if baseline is None:
            rows.append([s.id, f"{s.cap_margin:.4f}", group, _qty(u)])
        else:
            rows.append([s.id, f"G{baseline.group_of(s.id)}", group, _qty(q), _qty(u)])
    if baseline is None:
        return _table(["Product", "S+g-c", "Group", "Transported amount"], rows)
    return _table(["Product", "Original group", "New group", "Quota", "Transported amount"], rows)


def allocation_table(scenario: MarketScenario, prices: Sequence[float], alloc: Allocation) -> str:
    rows = [[s.id, f"{p - s.transport_cost:.6g}", _qty(u)]
            for s, p, u in zip(scenario.suppliers, prices, alloc.quantities)]
    text = _table(["Product", "p-c", "Transported amount"], rows)
    trace = " -> ".join(f"{sid}:{case}" for sid, case in alloc.trace) or "(none)"
    return text + f"\ntrace: {trace}\n"


def grouping_payload(scenario: MarketScenario, grouping: Grouping) -> dict[str, Any]:
    return {
        "groups": {"G1": list(grouping.g1), "G2": list(grouping.g2), "G3": list(grouping.g3)},
        "suppliers": [
            {"id": s.id, "group": f"G{grouping.group_of(s.id)}", "quota": q, "quantity": u, "competitive": c}
            for s, q, u, c in zip(scenario.suppliers, grouping.quotas, grouping.quantities, grouping.competitive)
        ],
    }


def report_payload(scenario: MarketScenario, report: SocialUtilityReport) -> dict[str, Any]:
    payload = grouping_payload(scenario, report.grouping)
    payload.update({
        "quotas": {sid: q for sid, q in zip(scenario.ids, report.quotas)},
        "pi_s": report.pi_s,
        "q": report.q,
        "breakdown": report.breakdown,
        "terms": report.terms,
    })
    if report.search is not None:
        payload["search"] = {
            "eligible": list(report.search.eligible),
            "searched": list(report.search.searched),
            "resolution": report.search.resolution,
            "points_evaluated": report.search.points_evaluated,
        }
    return payload


def to_machine(payload: Any) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_report(scenario: MarketScenario, report: SocialUtilityReport, fmt: str = "table",
                  baseline: Grouping | None = None) -> str:
    """Render a quota plan as a table or as canonical JSON."""
    if fmt == "machine":
        return to_machine(report_payload(scenario, report))
    text = grouping_table(scenario, report.grouping, baseline)
    lines = [f"\nsocial utility: {report.pi_s:,.2f}"]
    for group, part in report.breakdown.items():
        lines.append(f"  {group}: private {part['private']:,.2f}  social {part['social']:,.2f}")
    return text + "\n".join(lines) + "\n"
