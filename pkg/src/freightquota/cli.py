"""Command-line interface.

Exit codes: 0 success, 2 parse error, 3 infeasible input, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Sequence

from .allocation import allocate, check_allocation
from .equilibrium import MsneInput, msne_cdf_values, verify_indifference
from .grouping import (
    UnconstrainedPriceError,
    check_grouping,
    group_suppliers,
    group_suppliers_adjusted,
    optimal_price,
)
from .market import DomainError, InvariantViolation, MarketScenario, ModelError, TieRule, transporter_profit
from .regulator import check_report, solve_summ
from .scenario_io import (
    ScenarioParseError,
    allocation_table,
    grouping_payload,
    grouping_table,
    load_scenario,
    parse_vector,
    render_report,
    to_machine,
)
from .sensitivity import linspace, sweep

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4


def _global_flags(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--tie", default=default, help="tie rule: 'index' or 'seed:<n>'")
    parser.add_argument("--tolerance", type=float, default=default, help="price comparison tolerance")
    parser.add_argument("--format", choices=("table", "machine"), default=default, dest="fmt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freightquota", description=__doc__.splitlines()[0])
    _global_flags(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        _global_flags(p, argparse.SUPPRESS)
        return p

    p = command("allocate", "shipper's profit-maximizing allocation at given prices")
    p.add_argument("scenario")
    p.add_argument("--prices", required=True, type=Path, help="file of 'id,price' lines")

    p = command("group", "supplier groups at price caps, optionally after quotas")
    p.add_argument("scenario")
    p.add_argument("--quotas", type=Path, help="file of 'id,quota' lines")

    p = command("equilibrium", "mixed-strategy CDF values from revenue ratios")
    p.add_argument("--ell", required=True, help="comma-separated ratios, one per competing supplier")

    p = command("regulate", "socially optimal minimum quotas")
    p.add_argument("scenario")
    p.add_argument("--cap", type=float, help="quota cap as a fraction of production")
    p.add_argument("--grid", type=int, help="grid points per searched supplier")

    p = command("sweep", "social utility over a range of capacities")
    p.add_argument("scenario")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True, help="number of intervals (steps + 1 points)")
    p.add_argument("--grid", type=int, help="grid points per searched supplier")
    return parser


def _scenario(args: argparse.Namespace) -> MarketScenario:
    scenario = load_scenario(args.scenario)
    changes = {}
    if args.tie is not None:
        changes["tie_rule"] = TieRule.parse(args.tie)
    if args.tolerance is not None:
        changes["price_tolerance"] = args.tolerance
    return dataclasses.replace(scenario, **changes) if changes else scenario


def _allocate(args) -> str:
    scenario = _scenario(args)
    prices = parse_vector(args.prices.read_text(encoding="utf-8"), scenario, "price")
    alloc = allocate(scenario, prices)
    check_allocation(scenario, alloc)
    if args.fmt == "machine":
        return to_machine({
            "quantities": dict(zip(scenario.ids, alloc.quantities)),
            "trace": [list(t) for t in alloc.trace],
            "transporter_profit": transporter_profit(scenario.suppliers, prices, alloc),
        })
    return allocation_table(scenario, prices, alloc)


def _group(args) -> str:
    scenario = _scenario(args)
    baseline = group_suppliers(scenario)
    check_grouping(scenario, baseline)
    grouping = baseline
    if args.quotas is not None:
        quotas = parse_vector(args.quotas.read_text(encoding="utf-8"), scenario, "quota")
        grouping = group_suppliers_adjusted(scenario, quotas)
    if args.fmt == "machine":
        payload = grouping_payload(scenario, grouping)
        prices = {}
        for sid in grouping.g1 + grouping.g2:
            try:
                prices[sid] = optimal_price(scenario, grouping, sid)
            except UnconstrainedPriceError:
                prices[sid] = None
        payload["optimal_prices"] = prices
        return to_machine(payload)
    return grouping_table(scenario, grouping, baseline if args.quotas is not None else None)


def _equilibrium(args) -> str:
    try:
        ell = tuple(float(x) for x in args.ell.split(",") if x.strip())
    except ValueError:
        raise ScenarioParseError("E_NOT_NUMERIC", 1, 1, f"--ell must be comma-separated numbers: {args.ell!r}")
    data = MsneInput(ell)
    cdf = msne_cdf_values(data)
    check = verify_indifference(data, cdf)
    if not check.ok:
        raise InvariantViolation(f"indifference residuals too large: {check.residuals}")
    if args.fmt == "machine":
        return to_machine({"ell": list(ell), "cdf": list(cdf), "residuals": list(check.residuals)})
    lines = ["i  ell          F_i          residual", "-- -----------  -----------  ---------"]
    for i, (x, f, r) in enumerate(zip(ell, cdf, check.residuals), start=1):
        lines.append(f"{i:<2} {x:<11.8f}  {f:<11.8f}  {r:.2e}")
    return "\n".join(lines) + "\n"


def _regulate(args) -> str:
    scenario = _scenario(args)
    if args.cap is not None:
        scenario = scenario.with_cap(args.cap)
    report = solve_summ(scenario, args.grid)
    check_report(scenario, report)
    return render_report(scenario, report, args.fmt, baseline=group_suppliers(scenario))


def _sweep(args) -> str:
    scenario = _scenario(args)
    result = sweep(scenario, linspace(args.start, args.stop, args.steps), args.grid)
    if args.fmt == "machine":
        return to_machine({
            "breakpoints": list(result.breakpoints),
            "rows": [{"T": r.capacity, "pi_s": r.pi_s, "regime": r.regime} for r in result.rows],
        })
    return result.to_csv() + "# breakpoints=" + ";".join(repr(b) for b in result.breakpoints) + "\n"


HANDLERS = {"allocate": _allocate, "group": _group, "equilibrium": _equilibrium,
            "regulate": _regulate, "sweep": _sweep}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.fmt = args.fmt or "table"
    try:
        out = HANDLERS[args.command](args)
    except ScenarioParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (DomainError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
