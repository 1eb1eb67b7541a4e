"""Capacity allocation, supplier pricing and minimum-quota regulation for freight markets."""

from .allocation import allocate, classify_case
from .equilibrium import MsneInput, msne_cdf_value, msne_cdf_values, verify_indifference
from .grouping import Grouping, group_suppliers, group_suppliers_adjusted, optimal_price, price_cap
from .market import (
    Allocation,
    DomainError,
    InfeasibleError,
    InvariantViolation,
    MarketScenario,
    ModelError,
    SupplierSpec,
    TieRule,
    supplier_profit,
    transporter_profit,
)
from .regulator import SocialUtilityReport, mre_price_bound, quota_eligible, social_utility, solve_summ
from .scenario_io import ScenarioParseError, load_scenario, parse_scenario, render_report
from .sensitivity import capacity_regime, sweep

__all__ = [
    "Allocation", "DomainError", "Grouping", "InfeasibleError", "InvariantViolation", "MarketScenario",
    "ModelError", "MsneInput", "ScenarioParseError", "SocialUtilityReport", "SupplierSpec", "TieRule",
    "allocate", "capacity_regime", "classify_case", "group_suppliers", "group_suppliers_adjusted",
    "load_scenario", "msne_cdf_value", "msne_cdf_values", "mre_price_bound", "optimal_price", "parse_scenario", "price_cap",
    "quota_eligible", "render_report", "social_utility", "solve_summ", "supplier_profit", "sweep",
    "transporter_profit", "verify_indifference",
]
