"""Reaction parsing, mass balance and rule-based route feasibility."""

from .conditions import ConditionBounds, Conditions, parse_conditions
from .feasibility import (
    COMPONENTS,
    DEFAULT_MAX_STEPS,
    FeasibilityReport,
    Route,
    RouteStep,
    Template,
    assess_feasibility,
    corpus_feasibility_rate,
    load_catalog,
    load_rules,
    matching_templates,
    parse_route,
)
from .patterns import FUNCTIONAL_GROUPS
from .reaction import BalanceResult, Reaction, check_mass_balance, parse_reaction

__all__ = [
    "BalanceResult",
    "COMPONENTS",
    "ConditionBounds",
    "Conditions",
    "DEFAULT_MAX_STEPS",
    "FUNCTIONAL_GROUPS",
    "FeasibilityReport",
    "Reaction",
    "Route",
    "RouteStep",
    "Template",
    "assess_feasibility",
    "check_mass_balance",
    "corpus_feasibility_rate",
    "load_catalog",
    "load_rules",
    "matching_templates",
    "parse_conditions",
    "parse_reaction",
    "parse_route",
]
