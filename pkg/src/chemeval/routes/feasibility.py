"""Multi-step routes and the programmatic feasibility checks."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import CatalogMissing, EmptyCorpus, RuleTableMissing
from ..molgraph import MoleculeGraph, iter_smiles_lines, parse_smiles, write_canonical_smiles
from ..stats import RateEstimate, rate_from_counts
from .conditions import ConditionBounds, parse_conditions
from .patterns import FUNCTIONAL_GROUPS, compile_pattern, count_matches, groups_present, side_graph
from .reaction import Reaction, parse_reaction

DEFAULT_MAX_STEPS = 12
COMPONENTS = (
    "reaction_validity",
    "reagent_compatibility",
    "condition_reasonableness",
    "starting_material_availability",
    "step_efficiency",
)
NOT_ASSESSED = ("stereochemical_control", "protecting_group_strategy")


@dataclass(frozen=True)
class Template:
    id: str
    reactant_patterns: tuple[str, ...]
    product_patterns: tuple[str, ...]
    incompatible: tuple[str, ...] = ()

    def __post_init__(self):
        for p in self.reactant_patterns + self.product_patterns:
            compile_pattern(p)
        unknown = set(self.incompatible) - set(FUNCTIONAL_GROUPS)
        if unknown:
            raise ValueError(f"template {self.id}: unknown functional groups {sorted(unknown)}")


def _as_tuple(v) -> tuple[str, ...]:
    return (v,) if isinstance(v, str) else tuple(v)


def load_rules(path: str | Path | None = None) -> list[Template]:
    """Read a rule table (one JSON record per line); ``None`` loads the bundled one."""
    if path is None:
        text = resources.files("chemeval.routes").joinpath("data/templates.jsonl").read_text("utf-8")
    else:
        p = Path(path)
        if not p.is_file():
            raise RuleTableMissing(f"rule table not found: {p}")
        text = p.read_text("utf-8")
    rules = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rec = json.loads(line)
        rules.append(Template(
            rec["id"],
            _as_tuple(rec["reactant_pattern"]),
            _as_tuple(rec["product_pattern"]),
            tuple(rec.get("incompatible", ())),
        ))
    if not rules:
        raise RuleTableMissing("rule table is empty")
    return rules


def load_catalog(path: str | Path | None = None) -> frozenset[str]:
    """Canonical SMILES set from a catalog file; ``None`` loads the bundled demo catalog."""
    if path is None:
        lines = resources.files("chemeval.routes").joinpath("data/catalog.smi").read_text("utf-8").splitlines()
    else:
        p = Path(path)
        if not p.is_file():
            raise CatalogMissing(f"catalog not found: {p}")
        lines = p.read_text("utf-8").splitlines()
    return frozenset(write_canonical_smiles(parse_smiles(s)) for s in iter_smiles_lines(lines))


@dataclass(frozen=True, eq=False)
class RouteStep:
    index: int
    reaction: Reaction
    conditions: str = ""


@dataclass(frozen=True, eq=False)
class Route:
    target: MoleculeGraph
    steps: tuple[RouteStep, ...]
    starting_materials: tuple[MoleculeGraph, ...]

    def wiring_errors(self) -> list[str]:
        """Intermediates that are neither used later nor the final target."""
        target = write_canonical_smiles(self.target)
        errs = []
        for k, step in enumerate(self.steps):
            made = set(step.reaction.canonical("products"))
            later = set()
            for s in self.steps[k + 1:]:
                later |= set(s.reaction.canonical("reactants")) | set(s.reaction.canonical("agents"))
            if k == len(self.steps) - 1:
                if target not in made:
                    errs.append(f"last step does not produce the target {target}")
            elif not made & later:
                errs.append(f"step {step.index} products are not consumed by any later step")
        return errs


_STEP = re.compile(r"^\s*STEP\s+(\d+)\s*[:.]\s*(.+?)\s*$", re.IGNORECASE)
_TARGET = re.compile(r"^\s*TARGET\s*:\s*(\S+)\s*$", re.IGNORECASE)
_SM = re.compile(r"^\s*(?:STARTING(?:\s+MATERIALS?)?|SM)\s*:\s*(.+?)\s*$", re.IGNORECASE)


def parse_route(text: str) -> Route:
    """Parse ``STEP i: <reaction SMILES> | <conditions>`` lines.

    Optional ``TARGET: <smiles>`` and ``STARTING MATERIALS: a, b`` lines
    fill the other fields; by default the target is the first product of
    the last step and the starting materials are reactants not made by an
    earlier step.
    """
    steps = []
    target = None
    declared = None
    for line in text.splitlines():
        if m := _STEP.match(line):
            body = m.group(2)
            rxn_text, _, cond = body.partition("|")
            steps.append(RouteStep(int(m.group(1)), parse_reaction(rxn_text), cond.strip()))
        elif m := _TARGET.match(line):
            target = parse_smiles(m.group(1))
        elif m := _SM.match(line):
            declared = [parse_smiles(s) for s in re.split(r"[,\s]+", m.group(1)) if s]
    if not steps:
        raise ValueError("no STEP lines found in route text")
    if target is None:
        target = steps[-1].reaction.products[0]
    if declared is None:
        made: set[str] = set()
        declared = []
        seen = set()
        for s in steps:
            for g in s.reaction.reactants:
                key = write_canonical_smiles(g)
                if key not in made and key not in seen:
                    seen.add(key)
                    declared.append(g)
            made |= set(s.reaction.canonical("products"))
    return Route(target, tuple(steps), tuple(declared))


@dataclass(frozen=True)
class StepVerdict:
    index: int
    templates: tuple[str, ...]
    incompatible_groups: tuple[str, ...]
    condition_problems: tuple[str, ...]


@dataclass(frozen=True)
class FeasibilityReport:
    reaction_validity: bool
    reagent_compatibility: bool
    condition_reasonableness: bool
    starting_material_availability: bool
    step_efficiency: bool
    failures: tuple[str, ...] = ()
    steps: tuple[StepVerdict, ...] = ()
    not_assessed: tuple[str, ...] = field(default=NOT_ASSESSED)

    @property
    def feasible(self) -> bool:
        return all(getattr(self, c) for c in COMPONENTS)

    def as_dict(self) -> dict:
        d = {c: getattr(self, c) for c in COMPONENTS}
        d["feasible"] = self.feasible
        d["failures"] = list(self.failures)
        d["not_assessed"] = list(self.not_assessed)
        return d


def matching_templates(reaction: Reaction, rules: Sequence[Template]) -> list[Template]:
    """Templates whose reactant motif is present and whose product motif is formed."""
    left = side_graph(reaction.reactants)
    right = side_graph(reaction.products)
    hits = []
    for t in rules:
        if not any(all(count_matches(left, P) for P in compile_pattern(p)) for p in t.reactant_patterns):
            continue
        for p in t.product_patterns:
            comps = compile_pattern(p)
            if sum(count_matches(right, P) for P in comps) > sum(count_matches(left, P) for P in comps):
                hits.append(t)
                break
    return hits


def assess_feasibility(
    route: Route,
    catalog: Iterable[str] | None,
    rules: Sequence[Template] | None,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    bounds: ConditionBounds | None = None,
) -> FeasibilityReport:
    """Run every programmatic check; all failures are collected, not just the first."""
    if rules is None or len(rules) == 0:
        raise RuleTableMissing("a transformation rule table is required")
    if catalog is None:
        raise CatalogMissing("a starting-material catalog is required")
    catalog = frozenset(catalog)
    bounds = bounds or ConditionBounds()
    failures = []
    verdicts = []
    valid = compatible = reasonable = True
    for step in route.steps:
        hits = matching_templates(step.reaction, rules)
        bad_groups: tuple[str, ...] = ()
        if not hits:
            valid = False
            failures.append(f"step {step.index}: no transformation template matches")
        else:
            present = groups_present(side_graph(step.reaction.reactants))
            per = [tuple(sorted(set(t.incompatible) & present)) for t in hits]
            if all(per):
                compatible = False
                bad_groups = per[0]
                failures.append(f"step {step.index}: incompatible groups {', '.join(bad_groups)}")
        problems = tuple(parse_conditions(step.conditions).violations(bounds))
        if problems:
            reasonable = False
            failures.extend(f"step {step.index}: {p}" for p in problems)
        verdicts.append(StepVerdict(step.index, tuple(t.id for t in hits), bad_groups, problems))

    available = True
    for g in route.starting_materials:
        key = write_canonical_smiles(g)
        if key not in catalog:
            available = False
            failures.append(f"starting material {key} not in catalog")

    efficient = len(route.steps) <= max_steps
    if not efficient:
        failures.append(f"{len(route.steps)} steps exceed the maximum of {max_steps}")
    wiring = route.wiring_errors()
    if wiring:
        efficient = False
        failures.extend(wiring)
    return FeasibilityReport(valid, compatible, reasonable, available, efficient,
                             tuple(failures), tuple(verdicts))


def corpus_feasibility_rate(reports: Sequence[FeasibilityReport], confidence: float = 0.95) -> RateEstimate:
    if not reports:
        raise EmptyCorpus("no feasibility reports to aggregate")
    return rate_from_counts(sum(1 for r in reports if r.feasible), len(reports), confidence)
