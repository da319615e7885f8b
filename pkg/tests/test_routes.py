import pytest

from chemeval.errors import CatalogMissing, EmptyCorpus, ReactionSyntaxError, RuleTableMissing
from chemeval.molgraph import canonical_smiles
from chemeval.routes import (
    COMPONENTS,
    ConditionBounds,
    assess_feasibility,
    check_mass_balance,
    corpus_feasibility_rate,
    load_catalog,
    load_rules,
    matching_templates,
    parse_conditions,
    parse_reaction,
    parse_route,
)

RULES = load_rules()
CATALOG = load_catalog()

GOOD_ROUTE = """TARGET: CC(=O)NCc1ccccc1
STEP 1: CC(=O)O.NCc1ccccc1>>CC(=O)NCc1ccccc1 | EDC, HOBt, DMF, 25 °C
"""


def test_parse_reaction_sides():
    r = parse_reaction("CC(=O)O.OCC>[H+]>CC(=O)OCC")
    assert (len(r.reactants), len(r.agents), len(r.products)) == (2, 1, 1)
    assert r.canonical("products") == (canonical_smiles("CCOC(C)=O"),)


def test_parse_reaction_allows_atom_maps():
    r = parse_reaction("[CH3:1][OH:2]>>[CH2:1]=[O:2]")
    assert len(r.products[0].atoms) == 2


@pytest.mark.parametrize("text", ["CCO>CC", "CCO>>", "C(C>>CC", "CC..C>>C", "a>b>c>d"])
def test_reaction_syntax_errors(text):
    with pytest.raises(ReactionSyntaxError):
        parse_reaction(text)


def test_reaction_error_carries_side():
    with pytest.raises(ReactionSyntaxError) as exc:
        parse_reaction("CCO.C(C>>CC")
    assert exc.value.kind == "mismatched_brackets"


@pytest.mark.parametrize("text,balanced,deficit", [
    ("CC(=O)O.OCC>>CC(=O)OCC", True, {}),
    ("CC=O>>CCO", True, {}),
    ("CC>>CCC", False, {"C": 1}),
    ("CO>>CCl", False, {"Cl": 1}),
    ("O>>ClCCl", False, {"C": 1, "Cl": 2}),
    ("CBr.O>[Na+].[OH-]>CO", True, {}),
])
def test_mass_balance(text, balanced, deficit):
    res = check_mass_balance(parse_reaction(text))
    assert bool(res) is balanced
    assert res.deficit == deficit


def test_bundled_rules_and_catalog_load():
    assert len(RULES) >= 20
    assert len({t.id for t in RULES}) == len(RULES)
    assert canonical_smiles("OCC") in CATALOG


@pytest.mark.parametrize("rxn,template", [
    ("CC(=O)O.NCc1ccccc1>>CC(=O)NCc1ccccc1", "amide_coupling"),
    ("CC(=O)OCC>>CC(=O)O", "ester_hydrolysis"),
    ("CC(=O)C>>CC(O)C", "ketone_reduction"),
    ("O=[N+]([O-])c1ccccc1>>Nc1ccccc1", "nitro_reduction"),
])
def test_templates_match(rxn, template):
    assert template in {t.id for t in matching_templates(parse_reaction(rxn), RULES)}


def test_no_template_for_nonsense_step():
    assert matching_templates(parse_reaction("CCO>>c1ccccc1"), RULES) == []


def test_feasible_route_passes_every_component():
    rep = assess_feasibility(parse_route(GOOD_ROUTE), CATALOG, RULES)
    assert rep.feasible, rep.failures
    assert set(rep.as_dict()) >= set(COMPONENTS) | {"feasible", "failures", "not_assessed"}
    assert rep.not_assessed


def test_unmatched_step_fails_reaction_validity():
    rep = assess_feasibility(parse_route("STEP 1: CCO>>c1ccccc1"), CATALOG, RULES)
    assert not rep.reaction_validity and not rep.feasible


def test_incompatible_group_flagged():
    route = "STEP 1: CC(=O)O.NCc1ccccc1.C[Mg]Br>>CC(=O)NCc1ccccc1.C[Mg]Br | 25 °C"
    rep = assess_feasibility(parse_route(route), CATALOG, RULES)
    assert not rep.reagent_compatibility
    assert "organometallic_mg" in rep.steps[0].incompatible_groups


def test_unreasonable_conditions_flagged():
    route = GOOD_ROUTE.replace("25 °C", "650 °C, 500 bar")
    rep = assess_feasibility(parse_route(route), CATALOG, RULES)
    assert not rep.condition_reasonableness
    assert len(rep.steps[0].condition_problems) == 2


def test_missing_starting_material_flagged():
    route = "STEP 1: CC(=O)O.NCc1ccc(cc1)C(F)(F)F>>CC(=O)NCc1ccc(cc1)C(F)(F)F"
    rep = assess_feasibility(parse_route(route), CATALOG, RULES)
    assert not rep.starting_material_availability


def test_fifteen_step_route_exceeds_step_limit():
    lines = ["STEP 1: CC(=O)OCC>>CC(=O)O"]
    for k in range(2, 16):
        if k % 2 == 0:
            lines.append(f"STEP {k}: CC(=O)O.OCC>>CC(=O)OCC")
        else:
            lines.append(f"STEP {k}: CC(=O)OCC>>CC(=O)O")
    rep = assess_feasibility(parse_route("\n".join(lines)), CATALOG, RULES)
    assert not rep.step_efficiency
    assert any("15 steps" in f for f in rep.failures)
    assert rep.reaction_validity


def test_dangling_intermediate_breaks_wiring():
    route = "STEP 1: CC(=O)OCC>>CC(=O)O\nSTEP 2: CC(=O)C>>CC(O)C"
    rep = assess_feasibility(parse_route(route), CATALOG, RULES)
    assert not rep.step_efficiency


def test_all_failures_collected():
    route = "STEP 1: CCO>>c1ccccc1 | 900 K\nTARGET: CCCCCCCCCCCCCCCCCCCC"
    rep = assess_feasibility(parse_route(route), CATALOG, RULES)
    assert not rep.reaction_validity and not rep.condition_reasonableness and not rep.step_efficiency
    assert len(rep.failures) >= 3


def test_missing_resources_raise():
    route = parse_route(GOOD_ROUTE)
    with pytest.raises(RuleTableMissing):
        assess_feasibility(route, CATALOG, [])
    with pytest.raises(CatalogMissing):
        assess_feasibility(route, None, RULES)
    with pytest.raises(RuleTableMissing):
        load_rules("/nonexistent/rules.jsonl")
    with pytest.raises(CatalogMissing):
        load_catalog("/nonexistent/catalog.smi")


def test_route_defaults():
    r = parse_route("STEP 1: CC(=O)OCC>>CC(=O)O\nSTEP 2: CC(=O)O.NC>>CC(=O)NC")
    assert canonical_smiles("CC(=O)NC") == canonical_smiles("CNC(C)=O")
    assert len(r.starting_materials) == 2
    with pytest.raises(ValueError):
        parse_route("no steps here")


@pytest.mark.parametrize("text,temps,pressures", [
    ("0-25 °C", (0.0, 25.0), ()),
    ("reflux at 2 bar", (), (2 / 1.01325,)),
    ("rt, 1 atm", (25.0,), (1.0,)),
    ("373.15 K", (100.0,), ()),
    ("212 °F", (100.0,), ()),
    ("-78 °C to rt", (-78.0, 25.0), ()),
])
def test_parse_conditions(text, temps, pressures):
    c = parse_conditions(text)
    assert c.temperatures_c == pytest.approx(temps)
    assert c.pressures_atm == pytest.approx(pressures)


def test_condition_bounds():
    b = ConditionBounds()
    assert parse_conditions("25 °C, 1 atm").violations(b) == []
    assert len(parse_conditions("-150 °C").violations(b)) == 1
    with pytest.raises(ValueError):
        ConditionBounds(t_min=10, t_max=0)


def test_corpus_rate():
    good = assess_feasibility(parse_route(GOOD_ROUTE), CATALOG, RULES)
    bad = assess_feasibility(parse_route("STEP 1: CCO>>c1ccccc1"), CATALOG, RULES)
    assert corpus_feasibility_rate([good, good, bad, good]).point == 0.75
    with pytest.raises(EmptyCorpus):
        corpus_feasibility_rate([])
