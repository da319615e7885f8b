"""Check two short synthesis routes against the bundled templates and catalog."""

from chemeval.routes import assess_feasibility, check_mass_balance, load_catalog, load_rules, parse_reaction, parse_route

GOOD = """TARGET: CC(=O)NCc1ccccc1
STEP 1: CC(=O)OCC>>CC(=O)O | NaOH, H2O, 0-25 °C
STEP 2: CC(=O)O.NCc1ccccc1>>CC(=O)NCc1ccccc1 | EDC, DMF, rt
"""

BAD = """STEP 1: CC(=O)O.NCc1ccccc1.C[Mg]Br>>CC(=O)NCc1ccccc1 | 450 °C, 300 bar
STEP 2: CCO>>c1ccccc1
"""


def show(name, text, catalog, rules):
    rep = assess_feasibility(parse_route(text), catalog, rules)
    print(f"{name}: feasible={rep.feasible}")
    for key, value in rep.as_dict().items():
        if key not in ("feasible", "failures", "not_assessed"):
            print(f"  {key:32s} {value}")
    for f in rep.failures:
        print(f"  - {f}")
    print()


def main():
    catalog, rules = load_catalog(), load_rules()
    print(f"{len(rules)} templates, {len(catalog)} catalog molecules\n")
    for rxn in ("CC(=O)O.OCC>>CC(=O)OCC", "CC>>CCC"):
        bal = check_mass_balance(parse_reaction(rxn))
        print(f"{rxn:28s} balanced={bal.balanced} deficit={bal.deficit}")
    print()
    show("good route", GOOD, catalog, rules)
    show("bad route", BAD, catalog, rules)


if __name__ == "__main__":
    main()
