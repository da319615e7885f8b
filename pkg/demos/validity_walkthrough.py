"""Run a handful of SMILES through the staged validity check and print what stops each one."""

from chemeval.molgraph import bemis_murcko_scaffold, canonical_smiles, parse_smiles
from chemeval.validity import corpus_validity_rate, validate

SAMPLES = [
    "CC(=O)Oc1ccccc1C(=O)O",   # aspirin
    "OC(=O)c1ccccc1",          # benzoic acid, written a different way round
    "C(C",                     # unclosed branch
    "C(C)(C)(C)(C)C",          # five bonds on one carbon
    "c1ccc1",                  # four-membered ring declared aromatic
    "C1#CCCC1",                # triple bond in a five-ring
    "[C@H](C)(C)C",            # chirality on an atom with two identical neighbours
    "F/C=C/F",
]


def main():
    reports = []
    for s in SAMPLES:
        r = validate(s)
        reports.append(r)
        codes = ", ".join(r.codes) or "-"
        print(f"{s:26s} stage={r.stage_reached:12s} codes={codes}")

    print()
    est = corpus_validity_rate(reports)
    print(f"valid: {est.successes}/{est.trials} = {est.point:.1%} "
          f"(95% Wilson interval {est.ci_low:.1%} to {est.ci_high:.1%})")

    print()
    print("canonical forms and scaffolds of the valid ones:")
    for s, r in zip(SAMPLES, reports):
        if r.is_valid:
            scaf = bemis_murcko_scaffold(parse_smiles(s))
            print(f"  {canonical_smiles(s):24s} scaffold {scaf.smiles or '(none)'}")


if __name__ == "__main__":
    main()
