import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemeval.errors import AromaticityError, SmilesSyntaxError
from chemeval.molgraph import (
    BondOrder,
    allowed_valences,
    assign_implicit_hydrogens,
    bemis_murcko_scaffold,
    canonical_smiles,
    iter_smiles_lines,
    kekulize,
    parse_smiles,
    perceive_aromaticity,
    perceive_rings,
    random_smiles,
    standardize_graph,
    write_canonical_smiles,
)

from oracles import isomorphic, isomorphic_with_stereo


def test_single_atom():
    g = parse_smiles("C")
    assert len(g.atoms) == 1 and g.bonds == ()


def test_unmatched_branch_position():
    with pytest.raises(SmilesSyntaxError) as exc:
        parse_smiles("C(C")
    assert exc.value.kind == "mismatched_brackets"
    assert exc.value.position == 3


def test_unclosed_ring_digit():
    with pytest.raises(SmilesSyntaxError) as exc:
        parse_smiles("C1CC")
    assert exc.value.kind == "ring_closure_error"


def test_bracket_atom_grammar():
    atom = parse_smiles("[13CH4]").atoms[0]
    assert (atom.element, atom.isotope, atom.explicit_h, atom.charge) == ("C", 13, 4, 0)


@pytest.mark.parametrize("text,kind", [
    ("C=", "dangling_bond"),
    ("[Xx]", "unknown_element"),
    ("C1CC1=1", "ring_closure_error"),
    ("C=1CC-1", "ring_closure_error"),
    ("[5C]", "invalid_isotope"),
    ("C*C", "unsupported_feature"),
    ("C$C", "unsupported_feature"),
    ("[CH4:1]", "unsupported_feature"),
    ("C)C", "mismatched_brackets"),
    ("[CH4", "mismatched_brackets"),
    ("CC>O", "unsupported_feature"),
])
def test_syntax_error_kinds(text, kind):
    with pytest.raises(SmilesSyntaxError) as exc:
        parse_smiles(text)
    assert exc.value.kind == kind


def test_whitespace_trimmed():
    assert write_canonical_smiles(parse_smiles("  CCO \n")) == canonical_smiles("CCO")


def test_empty_input_rejected():
    with pytest.raises(SmilesSyntaxError):
        parse_smiles("   ")


@pytest.mark.parametrize("text,expected", [
    ("C", [4]),
    ("c1ccccc1", [1] * 6),
    ("CC(=O)O", [3, 0, 0, 1]),
    ("C#N", [1, 0]),
    ("CN(=O)=O", [3, 0, 0, 0]),
    ("c1cc[nH]c1", [1, 1, 1, 1, 1]),
    ("c1ccncc1", [1, 1, 1, 0, 1, 1]),
    ("[NH4+]", [4]),
    ("C[O-]", [3, 0]),
])
def test_implicit_hydrogens(text, expected):
    g = assign_implicit_hydrogens(parse_smiles(text))
    assert [a.total_h for a in g.atoms] == expected


def test_bracket_atom_keeps_explicit_h():
    a = assign_implicit_hydrogens(parse_smiles("[CH3]")).atoms[0]
    assert a.explicit_h == 3 and a.implicit_h == 0


def test_overvalent_atom_flagged_not_filled():
    g = assign_implicit_hydrogens(parse_smiles("C(C)(C)(C)(C)C"))
    assert g.atoms[0].valence_unfit and g.atoms[0].total_h == 0


@pytest.mark.parametrize("element,charge,expected", [
    ("C", 0, (4,)), ("N", 0, (3, 5)), ("O", 0, (2,)), ("S", 0, (2, 4, 6)),
    ("N", 1, (4,)), ("O", -1, (1,)), ("Cl", 0, (1,)), ("B", 0, (3,)),
])
def test_valence_table(element, charge, expected):
    assert tuple(allowed_valences(element, charge)) == expected


def test_hydrogen_never_exceeds_max_valence():
    for s in ["CCO", "C=CC#N", "NC(=O)N", "OS(=O)(=O)O", "c1ccc2ccccc2c1", "P(=O)(O)(O)O"]:
        g = assign_implicit_hydrogens(parse_smiles(s))
        for i, a in enumerate(g.atoms):
            assert g.bond_order_sum(i) + a.total_h <= max(allowed_valences(a.element, a.charge))


@pytest.mark.parametrize("a,b", [
    ("OCC", "CCO"),
    ("C1=CC=CC=C1", "c1ccccc1"),
    ("N1C=CC=C1", "c1cc[nH]c1"),
    ("OC(=O)c1ccccc1", "c1ccc(cc1)C(O)=O"),
    ("C[C@@H](N)C(=O)O", "N[C@H](C)C(=O)O"),
    ("F/C=C/F", "F\\C=C\\F"),
    ("[2H]C", "C[2H]"),
])
def test_same_molecule_same_canonical(a, b):
    assert canonical_smiles(a) == canonical_smiles(b)


@pytest.mark.parametrize("a,b", [
    ("C[C@@H](N)C(=O)O", "C[C@H](N)C(=O)O"),
    ("F/C=C/F", "F/C=C\\F"),
    ("CCO", "COC"),
    ("[13CH4]", "C"),
    ("C[NH3+]", "CN"),
])
def test_different_molecules_differ(a, b):
    assert canonical_smiles(a) != canonical_smiles(b)


def test_canonical_idempotent(data_dir):
    for s in list(iter_smiles_lines(data_dir / "seeds.smi"))[:80]:
        c = canonical_smiles(s)
        assert canonical_smiles(c) == c


def test_roundtrip_isomorphism_on_seeds(data_dir):
    for s in list(iter_smiles_lines(data_dir / "seeds.smi"))[:80]:
        g = standardize_graph(parse_smiles(s))
        back = standardize_graph(parse_smiles(canonical_smiles(s)))
        assert isomorphic(g, back), s
        assert isomorphic_with_stereo(g, back), s


_SEEDS = ["CC(=O)Oc1ccccc1C(=O)O", "C[C@H](O)[C@@H](N)C", "C/C=C/C(=O)O", "c1ccc2[nH]ccc2c1",
          "O=C1NC(=O)C(N1)(c1ccccc1)c1ccccc1", "OC[C@H]1O[C@@H](O)[C@H](O)[C@@H](O)[C@@H]1O"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(_SEEDS), st.integers(0, 2**32 - 1))
def test_random_rewrites_share_canonical_form(seed_smiles, rng_seed):
    g = parse_smiles(seed_smiles)
    rewrite = random_smiles(g, random.Random(rng_seed))
    assert canonical_smiles(rewrite) == write_canonical_smiles(g)
    assert isomorphic(standardize_graph(g), standardize_graph(parse_smiles(rewrite)))


@pytest.mark.parametrize("text,n_rings,sizes", [
    ("CCO", 0, []),
    ("C1CC1", 1, [3]),
    ("c1ccc2ccccc2c1", 2, [6, 6]),
    ("C12CC3CC(CC(C3)C1)C2", 3, [6, 6, 6]),
    ("C1CC2CCC1C2", 2, [5, 5]),
])
def test_rings(text, n_rings, sizes):
    g = parse_smiles(text)
    rings = perceive_rings(g)
    assert len(rings) == n_rings == len(g.bonds) - len(g.atoms) + g.fragment_count
    assert sorted(len(r) for r in rings) == sizes


def test_ring_count_is_cycle_rank_on_seeds(data_dir):
    for s in iter_smiles_lines(data_dir / "seeds.smi"):
        g = parse_smiles(s)
        assert len(perceive_rings(g)) == len(g.bonds) - len(g.atoms) + g.fragment_count


@pytest.mark.parametrize("text", ["c1ccccc1", "c1ccncc1", "c1ccoc1", "c1cc[nH]c1", "c1ccsc1",
                                  "O=c1cc[nH]cc1", "c1ccc2ccccc2c1"])
def test_aromatic_rings_accepted(text):
    g = perceive_aromaticity(assign_implicit_hydrogens(parse_smiles(text)))
    assert all(g.atoms[i].aromatic for i in g.ring_atoms)


def test_declared_antiaromatic_ring_rejected():
    with pytest.raises(AromaticityError):
        perceive_aromaticity(assign_implicit_hydrogens(parse_smiles("c1ccc1")))


def test_kekule_benzene_perceived_aromatic():
    g = perceive_aromaticity(assign_implicit_hydrogens(parse_smiles("C1=CC=CC=C1")))
    assert all(a.aromatic for a in g.atoms)
    assert all(b.order is BondOrder.AROMATIC for b in g.bonds)


def test_cyclohexane_not_aromatic():
    g = perceive_aromaticity(assign_implicit_hydrogens(parse_smiles("C1CCCCC1")))
    assert not any(a.aromatic for a in g.atoms)


def test_kekulize_alternates():
    k = kekulize(assign_implicit_hydrogens(parse_smiles("c1ccccc1")))
    orders = sorted(int(b.order) for b in k.bonds)
    assert orders == [1, 1, 1, 2, 2, 2]


@pytest.mark.parametrize("text,expected", [
    ("Cc1ccccc1", "c1ccccc1"),
    ("CCc1ccc(cc1)C(=O)O", "c1ccccc1"),
    ("c1ccc(cc1)Cc1ccccc1", "c1ccc(cc1)Cc1ccccc1"),
    ("O=C1CCCCC1", "C1CCCCC1"),
])
def test_scaffold(text, expected):
    assert bemis_murcko_scaffold(parse_smiles(text)).smiles == canonical_smiles(expected)


def test_acyclic_scaffold_empty():
    assert bemis_murcko_scaffold(parse_smiles("CCO")).is_empty


def test_scaffold_idempotent_and_smaller(data_dir):
    for s in iter_smiles_lines(data_dir / "seeds.smi"):
        g = parse_smiles(s)
        scaf = bemis_murcko_scaffold(g)
        assert len(scaf.graph.atoms) <= len(g.atoms)
        if not scaf.is_empty:
            again = bemis_murcko_scaffold(scaf.graph)
            assert again.smiles == scaf.smiles


def test_iter_smiles_lines_skips_comments():
    assert list(iter_smiles_lines(["# header", "", "  CCO  ", "C"])) == ["CCO", "C"]
