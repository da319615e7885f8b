import json
import random
import warnings

import pytest

from chemeval.errors import RatioError, StandardizationConflict
from chemeval.molgraph import canonical_smiles
from chemeval.curation import (
    DatasetRecord,
    deduplicate,
    emit_instruction_record,
    group_key,
    load_corpus,
    parse_instruction_record,
    quality_control,
    record_from_dict,
    robust_z,
    scaffold_split,
    standard_smiles,
    standardize,
)


@pytest.mark.parametrize("raw,expected", [
    ("CC(=O)[O-]", "CC(=O)O"),
    ("CC(=O)O", "CC(=O)O"),
    ("C[N](=O)=O", "C[N+](=O)[O-]"),
    ("CN(=O)=O", "C[N+](=O)[O-]"),
    ("C[NH3+]", "CN"),
    ("CC(O)=C", "CC(C)=O"),
    ("Oc1ccccn1", "O=c1cccc[nH]1"),
])
def test_standardize_examples(raw, expected):
    assert standard_smiles(raw) == canonical_smiles(expected)


def test_nitro_forms_collapse():
    assert standard_smiles("C[N+](=O)[O-]") == standard_smiles("CN(=O)=O")


def test_zwitterion_kept_when_charges_adjacent():
    assert standard_smiles("C[N+](=O)[O-]").count("+") == 1


def test_neutralization_conflict():
    with pytest.raises(StandardizationConflict):
        standardize("[BH4-]")


def test_standardize_idempotent(data_dir):
    from chemeval.molgraph import iter_smiles_lines

    for s in list(iter_smiles_lines(data_dir / "seeds.smi"))[:120]:
        once = standard_smiles(s)
        assert standard_smiles(once) == once, s


def _rec(rid, smiles, cat="property_prediction", instr="Predict logP.", product=None, reaction=None, props=None):
    d = {"id": rid, "instruction": instr, "input": smiles, "output": "x", "task_category": cat,
         "molecules": [smiles]}
    if product:
        d["product"] = product
    if reaction:
        d["reaction"] = reaction
    if props:
        d["properties"] = props
    return record_from_dict(d)


def test_deduplicate_examples():
    a = _rec("1", "CCO")
    kept, removed = deduplicate([a, _rec("2", "CCO")])
    assert removed == 1 and kept[0].id == "1"
    kept, removed = deduplicate([a, _rec("2", "OCC")])
    assert removed == 1
    kept, removed = deduplicate([a, _rec("2", "CCO", cat="scaffold_hopping")])
    assert removed == 0
    kept, removed = deduplicate([a, _rec("2", "CCO", instr="  Predict   logP. ")])
    assert removed == 1


def test_emit_and_parse_round_trip():
    rec = DatasetRecord('Say "hi"\nthen stop.', "CCO", "ethanol")
    line = emit_instruction_record(rec)
    assert "\n" not in line
    assert list(json.loads(line)) == ["instruction", "input", "output"]
    assert parse_instruction_record(line) == rec
    assert emit_instruction_record(rec) == line


def test_parse_rejects_wrong_fields():
    with pytest.raises(ValueError):
        parse_instruction_record('{"input": "a", "instruction": "b", "output": "c"}')


def test_record_validation():
    with pytest.raises(ValueError):
        DatasetRecord("  ")
    with pytest.raises(ValueError):
        DatasetRecord("x", task_category="poetry")


def test_load_corpus_collects_issues():
    lines = [json.dumps({"id": "a", "instruction": "x", "task_category": "retrosynthesis",
                         "molecules": ["CCO"], "product": "CC=O"}),
             "not json",
             json.dumps({"id": "c", "instruction": "x", "task_category": "retrosynthesis",
                         "molecules": ["C(C"]}),
             ""]
    recs, issues = load_corpus(lines)
    assert [r.id for r in recs] == ["a"]
    assert [i.line for i in issues] == [2, 3]
    assert issues[1].id == "c"
    assert group_key(recs[0]) == f"product:{canonical_smiles('CC=O')}"


def _grouped(sizes):
    cores = ["c1ccccc1", "C1CCCCC1", "c1ccncc1", "C1CCOC1", "c1ccsc1"]
    recs = []
    for gi, size in enumerate(sizes):
        for k in range(size):
            recs.append(_rec(f"g{gi}-{k}", "C" * (k + 1) + cores[gi]))
    return recs


def test_split_hand_traced_example():
    recs = _grouped([6, 3, 1])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sa = scaffold_split(recs, (0.85, 0.10, 0.05))
    assert sa.counts() == {"train": 9, "validation": 1, "test": 0}
    assert sa.split_of["g2-0"] == "validation"
    assert any("test split underfilled" in w for w in sa.warnings)
    assert caught


def test_split_single_group_warns():
    recs = _grouped([10])
    with pytest.warns(UserWarning):
        sa = scaffold_split(recs)
    assert sa.counts()["train"] == 10


@pytest.mark.parametrize("ratios", [(0.5, 0.5), (0.9, 0.2, -0.1), (0.5, 0.3, 0.3), (1.0, 0.0, 0.0)])
def test_bad_ratios(ratios):
    with pytest.raises(RatioError):
        scaffold_split(_grouped([2]), ratios)


def test_split_properties():
    rng = random.Random(4)
    n_groups = 150
    recs, keys = [], []
    for g in range(n_groups):
        for k in range(rng.randint(1, 6)):
            recs.append(DatasetRecord("x", id=f"{g}-{k}"))
            keys.append(f"g{g}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sa = scaffold_split(recs, seed=3, keys=keys)
        perm = list(range(len(recs)))
        rng.shuffle(perm)
        sb = scaffold_split([recs[i] for i in perm], seed=3, keys=[keys[i] for i in perm])
    assert sa.group_violations() == 0
    assert set(sa.split_of) == {r.id for r in recs}
    assert sa.split_of == {rid: sb.split_of[rid] for rid in sa.split_of}
    n = len(recs)
    for name, frac in zip(("train", "validation", "test"), (0.85, 0.10, 0.05)):
        assert abs(sa.counts()[name] / n - frac) <= max(6 / n, 0.01)


def test_manifest_rows():
    sa = scaffold_split(_grouped([6, 3, 1]), (0.6, 0.3, 0.1))
    rows = sa.manifest()
    assert len(rows) == 10 and set(rows[0]) == {"id", "split", "group"}
    assert sa.counts() == {"train": 6, "validation": 3, "test": 1}


def test_qc_flags():
    recs = [
        _rec("1", "CCO", props={"mw": 46.0}),
        _rec("2", "CCO", props={"mw": 46.0}),
        _rec("3", "CCCO", cat="forward_synthesis", reaction="CC>>CCC", props={"mw": 60.0}),
        _rec("4", "CCCCO", props={"mw": 74.0}),
        _rec("5", "CCCCCO", props={"mw": 5000.0}),
    ]
    rep = quality_control(recs)
    assert rep.counts == {"validity": 0, "mass_balance": 1, "duplicate": 1, "property_outlier": 1}
    assert rep.removal_candidates == ["2", "3", "5"]


def test_qc_clean_corpus():
    recs = [_rec(str(i), "C" * (i + 1) + "O", props={"mw": 40.0 + i}) for i in range(6)]
    rep = quality_control(recs)
    assert rep.flags == [] and rep.total == 6


def test_robust_z():
    z = robust_z([1, 2, 3, 4, 100])
    assert z[2] == 0 and z[4] == pytest.approx(0.6745 * 97)
    assert robust_z([5, 5, 5, 9]) == [0.0] * 4
