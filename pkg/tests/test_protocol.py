import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemeval.errors import ConfigError, EmptyCorpus
from chemeval.protocol import (
    REQUIREMENTS,
    FormatProfile,
    analyze_reasoning,
    check_format,
    confidence_bucket,
    corpus_adherence_rate,
    extract_smiles,
    load_profile,
    parse_document,
    requirement_rates,
)

from golden_docs import GOLDEN

MINIMAL = GOLDEN["ok_minimal"][1]


def test_parse_minimal_document():
    doc = parse_document(MINIMAL)
    assert doc.think_block is not None and doc.think_first
    assert [s.title for s in doc.sections] == ["Answer", "Summary"]
    assert [b.language for b in doc.code_blocks] == ["smiles"]
    assert doc.defects == ()


def test_section_bodies_and_levels():
    doc = parse_document("## A\nfirst\n\n### B\nsecond\n")
    assert [(s.level, s.title) for s in doc.sections] == [(2, "A"), (3, "B")]
    assert "first" in doc.sections[0].body


def test_lists_and_tables_parsed():
    text = "- a\n- b\n\n1. x\n2. y\n\n| h1 | h2 |\n|---|---|\n| 1 | 2 |\n"
    doc = parse_document(text)
    assert [l.style for l in doc.lists] == ["bullet", "numbered"]
    assert doc.lists[0].items == ("a", "b")
    t = doc.tables[0]
    assert t.column_count == 2 and t.consistent and t.aligned


def test_ragged_table_inconsistent():
    doc = parse_document("| a | b |\n|---|---|\n| 1 | 2 | 3 |\n")
    assert not doc.tables[0].consistent


def test_unclosed_fence_is_a_defect():
    doc = parse_document("## A\n```smiles\nCCO\n")
    assert doc.defects
    assert extract_smiles(doc) == []


def test_header_without_space_is_a_defect():
    doc = parse_document("##Answer\ntext\n")
    assert doc.defects


def test_extract_smiles_order_and_language():
    text = "```smiles\nCCO\n\nc1ccccc1\n```\n```python\nprint(1)\n```\n```smiles\nCC(=O)O\n```\n"
    assert extract_smiles(text) == ["CCO", "c1ccccc1", "CC(=O)O"]


def test_compliant_document_adheres():
    rep = check_format(MINIMAL)
    assert rep.adherent and rep.failed == []
    d = rep.as_dict()
    assert set(d) == set(REQUIREMENTS) | {"adherent"}
    assert d["tabular_data"] == "n/a"


def test_missing_summary_fails_headers():
    text = MINIMAL.split("## Summary")[0]
    assert check_format(text).failed == ["section_headers"]


def test_missing_think_fails_headers():
    text = MINIMAL.split("</think>\n", 1)[1]
    assert "section_headers" in check_format(text).failed
    assert check_format(text, FormatProfile(require_think=False)).adherent


def test_optional_requirement_only_when_used():
    profile = FormatProfile(mandatory=frozenset())
    rep = check_format("plain text only", profile)
    assert rep.adherent
    assert not any(v.applicable for v in rep.verdicts.values())


def test_each_violation_isolated():
    for name, (label, text) in GOLDEN.items():
        failed = check_format(text).failed
        assert failed == ([] if label == "compliant" else [label]), name


def test_unknown_requirement_rejected(tmp_path):
    with pytest.raises(ConfigError):
        FormatProfile(mandatory=frozenset({"haiku"}))
    p = tmp_path / "profile.json"
    p.write_text(json.dumps({"mandatory": ["section_headers"], "require_think": False}))
    prof = load_profile(p)
    assert prof.mandatory == {"section_headers"} and not prof.require_think
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_profile(bad)
    with pytest.raises(ConfigError):
        load_profile(tmp_path / "missing.json")


def test_rates():
    good = check_format(MINIMAL)
    bad = check_format(MINIMAL.split("## Summary")[0])
    assert corpus_adherence_rate([good, bad, good, good]).point == 0.75
    rates = requirement_rates([good, bad])
    assert rates["section_headers"]["applicable"].point == 0.5
    assert rates["tabular_data"]["applicable"] is None
    assert rates["tabular_data"]["all"].point == 1.0
    with pytest.raises(EmptyCorpus):
        corpus_adherence_rate([])
    with pytest.raises(EmptyCorpus):
        requirement_rates([])


@pytest.mark.parametrize("text,bucket", [
    ("This is uncertain but clearly plausible.", "low"),
    ("It might work and will be fine.", "moderate"),
    ("The product is clearly the ester.", "high"),
    ("Two carbons and one oxygen.", "unstated"),
])
def test_confidence_bucket(text, bucket):
    assert confidence_bucket(text) == bucket


def test_reasoning_steps_numbered_and_transitions():
    assert analyze_reasoning("1. Check the ring.\n2. Then count atoms.").step_count == 2
    prose = "First we find the ring. Next we count the atoms. Therefore it is benzene."
    tr = analyze_reasoning(prose)
    assert tr.step_count == 3 and tr.factual_claims == 3


def test_reasoning_questions_not_claims():
    tr = analyze_reasoning("Is this an ester? The carbonyl is bonded to oxygen.")
    assert tr.factual_claims == 1


def test_empty_reasoning():
    tr = analyze_reasoning(None)
    assert (tr.step_count, tr.confidence, tr.factual_claims) == (0, "unstated", 0)
    assert analyze_reasoning("   ") == tr


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("#`~-*|_:{}[]\"<>/think \nabcCO=1().→")), max_size=300))
def test_parser_and_checker_total(text):
    doc = parse_document(text)
    rep = check_format(doc)
    assert set(rep.verdicts) == set(REQUIREMENTS)
    for s in extract_smiles(doc):
        assert s.strip() == s and s
    analyze_reasoning(text)
