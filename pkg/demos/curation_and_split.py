"""Standardize a tiny instruction corpus, run QC, drop duplicates and split by scaffold."""

import json
import warnings

from chemeval.curation import deduplicate, emit_instruction_record, load_corpus, quality_control, scaffold_split

ROWS = [
    {"id": "1", "instruction": "Predict logP.", "output": "-0.3", "task_category": "property_prediction",
     "molecules": ["CCO"], "properties": {"logp": -0.3}},
    {"id": "2", "instruction": "Predict logP.", "output": "-0.3", "task_category": "property_prediction",
     "molecules": ["OCC"], "properties": {"logp": -0.3}},
    {"id": "3", "instruction": "Predict logP.", "output": "1.9", "task_category": "property_prediction",
     "molecules": ["Cc1ccccc1"], "properties": {"logp": 1.9}},
    {"id": "4", "instruction": "Predict logP.", "output": "2.7", "task_category": "property_prediction",
     "molecules": ["CCc1ccccc1"], "properties": {"logp": 2.7}},
    {"id": "5", "instruction": "Predict logP.", "output": "90", "task_category": "property_prediction",
     "molecules": ["CCCc1ccccc1"], "properties": {"logp": 90.0}},
    {"id": "6", "instruction": "Give the product.", "output": "CC(=O)OCC", "task_category": "forward_synthesis",
     "molecules": ["CC(=O)O", "OCC"], "product": "CC(=O)OCC", "reaction": "CC(=O)O.OCC>>CC(=O)OCC"},
    {"id": "7", "instruction": "Give the product.", "output": "CCCl", "task_category": "forward_synthesis",
     "molecules": ["CC"], "product": "CCCl", "reaction": "CC>>CCCl"},
    {"id": "8", "instruction": "Standardize this.", "output": "CC(=O)O", "task_category": "structure_optimization",
     "molecules": ["CC(=O)[O-]"]},
]


def main():
    for row in ROWS:
        row.setdefault("input", ".".join(row["molecules"]))
    records, issues = load_corpus(json.dumps(r) for r in ROWS)
    print(f"loaded {len(records)} records, {len(issues)} issues")
    print("record 8 molecule after standardization:", records[-1].key_molecules[0])

    qc = quality_control(records)
    print("qc counts:", qc.counts)
    for flag in qc.flags:
        print(f"  {flag.id}: {flag.check} ({flag.detail})")

    kept, removed = deduplicate(records)
    print(f"deduplicated: kept {len(kept)}, removed {removed}")
    print("first instruction record:", emit_instruction_record(kept[0]))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        split = scaffold_split(kept, (0.6, 0.2, 0.2), seed=0)
    print("split counts:", split.counts())
    for row in split.manifest():
        print(f"  {row['id']:3s} {row['split']:10s} {row['group']}")
    for note in split.warnings:
        print("warning:", note)


if __name__ == "__main__":
    main()
