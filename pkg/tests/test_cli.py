import json
import subprocess
import sys

import pytest

from chemeval.cli import main

from golden_docs import GOLDEN


def _lines(path):
    return [json.loads(ln) for ln in path.read_text().splitlines() if ln.strip()]


def test_validate_all_valid(tmp_path, capsys):
    src = tmp_path / "in.smi"
    src.write_text("CCO\nc1ccccc1\nCC(=O)O\n")
    out = tmp_path / "out.jsonl"
    assert main(["validate", str(src), "-o", str(out)]) == 0
    assert "3/3" in capsys.readouterr().out
    assert [r["stage"] for r in _lines(out)] == ["valid"] * 3


def test_validate_invalid_data_still_exits_zero(tmp_path):
    src = tmp_path / "in.smi"
    src.write_text("C(C\nCCO\n")
    out = tmp_path / "out.jsonl"
    assert main(["validate", str(src), "-o", str(out)]) == 0
    rec = _lines(out)[0]
    assert rec["stage"] == "syntax" and rec["codes"] == ["mismatched_brackets"]


def test_missing_file_nonzero(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "nope.smi")]) != 0
    assert "chemeval:" in capsys.readouterr().err


def test_bad_config_nonzero(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("no separator here\n")
    src = tmp_path / "in.smi"
    src.write_text("C\n")
    assert main(["validate", str(src), "--config", str(cfg)]) == 2


def test_format_check(tmp_path, capsys):
    d = tmp_path / "docs"
    d.mkdir()
    (d / "good.md").write_text(GOLDEN["ok_minimal"][1])
    (d / "bad.md").write_text(GOLDEN["ok_minimal"][1].split("## Summary")[0])
    out = tmp_path / "fc.jsonl"
    assert main(["format-check", str(d), "-o", str(out)]) == 0
    rows = {r["id"]: r for r in _lines(out)}
    assert rows["good"]["adherent"] and not rows["bad"]["adherent"]
    assert "1/2" in capsys.readouterr().out


def _corpus_rows():
    base = {"instruction": "Predict logP.", "output": "1.0", "task_category": "property_prediction"}
    return [
        {**base, "id": "a", "molecules": ["CCO"]},
        {**base, "id": "b", "molecules": ["OCC"]},
        {**base, "id": "c", "molecules": ["c1ccccc1O"]},
        {"id": "d", "instruction": "bad row"},
    ]


def test_curate_reports_removed(tmp_path, capsys):
    src = tmp_path / "corpus.jsonl"
    src.write_text("\n".join(json.dumps(r) for r in _corpus_rows()) + "\n")
    out = tmp_path / "records.jsonl"
    qc = tmp_path / "qc.jsonl"
    assert main(["curate", str(src), "-o", str(out), "--qc", str(qc)]) == 0
    text = capsys.readouterr().out
    assert "duplicates removed: 1" in text
    recs = _lines(out)
    assert len(recs) == 2 and list(recs[0]) == ["instruction", "input", "output"]
    assert [r["check"] for r in _lines(qc)] == ["duplicate"]


def test_split_manifest_matches_worked_example(tmp_path, capsys):
    cores = ["c1ccccc1", "C1CCCCC1", "c1ccncc1"]
    rows = []
    for gi, size in enumerate([6, 3, 1]):
        for k in range(size):
            rows.append({"id": f"g{gi}-{k}", "instruction": "x", "task_category": "property_prediction",
                         "molecules": ["C" * (k + 1) + cores[gi]]})
    src = tmp_path / "corpus.jsonl"
    src.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    out = tmp_path / "split.jsonl"
    assert main(["split", str(src), "-o", str(out)]) == 0
    captured = capsys.readouterr()
    assert "train=9 validation=1 test=0" in captured.out
    assert "underfilled" in captured.err
    manifest = {r["id"]: r["split"] for r in _lines(out)}
    assert manifest["g2-0"] == "validation"
    assert sum(s == "train" for s in manifest.values()) == 9


def test_split_bad_ratios(tmp_path):
    src = tmp_path / "corpus.jsonl"
    src.write_text(json.dumps({"id": "a", "instruction": "x", "molecules": ["CCO"],
                               "task_category": "property_prediction"}) + "\n")
    assert main(["split", str(src), "--ratios", "0.5,0.6"]) == 2
    assert main(["split", str(src), "--ratios", "a,b,c"]) == 2


def test_split_deterministic(tmp_path):
    rows = [{"id": str(k), "instruction": "x", "task_category": "property_prediction",
             "molecules": ["C" * (k % 5 + 1) + "c1ccccc1" if k % 2 else "C" * (k + 1)]} for k in range(40)]
    src = tmp_path / "corpus.jsonl"
    src.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["split", str(src), "-o", str(a), "--seed", "5"])
    main(["split", str(src), "-o", str(b), "--seed", "5"])
    assert a.read_bytes() == b.read_bytes()


def test_evaluate_and_compare(tmp_path, capsys):
    good = GOLDEN["ok_minimal"][1]
    bad = good.split("## Summary")[0]
    rows = []
    for t in range(1, 11):
        for model, cut in (("A", 8), ("B", 6)):
            fname = f"{model}{t}.md"
            (tmp_path / fname).write_text(good if t <= cut else bad)
            rows.append(json.dumps({"file": fname, "model": model, "task_id": str(t),
                                    "task_category": "retrosynthesis"}))
    (tmp_path / "manifest.jsonl").write_text("\n".join(rows) + "\n")
    report = tmp_path / "report.jsonl"
    assert main(["evaluate", str(tmp_path), "--report", str(report)]) == 0
    assert "A vs B: b=2 c=0" in capsys.readouterr().out
    kinds = {r["kind"] for r in _lines(report)}
    assert {"document", "rate", "comparison"} <= kinds

    verdicts = tmp_path / "v.csv"
    verdicts.write_text("task_id,model,verdict\n" + "".join(
        f"{t},{m},{int(t <= c)}\n" for t in range(1, 11) for m, c in (("A", 8), ("B", 6))))
    out = tmp_path / "cmp.jsonl"
    assert main(["compare", str(verdicts), "-o", str(out)]) == 0
    (row,) = _lines(out)
    assert (row["b"], row["c"]) == (2, 0)


def test_evaluate_missing_manifest(tmp_path):
    assert main(["evaluate", str(tmp_path)]) == 2


def test_lora_demo_default(capsys):
    assert main(["lora-demo"]) == 0
    out = capsys.readouterr().out
    assert "trainable = 8192" in out
    assert "base weights unchanged: True" in out
    err = float(out.split("max relative error = ")[1].split()[0])
    assert err < 1e-6


def test_lora_demo_config_file(tmp_path, capsys):
    cfg = tmp_path / "lora.txt"
    cfg.write_text("rank = 4\nepochs = 2\n")
    assert main(["lora-demo", "--config", str(cfg)]) == 0
    assert "trainable = 2048" in capsys.readouterr().out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "chemeval", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for sub in ("validate", "format-check", "curate", "split", "evaluate", "compare", "lora-demo"):
        assert sub in res.stdout
