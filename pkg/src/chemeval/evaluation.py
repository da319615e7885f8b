"""Corpus evaluation: per-document checks, rate tables and model comparisons.

A corpus is a directory of model-output documents plus a sidecar
``manifest.jsonl`` whose rows name the file and carry ``model``,
``task_id`` and ``task_category`` (``difficulty`` is optional).
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ChemEvalError, InsufficientData, MetadataMissing
from .protocol import FormatProfile, analyze_reasoning, check_format, extract_smiles, parse_document
from .routes import ConditionBounds, assess_feasibility, load_catalog, load_rules, parse_route
from .routes.feasibility import DEFAULT_MAX_STEPS
from .stats import ComparisonResult, RateEstimate, pairwise_comparisons, rate_from_counts
from .validity import validate

METRICS = ("format_adherence", "chemical_validity", "synthesis_feasibility")
REQUIRED_META = ("file", "model", "task_id", "task_category")
_STEP_LINE = re.compile(r"^\s*STEP\s+\d+\s*[:.]", re.IGNORECASE | re.MULTILINE)


@dataclass(frozen=True)
class DocumentResult:
    id: str
    model: str
    task_id: str
    task_category: str
    difficulty: str | None
    adherent: bool
    failed_requirements: tuple[str, ...]
    smiles: tuple[str, ...]
    structure_codes: tuple[tuple[str, ...], ...]
    valid: bool | None
    feasible: bool | None
    reasoning_steps: int
    confidence: str

    def verdict(self, metric: str) -> bool | None:
        return {"format_adherence": self.adherent, "chemical_validity": self.valid,
                "synthesis_feasibility": self.feasible}[metric]

    def as_dict(self) -> dict:
        return {
            "id": self.id, "model": self.model, "task_id": self.task_id,
            "task_category": self.task_category, "difficulty": self.difficulty,
            "adherent": self.adherent, "failed_requirements": list(self.failed_requirements),
            "smiles": list(self.smiles), "codes": [list(c) for c in self.structure_codes],
            "valid": self.valid, "feasible": self.feasible,
            "reasoning_steps": self.reasoning_steps, "confidence": self.confidence,
        }


def evaluate_document(text: str, meta: Mapping, profile: FormatProfile | None = None,
                      catalog=frozenset(), rules=(), max_steps: int = DEFAULT_MAX_STEPS,
                      bounds: ConditionBounds | None = None) -> DocumentResult:
    """Format, validity and (if the text holds STEP lines) route checks for one document."""
    doc = parse_document(text)
    fmt = check_format(doc, profile)
    smiles = extract_smiles(doc)
    reports = [validate(s) for s in smiles]
    valid = all(r.is_valid for r in reports) if reports else None
    feasible = None
    if _STEP_LINE.search(text):
        try:
            route = parse_route(text)
            feasible = assess_feasibility(route, catalog, rules, max_steps=max_steps,
                                          bounds=bounds or ConditionBounds()).feasible
        except (ChemEvalError, ValueError):
            feasible = False
    trace = analyze_reasoning(doc.think_block.text if doc.think_block else None)
    return DocumentResult(
        id=str(meta.get("id", meta["file"])),
        model=str(meta["model"]),
        task_id=str(meta["task_id"]),
        task_category=str(meta["task_category"]),
        difficulty=meta.get("difficulty"),
        adherent=fmt.adherent,
        failed_requirements=tuple(fmt.failed),
        smiles=tuple(smiles),
        structure_codes=tuple(tuple(r.codes) for r in reports),
        valid=valid,
        feasible=feasible,
        reasoning_steps=trace.step_count,
        confidence=trace.confidence,
    )


def read_manifest(directory: str | Path) -> list[dict]:
    d = Path(directory)
    path = d / "manifest.jsonl"
    if not path.is_file():
        raise MetadataMissing(f"{path} not found")
    rows = []
    for k, line in enumerate(path.read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        row = json.loads(line)
        missing = [f for f in REQUIRED_META if f not in row]
        if missing:
            raise MetadataMissing(f"manifest line {k} lacks {', '.join(missing)}")
        rows.append(row)
    return rows


@dataclass
class EvaluationReport:
    documents: list = field(default_factory=list)
    rates: dict = field(default_factory=dict)        # metric -> model -> category|"overall" -> RateEstimate
    structure_validity: dict = field(default_factory=dict)  # model -> RateEstimate over structures
    taxonomy: dict = field(default_factory=dict)     # model -> {code: count}
    comparisons: dict = field(default_factory=dict)  # metric -> [ComparisonResult]

    def records(self) -> list[dict]:
        out = [{"kind": "document", **d.as_dict()} for d in self.documents]
        for metric, by_model in self.rates.items():
            for model, cells in sorted(by_model.items()):
                for cat, est in cells.items():
                    out.append({"kind": "rate", "metric": metric, "model": model, "category": cat, **est.as_dict()})
        for model, est in sorted(self.structure_validity.items()):
            out.append({"kind": "structure_validity", "model": model, **est.as_dict()})
        for model, hist in sorted(self.taxonomy.items()):
            out.append({"kind": "taxonomy", "model": model, "counts": dict(sorted(hist.items()))})
        for metric, comps in self.comparisons.items():
            for c in comps:
                out.append({"kind": "comparison", "metric": metric, **c.as_dict()})
        return out

    def render(self) -> str:
        lines = []
        for metric, by_model in self.rates.items():
            if not by_model:
                continue
            cats = sorted({c for cells in by_model.values() for c in cells if c != "overall"}) + ["overall"]
            lines.append(metric.replace("_", " ").title())
            widths = [max(12, *(len(m) for m in by_model))] + [max(16, len(c)) for c in cats]
            lines.append("  ".join(h.ljust(w) for h, w in zip(["model"] + cats, widths)))
            for model in sorted(by_model):
                cells = [model] + [format_rate(by_model[model].get(c)) for c in cats]
                lines.append("  ".join(v.ljust(w) for v, w in zip(cells, widths)))
            lines.append("")
        for metric, comps in self.comparisons.items():
            if not comps:
                continue
            lines.append(f"Comparisons ({metric})")
            for c in comps:
                lines.append(
                    f"  {c.model_a} vs {c.model_b}: b={c.discordant_ab} c={c.discordant_ba} "
                    f"chi2={c.mcnemar_statistic:.3f} p={c.mcnemar_p:.4g} adj={c.adjusted_p:.4g} "
                    f"h={c.cohens_h:+.3f} equivalent={'yes' if c.tost_equivalent else 'no'}")
            lines.append("")
        return "\n".join(lines).rstrip() + "\n"


def format_rate(est: RateEstimate | None) -> str:
    """``96.3% (±1.7%)`` style cell; ``-`` when nothing was scored."""
    if est is None:
        return "-"
    return f"{100 * est.point:.1f}% (±{100 * est.half_width:.1f}%)"


def _rates(docs: Sequence[DocumentResult], metric: str, confidence: float) -> dict:
    tally: dict = defaultdict(lambda: defaultdict(lambda: [0, 0]))
    for d in docs:
        v = d.verdict(metric)
        if v is None:
            continue
        for cat in (d.task_category, "overall"):
            cell = tally[d.model][cat]
            cell[0] += bool(v)
            cell[1] += 1
    return {m: {c: rate_from_counts(s, n, confidence) for c, (s, n) in cells.items()} for m, cells in tally.items()}


def summarize(docs: Sequence[DocumentResult], *, margin: float = 0.05, alpha: float = 0.05,
              confidence: float = 0.95, mcnemar_method: str = "corrected") -> EvaluationReport:
    report = EvaluationReport(documents=list(docs))
    for metric in METRICS:
        report.rates[metric] = _rates(docs, metric, confidence)
        verdicts: dict = defaultdict(dict)
        for d in docs:
            v = d.verdict(metric)
            if v is not None:
                verdicts[d.task_id][d.model] = v
        try:
            report.comparisons[metric] = pairwise_comparisons(
                verdicts, margin=margin, alpha=alpha, confidence=confidence, mcnemar_method=mcnemar_method)
        except InsufficientData:
            report.comparisons[metric] = []
    per_struct = defaultdict(lambda: [0, 0])
    hist: dict = defaultdict(Counter)
    for d in docs:
        for codes in d.structure_codes:
            per_struct[d.model][0] += not codes
            per_struct[d.model][1] += 1
            # Each error type counts once per structure, independently of the others.
            hist[d.model].update(set(codes))
    report.structure_validity = {m: rate_from_counts(s, n, confidence) for m, (s, n) in per_struct.items()}
    report.taxonomy = {m: dict(h) for m, h in hist.items()}
    return report


def _eval_task(args):
    text, meta, profile, catalog, rules, max_steps = args
    return evaluate_document(text, meta, profile, catalog, rules, max_steps)


def evaluate_corpus(directory: str | Path, *, profile: FormatProfile | None = None,
                    catalog_path=None, rules_path=None, max_steps: int = DEFAULT_MAX_STEPS,
                    jobs: int = 1, **stats_kw) -> EvaluationReport:
    d = Path(directory)
    rows = read_manifest(d)
    catalog = load_catalog(catalog_path)
    rules = load_rules(rules_path)
    tasks = [((d / r["file"]).read_text("utf-8", errors="replace"), r, profile, catalog, rules, max_steps)
             for r in rows]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            docs = list(pool.map(_eval_task, tasks))
    else:
        docs = [_eval_task(t) for t in tasks]
    return summarize(docs, **stats_kw)


def compare_verdicts(rows: Sequence[Mapping], **kw) -> list[ComparisonResult]:
    """Pairwise comparisons from ``{task_id, model, verdict}`` rows."""
    verdicts: dict = defaultdict(dict)
    for r in rows:
        verdicts[str(r["task_id"])][str(r["model"])] = _truthy(r["verdict"])
    return pairwise_comparisons(verdicts, **kw)


def _truthy(v) -> bool:
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes", "pass", "correct")
    return bool(v)
