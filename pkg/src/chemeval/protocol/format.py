"""Format-requirement checks over a parsed document."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..errors import ConfigError, EmptyCorpus, SmilesSyntaxError
from ..molgraph import parse_smiles
from ..stats import RateEstimate, rate_from_counts
from .document import StructuredDoc, parse_document

REQUIREMENTS = (
    "section_headers",
    "smiles_code_blocks",
    "markdown_formatting",
    "bulleted_lists",
    "tabular_data",
    "json_structures",
    "chemical_equations",
)

_GOOD_ARROW = re.compile(r"(?<![-=<])(->|→)(?!>)")
_BAD_ARROW = re.compile(r"-{2,}>|={1,2}>|⟶|⇒|⟹|⟼|->>")
_FENCE_LINE = re.compile(r"^\s*(`{2,}|~{3,})")
_LIST_MARK = re.compile(r"^\s*(?:[-*+]|\d+[.)])\s+")


@dataclass(frozen=True)
class FormatProfile:
    """Which requirements are mandatory and how the template is read.

    Mandatory requirements are always judged; the others only when the
    document uses the feature.
    """

    mandatory: frozenset = frozenset({"section_headers", "smiles_code_blocks"})
    require_think: bool = True
    summary_title: str = "Summary"
    molecules_required: bool = False

    def __post_init__(self):
        unknown = set(self.mandatory) - set(REQUIREMENTS)
        if unknown:
            raise ConfigError(f"unknown requirements {sorted(unknown)}")


def load_profile(path: str | Path) -> FormatProfile:
    """Read a JSON profile: ``{"mandatory": [...], "require_think": true, ...}``."""
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read format profile {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("format profile must be a JSON object")
    kwargs = {}
    if "mandatory" in data:
        kwargs["mandatory"] = frozenset(data["mandatory"])
    for key in ("require_think", "summary_title", "molecules_required"):
        if key in data:
            kwargs[key] = data[key]
    return FormatProfile(**kwargs)


@dataclass(frozen=True)
class Verdict:
    applicable: bool
    passed: bool
    reasons: tuple[str, ...] = ()


@dataclass(frozen=True)
class FormatReport:
    verdicts: dict = field(default_factory=dict)

    @property
    def adherent(self) -> bool:
        return all(v.passed for v in self.verdicts.values() if v.applicable)

    @property
    def failed(self) -> list[str]:
        return [r for r, v in self.verdicts.items() if v.applicable and not v.passed]

    def as_dict(self) -> dict:
        out = {}
        for r, v in self.verdicts.items():
            out[r] = "n/a" if not v.applicable else ("pass" if v.passed else "fail")
        out["adherent"] = self.adherent
        return out


def _looks_like_smiles(line: str) -> bool:
    s = line.strip()
    if not s or " " in s:
        return False
    try:
        parse_smiles(s)
    except SmilesSyntaxError:
        return False
    return True


def _section_headers(doc: StructuredDoc, profile: FormatProfile) -> Verdict:
    reasons = []
    if profile.require_think:
        if doc.think_block is None:
            reasons.append("no closed <think> block")
        elif not doc.think_first:
            reasons.append("<think> block is not at the start")
    for d in doc.defects_of("malformed_header"):
        reasons.append(d.message)
    if not any(s.level == 2 for s in doc.sections):
        reasons.append("no '##' section header")
    if not doc.sections or doc.sections[-1].title.strip().lower() != profile.summary_title.lower() \
            or doc.sections[-1].level != 2:
        reasons.append(f"last section is not '## {profile.summary_title}'")
    applicable = ("section_headers" in profile.mandatory or bool(doc.sections) or doc.think_block is not None
                  or bool(doc.defects_of("malformed_header")))
    return Verdict(applicable, not reasons, tuple(reasons))


def _smiles_blocks(doc: StructuredDoc, profile: FormatProfile, mandatory: bool) -> Verdict:
    fence_defects = doc.defects_of("unterminated_fence") + doc.defects_of("malformed_fence")
    applicable = mandatory or bool(doc.code_blocks) or bool(fence_defects)
    reasons = [d.message for d in fence_defects]
    smiles_blocks = [b for b in doc.code_blocks if b.language == "smiles"]
    for b in doc.code_blocks:
        if b.language == "smiles":
            continue
        body = [ln for ln in b.content.splitlines() if ln.strip()]
        if body and b.language in ("", "text", "plain") and all(_looks_like_smiles(ln) for ln in body):
            reasons.append("molecule shown in a code block not tagged smiles")
    if profile.molecules_required and not smiles_blocks:
        reasons.append("no smiles code block")
    return Verdict(applicable, not reasons, tuple(reasons))


def _strip_inline_code(line: str) -> str:
    return re.sub(r"`[^`]*`", "", line)


def _markdown(doc: StructuredDoc) -> Verdict:
    applicable = False
    reasons = []
    for k, ln in doc.prose:
        if _FENCE_LINE.match(ln):
            continue  # fence syntax is judged under smiles_code_blocks
        if ln.strip().startswith("|") or ln.lstrip().startswith("#"):
            body = ln
        else:
            body = _LIST_MARK.sub("", ln)
        if "`" in body or "*" in body:
            applicable = True
        if body.count("`") % 2:
            reasons.append(f"line {k + 1}: unbalanced backticks")
            continue
        body = _strip_inline_code(body)
        if body.count("**") % 2:
            reasons.append(f"line {k + 1}: unbalanced bold markers")
            continue
        single = re.sub(r"\*\*", "", body)
        # Lone asterisks between spaces are arithmetic, not emphasis.
        single = re.sub(r"\s\*\s", " ", single)
        if single.count("*") % 2:
            reasons.append(f"line {k + 1}: unbalanced italic markers")
    return Verdict(applicable, not reasons, tuple(reasons))


def _lists(doc: StructuredDoc) -> Verdict:
    if not doc.lists:
        return Verdict(False, True)
    reasons = [f"list starting '{lb.items[0][:30]}' mixes numbered and bullet items" for lb in doc.lists if lb.mixed]
    return Verdict(True, not reasons, tuple(reasons))


def _tables(doc: StructuredDoc) -> Verdict:
    if not doc.tables:
        return Verdict(False, True)
    reasons = []
    for t in doc.tables:
        if not t.consistent:
            reasons.append(f"table with column counts {list(t.column_counts)}")
    return Verdict(True, not reasons, tuple(reasons))


def _json(doc: StructuredDoc) -> Verdict:
    reasons = []
    applicable = False
    for b in doc.code_blocks:
        if b.language == "json":
            applicable = True
            try:
                json.loads(b.content)
            except json.JSONDecodeError as exc:
                reasons.append(f"json block does not parse: {exc.msg}")
    depth = 0
    for k, ln in doc.prose:
        for ch in _strip_inline_code(ln):
            if ch == "{":
                depth += 1
                applicable = True
            elif ch == "}":
                depth -= 1
                applicable = True
                if depth < 0:
                    reasons.append(f"line {k + 1}: closing brace without an opening one")
                    depth = 0
    if depth > 0:
        reasons.append(f"{depth} unclosed brace(s)")
    return Verdict(applicable, not reasons, tuple(reasons))


def _equations(doc: StructuredDoc) -> Verdict:
    applicable = False
    reasons = []
    for k, ln in doc.prose:
        text = _strip_inline_code(ln)
        if "<think>" in text or "</think>" in text:
            text = text.replace("<think>", "").replace("</think>", "")
        bad = _BAD_ARROW.search(text)
        if bad:
            applicable = True
            reasons.append(f"line {k + 1}: arrow written as {bad.group(0)!r}")
            continue
        parts = _GOOD_ARROW.split(_LIST_MARK.sub("", text))
        if len(parts) > 1:
            applicable = True
            sides = parts[0::2]
            if any(not s.strip(" \t*_|:") for s in sides):
                reasons.append(f"line {k + 1}: arrow with an empty side")
    return Verdict(applicable, not reasons, tuple(reasons))


def check_format(doc: StructuredDoc | str, profile: FormatProfile | None = None) -> FormatReport:
    """Judge every requirement; mandatory ones are always applicable."""
    if isinstance(doc, str):
        doc = parse_document(doc)
    profile = profile or FormatProfile()
    verdicts = {
        "section_headers": _section_headers(doc, profile),
        "smiles_code_blocks": _smiles_blocks(doc, profile, "smiles_code_blocks" in profile.mandatory),
        "markdown_formatting": _markdown(doc),
        "bulleted_lists": _lists(doc),
        "tabular_data": _tables(doc),
        "json_structures": _json(doc),
        "chemical_equations": _equations(doc),
    }
    for name in profile.mandatory:
        v = verdicts[name]
        if not v.applicable:
            verdicts[name] = Verdict(True, v.passed, v.reasons)
    return FormatReport(verdicts)


def extract_smiles(doc: StructuredDoc | str) -> list[str]:
    """Non-empty lines of every closed ``smiles`` fence, in document order."""
    if isinstance(doc, str):
        doc = parse_document(doc)
    out = []
    for b in doc.code_blocks:
        if b.language != "smiles":
            continue
        out.extend(ln.strip() for ln in b.content.splitlines() if ln.strip())
    return out


def corpus_adherence_rate(reports: Sequence[FormatReport], confidence: float = 0.95) -> RateEstimate:
    if not reports:
        raise EmptyCorpus("no format reports to aggregate")
    return rate_from_counts(sum(1 for r in reports if r.adherent), len(reports), confidence)


def requirement_rates(reports: Sequence[FormatReport], confidence: float = 0.95) -> dict:
    """Per requirement: pass rate over applicable outputs and over all outputs.

    A not-applicable requirement counts as passing in the all-output rate.
    The applicable-only entry is ``None`` when no output used the feature.
    """
    if not reports:
        raise EmptyCorpus("no format reports to aggregate")
    out = {}
    for name in REQUIREMENTS:
        vs = [r.verdicts[name] for r in reports]
        app = [v for v in vs if v.applicable]
        out[name] = {
            "applicable": rate_from_counts(sum(v.passed for v in app), len(app), confidence) if app else None,
            "all": rate_from_counts(sum(1 for v in vs if not v.applicable or v.passed), len(vs), confidence),
        }
    return out
