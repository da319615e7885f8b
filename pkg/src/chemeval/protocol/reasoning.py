"""Lexical reasoning-trace metrics for the ``<think>`` section."""

from __future__ import annotations

import re
from dataclasses import dataclass

LOW = ("uncertain", "unclear", "cannot determine", "unsure")
MODERATE = ("might", "may", "possibly", "could", "uncertainty")
HIGH = ("clearly", "reliably", "will", "is optimal")
TRANSITIONS = ("First", "Next", "Then", "Therefore", "However", "Examining", "To", "Instead")

_ITEM = re.compile(r"^\s*(?:\d+[.)]|[-*+•])\s+(?=\S)")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+(?=\S)")


def _lexicon(words) -> re.Pattern:
    alts = "|".join(re.escape(w).replace(r"\ ", r"\s+") for w in words)
    return re.compile(rf"\b(?:{alts})\b", re.IGNORECASE)


_LOW, _MODERATE, _HIGH = _lexicon(LOW), _lexicon(MODERATE), _lexicon(HIGH)
_TRANSITION = re.compile(rf"^(?:{'|'.join(TRANSITIONS)})\b")


@dataclass(frozen=True)
class ReasoningTrace:
    step_count: int = 0
    confidence: str = "unstated"
    factual_claims: int = 0


def confidence_bucket(text: str) -> str:
    """low beats moderate beats high; no marker at all is ``unstated``."""
    for name, pat in (("low", _LOW), ("moderate", _MODERATE), ("high", _HIGH)):
        if pat.search(text):
            return name
    return "unstated"


def _sentences(paragraph: str) -> list[str]:
    flat = " ".join(paragraph.split())
    return [s for s in _SENTENCE_END.split(flat) if s]


def _paragraphs(text: str):
    """Yield ('item', text) for list items and ('prose', text) for other paragraphs."""
    buf: list[str] = []
    for ln in text.splitlines():
        if _ITEM.match(ln):
            if buf:
                yield "prose", " ".join(buf)
                buf = []
            yield "item", ln
        elif not ln.strip():
            if buf:
                yield "prose", " ".join(buf)
                buf = []
        else:
            buf.append(ln)
    if buf:
        yield "prose", " ".join(buf)


def analyze_reasoning(think: str | None) -> ReasoningTrace:
    """Step count, confidence bucket and declarative-sentence count.

    >>> analyze_reasoning("1. Check the ring.\\n2. Then count atoms.").step_count
    2
    """
    if not think or not think.strip():
        return ReasoningTrace()
    steps = 0
    claims = 0
    for kind, para in _paragraphs(think):
        sentences = _sentences(_ITEM.sub("", para, count=1) if kind == "item" else para)
        if kind == "item":
            steps += 1
        else:
            steps += sum(1 for s in sentences if _TRANSITION.match(s))
        for s in sentences:
            body = s.rstrip()
            if body.endswith("?") or len(body.split()) < 3:
                continue
            claims += 1
    return ReasoningTrace(steps, confidence_bucket(think), claims)
