"""Model-output documents: structure, format adherence and reasoning traces."""

from .document import CodeBlock, Defect, ListBlock, Section, Span, StructuredDoc, TableBlock, ThinkBlock, parse_document
from .format import (
    REQUIREMENTS,
    FormatProfile,
    FormatReport,
    Verdict,
    check_format,
    corpus_adherence_rate,
    extract_smiles,
    load_profile,
    requirement_rates,
)
from .reasoning import ReasoningTrace, analyze_reasoning, confidence_bucket

__all__ = [
    "REQUIREMENTS",
    "CodeBlock",
    "Defect",
    "FormatProfile",
    "FormatReport",
    "ListBlock",
    "ReasoningTrace",
    "Section",
    "Span",
    "StructuredDoc",
    "TableBlock",
    "ThinkBlock",
    "Verdict",
    "analyze_reasoning",
    "check_format",
    "confidence_bucket",
    "corpus_adherence_rate",
    "extract_smiles",
    "load_profile",
    "parse_document",
    "requirement_rates",
]
