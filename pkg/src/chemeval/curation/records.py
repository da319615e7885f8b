"""Instruction records: the dataset row type, its wire format and corpus loading."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from ..errors import ChemEvalError, ConfigError
from ..molgraph import write_canonical_smiles
from .standardize import standardize

TASK_CATEGORIES = (
    "property_prediction",
    "structure_optimization",
    "similarity_design",
    "scaffold_hopping",
    "forward_synthesis",
    "retrosynthesis",
    "reaction_prediction",
    "mechanism_elucidation",
)
REACTION_CATEGORIES = frozenset({"forward_synthesis", "retrosynthesis", "reaction_prediction", "mechanism_elucidation"})
INSTRUCTION_FIELDS = ("instruction", "input", "output")


@dataclass(frozen=True)
class DatasetRecord:
    instruction: str
    input: str = ""
    output: str = ""
    task_category: str = "property_prediction"
    key_molecules: tuple[str, ...] = ()
    key_product: str | None = None
    id: str = ""
    reaction: str | None = None
    properties: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if not self.instruction.strip():
            raise ValueError("instruction must be non-empty")
        if self.task_category not in TASK_CATEGORIES:
            raise ValueError(f"unknown task category {self.task_category!r}")
        object.__setattr__(self, "key_molecules", tuple(self.key_molecules))


def normalize_instruction(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def emit_instruction_record(rec: DatasetRecord) -> str:
    """One JSON line holding instruction, input and output in that order.

    >>> emit_instruction_record(DatasetRecord("Name it.", "CCO", "ethanol"))
    '{"instruction": "Name it.", "input": "CCO", "output": "ethanol"}'
    """
    return json.dumps({k: getattr(rec, k) for k in INSTRUCTION_FIELDS}, ensure_ascii=False)


def parse_instruction_record(line: str) -> DatasetRecord:
    data = json.loads(line)
    if list(data) != list(INSTRUCTION_FIELDS):
        raise ValueError(f"expected fields {INSTRUCTION_FIELDS}, got {tuple(data)}")
    return DatasetRecord(data["instruction"], data["input"], data["output"])


def _canonical_list(values) -> tuple[str, ...]:
    if values is None:
        return ()
    if isinstance(values, str):
        values = [values]
    return tuple(canonical_key(v) for v in values)


@dataclass(frozen=True)
class LoadIssue:
    line: int
    id: str
    message: str


def record_from_dict(data: dict, line: int = 0) -> DatasetRecord:
    """Build a record from a corpus row, standardizing its molecules."""
    mols = data.get("molecules", data.get("smiles"))
    product = data.get("product")
    props = data.get("properties") or {}
    if not isinstance(props, dict):
        raise ConfigError(f"line {line}: properties must be an object")
    return DatasetRecord(
        instruction=str(data.get("instruction", "")),
        input=str(data.get("input", "")),
        output=str(data.get("output", "")),
        task_category=str(data.get("task_category", "")),
        key_molecules=_canonical_list(mols),
        key_product=_canonical_list(product)[0] if product else None,
        id=str(data.get("id", line)),
        reaction=data.get("reaction"),
        properties={k: float(v) for k, v in props.items()},
    )


def load_corpus(path: str | Path | Iterable[str]) -> tuple[list[DatasetRecord], list[LoadIssue]]:
    """Read line-delimited JSON rows; rows that fail to load become issues."""
    if isinstance(path, (str, Path)):
        lines = Path(path).read_text("utf-8").splitlines()
    else:
        lines = list(path)
    records, issues = [], []
    for k, raw in enumerate(lines, 1):
        if not raw.strip():
            continue
        try:
            data = json.loads(raw)
            records.append(record_from_dict(data, k))
        except (json.JSONDecodeError, ValueError, ChemEvalError) as exc:
            rid = ""
            try:
                rid = str(json.loads(raw).get("id", ""))
            except (json.JSONDecodeError, AttributeError):
                pass
            issues.append(LoadIssue(k, rid, str(exc)))
    return records, issues


@lru_cache(maxsize=65536)
def canonical_key(smiles: str) -> str:
    return write_canonical_smiles(standardize(smiles))


def deduplicate(records: Iterable[DatasetRecord]) -> tuple[list[DatasetRecord], int]:
    """Drop later records repeating (category, molecule set, instruction)."""
    seen = set()
    kept = []
    removed = 0
    for r in records:
        mols = set(r.key_molecules) | ({r.key_product} if r.key_product else set())
        key = (r.task_category, frozenset(canonical_key(m) for m in mols),
               normalize_instruction(r.instruction))
        if key in seen:
            removed += 1
            continue
        seen.add(key)
        kept.append(r)
    return kept, removed
