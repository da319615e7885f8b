"""Dataset curation: standardization, deduplication, QC, instruction records and splits."""

from .qc import CHECKS, QCFlag, QCReport, quality_control, robust_z
from .records import (
    INSTRUCTION_FIELDS,
    REACTION_CATEGORIES,
    TASK_CATEGORIES,
    DatasetRecord,
    LoadIssue,
    canonical_key,
    deduplicate,
    emit_instruction_record,
    load_corpus,
    parse_instruction_record,
    record_from_dict,
)
from .split import SPLITS, SplitAssignment, group_key, scaffold_key, scaffold_split
from .standardize import standard_smiles, standardize

__all__ = [
    "CHECKS",
    "INSTRUCTION_FIELDS",
    "REACTION_CATEGORIES",
    "SPLITS",
    "TASK_CATEGORIES",
    "DatasetRecord",
    "LoadIssue",
    "QCFlag",
    "QCReport",
    "SplitAssignment",
    "canonical_key",
    "deduplicate",
    "emit_instruction_record",
    "group_key",
    "load_corpus",
    "parse_instruction_record",
    "quality_control",
    "record_from_dict",
    "robust_z",
    "scaffold_key",
    "scaffold_split",
    "standard_smiles",
    "standardize",
]
