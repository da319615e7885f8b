"""Scaffold-aware, category-stratified train/validation/test splitting.

Records are grouped by a key (Bemis-Murcko scaffold of the first molecule,
or the canonical product for reaction records). Whole groups are handed out
largest first to whichever split is furthest below its target, so no key
ever spans two splits.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from ..errors import RatioError
from ..molgraph import bemis_murcko_scaffold, parse_smiles
from .records import REACTION_CATEGORIES, DatasetRecord

SPLITS = ("train", "validation", "test")


@lru_cache(maxsize=65536)
def scaffold_key(smiles: str) -> str:
    """Scaffold SMILES, or ``mol:<smiles>`` for acyclic molecules."""
    scaf = bemis_murcko_scaffold(parse_smiles(smiles))
    return f"mol:{smiles}" if scaf.is_empty else f"scaffold:{scaf.smiles}"


def group_key(rec: DatasetRecord) -> str:
    if rec.task_category in REACTION_CATEGORIES and rec.key_product:
        return f"product:{rec.key_product}"
    if rec.key_molecules:
        return scaffold_key(rec.key_molecules[0])
    return f"id:{rec.id}"


@dataclass
class SplitAssignment:
    split_of: dict  # record id -> split name
    group_of: dict  # record id -> group key
    targets: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def counts(self) -> dict:
        c = Counter(self.split_of.values())
        return {s: c.get(s, 0) for s in SPLITS}

    def members(self, split: str) -> list:
        return [rid for rid, s in self.split_of.items() if s == split]

    def group_violations(self) -> int:
        seen = defaultdict(set)
        for rid, g in self.group_of.items():
            seen[g].add(self.split_of[rid])
        return sum(1 for s in seen.values() if len(s) > 1)

    def manifest(self) -> list[dict]:
        return [{"id": rid, "split": s, "group": self.group_of[rid]} for rid, s in sorted(self.split_of.items())]


def _check_ratios(ratios) -> tuple[float, float, float]:
    if len(ratios) != 3:
        raise RatioError("need exactly three ratios (train, validation, test)")
    r = tuple(float(x) for x in ratios)
    if any(not math.isfinite(x) or x <= 0 for x in r):
        raise RatioError(f"ratios must be positive, got {r}")
    if abs(sum(r) - 1.0) > 1e-9:
        raise RatioError(f"ratios must sum to 1, got {sum(r)}")
    return r


def _tie_order(seed: int, key: str) -> list[int]:
    """Seeded preference among splits whose scores tie exactly."""
    h = hashlib.sha256(f"{seed}:{key}".encode()).digest()
    return sorted(range(3), key=lambda s: h[s])


def scaffold_split(
    records: Sequence[DatasetRecord],
    ratios=(0.85, 0.10, 0.05),
    seed: int = 0,
    *,
    keys: Sequence[str] | None = None,
) -> SplitAssignment:
    """Assign every record to train, validation or test.

    Targets are set per task category. A group's score for a split is the
    sum over its categories of (members in that category) x (remaining
    deficit of the split in that category); the group goes to the highest
    score. For single-category groups this is plain largest-deficit greedy.
    Splits left clearly short of target trigger a warning.
    """
    ratios = _check_ratios(ratios)
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError("record ids must be unique")
    keys = list(keys) if keys is not None else [group_key(r) for r in records]

    per_cat = Counter(r.task_category for r in records)
    targets = {c: [ratios[s] * n for s in range(3)] for c, n in per_cat.items()}
    filled = {c: [0, 0, 0] for c in per_cat}

    groups: dict[str, Counter] = defaultdict(Counter)
    members: dict[str, list[str]] = defaultdict(list)
    for r, k in zip(records, keys):
        groups[k][r.task_category] += 1
        members[k].append(r.id)

    order = sorted(groups, key=lambda k: (-sum(groups[k].values()), k))
    split_of: dict[str, str] = {}
    for k in order:
        comp = groups[k]
        scores = [sum(n * (targets[c][s] - filled[c][s]) for c, n in comp.items()) for s in range(3)]
        best = max(scores)
        pick = next(s for s in _tie_order(seed, k) if scores[s] == best)
        for c, n in comp.items():
            filled[c][pick] += n
        for rid in members[k]:
            split_of[rid] = SPLITS[pick]

    n = len(records)
    total_target = {SPLITS[s]: sum(t[s] for t in targets.values()) for s in range(3)}
    realized = Counter(split_of.values())
    notes = []
    for name, tgt in total_target.items():
        if realized.get(name, 0) < tgt - 0.01 * n:
            msg = f"{name} split underfilled: {realized.get(name, 0)} records for a target of {tgt:.1f}"
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)
    ordered = {rid: split_of[rid] for rid in ids}
    return SplitAssignment(ordered, dict(zip(ids, keys)), total_target, notes)
