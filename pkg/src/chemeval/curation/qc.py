"""Quality control over a curated corpus."""

from __future__ import annotations

import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import ReactionSyntaxError
from ..routes import check_mass_balance, parse_reaction
from ..validity import validate
from .records import DatasetRecord, deduplicate

OUTLIER_Z = 4.0
_MAD_SCALE = 0.6745

CHECKS = ("validity", "mass_balance", "duplicate", "property_outlier")


@dataclass(frozen=True)
class QCFlag:
    id: str
    check: str
    detail: str

    def as_dict(self) -> dict:
        return {"id": self.id, "check": self.check, "detail": self.detail}


@dataclass
class QCReport:
    total: int
    flags: list = field(default_factory=list)

    @property
    def counts(self) -> dict:
        c = Counter(f.check for f in self.flags)
        return {k: c.get(k, 0) for k in CHECKS}

    @property
    def removal_candidates(self) -> list[str]:
        return sorted({f.id for f in self.flags})

    def records(self) -> list[dict]:
        return [f.as_dict() for f in self.flags]


def robust_z(values: Sequence[float]) -> list[float]:
    """0.6745 (x - median) / MAD; all zeros when the MAD is zero."""
    med = statistics.median(values)
    mad = statistics.median(abs(v - med) for v in values)
    if mad == 0:
        return [0.0] * len(values)
    return [_MAD_SCALE * (v - med) / mad for v in values]


def quality_control(records: Sequence[DatasetRecord]) -> QCReport:
    report = QCReport(len(records))
    flags = report.flags
    for r in records:
        for smi in r.key_molecules + ((r.key_product,) if r.key_product else ()):
            v = validate(smi)
            if not v.is_valid:
                flags.append(QCFlag(r.id, "validity", f"{smi}: {','.join(v.codes)}"))
        if r.reaction:
            try:
                bal = check_mass_balance(parse_reaction(r.reaction))
            except ReactionSyntaxError as exc:
                flags.append(QCFlag(r.id, "mass_balance", f"unparseable reaction: {exc}"))
            else:
                if not bal.balanced:
                    deficit = ",".join(f"{el}:{n}" for el, n in sorted(bal.deficit.items()))
                    flags.append(QCFlag(r.id, "mass_balance", f"product atoms missing from reactants {deficit}"))

    kept, _ = deduplicate(records)
    kept_ids = {id(r) for r in kept}
    for r in records:
        if id(r) not in kept_ids:
            flags.append(QCFlag(r.id, "duplicate", "repeats an earlier record"))

    by_prop = defaultdict(list)
    for r in records:
        for name, value in r.properties.items():
            by_prop[name].append((r.id, value))
    for name, pairs in sorted(by_prop.items()):
        if len(pairs) < 3:
            continue
        for (rid, value), z in zip(pairs, robust_z([v for _, v in pairs])):
            if abs(z) > OUTLIER_Z:
                flags.append(QCFlag(rid, "property_outlier", f"{name}={value:g} (robust z {z:.1f})"))
    return report
