"""Staged validity checking of SMILES strings.

Stage 1 (syntax) parses the string. Stage 2 (possibility) checks isotopes,
aromaticity and valences on the hydrogen-assigned graph. Stage 3 (sanity)
screens notation-level strain and stereo consistency. A report stops at the
first failing stage and lists every error found within it.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AromaticityError, EmptyCorpus, SmilesSyntaxError
from .molgraph import (
    BondOrder,
    MoleculeGraph,
    assign_implicit_hydrogens,
    fix_hydrogens,
    induced_subgraph,
    isotope_in_bounds,
    kekulize,
    parse_smiles,
    perceive_aromaticity,
    write_canonical_smiles,
)
from .molgraph.elements import allowed_valences
from .molgraph.stereo import double_bond_stereo, stray_marks
from .stats import RateEstimate, rate_from_counts

STAGES = ("syntax", "possibility", "sanity", "valid")
TAXONOMY = (
    "invalid_syntax",
    "mismatched_brackets",
    "ring_closure_error",
    "invalid_isotope",
    "incorrect_valence",
    "incorrect_aromaticity",
    "invalid_stereochemistry",
    "strain_violation",
)
_SYNTAX_CODE = {
    "invalid_syntax": "invalid_syntax",
    "mismatched_brackets": "mismatched_brackets",
    "ring_closure_error": "ring_closure_error",
    "invalid_isotope": "invalid_isotope",
    "unknown_element": "invalid_syntax",
    "dangling_bond": "invalid_syntax",
    "unsupported_feature": "invalid_syntax",
}
STRAIN_RING_LIMIT = 8


@dataclass(frozen=True)
class ValidityError:
    code: str
    locus: tuple
    message: str

    def as_dict(self) -> dict:
        return {"code": self.code, "locus": list(self.locus), "message": self.message}


@dataclass(frozen=True)
class ValidityReport:
    input: str
    stage_reached: str
    errors: tuple[ValidityError, ...] = ()

    @property
    def is_valid(self) -> bool:
        return self.stage_reached == "valid"

    @property
    def passed_possibility(self) -> bool:
        return self.stage_reached in ("sanity", "valid")

    @property
    def codes(self) -> list[str]:
        return [e.code for e in self.errors]

    def to_record(self) -> dict:
        return {
            "input": self.input,
            "stage": self.stage_reached,
            "codes": self.codes,
            "loci": [list(e.locus) for e in self.errors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, separators=(",", ":"))


def _rooted_key(g: MoleculeGraph, center: int, nb: int, bond_index: int) -> str:
    """Canonical key of the branch hanging off ``center`` through ``nb``."""
    seen = {nb}
    q = deque([nb])
    while q:
        a = q.popleft()
        for x, bi in g.adjacency[a]:
            if bi == bond_index or x in seen:
                continue
            seen.add(x)
            q.append(x)
    sub, index = induced_subgraph(g, seen)
    order = g.bonds[bond_index].order
    return f"{int(order)}:{write_canonical_smiles(sub, root=index[nb])}"


def _chiral_errors(g: MoleculeGraph) -> list[ValidityError]:
    errs = []
    ring_bonds = g.ring_bonds
    for a, atom in enumerate(g.atoms):
        if atom.chiral_tag is None:
            continue
        count = g.degree(a) + atom.total_h
        if count < 3:
            errs.append(ValidityError("invalid_stereochemistry", (a,),
                                      f"chiral tag on atom {a} with only {count} neighbours"))
            continue
        if count > 4:
            errs.append(ValidityError("invalid_stereochemistry", (a,),
                                      f"tetrahedral tag on atom {a} with {count} neighbours"))
            continue
        if atom.total_h >= 2:
            errs.append(ValidityError("invalid_stereochemistry", (a,),
                                      f"chiral atom {a} carries two hydrogens"))
            continue
        keys = []
        for nb, bi in g.adjacency[a]:
            if bi in ring_bonds:
                continue
            keys.append(_rooted_key(g, a, nb, bi))
        if len(keys) != len(set(keys)):
            errs.append(ValidityError("invalid_stereochemistry", (a,),
                                      f"chiral atom {a} has identical substituents"))
    return errs


def check_stereo_notation(g: MoleculeGraph) -> list[ValidityError]:
    """Notation-level stereo problems of an H-assigned graph.

    Flags chiral tags with too few or duplicate neighbours, double bonds
    whose two marks on one end point the same way, and marks on bonds that
    touch no double bond.
    """
    g = fix_hydrogens(g)
    errs = _chiral_errors(g)
    for db in double_bond_stereo(g):
        for end in db.conflicts:
            errs.append(ValidityError("invalid_stereochemistry", (db.u, db.v),
                                      f"contradictory geometry marks at atom {end}"))
    for bi in stray_marks(g):
        b = g.bonds[bi]
        errs.append(ValidityError("invalid_stereochemistry", (b.begin, b.end),
                                  f"geometry mark on bond {b.begin}-{b.end} not next to a double bond"))
    return errs


def _smallest_ring_through(g: MoleculeGraph, bond_index: int) -> list[int] | None:
    b = g.bonds[bond_index]
    prev = {b.begin: None}
    q = deque([b.begin])
    while q:
        a = q.popleft()
        if a == b.end:
            break
        for x, bi in g.adjacency[a]:
            if bi != bond_index and x not in prev:
                prev[x] = a
                q.append(x)
    if b.end not in prev:
        return None
    path = [b.end]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _strain_errors(g: MoleculeGraph) -> list[ValidityError]:
    errs = []
    if not any(g.bonds[bi].order in (BondOrder.TRIPLE, BondOrder.DOUBLE) for bi in g.ring_bonds):
        return errs
    stereo = {db.bond: db for db in double_bond_stereo(g) if db.specified}
    for bi in sorted(g.ring_bonds):
        b = g.bonds[bi]
        if b.order not in (BondOrder.TRIPLE, BondOrder.DOUBLE):
            continue
        path = _smallest_ring_through(g, bi)
        if path is None or len(path) >= STRAIN_RING_LIMIT:
            continue
        if b.order is BondOrder.TRIPLE:
            errs.append(ValidityError("strain_violation", (b.begin, b.end),
                                      f"triple bond in a {len(path)}-membered ring"))
            continue
        db = stereo.get(bi)
        if db is None or len(path) < 3:
            continue
        rel = db.relation(path[1], path[-2]) if path[0] == db.u else db.relation(path[-2], path[1])
        if rel == -1:
            errs.append(ValidityError("strain_violation", (b.begin, b.end),
                                      f"trans double bond in a {len(path)}-membered ring"))
    return errs


def _valence_errors(g: MoleculeGraph) -> list[ValidityError]:
    errs = []
    for a, atom in enumerate(g.atoms):
        allowed = allowed_valences(atom.element, atom.charge)
        if allowed is None:
            continue
        total = g.bond_order_sum(a) + atom.total_h
        if atom.valence_unfit or not allowed or total > max(allowed):
            errs.append(ValidityError("incorrect_valence", (a,),
                                      f"{atom.element} atom {a} has valence {total}, allowed {list(allowed)}"))
    return errs


def _possibility_errors(g: MoleculeGraph) -> list[ValidityError]:
    errs = []
    for a, atom in enumerate(g.atoms):
        if atom.isotope is not None and not isotope_in_bounds(atom.element, atom.isotope):
            errs.append(ValidityError("invalid_isotope", (a,),
                                      f"mass number {atom.isotope} implausible for {atom.element}"))
    if not _has_aromatic(g):
        return errs + _valence_errors(g)
    try:
        perceive_aromaticity(g, strict=True)
    except AromaticityError as exc:
        errs.append(ValidityError("incorrect_aromaticity", tuple(exc.atoms), str(exc)))
    try:
        kek = kekulize(g)
    except AromaticityError:
        kek = g
    errs.extend(_valence_errors(kek))
    return errs


def _has_aromatic(g: MoleculeGraph) -> bool:
    return any(a.aromatic for a in g.atoms) or any(b.order is BondOrder.AROMATIC for b in g.bonds)


def _has_stereo(g: MoleculeGraph) -> bool:
    return bool(g.chiral_order) or any(a.chiral_tag for a in g.atoms) or any(b.geometry_mark for b in g.bonds)


def validate(text: str) -> ValidityReport:
    """Run all three stages on ``text``; failures are data, never exceptions.

    >>> validate("CC(=O)O").stage_reached
    'valid'
    >>> validate("C(C)(C)(C)(C)C").codes
    ['incorrect_valence']
    """
    try:
        g = parse_smiles(text)
    except SmilesSyntaxError as exc:
        code = _SYNTAX_CODE[exc.kind]
        return ValidityReport(text, "syntax", (ValidityError(code, (exc.position,), exc.message),))
    g = assign_implicit_hydrogens(g)
    errs = _possibility_errors(g)
    if errs:
        return ValidityReport(text, "possibility", tuple(errs))
    if not _has_aromatic(g):
        kek = g
    else:
        g = fix_hydrogens(g)
        try:
            kek = kekulize(g)
        except AromaticityError:
            kek = g
    errs = _strain_errors(kek)
    if _has_stereo(g):
        errs += check_stereo_notation(g)
    if errs:
        return ValidityReport(text, "sanity", tuple(errs))
    return ValidityReport(text, "valid")


def validate_many(texts: Iterable[str], jobs: int = 1) -> list[ValidityReport]:
    texts = list(texts)
    if jobs <= 1 or len(texts) < 64:
        return [validate(t) for t in texts]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(validate, texts, chunksize=64))


def corpus_validity_rate(reports: Sequence[ValidityReport], confidence: float = 0.95) -> RateEstimate:
    """Share of fully valid structures with a Wilson interval."""
    if not reports:
        raise EmptyCorpus("no validity reports to aggregate")
    ok = sum(1 for r in reports if r.is_valid)
    return rate_from_counts(ok, len(reports), confidence)


def possibility_verdict(text: str) -> bool:
    """True when ``text`` parses and its valences, isotopes and rings are possible."""
    return validate(text).passed_possibility


__all__ = [
    "STAGES",
    "TAXONOMY",
    "ValidityError",
    "ValidityReport",
    "check_stereo_notation",
    "corpus_validity_rate",
    "possibility_verdict",
    "validate",
    "validate_many",
]
