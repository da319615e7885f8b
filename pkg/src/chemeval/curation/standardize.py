"""Molecule standardization ahead of deduplication and splitting.

The pipeline works on a hydrogen-pinned Kekulé copy so each rule is a
local edit of charges, hydrogen counts and bond orders:

1. group normalization (nitro, azide, sulfoxide written in one form),
2. neutralization of simple protonation states,
3. tautomer rules: enol to ketone, 2-hydroxypyridine to 2-pyridone,

then aromaticity is perceived again and the result is canonical.
"""

from __future__ import annotations

from ..errors import AromaticityError, StandardizationConflict
from ..molgraph import (
    HYDROGEN,
    Bond,
    BondOrder,
    MoleculeGraph,
    allowed_valences,
    kekulize,
    parse_smiles,
    standardize_graph,
    write_canonical_smiles,
)
from ..molgraph.graph import replace_atom
from ..molgraph.stereo import stray_marks


class _Edit:
    """Mutable scratch copy of a graph."""

    def __init__(self, g: MoleculeGraph):
        self.atoms = list(g.atoms)
        self.bonds = list(g.bonds)
        self.chiral = dict(g.chiral_order)
        self.adj = g.adjacency

    def set_atom(self, a, **kw):
        self.atoms[a] = replace_atom(self.atoms[a], **kw)

    def set_order(self, bi, order):
        b = self.bonds[bi]
        mark = b.geometry_mark if order is BondOrder.SINGLE else None
        self.bonds[bi] = Bond(b.begin, b.end, order, mark)

    def add_h(self, a, delta):
        atom = self.atoms[a]
        self.set_atom(a, explicit_h=atom.explicit_h + delta)
        if atom.chiral_tag is not None and (HYDROGEN in self.chiral.get(a, ()) or delta > 0):
            # The stored neighbour order no longer matches the atom.
            self.set_atom(a, chiral_tag=None)
            self.chiral.pop(a, None)

    def order(self, bi):
        return self.bonds[bi].order

    def graph(self) -> MoleculeGraph:
        return MoleculeGraph(tuple(self.atoms), tuple(self.bonds), self.chiral)


def _terminal(e: _Edit, a: int, element: str, charge: int) -> bool:
    atom = e.atoms[a]
    return atom.element == element and atom.charge == charge and len(e.adj[a]) == 1


def _normalize_groups(e: _Edit) -> None:
    for a, atom in enumerate(e.atoms):
        if atom.element == "N" and atom.charge == 0:
            oxo = [(nb, bi) for nb, bi in e.adj[a]
                   if e.order(bi) is BondOrder.DOUBLE and _terminal(e, nb, "O", 0)]
            if len(oxo) == 2:
                # Pentavalent nitro -> charge-separated form.
                nb, bi = min(oxo)
                e.set_atom(a, charge=1)
                e.set_atom(nb, charge=-1)
                e.set_order(bi, BondOrder.SINGLE)
                continue
            trip = [(nb, bi) for nb, bi in e.adj[a]
                    if e.order(bi) is BondOrder.TRIPLE and _terminal(e, nb, "N", 0)]
            dbl = [(nb, bi) for nb, bi in e.adj[a] if e.order(bi) is BondOrder.DOUBLE
                   and e.atoms[nb].element == "N"]
            if len(trip) == 1 and len(dbl) == 1 and len(e.adj[a]) == 2:
                # R-N=N#N -> R-N=[N+]=[N-]
                t, tb = trip[0]
                e.set_atom(a, charge=1)
                e.set_atom(t, charge=-1)
                e.set_order(tb, BondOrder.DOUBLE)
        elif atom.element == "N" and atom.charge == 1 and len(e.adj[a]) == 2:
            trip = [(nb, bi) for nb, bi in e.adj[a]
                    if e.order(bi) is BondOrder.TRIPLE and _terminal(e, nb, "N", 0)]
            neg = [(nb, bi) for nb, bi in e.adj[a]
                   if e.order(bi) is BondOrder.SINGLE and e.atoms[nb].element == "N" and e.atoms[nb].charge == -1]
            if len(trip) == 1 and len(neg) == 1:
                # R-[N-]-[N+]#N -> R-N=[N+]=[N-]
                (t, tb), (n, nbond) = trip[0], neg[0]
                e.set_atom(n, charge=0)
                e.set_atom(t, charge=-1)
                e.set_order(tb, BondOrder.DOUBLE)
                e.set_order(nbond, BondOrder.DOUBLE)
        elif atom.element == "S" and atom.charge == 1 and len(e.adj[a]) == 3 and atom.total_h == 0:
            oxide = [(nb, bi) for nb, bi in e.adj[a]
                     if e.order(bi) is BondOrder.SINGLE and _terminal(e, nb, "O", -1)]
            if oxide:
                nb, bi = min(oxide)
                e.set_atom(a, charge=0)
                e.set_atom(nb, charge=0)
                e.set_order(bi, BondOrder.DOUBLE)


def _legal(e: _Edit, a: int, charge: int, h: int) -> bool:
    atom = e.atoms[a]
    allowed = allowed_valences(atom.element, charge)
    if allowed is None:
        return True
    total = sum(e.order(bi).valence for _, bi in e.adj[a]) + h
    return total in allowed


def _neutralize(e: _Edit) -> None:
    for a, atom in enumerate(e.atoms):
        if atom.charge == 0:
            continue
        # Charge-separated pairs (nitro, N-oxide, azide) stay as written.
        if any(e.atoms[nb].charge * atom.charge < 0 for nb, _ in e.adj[a]):
            continue
        if atom.charge == -1:
            if not _legal(e, a, 0, atom.total_h + 1):
                raise StandardizationConflict(
                    f"protonating {atom.element}- at atom {a} breaks its valence")
            e.set_atom(a, charge=0)
            e.add_h(a, 1)
        elif atom.charge == 1 and atom.total_h > 0:
            if not _legal(e, a, 0, atom.total_h - 1):
                raise StandardizationConflict(
                    f"deprotonating {atom.element}+ at atom {a} breaks its valence")
            e.set_atom(a, charge=0)
            e.add_h(a, -1)


def _enol_to_keto(e: _Edit, aromatic: set[int]) -> bool:
    for o, atom in enumerate(e.atoms):
        if atom.element != "O" or atom.charge or atom.total_h != 1 or len(e.adj[o]) != 1:
            continue
        c, co = e.adj[o][0]
        if c in aromatic or e.atoms[c].element != "C" or e.order(co) is not BondOrder.SINGLE:
            continue
        for c2, cc in e.adj[c]:
            if (
                c2 != o
                and c2 not in aromatic
                and e.atoms[c2].element == "C"
                and e.atoms[c2].charge == 0
                and e.order(cc) is BondOrder.DOUBLE
            ):
                e.add_h(o, -1)
                e.set_order(co, BondOrder.DOUBLE)
                e.set_order(cc, BondOrder.SINGLE)
                e.add_h(c2, 1)
                return True
    return False


def _hydroxypyridine_to_pyridone(g: MoleculeGraph) -> MoleculeGraph:
    six = [set(r) for r in g.rings if len(r) == 6]
    while True:
        e = _Edit(g)
        hit = False
        for o, atom in enumerate(e.atoms):
            if atom.element != "O" or atom.charge or atom.total_h != 1 or len(e.adj[o]) != 1:
                continue
            c, co = e.adj[o][0]
            if not e.atoms[c].aromatic:
                continue
            for n, _ in e.adj[c]:
                na = e.atoms[n]
                if not (na.element == "N" and na.aromatic and na.charge == 0
                        and na.total_h == 0 and len(e.adj[n]) == 2):
                    continue
                if any(c in r and n in r for r in six):
                    e.add_h(o, -1)
                    e.set_order(co, BondOrder.DOUBLE)
                    e.add_h(n, 1)
                    hit = True
                    break
            if hit:
                break
        if not hit:
            return g
        g = standardize_graph(e.graph())


def standardize(g: MoleculeGraph | str) -> MoleculeGraph:
    """Normalize groups, neutralize, fix tautomers and return the standard graph.

    Raises :class:`StandardizationConflict` when a charged atom cannot be
    neutralized without breaking its valence.

    >>> write_canonical_smiles(standardize("CC(=O)[O-]"))
    'CC(=O)O'
    """
    if isinstance(g, str):
        g = parse_smiles(g)
    g = standardize_graph(g)
    aromatic = {a for a, atom in enumerate(g.atoms) if atom.aromatic}
    try:
        work = kekulize(g)
    except AromaticityError:
        work = g
    e = _Edit(work)
    _normalize_groups(e)
    _neutralize(e)
    for _ in range(len(e.atoms)):
        if not _enol_to_keto(e, aromatic):
            break
    g = e.graph()
    stray = set(stray_marks(g))
    if stray:
        g = g.with_bonds(Bond(b.begin, b.end, b.order, None) if i in stray else b for i, b in enumerate(g.bonds))
    g = standardize_graph(g)
    return _hydroxypyridine_to_pyridone(g)


def standard_smiles(text: str) -> str:
    """Canonical SMILES of the standardized molecule."""
    return write_canonical_smiles(standardize(text))
