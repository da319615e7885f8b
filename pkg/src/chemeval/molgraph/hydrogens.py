"""Implicit hydrogen assignment for atoms written without brackets."""

from __future__ import annotations

from .elements import allowed_valences
from .graph import Atom, MoleculeGraph, replace_atom


def implicit_hydrogens(element: str, charge: int, aromatic: bool, bond_sum: int) -> tuple[int, bool]:
    """Hydrogen count for a bare atom and whether a valence could be fitted.

    Non-aromatic atoms fill up to the smallest allowed valence at or above
    ``bond_sum``. Aromatic atoms reserve one unit for the pi system when the
    lowest valence leaves room for it (benzene carbon, pyridine nitrogen);
    otherwise the ring atom is treated as a lone-pair donor (furan oxygen,
    thiophene sulfur) and takes no hydrogen.
    """
    allowed = allowed_valences(element, charge)
    if allowed is None:
        return 0, False
    if not allowed:
        return 0, True
    if aromatic:
        low = allowed[0]
        if bond_sum + 1 <= low:
            return low - bond_sum - 1, False
        if bond_sum <= low:
            return 0, False
        for v in allowed[1:]:
            if v >= bond_sum + 1:
                return v - bond_sum - 1, False
        return 0, True
    for v in allowed:
        if v >= bond_sum:
            return v - bond_sum, False
    return 0, True


def assign_implicit_hydrogens(g: MoleculeGraph) -> MoleculeGraph:
    """Return a copy of ``g`` with implicit hydrogens set on every bare atom.

    Bracket atoms keep their written hydrogen count. Bare atoms whose bond
    orders exceed every allowed valence get zero hydrogens and are flagged
    with ``valence_unfit``.
    """
    atoms = []
    changed = False
    for i, atom in enumerate(g.atoms):
        if atom.bracket:
            new = atom
        else:
            h, unfit = implicit_hydrogens(atom.element, atom.charge, atom.aromatic, g.bond_order_sum(i))
            new = atom if (atom.implicit_h, atom.valence_unfit) == (h, unfit) else replace_atom(
                atom, implicit_h=h, valence_unfit=unfit)
        changed |= new is not atom
        atoms.append(new)
    return g.with_atoms(atoms) if changed else g


def fix_hydrogens(g: MoleculeGraph) -> MoleculeGraph:
    """Pin every hydrogen count so later edits to bonds or aromaticity keep it.

    Atoms become bracket atoms carrying their full count as ``explicit_h``.
    """
    if all(a.bracket and a.implicit_h == 0 for a in g.atoms):
        return g
    atoms = [a if a.bracket and a.implicit_h == 0 else replace_atom(
        a, bracket=True, explicit_h=a.total_h, implicit_h=0) for a in g.atoms]
    return g.with_atoms(atoms)


def bare_form_matches(atom: Atom, bond_sum: int) -> bool:
    """True if writing ``atom`` without brackets reproduces its hydrogen count."""
    h, _ = implicit_hydrogens(atom.element, atom.charge, atom.aromatic, bond_sum)
    return h == atom.total_h
