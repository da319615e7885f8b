"""Stereo bookkeeping: tetrahedral parity and double-bond geometry marks.

A geometry mark is stored on a single bond as ``/`` or ``\\`` read in the
bond's begin -> end direction. For a double bond ``u=v`` and a substituent
``w`` of ``u`` joined by a marked bond, the *side* of ``w`` is ``+1`` or
``-1``; two substituents on opposite ends are cis when their sides agree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import BondOrder, MoleculeGraph

_DIR = {"/": 1, "\\": -1}


def permutation_parity(src, dst) -> int:
    """Parity (0 even, 1 odd) of the permutation taking ``src`` to ``dst``."""
    pos = {x: i for i, x in enumerate(src)}
    perm = [pos[x] for x in dst]
    parity = 0
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def flip_tag(tag: str) -> str:
    return "@@" if tag == "@" else "@"


def mark_side(g: MoleculeGraph, bond_index: int, end_atom: int) -> int | None:
    """Side of the substituent reached from ``end_atom`` through a marked bond."""
    b = g.bonds[bond_index]
    if b.geometry_mark is None:
        return None
    d = _DIR[b.geometry_mark]
    return d if b.begin == end_atom else -d


@dataclass(frozen=True)
class DoubleBondStereo:
    """Geometry around one double bond.

    ``sides`` maps ``(end_atom, substituent)`` to +1/-1 for every single-bond
    substituent, including sides implied by a marked sibling.
    ``conflicts`` lists ends whose two marks put both substituents on the
    same side.
    """

    bond: int
    u: int
    v: int
    sides: dict
    specified: bool
    conflicts: tuple[int, ...]

    def relation(self, a: int, b: int) -> int | None:
        """+1 if substituent ``a`` (on u) and ``b`` (on v) are cis, -1 if trans."""
        sa = self.sides.get((self.u, a))
        sb = self.sides.get((self.v, b))
        if sa is None or sb is None:
            return None
        return sa * sb


def _end_sides(g: MoleculeGraph, end: int, other: int):
    subs = []
    for nb, bi in g.adjacency[end]:
        if nb == other:
            continue
        if g.bonds[bi].order is BondOrder.SINGLE:
            subs.append((nb, bi))
    marked = {nb: mark_side(g, bi, end) for nb, bi in subs if g.bonds[bi].geometry_mark}
    sides = dict(marked)
    conflict = False
    if len(marked) == 2:
        a, b = marked.values()
        conflict = a == b
    elif len(marked) == 1 and len(subs) == 2:
        (w, s), = marked.items()
        for nb, _ in subs:
            if nb != w:
                sides[nb] = -s
    return sides, bool(marked), conflict


def double_bond_stereo(g: MoleculeGraph) -> list[DoubleBondStereo]:
    """Every double bond carrying at least one geometry mark on an adjacent bond."""
    out = []
    for bi, b in enumerate(g.bonds):
        if b.order is not BondOrder.DOUBLE:
            continue
        su, mu, cu = _end_sides(g, b.begin, b.end)
        sv, mv, cv = _end_sides(g, b.end, b.begin)
        if not (mu or mv):
            continue
        sides = {(b.begin, w): s for w, s in su.items()}
        sides.update({(b.end, w): s for w, s in sv.items()})
        conflicts = tuple(x for x, c in ((b.begin, cu), (b.end, cv)) if c)
        out.append(DoubleBondStereo(bi, b.begin, b.end, sides, mu and mv, conflicts))
    return out


def stray_marks(g: MoleculeGraph) -> list[int]:
    """Marked bonds not adjacent to any double bond."""
    out = []
    for bi, b in enumerate(g.bonds):
        if b.geometry_mark is None:
            continue
        near = False
        for end in (b.begin, b.end):
            for _, bj in g.adjacency[end]:
                if bj != bi and g.bonds[bj].order is BondOrder.DOUBLE:
                    near = True
        if not near:
            out.append(bi)
    return out


def has_stereo(g: MoleculeGraph) -> bool:
    return bool(g.chiral_order) or any(b.geometry_mark for b in g.bonds)
