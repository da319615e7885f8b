"""Kekulization and Hückel aromaticity perception.

Aromaticity is decided ring by ring over the relevant cycles: a ring is
aromatic when every member can take part in a pi system and the electron
count is 4n+2. Per-atom contributions:

* atom with a double bond inside the ring system: 1
* atom with an exocyclic double bond (e.g. ring C=O): 0
* N/P/As with three connections or an H, ring O/S/Se/Te, carbanion: 2
* carbocation or three-coordinate boron: 0 (empty p orbital)
* anything else (sp3 carbon, triple bonds): not a pi member
"""

from __future__ import annotations

import networkx as nx

from ..errors import AromaticityError
from .elements import allowed_valences
from .graph import Bond, BondOrder, MoleculeGraph, replace_atom
from .hydrogens import fix_hydrogens
from .rings import relevant_cycles

_LONE_PAIR_N = frozenset({"N", "P", "As"})
_LONE_PAIR_O = frozenset({"O", "S", "Se", "Te"})


def _needs_double(g: MoleculeGraph, i: int) -> bool:
    atom = g.atoms[i]
    used = g.bond_order_sum(i) + atom.total_h
    allowed = allowed_valences(atom.element, atom.charge)
    if not allowed:
        return False
    for v in allowed:
        if v >= used:
            return v - used >= 1
    return False


def kekulize(g: MoleculeGraph) -> MoleculeGraph:
    """Replace aromatic bonds by an alternating single/double assignment.

    Atoms lose their aromatic flag. Raises :class:`AromaticityError` when no
    perfect assignment exists (e.g. ``c1ccnc1``, a pyrrole missing its H).
    """
    arom_bonds = [i for i, b in enumerate(g.bonds) if b.order is BondOrder.AROMATIC]
    if not arom_bonds and not any(a.aromatic for a in g.atoms):
        return g
    pi_atoms = {i for i, a in enumerate(g.atoms) if a.aromatic}
    for bi in arom_bonds:
        pi_atoms.add(g.bonds[bi].begin)
        pi_atoms.add(g.bonds[bi].end)
    need = {i for i in pi_atoms if _needs_double(g, i)}
    edges = [bi for bi in arom_bonds if g.bonds[bi].begin in need and g.bonds[bi].end in need]

    matched = _greedy_matching(g, need, edges)
    if matched is None:
        G = nx.Graph()
        G.add_nodes_from(need)
        for bi in edges:
            G.add_edge(g.bonds[bi].begin, g.bonds[bi].end, bi=bi)
        mate = nx.max_weight_matching(G, maxcardinality=True)
        covered = {a for pair in mate for a in pair}
        if covered != need:
            raise AromaticityError("aromatic system cannot be kekulized", tuple(sorted(need - covered)))
        matched = {G.edges[u, v]["bi"] for u, v in mate}

    bonds = list(g.bonds)
    for bi in arom_bonds:
        b = bonds[bi]
        order = BondOrder.DOUBLE if bi in matched else BondOrder.SINGLE
        bonds[bi] = Bond(b.begin, b.end, order, b.geometry_mark if order is BondOrder.SINGLE else None)
    atoms = [replace_atom(a, aromatic=False) if a.aromatic else a for a in g.atoms]
    return MoleculeGraph(tuple(atoms), tuple(bonds), g.chiral_order)


def _greedy_matching(g: MoleculeGraph, need: set[int], edges: list[int]) -> set[int] | None:
    adj: dict[int, list[tuple[int, int]]] = {i: [] for i in need}
    for bi in edges:
        b = g.bonds[bi]
        adj[b.begin].append((b.end, bi))
        adj[b.end].append((b.begin, bi))
    free = set(need)
    chosen = set()
    while free:
        # Most constrained atom first.
        a = min(free, key=lambda x: (sum(1 for n, _ in adj[x] if n in free), x))
        options = [(n, bi) for n, bi in adj[a] if n in free]
        if not options:
            return None
        n, bi = min(options, key=lambda t: (sum(1 for m, _ in adj[t[0]] if m in free), t[0]))
        chosen.add(bi)
        free.discard(a)
        free.discard(n)
    return chosen


def _pi_contribution(g: MoleculeGraph, i: int, ring_bonds: frozenset[int]) -> int | None:
    atom = g.atoms[i]
    doubles = [(n, bi) for n, bi in g.adjacency[i] if g.bonds[bi].order is BondOrder.DOUBLE]
    if any(g.bonds[bi].order is BondOrder.TRIPLE for _, bi in g.adjacency[i]):
        return None
    if len(doubles) > 1:
        return None
    if doubles:
        return 1 if doubles[0][1] in ring_bonds else 0
    el, q = atom.element, atom.charge
    if el in _LONE_PAIR_N and q == 0:
        return 2 if g.degree(i) + atom.total_h == 3 else None
    if el in _LONE_PAIR_O and q == 0:
        return 2 if g.degree(i) + atom.total_h == 2 else None
    if el == "C" and q == -1:
        return 2
    if el == "C" and q == 1:
        return 0
    if el == "B" and q == 0 and g.degree(i) + atom.total_h == 3:
        return 0
    if el in _LONE_PAIR_N and q == -1 and g.degree(i) + atom.total_h == 2:
        return 2
    return None


def aromatic_rings(g: MoleculeGraph) -> list[tuple[int, ...]]:
    """Relevant cycles of a Kekulé-form graph that pass the 4n+2 rule."""
    ring_bonds = g.ring_bonds
    contrib: dict[int, int | None] = {}
    out = []
    for ring in relevant_cycles(g):
        total = 0
        for a in ring:
            if a not in contrib:
                contrib[a] = _pi_contribution(g, a, ring_bonds)
            c = contrib[a]
            if c is None:
                total = None
                break
            total += c
        if total is not None and total % 4 == 2:
            out.append(ring)
    return out


def perceive_aromaticity(g: MoleculeGraph, *, strict: bool = True) -> MoleculeGraph:
    """Mark aromatic rings; Kekulé and lowercase writings converge.

    ``g`` must already carry hydrogen counts. With ``strict``, any atom the
    input declared aromatic that does not end up in an aromatic ring raises
    :class:`AromaticityError`; otherwise such atoms are left in Kekulé form.
    Kekulization failures always raise. Hydrogen counts are pinned in the
    result (see :func:`fix_hydrogens`).
    """
    g = fix_hydrogens(g)
    declared = {i for i, a in enumerate(g.atoms) if a.aromatic}
    kek = kekulize(g)
    rings = aromatic_rings(kek)
    arom_atoms = {a for r in rings for a in r}
    if strict and declared - arom_atoms:
        raise AromaticityError("declared aromatic ring fails the 4n+2 rule", tuple(sorted(declared - arom_atoms)))
    arom_bonds = set()
    for r in rings:
        for k in range(len(r)):
            arom_bonds.add(kek.bond_lookup[frozenset((r[k], r[(k + 1) % len(r)]))])
    atoms = [replace_atom(a, aromatic=True) if i in arom_atoms else a for i, a in enumerate(kek.atoms)]
    bonds = list(kek.bonds)
    for bi in arom_bonds:
        b = bonds[bi]
        bonds[bi] = Bond(b.begin, b.end, BondOrder.AROMATIC)
    return MoleculeGraph(tuple(atoms), tuple(bonds), kek.chiral_order)
