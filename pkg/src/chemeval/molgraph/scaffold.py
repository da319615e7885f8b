"""Bemis-Murcko scaffolds."""

from __future__ import annotations

from ..errors import AromaticityError
from .aromaticity import kekulize, perceive_aromaticity
from .canon import induced_subgraph, standardize_graph
from .graph import MoleculeGraph, Scaffold, replace_atom


def bemis_murcko_scaffold(g: MoleculeGraph) -> Scaffold:
    """Ring systems plus the linkers joining them.

    Terminal atoms off the rings are stripped repeatedly until none is
    left, exocyclic double-bonded atoms included. Work happens on the Kekulé
    form so a ring carbon that loses ``=O`` picks up two hydrogens, then
    aromaticity is perceived again. Tetrahedral tags on atoms that lost a
    neighbour are dropped.

    >>> from chemeval.molgraph import parse_smiles
    >>> bemis_murcko_scaffold(parse_smiles("Cc1ccccc1")).smiles
    'c1ccccc1'
    """
    g = standardize_graph(g)
    try:
        work = kekulize(g)
    except AromaticityError:
        work = g
    ring_atoms = work.ring_atoms
    degree = [work.degree(a) for a in range(len(work.atoms))]
    alive = [True] * len(work.atoms)
    stack = [a for a in range(len(work.atoms)) if a not in ring_atoms and degree[a] <= 1]
    while stack:
        a = stack.pop()
        if not alive[a]:
            continue
        alive[a] = False
        for nb, _ in work.adjacency[a]:
            if alive[nb]:
                degree[nb] -= 1
                if nb not in ring_atoms and degree[nb] <= 1:
                    stack.append(nb)
    keep = [a for a in range(len(work.atoms)) if alive[a]]
    if not keep:
        return Scaffold(MoleculeGraph((), ()))
    if len(keep) == len(work.atoms):
        return Scaffold(g)

    lost = [0] * len(work.atoms)
    touched = set()
    for b in work.bonds:
        if alive[b.begin] != alive[b.end]:
            inside = b.begin if alive[b.begin] else b.end
            lost[inside] += b.order.valence
            touched.add(inside)
    atoms = list(work.atoms)
    for a in touched:
        atoms[a] = replace_atom(atoms[a], explicit_h=atoms[a].explicit_h + lost[a], chiral_tag=None)
    chiral = {a: o for a, o in work.chiral_order.items() if a not in touched}
    pruned = MoleculeGraph(tuple(atoms), work.bonds, chiral)
    sub, _ = induced_subgraph(pruned, keep)
    try:
        sub = perceive_aromaticity(sub, strict=False)
    except AromaticityError:
        pass
    return Scaffold(sub)
