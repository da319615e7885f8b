"""Substructure patterns written as SMILES.

A pattern atom matches a molecule atom of the same element and aromaticity.
Bracket pattern atoms also fix the charge and the total hydrogen count, so
``C(=O)[OH]`` finds carboxylic acids but not esters. Bonds must agree in
order. Dot-separated patterns need every component present.
"""

from __future__ import annotations

from functools import lru_cache

import networkx as nx
from networkx.algorithms.isomorphism import GraphMatcher

from ..molgraph import MoleculeGraph, parse_smiles, standardize_graph

MATCH_LIMIT = 10_000

FUNCTIONAL_GROUPS: dict[str, str] = {
    "carboxylic_acid": "C(=O)[OH]",
    "acid_chloride": "C(=O)Cl",
    "aldehyde": "[CH]=O",
    "primary_amine": "[NH2]C",
    "aniline": "[NH2]c",
    "alcohol": "[OH]C",
    "phenol": "[OH]c",
    "thiol": "[SH]",
    "organometallic_mg": "[Mg]",
    "organolithium": "[Li]",
    "azide": "N=[N+]=[N-]",
    "isocyanate": "N=C=O",
    "nitro": "[N+](=O)[O-]",
    "boronic_acid": "B([OH])[OH]",
    "alkyne_terminal": "C#[CH]",
    "epoxide": "C1OC1",
    "alkyl_bromide": "CBr",
    "alkyl_iodide": "CI",
    "ester": "C(=O)OC",
    "ketone": "CC(=O)C",
}


def molecule_to_nx(g: MoleculeGraph, offset: int = 0) -> nx.Graph:
    G = nx.Graph()
    for i, a in enumerate(g.atoms):
        G.add_node(offset + i, element=a.element, aromatic=a.aromatic, charge=a.charge, h=a.total_h)
    for b in g.bonds:
        G.add_edge(offset + b.begin, offset + b.end, order=int(b.order))
    return G


def side_graph(graphs) -> nx.Graph:
    """Disjoint union of standardized molecules."""
    G = nx.Graph()
    offset = 0
    for g in graphs:
        std = standardize_graph(g)
        G.update(molecule_to_nx(std, offset))
        offset += len(std.atoms)
    return G


@lru_cache(maxsize=512)
def compile_pattern(text: str) -> tuple[nx.Graph, ...]:
    """One networkx graph per dot-separated component of a pattern."""
    g = parse_smiles(text)
    comps = []
    for frag in g.fragments:
        P = nx.Graph()
        for i in frag:
            a = g.atoms[i]
            P.add_node(i, element=a.element, aromatic=a.aromatic, charge=a.charge,
                       h=a.explicit_h, strict=a.bracket)
        for b in g.bonds:
            if b.begin in frag:
                P.add_edge(b.begin, b.end, order=int(b.order))
        comps.append(P)
    return tuple(comps)


def _node_match(mol: dict, pat: dict) -> bool:
    if mol["element"] != pat["element"] or mol["aromatic"] != pat["aromatic"]:
        return False
    if pat["strict"]:
        return mol["charge"] == pat["charge"] and mol["h"] == pat["h"]
    return True


def _edge_match(mol: dict, pat: dict) -> bool:
    return mol["order"] == pat["order"]


def count_matches(G: nx.Graph, P: nx.Graph) -> int:
    """Number of distinct atom sets of ``G`` covered by a match of ``P``."""
    gm = GraphMatcher(G, P, node_match=_node_match, edge_match=_edge_match)
    seen = set()
    for k, mapping in enumerate(gm.subgraph_monomorphisms_iter()):
        seen.add(frozenset(mapping))
        if k >= MATCH_LIMIT:
            break
    return len(seen)


def pattern_present(G: nx.Graph, pattern: str) -> bool:
    return all(count_matches(G, P) > 0 for P in compile_pattern(pattern))


def pattern_count(G: nx.Graph, pattern: str) -> int:
    """Matches of a single-component pattern (components are summed otherwise)."""
    return sum(count_matches(G, P) for P in compile_pattern(pattern))


def groups_present(G: nx.Graph, names=None) -> set[str]:
    names = FUNCTIONAL_GROUPS if names is None else names
    return {n for n in names if n in FUNCTIONAL_GROUPS and pattern_present(G, FUNCTIONAL_GROUPS[n])}
