"""Molecular graphs from SMILES: parsing, hydrogens, rings, aromaticity,
canonical output and Bemis-Murcko scaffolds."""

from .aromaticity import kekulize, perceive_aromaticity
from .canon import (
    canonical_ranks,
    canonical_smiles,
    induced_subgraph,
    random_smiles,
    standardize_graph,
    write_canonical_smiles,
)
from .elements import allowed_valences, isotope_in_bounds, max_valence
from .graph import HYDROGEN, Atom, Bond, BondOrder, MoleculeGraph, Scaffold
from .hydrogens import assign_implicit_hydrogens, fix_hydrogens
from .parser import iter_smiles_lines, parse_smiles
from .rings import cyclic_bonds, perceive_rings, relevant_cycles
from .scaffold import bemis_murcko_scaffold

__all__ = [
    "Atom",
    "Bond",
    "BondOrder",
    "HYDROGEN",
    "MoleculeGraph",
    "Scaffold",
    "allowed_valences",
    "assign_implicit_hydrogens",
    "bemis_murcko_scaffold",
    "canonical_ranks",
    "canonical_smiles",
    "cyclic_bonds",
    "fix_hydrogens",
    "induced_subgraph",
    "isotope_in_bounds",
    "iter_smiles_lines",
    "kekulize",
    "max_valence",
    "parse_smiles",
    "perceive_aromaticity",
    "perceive_rings",
    "random_smiles",
    "relevant_cycles",
    "standardize_graph",
    "write_canonical_smiles",
]
