"""Core molecular graph types.

All types here are immutable; transformations return new graphs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Mapping

from .elements import ATOMIC_NUMBER

# Stands in for an implicit hydrogen (or lone pair) in chiral neighbour orders.
HYDROGEN = -1


class BondOrder(enum.IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4

    @property
    def valence(self) -> int:
        """Contribution to an atom's bond-order sum (aromatic counts 1)."""
        return 1 if self is BondOrder.AROMATIC else int(self)


@dataclass(frozen=True, slots=True)
class Atom:
    element: str
    charge: int = 0
    isotope: int | None = None
    explicit_h: int = 0
    aromatic: bool = False
    chiral_tag: str | None = None
    bracket: bool = False
    implicit_h: int = 0
    valence_unfit: bool = False

    def __post_init__(self):
        if self.element not in ATOMIC_NUMBER:
            raise ValueError(f"unknown element {self.element!r}")
        if self.explicit_h < 0 or self.implicit_h < 0:
            raise ValueError("hydrogen counts must be non-negative")
        if self.isotope is not None and self.isotope < ATOMIC_NUMBER[self.element]:
            raise ValueError(f"isotope {self.isotope} below atomic number of {self.element}")
        if self.chiral_tag not in (None, "@", "@@"):
            raise ValueError(f"bad chiral tag {self.chiral_tag!r}")

    @property
    def total_h(self) -> int:
        return self.explicit_h + self.implicit_h

    @property
    def atomic_number(self) -> int:
        return ATOMIC_NUMBER[self.element]


@dataclass(frozen=True, slots=True)
class Bond:
    begin: int
    end: int
    order: BondOrder = BondOrder.SINGLE
    # "/" or "\\", read in the begin -> end direction.
    geometry_mark: str | None = None

    def __post_init__(self):
        if self.begin == self.end:
            raise ValueError("bond endpoints must be distinct")
        if self.geometry_mark not in (None, "/", "\\"):
            raise ValueError(f"bad geometry mark {self.geometry_mark!r}")

    def other(self, atom: int) -> int:
        return self.end if atom == self.begin else self.begin

    @property
    def key(self) -> frozenset[int]:
        return frozenset((self.begin, self.end))


@dataclass(frozen=True, eq=False)
class MoleculeGraph:
    """Attributed molecular graph.

    ``chiral_order`` maps each atom carrying a chiral tag to its neighbours
    in the order the tag refers to; ``HYDROGEN`` marks the implicit
    hydrogen or lone-pair position.
    """

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    chiral_order: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "bonds", tuple(self.bonds))
        object.__setattr__(self, "chiral_order", MappingProxyType(dict(self.chiral_order)))
        n = len(self.atoms)
        seen = set()
        for b in self.bonds:
            if not (0 <= b.begin < n and 0 <= b.end < n):
                raise ValueError(f"bond {b} references a missing atom")
            k = (b.begin, b.end) if b.begin < b.end else (b.end, b.begin)
            if k in seen:
                raise ValueError(f"duplicate bond between atoms {b.begin} and {b.end}")
            seen.add(k)

    def __len__(self) -> int:
        return len(self.atoms)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per atom, a tuple of ``(neighbour, bond_index)`` pairs."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for i, b in enumerate(self.bonds):
            adj[b.begin].append((b.end, i))
            adj[b.end].append((b.begin, i))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def bond_lookup(self) -> dict[frozenset[int], int]:
        return {b.key: i for i, b in enumerate(self.bonds)}

    def bond_between(self, a: int, b: int) -> Bond | None:
        i = self.bond_lookup.get(frozenset((a, b)))
        return None if i is None else self.bonds[i]

    def neighbors(self, atom: int) -> tuple[int, ...]:
        return tuple(n for n, _ in self.adjacency[atom])

    def degree(self, atom: int) -> int:
        return len(self.adjacency[atom])

    def bond_order_sum(self, atom: int) -> int:
        return self.bond_order_sums[atom]

    @cached_property
    def bond_order_sums(self) -> tuple[int, ...]:
        sums = [0] * len(self.atoms)
        for b in self.bonds:
            v = 1 if b.order == 4 else int(b.order)
            sums[b.begin] += v
            sums[b.end] += v
        return tuple(sums)

    @cached_property
    def fragments(self) -> tuple[tuple[int, ...], ...]:
        """Connected components as sorted atom-index tuples."""
        seen = [False] * len(self.atoms)
        comps = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = []
            while stack:
                a = stack.pop()
                comp.append(a)
                for nb, _ in self.adjacency[a]:
                    if not seen[nb]:
                        seen[nb] = True
                        stack.append(nb)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)

    @property
    def fragment_count(self) -> int:
        return len(self.fragments)

    @property
    def cycle_rank(self) -> int:
        return len(self.bonds) - len(self.atoms) + self.fragment_count

    @cached_property
    def rings(self) -> tuple[tuple[int, ...], ...]:
        from .rings import perceive_rings

        return perceive_rings(self)

    @cached_property
    def ring_bonds(self) -> frozenset[int]:
        """Indices of bonds lying on at least one cycle."""
        from .rings import cyclic_bonds

        return cyclic_bonds(self)

    @cached_property
    def ring_atoms(self) -> frozenset[int]:
        out = set()
        for bi in self.ring_bonds:
            out.add(self.bonds[bi].begin)
            out.add(self.bonds[bi].end)
        return frozenset(out)

    def with_atoms(self, atoms) -> "MoleculeGraph":
        atoms = tuple(atoms)
        if len(atoms) != len(self.atoms):
            return MoleculeGraph(atoms, self.bonds, self.chiral_order)
        # Same bonds over the same atom count: skip re-validating them.
        g = object.__new__(MoleculeGraph)
        object.__setattr__(g, "atoms", atoms)
        object.__setattr__(g, "bonds", self.bonds)
        object.__setattr__(g, "chiral_order", self.chiral_order)
        return g

    def with_bonds(self, bonds) -> "MoleculeGraph":
        return MoleculeGraph(self.atoms, tuple(bonds), self.chiral_order)

    def __repr__(self) -> str:
        return f"MoleculeGraph(atoms={len(self.atoms)}, bonds={len(self.bonds)})"


@dataclass(frozen=True, eq=False)
class Scaffold:
    graph: MoleculeGraph

    @property
    def is_empty(self) -> bool:
        return len(self.graph.atoms) == 0

    @cached_property
    def smiles(self) -> str:
        from .canon import write_canonical_smiles

        return write_canonical_smiles(self.graph) if not self.is_empty else ""


_ATOM_FIELDS = ("element", "charge", "isotope", "explicit_h", "aromatic",
                "chiral_tag", "bracket", "implicit_h", "valence_unfit")


def replace_atom(atom: Atom, **changes) -> Atom:
    # dataclasses.replace is slow on hot paths; build the new atom directly.
    return Atom(*(changes[f] if f in changes else getattr(atom, f) for f in _ATOM_FIELDS))
