"""Reaction SMILES (``reactants>agents>products``) and heavy-atom mass balance."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from ..errors import ReactionSyntaxError, SmilesSyntaxError
from ..molgraph import MoleculeGraph, parse_smiles, write_canonical_smiles

SIDES = ("reactants", "agents", "products")


@dataclass(frozen=True, eq=False)
class Reaction:
    reactants: tuple[MoleculeGraph, ...]
    agents: tuple[MoleculeGraph, ...]
    products: tuple[MoleculeGraph, ...]
    text: str = ""

    def canonical(self, side: str) -> tuple[str, ...]:
        return tuple(write_canonical_smiles(g) for g in getattr(self, side))


def _split_side(text: str, offset: int, side: str, allow_empty: bool) -> list[MoleculeGraph]:
    if not text.strip():
        if allow_empty:
            return []
        raise ReactionSyntaxError("invalid_syntax", offset, f"{side} field is empty", (side, 0))
    out = []
    pos = offset
    for idx, part in enumerate(text.split(".")):
        if not part.strip():
            raise ReactionSyntaxError("invalid_syntax", pos, f"empty component in {side}", (side, idx))
        try:
            out.append(parse_smiles(part, allow_atom_maps=True))
        except SmilesSyntaxError as exc:
            raise ReactionSyntaxError(exc.kind, pos + exc.position, f"{side}[{idx}]: {exc.message}",
                                      (side, idx)) from None
        pos += len(part) + 1
    return out


def parse_reaction(text: str) -> Reaction:
    """Parse reaction SMILES. Atom-map classes are accepted here.

    >>> r = parse_reaction("CC=O.[H][H]>>CCO")
    >>> len(r.reactants), len(r.agents), len(r.products)
    (2, 0, 1)
    """
    stripped = text.strip()
    if stripped.count(">") != 2:
        raise ReactionSyntaxError("invalid_syntax", stripped.find(">") if ">" in stripped else len(stripped),
                                  f"reaction needs exactly two '>' separators, found {stripped.count('>')}")
    first = stripped.index(">")
    second = stripped.index(">", first + 1)
    fields = (stripped[:first], stripped[first + 1:second], stripped[second + 1:])
    offsets = (0, first + 1, second + 1)
    reactants = _split_side(fields[0], offsets[0], "reactants", allow_empty=True)
    agents = _split_side(fields[1], offsets[1], "agents", allow_empty=True)
    products = _split_side(fields[2], offsets[2], "products", allow_empty=False)
    return Reaction(tuple(reactants), tuple(agents), tuple(products), stripped)


def heavy_atom_counts(graphs) -> Counter:
    c = Counter()
    for g in graphs:
        for a in g.atoms:
            if a.element != "H":
                c[a.element] += 1
    return c


@dataclass(frozen=True)
class BalanceResult:
    balanced: bool
    deficit: dict

    def __bool__(self) -> bool:
        return self.balanced


def check_mass_balance(r: Reaction) -> BalanceResult:
    """Products' heavy atoms must be available among reactants and agents.

    Hydrogen is ignored and surplus on the left is allowed (unlisted
    byproducts). ``deficit`` maps each element to how many atoms are missing.
    """
    left = heavy_atom_counts(r.reactants + r.agents)
    right = heavy_atom_counts(r.products)
    deficit = {el: n - left[el] for el, n in sorted(right.items()) if n > left[el]}
    return BalanceResult(not deficit, deficit)
