"""SMILES reader.

Covers the OpenSMILES subset used by drug-like molecules: organic-subset
and bracket atoms, branches, ring closures (single digits and ``%nn``),
bond orders, ``/``/``\\`` geometry marks, and ``@``/``@@`` tetrahedral tags.
Implicit hydrogens are not assigned here.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

from ..errors import SmilesSyntaxError
from .elements import AROMATIC_BRACKET, ATOMIC_NUMBER
from .graph import HYDROGEN, Atom, Bond, BondOrder, MoleculeGraph

_BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
}
_FLIP = {"/": "\\", "\\": "/"}
_ORGANIC_TWO = ("Cl", "Br")
_ORGANIC_ONE = frozenset("BCNOPSFI")
_AROMATIC_ONE = frozenset("bcnops")


class _RingSlot:
    __slots__ = ("atom",)

    def __init__(self):
        self.atom: int | None = None


class _Reader:
    def __init__(self, text: str, allow_atom_maps: bool):
        self.text = text
        self.allow_atom_maps = allow_atom_maps
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self.bond_keys: set[frozenset[int]] = set()
        self.order: list[list] = []
        self.has_prev: list[bool] = []
        self.prev: int | None = None
        self.pending: tuple[str, int] | None = None
        self.branches: list[tuple[int, int]] = []
        self.open_rings: dict[int, tuple[int, str | None, int, _RingSlot]] = {}

    def fail(self, kind: str, pos: int, msg: str):
        raise SmilesSyntaxError(kind, pos, msg)

    def run(self) -> MoleculeGraph:
        text = self.text
        i, n = 0, len(text)
        last = None  # previous token class, for context checks
        while i < n:
            c = text[i]
            if c == "(":
                if self.prev is None:
                    self.fail("invalid_syntax", i, "branch opened without a preceding atom")
                if self.pending is not None:
                    self.fail("dangling_bond", self.pending[1], "bond symbol before branch")
                if i + 1 < n and text[i + 1] == ")":
                    self.fail("invalid_syntax", i + 1, "empty branch")
                self.branches.append((self.prev, i))
                i += 1
                last = "("
            elif c == ")":
                if not self.branches:
                    self.fail("mismatched_brackets", i, "unmatched ')'")
                if self.pending is not None:
                    self.fail("dangling_bond", self.pending[1], "bond symbol not followed by an atom")
                self.prev = self.branches.pop()[0]
                i += 1
                last = ")"
            elif c in _BOND_SYMBOLS or c == "$":
                if c == "$":
                    self.fail("unsupported_feature", i, "quadruple bonds are not supported")
                if self.prev is None:
                    self.fail("dangling_bond", i, "bond symbol without a preceding atom")
                if self.pending is not None:
                    self.fail("invalid_syntax", i, "two consecutive bond symbols")
                self.pending = (c, i)
                i += 1
                last = "bond"
            elif c == ".":
                if self.pending is not None:
                    self.fail("dangling_bond", self.pending[1], "bond symbol before '.'")
                if self.prev is None or last in ("(", "."):
                    self.fail("invalid_syntax", i, "empty component")
                self.prev = None
                i += 1
                last = "."
            elif c.isdigit() or c == "%":
                if self.prev is None:
                    self.fail("invalid_syntax", i, "ring-closure digit without a preceding atom")
                if c == "%":
                    digits = text[i + 1:i + 3]
                    if len(digits) != 2 or not digits.isdigit():
                        self.fail("ring_closure_error", i, "'%' must be followed by two digits")
                    self.ring_bond(int(digits), i)
                    i += 3
                else:
                    self.ring_bond(int(c), i)
                    i += 1
                last = "ring"
            elif c == "[":
                close = text.find("]", i + 1)
                nxt = text.find("[", i + 1)
                if close == -1 or (nxt != -1 and nxt < close):
                    self.fail("mismatched_brackets", n if close == -1 else nxt, "unterminated '['")
                self.add_atom(self.bracket_atom(text[i + 1:close], i + 1), i)
                i = close + 1
                last = "atom"
            elif c == "]":
                self.fail("mismatched_brackets", i, "unmatched ']'")
            elif c.isalpha() or c == "*":
                atom, width = self.organic_atom(i)
                self.add_atom(atom, i)
                i += width
                last = "atom"
            elif c == ">":
                self.fail("unsupported_feature", i, "reaction arrows are not allowed in a molecule")
            else:
                self.fail("invalid_syntax", i, f"unexpected character {c!r}")

        if self.pending is not None:
            self.fail("dangling_bond", self.pending[1], "bond symbol at end of string")
        if last == ".":
            self.fail("invalid_syntax", n, "empty component after '.'")
        if self.branches:
            self.fail("mismatched_brackets", n, "unclosed '('")
        if self.open_rings:
            num, (_, _, pos, _) = min(self.open_rings.items(), key=lambda kv: kv[1][2])
            self.fail("ring_closure_error", pos, f"unmatched ring-closure digit {num}")
        return self.build()

    def organic_atom(self, i: int) -> tuple[Atom, int]:
        text = self.text
        two = text[i:i + 2]
        if two in _ORGANIC_TWO:
            return Atom(two), 2
        c = text[i]
        if c in _ORGANIC_ONE:
            return Atom(c), 1
        if c in _AROMATIC_ONE:
            return Atom(c.upper(), aromatic=True), 1
        if c == "*":
            self.fail("unsupported_feature", i, "wildcard atoms are not supported")
        if two in ATOMIC_NUMBER or c in ATOMIC_NUMBER:
            self.fail("invalid_syntax", i, f"element {two if two in ATOMIC_NUMBER else c} must be written in brackets")
        self.fail("unknown_element", i, f"unknown element symbol {c!r}")

    def bracket_atom(self, body: str, base: int) -> Atom:
        j, m = 0, len(body)
        while j < m and body[j].isdigit():
            j += 1
        isotope = None
        if j:
            isotope = int(body[:j])
            if isotope == 0:
                self.fail("invalid_isotope", base, "isotope must be a positive mass number")
        if j >= m:
            self.fail("invalid_syntax" if not j else "invalid_isotope", base + j, "bracket atom without element")
        aromatic = False
        if body[j].isupper():
            if j + 1 < m and body[j + 1].islower() and body[j:j + 2] in ATOMIC_NUMBER:
                symbol = body[j:j + 2]
            elif body[j] in ATOMIC_NUMBER:
                symbol = body[j]
            else:
                self.fail("unknown_element", base + j, f"unknown element symbol in [{body}]")
        elif body[j].islower():
            if body[j:j + 2] in AROMATIC_BRACKET:
                symbol = body[j:j + 2]
            elif body[j] in AROMATIC_BRACKET:
                symbol = body[j]
            else:
                self.fail("unknown_element", base + j, f"unknown element symbol in [{body}]")
            aromatic = True
            symbol = symbol.capitalize()
        elif body[j] == "*":
            self.fail("unsupported_feature", base + j, "wildcard atoms are not supported")
        else:
            self.fail("invalid_syntax", base + j, f"malformed bracket atom [{body}]")
        j += len(symbol)

        if j < m and body[j].isdigit():
            self.fail("invalid_isotope", base + j, "mass number must precede the element symbol")

        chiral = None
        if j < m and body[j] == "@":
            if body[j:j + 2] == "@@":
                chiral, j = "@@", j + 2
            else:
                chiral, j = "@", j + 1
            if j < m and body[j:j + 2] in ("TH", "AL", "SP", "TB", "OH"):
                self.fail("unsupported_feature", base + j, "extended chirality classes are not supported")

        hcount = 0
        if j < m and body[j] == "H":
            j += 1
            k = j
            while j < m and body[j].isdigit():
                j += 1
            hcount = int(body[k:j]) if j > k else 1

        charge = 0
        if j < m and body[j] in "+-":
            sign = 1 if body[j] == "+" else -1
            k = j + 1
            if k < m and body[k].isdigit():
                e = k
                while e < m and body[e].isdigit():
                    e += 1
                charge = sign * int(body[k:e])
                j = e
            else:
                e = k
                while e < m and body[e] == body[j]:
                    e += 1
                charge = sign * (e - j)
                j = e

        if j < m and body[j] == ":":
            if not self.allow_atom_maps:
                self.fail("unsupported_feature", base + j, "atom-map classes are not supported in plain molecules")
            k = j + 1
            while k < m and body[k].isdigit():
                k += 1
            if k == j + 1:
                self.fail("invalid_syntax", base + j, "empty atom-map class")
            j = k

        if j != m:
            self.fail("invalid_syntax", base + j, f"malformed bracket atom [{body}]")
        if isotope is not None and isotope < ATOMIC_NUMBER[symbol]:
            self.fail("invalid_isotope", base, f"mass number {isotope} is below the atomic number of {symbol}")
        return Atom(symbol, charge=charge, isotope=isotope, explicit_h=hcount,
                    aromatic=aromatic, chiral_tag=chiral, bracket=True)

    def _default_order(self, a: int, b: int) -> BondOrder:
        if self.atoms[a].aromatic and self.atoms[b].aromatic:
            return BondOrder.AROMATIC
        return BondOrder.SINGLE

    def add_atom(self, atom: Atom, pos: int):
        idx = len(self.atoms)
        self.atoms.append(atom)
        self.order.append([])
        self.has_prev.append(self.prev is not None)
        if self.prev is not None:
            sym = None
            if self.pending is not None:
                sym = self.pending[0]
                self.pending = None
            order = _BOND_SYMBOLS[sym] if sym else self._default_order(self.prev, idx)
            mark = sym if sym in _FLIP else None
            self.bonds.append(Bond(self.prev, idx, order, mark))
            self.bond_keys.add(frozenset((self.prev, idx)))
            self.order[self.prev].append(idx)
            self.order[idx].append(self.prev)
        self.prev = idx

    def ring_bond(self, num: int, pos: int):
        here = self.prev
        sym = None
        if self.pending is not None:
            sym = self.pending[0]
            self.pending = None
        if num not in self.open_rings:
            slot = _RingSlot()
            self.open_rings[num] = (here, sym, pos, slot)
            self.order[here].append(slot)
            return
        partner, open_sym, _, slot = self.open_rings.pop(num)
        if partner == here:
            self.fail("ring_closure_error", pos, f"ring closure {num} bonds an atom to itself")
        key = frozenset((partner, here))
        if key in self.bond_keys:
            self.fail("ring_closure_error", pos, f"ring closure {num} duplicates an existing bond")
        # Marks are read away from the atom they are written on; normalise
        # both ends to the opening -> closing direction.
        close_sym = _FLIP.get(sym, sym) if sym is not None else None
        if open_sym is not None and close_sym is not None and open_sym != close_sym:
            self.fail("ring_closure_error", pos, f"ring closure {num} has conflicting bond symbols")
        use = open_sym if open_sym is not None else close_sym
        order = _BOND_SYMBOLS[use] if use else self._default_order(partner, here)
        mark = use if use in _FLIP else None
        self.bonds.append(Bond(partner, here, order, mark))
        self.bond_keys.add(key)
        slot.atom = here
        self.order[here].append(partner)

    def build(self) -> MoleculeGraph:
        chiral = {}
        for idx, atom in enumerate(self.atoms):
            if atom.chiral_tag is None:
                continue
            nbrs = [e.atom if isinstance(e, _RingSlot) else e for e in self.order[idx]]
            if atom.explicit_h >= 1 or len(nbrs) == 3:
                nbrs.insert(1 if self.has_prev[idx] else 0, HYDROGEN)
            chiral[idx] = tuple(nbrs)
        return MoleculeGraph(tuple(self.atoms), tuple(self.bonds), chiral)


def parse_smiles(text: str, *, allow_atom_maps: bool = False) -> MoleculeGraph:
    """Parse a SMILES string into a :class:`MoleculeGraph`.

    Leading and trailing whitespace is ignored. Raises
    :class:`~chemeval.errors.SmilesSyntaxError` with a ``kind`` and
    ``position`` on malformed input.

    >>> g = parse_smiles("[13CH4]")
    >>> g.atoms[0].isotope, g.atoms[0].explicit_h
    (13, 4)
    """
    stripped = text.strip()
    if not stripped:
        raise SmilesSyntaxError("invalid_syntax", 0, "empty SMILES string")
    offset = len(text) - len(text.lstrip())
    try:
        return _Reader(stripped, allow_atom_maps).run()
    except SmilesSyntaxError as exc:
        if offset:
            exc.position += offset
        raise


def iter_smiles_lines(source: str | Path | Iterator[str]) -> Iterator[str]:
    """Yield SMILES from a file or iterable of lines, skipping blanks and '#' comments."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from iter_smiles_lines(iter(fh))
        return
    for line in source:
        s = line.strip()
        if s and not s.startswith("#"):
            yield s
