"""Canonical ranking and SMILES writing.

Ranks come from Morgan-style refinement: atoms start from a local
invariant and are repeatedly re-ranked by their own rank plus the sorted
(bond order, neighbour rank) pairs until the partition stops splitting.
Stereo parities are folded in once the neighbours they depend on are
distinguishable. Remaining ties are split one atom at a time. When the
molecule carries stereo marks every tie choice is explored (up to a leaf
cap) and the lexicographically smallest string is kept, because parity can
make otherwise equivalent choices print differently.
"""

from __future__ import annotations

import random
from collections import deque

from ..errors import AromaticityError
from .aromaticity import perceive_aromaticity
from .elements import AROMATIC_BRACKET, ORGANIC_SUBSET
from .graph import HYDROGEN, Bond, BondOrder, MoleculeGraph, replace_atom
from .hydrogens import assign_implicit_hydrogens, bare_form_matches, fix_hydrogens
from .parser import parse_smiles
from .stereo import DoubleBondStereo, double_bond_stereo, flip_tag, permutation_parity

LEAF_CAP = 100

_BOND_CHAR = {BondOrder.DOUBLE: "=", BondOrder.TRIPLE: "#"}


def standardize_graph(g: MoleculeGraph) -> MoleculeGraph:
    """Assign and pin hydrogens, then perceive aromaticity leniently.

    Graphs whose declared aromatic rings cannot be kekulized are returned
    with their aromatic flags untouched.
    """
    g = assign_implicit_hydrogens(g)
    try:
        return perceive_aromaticity(g, strict=False)
    except AromaticityError:
        return fix_hydrogens(g)


def _dense(keys) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


class _Ranker:
    def __init__(self, g: MoleculeGraph, root: int | None = None):
        self.g = g
        self.n = len(g.atoms)
        self.nbrs = [tuple((nb, int(g.bonds[bi].order)) for nb, bi in g.adjacency[a]) for a in range(self.n)]
        self.dbs = [d for d in double_bond_stereo(g) if d.specified]
        self.stereo = bool(self.dbs) or any(g.atoms[a].chiral_tag for a in g.chiral_order)
        init = []
        for a, atom in enumerate(g.atoms):
            init.append((
                0 if a == root else 1,
                atom.atomic_number,
                atom.isotope or 0,
                atom.charge,
                len(self.nbrs[a]),
                atom.total_h,
                atom.aromatic,
            ))
        self.initial = _dense(init)

    def _refine_plain(self, ranks, extra):
        classes = len(set(ranks))
        while True:
            keys = [
                (ranks[a], extra[a] if extra else 0, tuple(sorted((o, ranks[nb]) for nb, o in self.nbrs[a])))
                for a in range(self.n)
            ]
            new = _dense(keys)
            k = max(new, default=-1) + 1
            if k == classes:
                return new
            ranks, classes = new, k

    def _stereo_extra(self, ranks):
        g = self.g
        chiral = [0] * self.n
        for a, order in g.chiral_order.items():
            tag = g.atoms[a].chiral_tag
            if tag is None:
                continue
            rk = [ranks[x] if x != HYDROGEN else -1 for x in order]
            if len(set(rk)) != len(rk):
                continue
            by_rank = sorted(order, key=lambda x: ranks[x] if x != HYDROGEN else -1)
            eff = tag if permutation_parity(order, by_rank) == 0 else flip_tag(tag)
            chiral[a] = 1 if eff == "@" else 2
        dbv = [[] for _ in range(self.n)]
        for db in self.dbs:
            refs = []
            for end in (db.u, db.v):
                subs = [w for (e, w) in db.sides if e == end]
                rk = [ranks[w] for w in subs]
                if len(set(rk)) != len(rk):
                    break
                refs.append(max(subs, key=lambda w: ranks[w]))
            else:
                rel = db.relation(*refs)
                if rel is not None:
                    val = 1 if rel > 0 else 2
                    dbv[db.u].append(val)
                    dbv[db.v].append(val)
        return [(chiral[a], tuple(sorted(dbv[a]))) for a in range(self.n)]

    def refine(self, ranks):
        ranks = self._refine_plain(ranks, None)
        if not self.stereo:
            return ranks
        extra = None
        while True:
            new_extra = self._stereo_extra(ranks)
            if new_extra == extra:
                return ranks
            extra = new_extra
            ranks = self._refine_plain(ranks, extra)

    @staticmethod
    def _first_tied(ranks):
        seen = {}
        for a, r in enumerate(ranks):
            seen.setdefault(r, []).append(a)
        tied = [cell for r, cell in sorted(seen.items()) if len(cell) > 1]
        return tied[0] if tied else None

    def leaves(self, branch: bool) -> list[list[int]]:
        out: list[list[int]] = []
        start = self.refine(self.initial)
        stack = [start]
        while stack:
            ranks = stack.pop()
            cell = self._first_tied(ranks)
            if cell is None:
                out.append(ranks)
                if len(out) >= LEAF_CAP:
                    break
                continue
            choices = cell if branch else cell[:1]
            # Push in reverse so the first choice is explored first.
            for x in reversed(choices):
                split = [2 * r for r in ranks]
                split[x] -= 1
                stack.append(self.refine(split))
        return out


def canonical_ranks(g: MoleculeGraph) -> list[int]:
    """Canonical atom ranks (0 = first) of a standardized graph."""
    return _Ranker(g).leaves(branch=False)[0]


def _atom_token(g: MoleculeGraph, a: int, tag: str | None) -> str:
    atom = g.atoms[a]
    el = atom.element
    sym = el.lower() if atom.aromatic and el.lower() in AROMATIC_BRACKET else el
    if (
        tag is None
        and el in ORGANIC_SUBSET
        and atom.charge == 0
        and atom.isotope is None
        and (not atom.aromatic or len(sym) == 1)
        and bare_form_matches(atom, g.bond_order_sum(a))
    ):
        return sym
    parts = ["["]
    if atom.isotope is not None:
        parts.append(str(atom.isotope))
    parts.append(sym)
    if tag:
        parts.append(tag)
    h = atom.total_h
    if h:
        parts.append("H" if h == 1 else f"H{h}")
    q = atom.charge
    if q:
        sign = "+" if q > 0 else "-"
        parts.append(sign if abs(q) == 1 else f"{sign}{abs(q)}")
    parts.append("]")
    return "".join(parts)


def _digit(d: int) -> str:
    if d < 10:
        return str(d)
    if d > 99:
        raise ValueError("more than 99 simultaneously open rings")
    return f"%{d}"


def _write(
    g: MoleculeGraph,
    ranks: list[int],
    dbs: list[DoubleBondStereo],
    rng: random.Random | None = None,
) -> str:
    n = len(g.atoms)
    sorted_adj = [sorted(g.adjacency[a], key=lambda t: ranks[t[0]]) for a in range(n)]
    visit = [-1] * n
    parent_bond = [-1] * n
    parent = [-1] * n
    children: list[list[int]] = [[] for _ in range(n)]
    ring_at: list[list[int]] = [[] for _ in range(n)]
    ring_seen: set[int] = set()
    direction: dict[int, tuple[int, int]] = {}
    position: dict[int, tuple[int, int]] = {}
    roots = []
    counter = 0
    for start in sorted(range(n), key=lambda a: ranks[a]):
        if visit[start] != -1:
            continue
        roots.append(start)
        visit[start] = counter
        counter += 1
        stack = [(start, iter(sorted_adj[start]))]
        while stack:
            a, it = stack[-1]
            for nb, bi in it:
                if bi == parent_bond[a]:
                    continue
                if visit[nb] == -1:
                    visit[nb] = counter
                    counter += 1
                    parent[nb], parent_bond[nb] = a, bi
                    children[a].append(nb)
                    direction[bi] = (a, nb)
                    position[bi] = (visit[nb], 0)
                    stack.append((nb, iter(sorted_adj[nb])))
                    break
                if bi not in ring_seen:
                    ring_seen.add(bi)
                    opener, closer = (nb, a) if visit[nb] < visit[a] else (a, nb)
                    ring_at[opener].append(bi)
                    ring_at[closer].append(bi)
                    direction[bi] = (opener, closer)
            else:
                stack.pop()
    for a in range(n):
        ring_at[a].sort(key=lambda bi: ranks[g.bonds[bi].other(a)])
        for k, bi in enumerate(ring_at[a]):
            if direction[bi][0] == a:
                position[bi] = (visit[a], k + 1)

    marks = _assign_marks(g, dbs, direction, position, rng)

    # Tetrahedral tags in output neighbour order.
    tags: dict[int, str | None] = {}
    for a, stored in g.chiral_order.items():
        tag = g.atoms[a].chiral_tag
        if tag is None:
            continue
        out = []
        if parent[a] != -1:
            out.append(parent[a])
        if HYDROGEN in stored:
            out.append(HYDROGEN)
        out.extend(g.bonds[bi].other(a) for bi in ring_at[a])
        out.extend(children[a])
        if sorted(out) != sorted(stored):
            tags[a] = None
            continue
        tags[a] = tag if permutation_parity(stored, out) == 0 else flip_tag(tag)

    def bond_text(bi: int, frm: int, to: int) -> str:
        b = g.bonds[bi]
        if b.order is BondOrder.SINGLE:
            if bi in marks:
                d = marks[bi]
                if direction[bi][0] != frm:
                    d = -d
                return "/" if d > 0 else "\\"
            return "-" if g.atoms[frm].aromatic and g.atoms[to].aromatic else ""
        if b.order is BondOrder.AROMATIC:
            return "" if g.atoms[frm].aromatic and g.atoms[to].aromatic else ":"
        return _BOND_CHAR[b.order]

    pieces = []
    free_digits: list[int] = []
    next_digit = 1
    digit_of: dict[int, int] = {}
    for root in roots:
        out: list[str] = []
        work: list[tuple[bool, object]] = [(True, root)]
        while work:
            is_atom, item = work.pop()
            if not is_atom:
                out.append(item)
                continue
            a = item
            if parent[a] != -1:
                out.append(bond_text(parent_bond[a], parent[a], a))
            out.append(_atom_token(g, a, tags.get(a, g.atoms[a].chiral_tag if a not in g.chiral_order else None)))
            release = []
            for bi in ring_at[a]:
                partner = g.bonds[bi].other(a)
                if direction[bi][0] == a:
                    if free_digits:
                        d = min(free_digits)
                        free_digits.remove(d)
                    else:
                        d = next_digit
                        next_digit += 1
                    digit_of[bi] = d
                    out.append(bond_text(bi, a, partner) + _digit(d))
                else:
                    d = digit_of[bi]
                    out.append(_digit(d))
                    release.append(d)
            free_digits.extend(release)
            kids = children[a]
            if kids:
                work.append((True, kids[-1]))
                for c in reversed(kids[:-1]):
                    work.append((False, ")"))
                    work.append((True, c))
                    work.append((False, "("))
        pieces.append("".join(out))
    return ".".join(pieces)


def _assign_marks(g, dbs, direction, position, rng) -> dict[int, int]:
    """Choose '/' (+1) or '\\' (-1) per output bond, read in output direction.

    Only relative sides are meaningful, so the constraints form a signed
    graph over bonds that is two-coloured starting from the earliest bond.
    """
    edges: dict[int, list[tuple[int, int]]] = {}

    def sigma(bi, end):
        return 1 if direction[bi][0] == end else -1

    for db in dbs:
        subs = [(end, w) for (end, w) in db.sides]
        items = []
        for end, w in subs:
            bi = g.bond_lookup[frozenset((end, w))]
            items.append((bi, db.sides[(end, w)] * sigma(bi, end)))
        items.sort(key=lambda t: position[t[0]])
        b0, s0 = items[0]
        edges.setdefault(b0, [])
        for bi, s in items[1:]:
            edges.setdefault(bi, []).append((b0, s * s0))
            edges[b0].append((bi, s * s0))
    marks: dict[int, int] = {}
    for start in sorted(edges, key=lambda b: position[b]):
        if start in marks:
            continue
        marks[start] = rng.choice((1, -1)) if rng is not None else 1
        q = deque([start])
        while q:
            b = q.popleft()
            for c, s in edges[b]:
                if c not in marks:
                    marks[c] = marks[b] * s
                    q.append(c)
    return marks


def write_canonical_smiles(g: MoleculeGraph, *, root: int | None = None) -> str:
    """Canonical SMILES for ``g``.

    The graph is standardized first (hydrogens assigned, aromaticity
    perceived), so Kekulé and aromatic writings of a molecule agree. With
    ``root`` the string starts at that atom, which gives a canonical key
    for a rooted fragment.
    """
    if not g.atoms:
        return ""
    g = standardize_graph(g)
    ranker = _Ranker(g, root)
    leaves = ranker.leaves(branch=ranker.stereo)
    dbs = ranker.dbs
    return min(_write(g, ranks, dbs) for ranks in leaves)


def canonical_smiles(text: str) -> str:
    """Parse ``text`` and return its canonical SMILES."""
    return write_canonical_smiles(parse_smiles(text))


def random_smiles(g: MoleculeGraph, rng: random.Random | None = None) -> str:
    """A randomized but equivalent SMILES for ``g`` (random root, order, marks)."""
    rng = rng or random.Random()
    g = fix_hydrogens(assign_implicit_hydrogens(g))
    perm = list(range(len(g.atoms)))
    rng.shuffle(perm)
    dbs = [d for d in double_bond_stereo(g) if d.specified]
    return _write(g, perm, dbs, rng)


def induced_subgraph(g: MoleculeGraph, atoms) -> tuple[MoleculeGraph, dict[int, int]]:
    """Subgraph on ``atoms`` plus the old -> new index map.

    Tetrahedral tags referring to atoms outside the subgraph are dropped.
    """
    keep = sorted(atoms)
    index = {a: i for i, a in enumerate(keep)}
    new_atoms = []
    chiral = {}
    for a in keep:
        atom = g.atoms[a]
        order = g.chiral_order.get(a)
        if order is not None and all(x == HYDROGEN or x in index for x in order):
            chiral[index[a]] = tuple(x if x == HYDROGEN else index[x] for x in order)
        elif atom.chiral_tag is not None:
            atom = replace_atom(atom, chiral_tag=None)
        new_atoms.append(atom)
    bonds = [
        Bond(index[b.begin], index[b.end], b.order, b.geometry_mark)
        for b in g.bonds
        if b.begin in index and b.end in index
    ]
    return MoleculeGraph(tuple(new_atoms), tuple(bonds), chiral), index
