"""Ring perception: bridges, a smallest set of smallest rings, relevant cycles.

Cycles are handled as bitsets over bond indices (Python ints) so that
GF(2) independence tests reduce to xor elimination.
"""

from __future__ import annotations

from collections import deque

from .graph import MoleculeGraph


def cyclic_bonds(g: MoleculeGraph) -> frozenset[int]:
    """Indices of bonds that are not bridges."""
    n = len(g.atoms)
    disc = [-1] * n
    low = [0] * n
    bridges = set()
    t = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = t
        t += 1
        stack = [(root, -1, iter(g.adjacency[root]))]
        while stack:
            a, via, it = stack[-1]
            advanced = False
            for nb, bi in it:
                if bi == via:
                    continue
                if disc[nb] == -1:
                    disc[nb] = low[nb] = t
                    t += 1
                    stack.append((nb, bi, iter(g.adjacency[nb])))
                    advanced = True
                    break
                low[a] = min(low[a], disc[nb])
            if advanced:
                continue
            stack.pop()
            if stack:
                parent = stack[-1][0]
                low[parent] = min(low[parent], low[a])
                if low[a] > disc[parent]:
                    bridges.add(via)
    return frozenset(range(len(g.bonds))) - bridges


class _Basis:
    """Incremental GF(2) basis keyed by leading bit."""

    def __init__(self):
        self.rows: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self.rows.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        self.rows[v.bit_length() - 1] = v
        return True

    def __len__(self):
        return len(self.rows)


def _bfs_tree(g: MoleculeGraph, root: int, allowed: frozenset[int]):
    dist = {root: 0}
    parent: dict[int, tuple[int, int]] = {}
    q = deque([root])
    while q:
        a = q.popleft()
        for nb, bi in sorted(g.adjacency[a]):
            if bi in allowed and nb not in dist:
                dist[nb] = dist[a] + 1
                parent[nb] = (a, bi)
                q.append(nb)
    return dist, parent


def _path(parent, node):
    atoms, bonds = [node], []
    while node in parent:
        node, bi = parent[node]
        atoms.append(node)
        bonds.append(bi)
    return atoms, bonds


def _ordered_ring(g: MoleculeGraph, bondset: int) -> tuple[int, ...]:
    bonds = [i for i in range(bondset.bit_length()) if bondset >> i & 1]
    adj: dict[int, list[int]] = {}
    for bi in bonds:
        b = g.bonds[bi]
        adj.setdefault(b.begin, []).append(b.end)
        adj.setdefault(b.end, []).append(b.begin)
    start = min(adj)
    ring = [start]
    prev, cur = None, start
    nxt = min(adj[start])
    while nxt != start:
        ring.append(nxt)
        prev, cur = cur, nxt
        a, b = adj[cur]
        nxt = b if a == prev else a
    return tuple(ring)


def _horton_candidates(g: MoleculeGraph, cyclic: frozenset[int]) -> list[tuple[int, int]]:
    atoms = sorted({a for bi in cyclic for a in (g.bonds[bi].begin, g.bonds[bi].end)})
    seen = set()
    out = []
    for v in atoms:
        dist, parent = _bfs_tree(g, v, cyclic)
        for bi in sorted(cyclic):
            b = g.bonds[bi]
            x, y = b.begin, b.end
            if x not in dist or y not in dist:
                continue
            px, bx = _path(parent, x)
            py, by = _path(parent, y)
            if set(px) & set(py) != {v}:
                continue
            if bi in bx or bi in by:
                continue
            bits = 1 << bi
            for e in bx + by:
                bits |= 1 << e
            if bits not in seen:
                seen.add(bits)
                out.append((len(bx) + len(by) + 1, bits))
    out.sort()
    return out


def sssr_bitsets(g: MoleculeGraph) -> list[int]:
    cyclic = g.ring_bonds
    rank = g.cycle_rank
    if rank == 0:
        return []
    basis = _Basis()
    chosen = []
    for _, bits in _horton_candidates(g, cyclic):
        if basis.add(bits):
            chosen.append(bits)
            if len(chosen) == rank:
                break
    return chosen


def perceive_rings(g: MoleculeGraph) -> tuple[tuple[int, ...], ...]:
    """Smallest set of smallest rings, each as an atom cycle.

    The number of rings always equals the cycle rank
    ``bonds - atoms + components``.
    """
    rings = [_ordered_ring(g, bits) for bits in sssr_bitsets(g)]
    rings.sort(key=lambda r: (len(r), r))
    return tuple(rings)


def _simple_cycles(g: MoleculeGraph, cyclic: frozenset[int], max_len: int) -> list[int]:
    """All simple cycles up to ``max_len`` bonds, as bond bitsets."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for bi in cyclic:
        b = g.bonds[bi]
        adj.setdefault(b.begin, []).append((b.end, bi))
        adj.setdefault(b.end, []).append((b.begin, bi))
    found = set()
    for start in sorted(adj):
        # Cycles are rooted at their lowest atom to avoid repeats.
        stack = [(start, 0, frozenset((start,)), 0)]
        while stack:
            a, bits, onpath, length = stack.pop()
            for nb, bi in adj[a]:
                if nb < start or bits >> bi & 1:
                    continue
                if nb == start:
                    if length + 1 >= 3:
                        found.add(bits | 1 << bi)
                    continue
                if nb in onpath or length + 1 >= max_len:
                    continue
                stack.append((nb, bits | 1 << bi, onpath | {nb}, length + 1))
    return sorted(found, key=lambda b: (bin(b).count("1"), b))


def relevant_cycles(g: MoleculeGraph) -> tuple[tuple[int, ...], ...]:
    """Union of all minimum cycle bases.

    Unlike a single SSSR this set does not depend on atom order, which
    keeps aromaticity perception permutation invariant.
    """
    sssr = sssr_bitsets(g)
    if not sssr:
        return ()
    max_len = max(bin(b).count("1") for b in sssr)
    cycles = _simple_cycles(g, g.ring_bonds, max_len)
    shorter = _Basis()
    out = []
    i = 0
    while i < len(cycles):
        size = bin(cycles[i]).count("1")
        j = i
        while j < len(cycles) and bin(cycles[j]).count("1") == size:
            j += 1
        group = cycles[i:j]
        for bits in group:
            if shorter.reduce(bits):
                out.append(bits)
        for bits in group:
            shorter.add(bits)
        i = j
    rings = [_ordered_ring(g, bits) for bits in out]
    rings.sort(key=lambda r: (len(r), r))
    return tuple(rings)
