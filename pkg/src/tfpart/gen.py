"""Canonical labelling and isomorph-free generation of K_{r+1}-free graphs.

Canonical labelling is a small individualisation-refinement search: colour
refinement to an equitable ordered partition, then branching on the vertices
of the first non-singleton cell. Branches are pruned by comparing node
invariants against the best path so far and by automorphisms (twin
transpositions plus any automorphism discovered at equal leaves). The
canonical form is the graph6 string of the best leaf.

Generation is canonical augmentation: a graph on m vertices is produced from
the representative of ``G - c`` only, where ``c`` is the vertex that receives
the last canonical label.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Hashable, Iterator, Sequence

from . import graph6
from .errors import GuardExceeded
from .graphcore import Graph, has_clique, iter_bits

CANON_MAX_N = 16
DEFAULT_GUARD = 10


def _refine(adj: Sequence[int], cells: list[int]) -> list[int]:
    while True:
        new: list[int] = []
        changed = False
        for cell in cells:
            if not cell & (cell - 1):
                new.append(cell)
                continue
            groups: dict[tuple[int, ...], int] = {}
            for v in iter_bits(cell):
                nb = adj[v]
                key = tuple((nb & c).bit_count() for c in cells)
                groups[key] = groups.get(key, 0) | (1 << v)
            if len(groups) == 1:
                new.append(cell)
            else:
                changed = True
                new.extend(groups[k] for k in sorted(groups))
        cells = new
        if not changed:
            return cells


def _invariant(adj: Sequence[int], cells: list[int]) -> tuple:
    rows = []
    for cell in cells:
        rep = adj[(cell & -cell).bit_length() - 1]
        rows.append((cell.bit_count(), tuple((rep & c).bit_count() for c in cells)))
    return tuple(rows)


def _order_code(adj: Sequence[int], order: Sequence[int]) -> int:
    code = 0
    for j in range(1, len(order)):
        col = adj[order[j]]
        for i in range(j):
            code = (code << 1) | (col >> order[i] & 1)
    return code


class _Search:
    def __init__(self, g: Graph, colors: Sequence[Hashable] | None):
        self.adj = g.adj
        self.n = g.n
        if colors is None:
            cells = [g.vertex_mask] if g.n else []
        else:
            by_color: dict = {}
            for v, c in enumerate(colors):
                by_color[c] = by_color.get(c, 0) | (1 << v)
            cells = [by_color[c] for c in sorted(by_color)]
        self.root = cells
        self.best_path: list | None = None
        self.best_code = -1
        self.best_order: list[int] = []
        self.gens: list[list[int]] = []
        self._twin_generators(colors)

    def _twin_generators(self, colors) -> None:
        adj = self.adj
        for u in range(self.n):
            for v in range(u + 1, self.n):
                if colors is not None and colors[u] != colors[v]:
                    continue
                mu, mv = 1 << u, 1 << v
                if adj[u] & ~mv == adj[v] & ~mu:
                    perm = list(range(self.n))
                    perm[u], perm[v] = v, u
                    self.gens.append(perm)

    def _orbit_roots(self, fixed: list[int]) -> list[int]:
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for perm in self.gens:
            if any(perm[x] != x for x in fixed):
                continue
            for x, y in enumerate(perm):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
        return [find(x) for x in range(self.n)]

    def run(self) -> list[int]:
        if self.n:
            self._visit(_refine(self.adj, self.root), [], [])
        return self.best_order

    def _visit(self, cells: list[int], prefix: list[int], path: list) -> None:
        if len(cells) == self.n:
            order = [c.bit_length() - 1 for c in cells]
            code = _order_code(self.adj, order)
            if self.best_path is None or (path, code) < (self.best_path, self.best_code):
                self.best_path, self.best_code, self.best_order = path, code, order
            elif path == self.best_path and code == self.best_code:
                perm = [0] * self.n
                for a, b in zip(self.best_order, order):
                    perm[a] = b
                self.gens.append(perm)
            return
        path = path + [_invariant(self.adj, cells)]
        if self.best_path is not None and path > self.best_path[: len(path)]:
            return
        idx = next(i for i, c in enumerate(cells) if c & (c - 1))
        target = cells[idx]
        explored: list[int] = []
        for v in iter_bits(target):
            if explored:
                roots = self._orbit_roots(prefix)
                if roots[v] in {roots[w] for w in explored}:
                    continue
            explored.append(v)
            bit = 1 << v
            child = cells[:idx] + [bit, target & ~bit] + cells[idx + 1:]
            self._visit(_refine(self.adj, child), prefix + [v], path)


def canonical_labeling(g: Graph, colors: Sequence[Hashable] | None = None) -> list[int]:
    """Vertex order of the canonical form: ``order[k]`` receives canonical label ``k``.

    ``colors`` optionally restricts the search to colour-preserving relabellings;
    colour classes appear in sorted colour order.
    """
    if g.n > CANON_MAX_N:
        raise GuardExceeded(f"canonical labelling limited to n <= {CANON_MAX_N}")
    return _Search(g, colors).run()


def canonical_graph(g: Graph, colors: Sequence[Hashable] | None = None) -> Graph:
    order = canonical_labeling(g, colors)
    perm = [0] * g.n
    for k, v in enumerate(order):
        perm[v] = k
    return g.relabel(perm)


def canonical_form(g: Graph, colors: Sequence[Hashable] | None = None) -> str:
    """graph6 string of the canonically relabelled graph; equal iff isomorphic."""
    return graph6.encode(canonical_graph(g, colors))


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and g.edge_count == h.edge_count and canonical_form(g) == canonical_form(h)


# ---------------------------------------------------------------------------
# generation


def _children(parent: Graph, r_plus_1: int) -> list[Graph]:
    m = parent.n
    parent_form = canonical_form(parent)
    seen: dict[str, Graph] = {}
    for mask in range(1 << m):
        if r_plus_1 >= 2 and has_clique(parent, r_plus_1 - 1, mask):
            continue
        adj = list(parent.adj)
        for u in iter_bits(mask):
            adj[u] |= 1 << m
        adj.append(mask)
        child = Graph(m + 1, tuple(adj))
        order = canonical_labeling(child)
        c = order[-1]
        if c != m:
            if child.degree(c) != child.degree(m):
                continue
            rest = [x for x in range(m + 1) if x != c]
            if canonical_form(child.induced(rest)) != parent_form:
                continue
        perm = [0] * (m + 1)
        for k, v in enumerate(order):
            perm[v] = k
        canon = child.relabel(perm)
        key = graph6.encode(canon)
        seen.setdefault(key, canon)
    return list(seen.values())


def _children_batch(args: tuple[list[str], int]) -> list[str]:
    parents, r_plus_1 = args
    out = []
    for text in parents:
        out.extend(graph6.encode(c) for c in _children(graph6.decode(text), r_plus_1))
    return out


def _sort_key(g: Graph) -> tuple[int, str]:
    return (g.edge_count, graph6.encode(g))


_LEVELS: dict[tuple[int, int], tuple[Graph, ...]] = {}


def _level(n: int, r_plus_1: int, workers: int) -> tuple[Graph, ...]:
    key = (n, r_plus_1)
    if key in _LEVELS:
        return _LEVELS[key]
    if n == 0:
        result: tuple[Graph, ...] = (Graph.empty(0),)
    elif n == 1:
        result = (Graph.empty(1),)
    else:
        parents = _level(n - 1, r_plus_1, workers)
        if workers > 1 and len(parents) > 4 * workers:
            texts = [graph6.encode(p) for p in parents]
            shards = [(texts[i::workers], r_plus_1) for i in range(workers)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                found = [graph6.decode(t) for batch in pool.map(_children_batch, shards) for t in batch]
        else:
            found = [c for p in parents for c in _children(p, r_plus_1)]
        result = tuple(sorted(found, key=_sort_key))
    _LEVELS[key] = result
    return result


def enumerate_free(
    n: int,
    r_plus_1: int,
    guard: int | None = DEFAULT_GUARD,
    workers: int | None = 1,
) -> Iterator[Graph]:
    """Yield one canonically labelled representative per isomorphism class of
    K_{r_plus_1}-free graphs on ``n`` vertices, ordered by edge count then graph6.

    ``guard=None`` lifts the size guard. ``workers`` > 1 shards each level over
    worker processes (``None`` means one per CPU).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if r_plus_1 < 2:
        raise ValueError("r_plus_1 must be at least 2")
    if guard is not None and n > guard:
        raise GuardExceeded(f"enumeration of n={n} exceeds guard {guard}")
    if n > CANON_MAX_N:
        raise GuardExceeded(f"enumeration limited to n <= {CANON_MAX_N}")
    if workers is None:
        workers = os.cpu_count() or 1
    yield from _level(n, r_plus_1, workers)


def enumerate_all(n: int, guard: int | None = DEFAULT_GUARD) -> Iterator[Graph]:
    """All graphs on ``n`` vertices up to isomorphism."""
    return enumerate_free(n, n + 1 if n >= 1 else 2, guard=guard)
