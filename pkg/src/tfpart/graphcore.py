"""Immutable bitset graphs, basic statistics and named graph families.

Vertices are ``0..n-1``; the neighbourhood of ``v`` is the Python int ``adj[v]``
whose bit ``u`` is set iff ``uv`` is an edge. Exact routines cap ``n`` at
:data:`EXACT_MAX_N`; plain construction and counting work for any ``n``
(heuristics go up to :data:`SPILL_MAX_N`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Union

from .errors import BadSizes, GuardExceeded, OverlappingSets

EXACT_MAX_N = 64
SPILL_MAX_N = 4096


def _bits(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class VertexSet:
    """A subset of ``range(n)`` stored as a bitmask."""

    n: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bitset {self.bits:#x} is not a subset of [{self.n}]")

    @classmethod
    def of(cls, n: int, vertices: Iterable[int]) -> "VertexSet":
        return cls(n, _bits(vertices))

    def members(self) -> list[int]:
        return list(iter_bits(self.bits))

    def complement(self) -> "VertexSet":
        return VertexSet(self.n, ((1 << self.n) - 1) & ~self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and 0 <= v < self.n and bool(self.bits >> v & 1)

    def sort_key(self) -> tuple[int, ...]:
        """Lexicographic order on the sorted member list (the witness tie-break)."""
        return tuple(self.members())


SetLike = Union[VertexSet, int, Iterable[int]]


def as_mask(a: SetLike) -> int:
    if isinstance(a, VertexSet):
        return a.bits
    if isinstance(a, int):
        return a
    return _bits(a)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on ``range(n)`` with bitset adjacency."""

    n: int
    adj: tuple[int, ...]
    edge_count: int = field(init=False, compare=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ValueError("adjacency length differs from n")
        full = (1 << self.n) - 1
        total = 0
        for v, nb in enumerate(self.adj):
            if nb & ~full or nb >> v & 1:
                raise ValueError(f"bad neighbourhood for vertex {v}")
            for u in iter_bits(nb):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"adjacency not symmetric at {u}-{v}")
            total += nb.bit_count()
        object.__setattr__(self, "edge_count", total // 2)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("loops are not allowed")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    @property
    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [nb.bit_count() for nb in self.adj]

    def neighbors(self, v: int) -> VertexSet:
        return VertexSet(self.n, self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adj[u] >> (u + 1) << (u + 1))]

    def vertices(self) -> VertexSet:
        return VertexSet(self.n, self.vertex_mask)

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled so that ``vertices[i]`` becomes ``i``."""
        index = {v: i for i, v in enumerate(vertices)}
        adj = []
        for v in vertices:
            adj.append(_bits(index[u] for u in iter_bits(self.adj[v]) if u in index))
        return Graph(len(vertices), tuple(adj))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which old vertex ``v`` is called ``perm[v]``."""
        adj = [0] * self.n
        for v in range(self.n):
            adj[perm[v]] = _bits(perm[u] for u in iter_bits(self.adj[v]))
        return Graph(self.n, tuple(adj))

    def complement(self) -> "Graph":
        full = self.vertex_mask
        return Graph(self.n, tuple(full & ~nb & ~(1 << v) for v, nb in enumerate(self.adj)))

    def is_regular(self) -> bool:
        return len(set(self.degrees())) <= 1

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


def require_exact(g: Graph, limit: int = EXACT_MAX_N, what: str = "exact routine") -> None:
    if g.n > limit:
        raise GuardExceeded(f"{what}: n={g.n} exceeds guard {limit}")


# ---------------------------------------------------------------------------
# counting


def edges_within(g: Graph, a: SetLike) -> int:
    """Number of edges with both endpoints in ``a``."""
    m = as_mask(a)
    return sum((g.adj[v] & m).bit_count() for v in iter_bits(m)) // 2


def edges_between(g: Graph, a: SetLike, b: SetLike) -> int:
    """Number of edges with one endpoint in ``a`` and the other in ``b``."""
    ma, mb = as_mask(a), as_mask(b)
    if ma & mb:
        raise OverlappingSets("edges_between needs disjoint vertex sets")
    return sum((g.adj[v] & mb).bit_count() for v in iter_bits(ma))


def has_clique(g: Graph, size: int, candidates: int | None = None) -> bool:
    if size <= 0:
        return True
    if candidates is None:
        candidates = g.vertex_mask
    if candidates.bit_count() < size:
        return False
    for v in iter_bits(candidates):
        candidates &= ~(1 << v)
        if size == 1 or has_clique(g, size - 1, candidates & g.adj[v]):
            return True
    return False


def is_clique_free(g: Graph, r_plus_1: int) -> bool:
    """True iff ``g`` has no clique on ``r_plus_1`` vertices (3: triangle-free)."""
    if r_plus_1 < 2:
        raise ValueError("r_plus_1 must be at least 2")
    return not has_clique(g, r_plus_1)


def cliques(g: Graph, size: int) -> list[int]:
    """All cliques of the given size as bitmasks, in lexicographic order."""
    out: list[int] = []

    def grow(clique: int, cand: int, need: int) -> None:
        if need == 0:
            out.append(clique)
            return
        for v in iter_bits(cand):
            cand &= ~(1 << v)
            if cand.bit_count() + 1 < need:
                return
            grow(clique | 1 << v, cand & g.adj[v], need - 1)

    grow(0, g.vertex_mask, size)
    return out


def degree_variance_lhs(g: Graph) -> Fraction:
    """Exact value of sum_v (deg(v) - n/3)^2."""
    third = Fraction(g.n, 3)
    return sum(((d - third) ** 2 for d in g.degrees()), Fraction(0))


# ---------------------------------------------------------------------------
# independent sets


def _clique_cover_bound(adj: Sequence[int], p: int) -> int:
    # greedy cover of p by cliques; an independent set meets each clique once
    count = 0
    while p:
        low = p & -p
        cand = p & adj[low.bit_length() - 1]
        p ^= low
        while cand:
            u = cand & -cand
            p &= ~u
            cand &= adj[u.bit_length() - 1] & ~u
        count += 1
    return count


def _max_independent_size(adj: Sequence[int], p: int) -> int:
    best = 0

    def expand(size: int, p: int) -> None:
        nonlocal best
        if not p:
            if size > best:
                best = size
            return
        if size + _clique_cover_bound(adj, p) <= best:
            return
        # branch on a vertex of maximum degree inside p
        v = max(iter_bits(p), key=lambda x: (adj[x] & p).bit_count())
        bit = 1 << v
        expand(size + 1, p & ~adj[v] & ~bit)
        expand(size, p & ~bit)

    expand(0, p)
    return best


def _first_independent_of_size(adj: Sequence[int], p: int, target: int) -> int | None:
    """Lexicographically least independent set of exactly ``target`` vertices in ``p``."""

    def dfs(chosen: int, size: int, p: int) -> int | None:
        if size == target:
            return chosen
        if not p or size + _clique_cover_bound(adj, p) < target:
            return None
        low = p & -p
        v = low.bit_length() - 1
        found = dfs(chosen | low, size + 1, p & ~adj[v] & ~low)
        if found is not None:
            return found
        return dfs(chosen, size, p & ~low)

    return dfs(0, 0, p)


def independence_number(g: Graph) -> int:
    require_exact(g, what="independence_number")
    return _max_independent_size(g.adj, g.vertex_mask)


def max_independent_set(g: Graph) -> VertexSet:
    """A maximum independent set; the lexicographically least one among all optima."""
    require_exact(g, what="max_independent_set")
    alpha = _max_independent_size(g.adj, g.vertex_mask)
    bits = _first_independent_of_size(g.adj, g.vertex_mask, alpha)
    assert bits is not None
    return VertexSet(g.n, bits)


def is_independent(g: Graph, a: SetLike) -> bool:
    return edges_within(g, a) == 0


# ---------------------------------------------------------------------------
# constructors


def complete(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full & ~(1 << v) for v in range(n)))


def complete_multipartite(sizes: Sequence[int]) -> Graph:
    """Complete multipartite graph; part ``i`` holds consecutive vertices."""
    if any(s < 0 for s in sizes):
        raise BadSizes("part sizes must be non-negative")
    n = sum(sizes)
    full = (1 << n) - 1
    adj = []
    start = 0
    for s in sizes:
        part = ((1 << s) - 1) << start
        adj.extend([full & ~part] * s)
        start += s
    return Graph(n, tuple(adj))


def complete_bipartite(a: int, b: int) -> Graph:
    return complete_multipartite([a, b])


def turan(n: int, r: int) -> Graph:
    """Complete r-partite graph on n vertices with parts as equal as possible."""
    if r < 1 or n < 0:
        raise BadSizes("turan needs n >= 0 and r >= 1")
    q, rem = divmod(n, r)
    return complete_multipartite([q + 1] * rem + [q] * (r - rem))


def cycle(n: int) -> Graph:
    if n < 3:
        raise BadSizes("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def blow_up(h: Graph, sizes: Sequence[int]) -> Graph:
    """Replace vertex ``i`` of ``h`` by an independent set of ``sizes[i]`` vertices.

    Blobs are laid out consecutively; edges of ``h`` become complete bipartite
    connections between blobs.
    """
    if len(sizes) != h.n:
        raise BadSizes("blow_up needs one size per vertex of h")
    if any(s <= 0 for s in sizes):
        raise BadSizes("blow_up sizes must be positive")
    starts = []
    total = 0
    for s in sizes:
        starts.append(total)
        total += s
    blob = [((1 << s) - 1) << st for s, st in zip(sizes, starts)]
    adj = []
    for i in range(h.n):
        nb = 0
        for j in iter_bits(h.adj[i]):
            nb |= blob[j]
        adj.extend([nb] * sizes[i])
    return Graph(total, tuple(adj))


def mycielski(h: Graph) -> Graph:
    """Mycielskian: vertices ``0..n-1`` copy h, ``n..2n-1`` are shadows, ``2n`` the hub."""
    n = h.n
    edges = list(h.edges())
    for u, v in h.edges():
        edges.append((u, n + v))
        edges.append((v, n + u))
    edges.extend((n + i, 2 * n) for i in range(n))
    return Graph.from_edges(2 * n + 1, edges)


def grotzsch() -> Graph:
    """The Groetzsch graph as the Mycielskian of C5.

    Vertex order: 0-4 the 5-cycle, 5-9 the shadows (5+i is joined to the cycle
    neighbours of i), 10 the hub joined to every shadow.
    """
    return mycielski(cycle(5))


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def is_k_colorable(g: Graph, k: int) -> bool:
    """Plain backtracking colourability test (small graphs only)."""
    colors = [-1] * g.n
    order = sorted(range(g.n), key=lambda v: -g.degree(v))

    def place(i: int, used: int) -> bool:
        if i == g.n:
            return True
        v = order[i]
        taken = {colors[u] for u in iter_bits(g.adj[v]) if colors[u] >= 0}
        for c in range(min(k, used + 1)):
            if c not in taken:
                colors[v] = c
                if place(i + 1, max(used, c + 1)):
                    return True
                colors[v] = -1
        return False

    return place(0, 0)


def chromatic_number(g: Graph) -> int:
    k = 0 if g.n == 0 else 1
    while not is_k_colorable(g, k):
        k += 1
    return k


def all_subsets(n: int, size: int) -> Iterator[int]:
    for combo in combinations(range(n), size):
        yield _bits(combo)
