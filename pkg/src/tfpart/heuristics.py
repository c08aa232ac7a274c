"""Constructive partition procedures with certified costs.

Each routine returns a concrete feasible partition (or vertex set); costs are
always recomputed from the returned object. Randomised routines draw from
:func:`tfpart.rng.stream` so a seed fixes the output, and pick the winner by
(cost, lexicographic assignment) regardless of trial order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import rng
from .errors import BadAlpha, DegreeTooLarge, NotTriangleFree
from .graphcore import (
    Graph,
    VertexSet,
    edges_within,
    is_clique_free,
    iter_bits,
    max_independent_set,
)
from .solver import INF, CostVector, Norm, Partition, SizeSpec, parse_norm, solve, solve_subset

log = logging.getLogger(__name__)

EXACT_SUBPROBLEM_MAX_N = 20


@dataclass(frozen=True)
class SubsetResult:
    vertices: VertexSet
    cost: int
    certified: bool | None = None

    def __iter__(self) -> Iterator:
        yield self.vertices
        yield self.cost


def _key(g: Graph, part: Partition, p: Norm):
    return (CostVector.of(g, part).key(p), part.assign)


def _local_search(g: Graph, part: Partition, p: Norm, allow_moves: bool, max_iter: int | None):
    n, k, adj = g.n, part.k, g.adj
    assign = list(part.assign)
    masks = part.class_masks()
    counts = [edges_within(g, m) for m in masks]
    current = CostVector(tuple(counts)).key(p)
    iterations = 0
    while max_iter is None or iterations < max_iter:
        into = [[(adj[x] & masks[c]).bit_count() for c in range(k)] for x in range(n)]
        best = None
        for u in range(n):
            a = assign[u]
            if allow_moves:
                for b in range(k):
                    if b == a:
                        continue
                    trial = counts[:]
                    trial[a] -= into[u][a]
                    trial[b] += into[u][b]
                    key = CostVector(tuple(trial)).key(p)
                    if key < current and (best is None or key < best[0]):
                        best = (key, ("move", u, b), trial)
            for v in range(u + 1, n):
                b = assign[v]
                if a == b:
                    continue
                uv = adj[u] >> v & 1
                trial = counts[:]
                trial[a] += into[v][a] - into[u][a] - uv
                trial[b] += into[u][b] - into[v][b] - uv
                key = CostVector(tuple(trial)).key(p)
                if key < current and (best is None or key < best[0]):
                    best = (key, ("swap", u, v), trial)
        if best is None:
            break
        current, step, counts = best
        if step[0] == "move":
            _, u, b = step
            masks[assign[u]] &= ~(1 << u)
            masks[b] |= 1 << u
            assign[u] = b
        else:
            _, u, v = step
            a, b = assign[u], assign[v]
            masks[a] ^= (1 << u) | (1 << v)
            masks[b] ^= (1 << u) | (1 << v)
            assign[u], assign[v] = b, a
        iterations += 1
    return Partition(tuple(assign), k), iterations


def local_search_swap(
    g: Graph, partition: Partition, p: Norm = 1, allow_moves: bool = False, max_iter: int | None = None
) -> Partition:
    """Apply the best strictly improving swap (or single-vertex move when
    ``allow_moves``) until none is left. Never increases the cost."""
    return _local_search(g, partition, parse_norm(p), allow_moves, max_iter)[0]


def independent_bisection(g: Graph) -> Partition | None:
    """Balanced bipartition (I, V - I) with I independent of size n/2.

    Returns ``None`` when the independence number is below n/2. On triangle-free
    graphs the cost e(V - I) is at most n^2/16 by Mantel's theorem.
    """
    if g.n % 2:
        raise ValueError("independent_bisection needs an even number of vertices")
    mis = max_independent_set(g).members()
    half = g.n // 2
    if len(mis) < half:
        return None
    chosen = set(mis[:half])
    return Partition(tuple(0 if v in chosen else 1 for v in range(g.n)), 2)


def neighborhood_bisection(g: Graph, v: int, trials: int = 16, seed: int = 0) -> Partition:
    """Best of ``trials`` random balanced bipartitions whose first class contains
    N(v), each improved by local search."""
    n = g.n
    if n % 2:
        raise ValueError("neighborhood_bisection needs an even number of vertices")
    half = n // 2
    nbrs = g.neighbors(v).members()
    if len(nbrs) > half:
        raise DegreeTooLarge(f"deg({v}) = {len(nbrs)} exceeds n/2 = {half}")
    others = [x for x in range(n) if not g.adj[v] >> x & 1]
    best = None
    for t in range(max(1, trials)):
        gen = rng.stream(seed, t)
        a = set(nbrs) | set(gen.sample(others, half - len(nbrs)))
        start = Partition(tuple(0 if x in a else 1 for x in range(n)), 2)
        part = local_search_swap(g, start, 1)
        key = _key(g, part, 1)
        if best is None or key < best[0]:
            best = (key, part)
    return best[1]


def random_balanced_kpartition(g: Graph, k: int, seed: int = 0, trials: int = 16, p: Norm = 1) -> Partition:
    """Best of ``trials`` uniform balanced k-partitions after swap local search."""
    n = g.n
    if n % k:
        raise ValueError(f"random_balanced_kpartition needs {k} | n, got n={n}")
    p = parse_norm(p)
    size = n // k
    best = None
    for t in range(max(1, trials)):
        gen = rng.stream(seed, t)
        order = list(range(n))
        gen.shuffle(order)
        assign = [0] * n
        for pos, x in enumerate(order):
            assign[x] = pos // size
        part = local_search_swap(g, Partition(tuple(assign), k), p)
        key = _key(g, part, p)
        if best is None or key < best[0]:
            best = (key, part)
    return best[1]


def _bisect(g: Graph, seed: int, trials: int) -> Partition:
    if g.n <= EXACT_SUBPROBLEM_MAX_N:
        return solve(g, SizeSpec.balanced(2), 1)[0]
    return random_balanced_kpartition(g, 2, seed=seed, trials=trials)


def tripartition_via_independent(g: Graph, seed: int = 0, trials: int = 16) -> Partition | None:
    """Balanced 3-partition (I, A, B): I independent of size n/3, (A, B) the best
    available bisection of the rest. ``None`` when the independence number is
    below n/3."""
    n = g.n
    if n % 3:
        raise ValueError("tripartition_via_independent needs 3 | n")
    mis = max_independent_set(g).members()
    third = n // 3
    if len(mis) < third:
        return None
    ind = mis[:third]
    rest = [v for v in range(n) if v not in set(ind)]
    sub = _bisect(g.induced(rest), seed, trials)
    assign = [0] * n
    for i, v in enumerate(rest):
        assign[v] = 1 + sub.assign[i]
    return Partition(tuple(assign), 3)


def _two_sided(g: Graph, a: int) -> int:
    return edges_within(g, a) + edges_within(g, g.vertex_mask & ~a)


def biased_unbalanced(g: Graph, alpha, seed: int = 0, trials: int = 1) -> SubsetResult:
    """A set S of floor(alpha*n) vertices with small e(S) + e(S^c).

    A random core A of 2*floor(alpha*n) - n vertices is joined with one half of
    the best bisection (A1, A2) of the remaining vertices; the better merge wins.
    """
    alpha = Fraction(alpha)
    n = g.n
    if not Fraction(1, 2) < alpha < 1:
        raise BadAlpha(f"alpha must lie strictly between 1/2 and 1, got {alpha}")
    s = (alpha * n).__floor__()
    if s < n - s:
        raise BadAlpha(f"floor(alpha*n) = {s} is smaller than n - {s}")
    best = None
    for t in range(max(1, trials)):
        gen = rng.stream(seed, t)
        core = gen.sample(range(n), 2 * s - n)
        core_mask = sum(1 << v for v in core)
        rest = [v for v in range(n) if not core_mask >> v & 1]
        halves = _bisect(g.induced(rest), seed + t, 16) if rest else Partition((), 2)
        for side in (0, 1):
            mask = core_mask | sum(1 << v for i, v in enumerate(rest) if halves.assign[i] == side)
            cand = VertexSet(n, mask)
            key = (_two_sided(g, mask), cand.sort_key())
            if best is None or key < best[0]:
                best = (key, cand)
    (cost, _), vertices = best
    return SubsetResult(vertices, cost)


def _improve_sparse(g: Graph, mask: int) -> int:
    # swap one inside vertex for one outside vertex while e(A) drops
    adj, full = g.adj, g.vertex_mask
    while True:
        inside = list(iter_bits(mask))
        outside = list(iter_bits(full & ~mask))
        best = None
        for u in inside:
            lose = (adj[u] & mask).bit_count()
            for w in outside:
                gain = (adj[w] & mask & ~(1 << u)).bit_count()
                delta = gain - lose
                if delta < 0 and (best is None or delta < best[0]):
                    best = (delta, u, w)
        if best is None:
            return mask
        _, u, w = best
        mask = (mask & ~(1 << u)) | (1 << w)


def three_quarters_sparse(g: Graph, exact_limit: int = 24) -> SubsetResult:
    """A set of 3n/4 vertices spanning few edges, certified against n^2/8.

    Candidates come from deleting n/4 high-degree vertices of an independent set
    (a maximum independent set or the neighbourhood of a maximum-degree vertex),
    so that e(A) = e(G) - sum of deleted degrees; each is improved by swaps, and
    small graphs are finished by the exact subset solver.
    """
    n = g.n
    if n % 4:
        raise ValueError("three_quarters_sparse needs 4 | n")
    if not is_clique_free(g, 3):
        raise NotTriangleFree("three_quarters_sparse needs a triangle-free graph")
    quarter = n // 4
    full = g.vertex_mask
    degree = g.degrees()
    pools = []
    if n <= 64:
        pools.append(max_independent_set(g).members())
    if n:
        top = max(range(n), key=lambda v: (degree[v], -v))
        pools.append(g.neighbors(top).members())
    candidates = []
    for pool in pools:
        if len(pool) >= quarter:
            drop = sorted(pool, key=lambda v: (-degree[v], v))[:quarter]
            mask = full & ~sum(1 << v for v in drop)
            candidates.append(_improve_sparse(g, mask))
    if n <= exact_limit:
        candidates.append(solve_subset(g, n - quarter, "sparse", guard=exact_limit)[0].bits)
    if not candidates:
        candidates.append(_improve_sparse(g, full & ~((1 << quarter) - 1)))
    best = min(candidates, key=lambda m: (edges_within(g, m), VertexSet(n, m).sort_key()))
    cost = edges_within(g, best)
    certified = 8 * cost <= n * n
    if not certified:
        log.warning("CertificateFailure: 3n/4-set spans %d > n^2/8 = %s edges", cost, Fraction(n * n, 8))
    return SubsetResult(VertexSet(n, best), cost, certified)


def partition_cost(g: Graph, part: Partition, p: Norm = 1) -> int:
    return CostVector.of(g, part).norm(parse_norm(p))


__all__ = [
    "INF",
    "SubsetResult",
    "biased_unbalanced",
    "independent_bisection",
    "local_search_swap",
    "neighborhood_bisection",
    "partition_cost",
    "random_balanced_kpartition",
    "three_quarters_sparse",
    "tripartition_via_independent",
]

