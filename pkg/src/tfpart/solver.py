"""Exact minimisation of class-edge functionals over constrained k-partitions.

``solve`` is a depth-first branch and bound. The optimum is found with
vertices taken in descending-degree order; a second pass in natural vertex
order, pruned against the known optimum, returns the lexicographically least
optimal assignment. ``brute_force_solve`` and ``brute_force_subset`` enumerate
every assignment and serve as independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence, Union

from .errors import GuardExceeded, InfeasibleSpec
from .graphcore import Graph, VertexSet, edges_within, iter_bits

Norm = Union[int, float]
INF = math.inf


def parse_norm(text: str | int | float) -> Norm:
    if isinstance(text, (int, float)):
        p = text
    elif text.strip().lower() in ("inf", "infinity", "max"):
        p = INF
    else:
        p = int(text)
    if p != INF and (p < 1 or p != int(p)):
        raise ValueError(f"unsupported norm {text!r}")
    return p if p == INF else int(p)


@dataclass(frozen=True)
class SizeSpec:
    """Class-size constraint: ``balanced(k)``, ``exact(sizes)`` or ``free(k)``.

    Balanced classes take sizes floor(n/k) or ceil(n/k); with ``strict`` the
    spec is rejected unless k divides n.
    """

    kind: str
    k: int
    sizes: tuple[int, ...] | None = None
    strict: bool = False

    def __post_init__(self):
        if self.kind not in ("balanced", "exact", "free"):
            raise ValueError(f"unknown size spec kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.kind == "exact" and (self.sizes is None or len(self.sizes) != self.k):
            raise ValueError("exact spec needs one size per class")
        if self.sizes is not None and any(s < 0 for s in self.sizes):
            raise ValueError("class sizes must be non-negative")

    @classmethod
    def balanced(cls, k: int, strict: bool = False) -> "SizeSpec":
        return cls("balanced", k, strict=strict)

    @classmethod
    def exact(cls, sizes: Sequence[int]) -> "SizeSpec":
        return cls("exact", len(sizes), tuple(sizes))

    @classmethod
    def free(cls, k: int) -> "SizeSpec":
        return cls("free", k)

    @classmethod
    def parse(cls, text: str) -> "SizeSpec":
        kind, _, arg = text.partition(":")
        kind = kind.strip().lower()
        if kind == "exact":
            return cls.exact([int(x) for x in arg.split(",") if x.strip()])
        if kind in ("balanced", "strict"):
            return cls.balanced(int(arg), strict=kind == "strict")
        if kind == "free":
            return cls.free(int(arg))
        raise ValueError(f"cannot parse size spec {text!r}")

    def __str__(self) -> str:
        if self.kind == "exact":
            return "exact:" + ",".join(map(str, self.sizes or ()))
        return f"{'strict' if self.strict else self.kind}:{self.k}"

    @property
    def interchangeable(self) -> bool:
        return self.kind != "exact"

    def check(self, n: int) -> None:
        if self.kind == "exact" and sum(self.sizes or ()) != n:
            raise InfeasibleSpec(f"class sizes {self.sizes} do not sum to n={n}")
        if self.kind == "balanced" and self.strict and n % self.k:
            raise InfeasibleSpec(f"strict balanced spec needs {self.k} | n, got n={n}")

    def admits(self, sizes: Sequence[int], n: int) -> bool:
        if len(sizes) != self.k or sum(sizes) != n:
            return False
        if self.kind == "exact":
            return tuple(sizes) == self.sizes
        if self.kind == "balanced":
            lo, rem = divmod(n, self.k)
            if self.strict and rem:
                return False
            return all(s in (lo, lo + 1) for s in sizes) and sum(s == lo + 1 for s in sizes) == rem
        return True


@dataclass(frozen=True)
class Partition:
    assign: tuple[int, ...]
    k: int

    def __post_init__(self):
        if any(not 0 <= c < self.k for c in self.assign):
            raise ValueError("class index out of range")

    @property
    def n(self) -> int:
        return len(self.assign)

    def class_masks(self) -> list[int]:
        masks = [0] * self.k
        for v, c in enumerate(self.assign):
            masks[c] |= 1 << v
        return masks

    def classes(self) -> list[VertexSet]:
        return [VertexSet(self.n, m) for m in self.class_masks()]

    def sizes(self) -> list[int]:
        return [m.bit_count() for m in self.class_masks()]

    @classmethod
    def from_classes(cls, n: int, classes: Sequence[Sequence[int]]) -> "Partition":
        assign = [-1] * n
        for c, members in enumerate(classes):
            for v in members:
                if assign[v] != -1:
                    raise ValueError(f"vertex {v} in two classes")
                assign[v] = c
        if -1 in assign:
            raise ValueError("classes do not cover every vertex")
        return cls(tuple(assign), len(classes))


@dataclass(frozen=True)
class CostVector:
    per_class: tuple[int, ...]

    def norm(self, p: Norm) -> int:
        """l_p aggregate; finite p > 1 is reported as the p-th power (an integer)."""
        if p == INF:
            return max(self.per_class, default=0)
        if p == 1:
            return sum(self.per_class)
        return sum(e ** int(p) for e in self.per_class)

    def key(self, p: Norm):
        """Total order used for optimisation and tie-breaking."""
        if p == INF:
            return tuple(sorted(self.per_class, reverse=True))
        return self.norm(p)

    @classmethod
    def of(cls, g: Graph, partition: Partition) -> "CostVector":
        return cls(tuple(edges_within(g, m) for m in partition.class_masks()))


def cost_of(g: Graph, partition: Partition) -> CostVector:
    return CostVector.of(g, partition)


DEFAULT_GUARDS = {"balanced2": 24, "balanced3": 18, "free": 16, "other": 18, "subset": 24}


def _default_guard(spec: SizeSpec) -> int:
    if spec.kind == "free":
        return DEFAULT_GUARDS["free"]
    if spec.k == 2:
        return DEFAULT_GUARDS["balanced2"]
    if spec.kind == "balanced" and spec.k == 3:
        return DEFAULT_GUARDS["balanced3"]
    return DEFAULT_GUARDS["other"]


class _Search:
    """Shared DFS over class assignments.

    ``counted[c]`` says whether class ``c`` contributes to the objective; the
    subset objectives count only some classes.
    """

    def __init__(self, g: Graph, spec: SizeSpec, p: Norm, counted: Sequence[bool] | None = None):
        self.g = g
        self.adj = g.adj
        self.n = g.n
        self.spec = spec
        self.k = spec.k
        self.p = p
        self.counted = list(counted) if counted is not None else [True] * spec.k
        if spec.kind == "balanced":
            self.lo, self.rem = divmod(g.n, spec.k)
        self.masks = [0] * self.k
        self.sizes = [0] * self.k
        self.counts = [0] * self.k
        self.at_ceil = 0

    def _open(self, c: int) -> bool:
        s = self.sizes[c]
        kind = self.spec.kind
        if kind == "free":
            return True
        if kind == "exact":
            return s < self.spec.sizes[c]
        return s < self.lo or (s == self.lo and self.at_ceil < self.rem)

    def _place(self, v: int, c: int) -> None:
        self.counts[c] += (self.adj[v] & self.masks[c]).bit_count()
        self.masks[c] |= 1 << v
        self.sizes[c] += 1
        if self.spec.kind == "balanced" and self.sizes[c] == self.lo + 1:
            self.at_ceil += 1

    def _unplace(self, v: int, c: int) -> None:
        if self.spec.kind == "balanced" and self.sizes[c] == self.lo + 1:
            self.at_ceil -= 1
        self.sizes[c] -= 1
        self.masks[c] &= ~(1 << v)
        self.counts[c] -= (self.adj[v] & self.masks[c]).bit_count()

    def _objective(self):
        counted = [e for e, w in zip(self.counts, self.counted) if w]
        return CostVector(tuple(counted)).key(self.p)

    def _bound(self, rest: Sequence[int]):
        if self.p != 1:
            return self._objective()
        total = sum(e for e, w in zip(self.counts, self.counted) if w)
        open_classes = [c for c in range(self.k) if self._open(c)]
        for u in rest:
            nb = self.adj[u]
            total += min(
                ((nb & self.masks[c]).bit_count() if self.counted[c] else 0) for c in open_classes
            )
        return total

    def _choices(self, used: int) -> range:
        if self.spec.interchangeable:
            return range(min(self.k, used + 1))
        return range(self.k)

    def optimum(self):
        order = sorted(range(self.n), key=lambda v: (-self.g.degree(v), v))
        best = [None]

        def dfs(i: int, used: int) -> None:
            if i == self.n:
                key = self._objective()
                if best[0] is None or key < best[0]:
                    best[0] = key
                return
            if best[0] is not None and self._bound(order[i:]) >= best[0]:
                return
            v = order[i]
            for c in self._choices(used):
                if self._open(c):
                    self._place(v, c)
                    dfs(i + 1, max(used, c + 1))
                    self._unplace(v, c)

        dfs(0, 0)
        return best[0]

    def first_with(self, target) -> tuple[int, ...] | None:
        assign = [0] * self.n
        rest_of = [list(range(i, self.n)) for i in range(self.n + 1)]

        def dfs(v: int, used: int) -> bool:
            if v == self.n:
                return self._objective() == target
            if self._bound(rest_of[v]) > target:
                return False
            for c in self._choices(used):
                if self._open(c):
                    self._place(v, c)
                    assign[v] = c
                    if dfs(v + 1, max(used, c + 1)):
                        return True
                    self._unplace(v, c)
            return False

        return tuple(assign) if dfs(0, 0) else None


def _check_guard(g: Graph, limit: int) -> None:
    if g.n > limit:
        raise GuardExceeded(f"exact solve on n={g.n} exceeds guard {limit}")


def solve(g: Graph, spec: SizeSpec, p: Norm = 1, guard: int | None = None) -> tuple[Partition, CostVector]:
    """Global minimum of the selected norm of the class-edge vector.

    Returns the lexicographically least optimal assignment. For ``p = inf``
    ties on the maximum are broken by the descending-sorted class vector.
    """
    p = parse_norm(p)
    spec.check(g.n)
    _check_guard(g, guard if guard is not None else _default_guard(spec))
    best = _Search(g, spec, p).optimum()
    if best is None:
        raise InfeasibleSpec(f"no partition of n={g.n} satisfies {spec}")
    assign = _Search(g, spec, p).first_with(best)
    assert assign is not None
    part = Partition(assign, spec.k)
    return part, CostVector.of(g, part)


SUBSET_OBJECTIVES = ("sparse", "two_sided")


def _subset_setup(g: Graph, m: int, objective: str) -> tuple[SizeSpec, list[bool]]:
    if objective not in SUBSET_OBJECTIVES:
        raise ValueError(f"unknown subset objective {objective!r}")
    if not 0 <= m <= g.n:
        raise InfeasibleSpec(f"subset size {m} outside [0, {g.n}]")
    counted = [True, objective == "two_sided"]
    return SizeSpec.exact((m, g.n - m)), counted


def solve_subset(g: Graph, m: int, objective: str = "sparse", guard: int | None = None) -> tuple[VertexSet, int]:
    """Minimum of e(A) (``sparse``) or e(A)+e(A^c) (``two_sided``) over |A| = m."""
    spec, counted = _subset_setup(g, m, objective)
    _check_guard(g, guard if guard is not None else DEFAULT_GUARDS["subset"])
    best = _Search(g, spec, 1, counted).optimum()
    assign = _Search(g, spec, 1, counted).first_with(best)
    assert assign is not None
    a = VertexSet.of(g.n, (v for v, c in enumerate(assign) if c == 0))
    return a, best


# ---------------------------------------------------------------------------
# brute-force oracles

BRUTE_SOLVE_MAX_N = 12
BRUTE_SUBSET_MAX_N = 16


def _all_assignments(g: Graph, k: int):
    """Every assignment in lexicographic order with its class-edge vector (no pruning)."""
    n, adj = g.n, g.adj
    masks = [0] * k
    counts = [0] * k
    assign = [0] * n

    def rec(v: int):
        if v == n:
            yield tuple(assign), tuple(counts), masks
            return
        nb = adj[v]
        bit = 1 << v
        for c in range(k):
            gain = (nb & masks[c]).bit_count()
            counts[c] += gain
            masks[c] |= bit
            assign[v] = c
            yield from rec(v + 1)
            masks[c] &= ~bit
            counts[c] -= gain

    return rec(0)


def brute_force_solve(g: Graph, spec: SizeSpec, p: Norm = 1) -> tuple[Partition, CostVector]:
    p = parse_norm(p)
    spec.check(g.n)
    if g.n > BRUTE_SOLVE_MAX_N:
        raise GuardExceeded(f"brute force limited to n <= {BRUTE_SOLVE_MAX_N}")
    n, k = g.n, spec.k
    best_key = None
    best = None
    for assign, counts, masks in _all_assignments(g, k):
        if not spec.admits([m.bit_count() for m in masks], n):
            continue
        cv = CostVector(counts)
        key = cv.key(p)
        if best_key is None or key < best_key:
            best_key, best = key, (assign, cv)
    if best is None:
        raise InfeasibleSpec(f"no partition of n={n} satisfies {spec}")
    return Partition(best[0], k), best[1]


def brute_force_subset(g: Graph, m: int, objective: str = "sparse") -> tuple[VertexSet, int]:
    _subset_setup(g, m, objective)
    if g.n > BRUTE_SUBSET_MAX_N:
        raise GuardExceeded(f"brute force limited to n <= {BRUTE_SUBSET_MAX_N}")
    full = g.vertex_mask
    best = None
    for combo in combinations(range(g.n), m):
        a = 0
        for v in combo:
            a |= 1 << v
        value = edges_within(g, a)
        if objective == "two_sided":
            value += edges_within(g, full & ~a)
        if best is None or value < best[1]:
            best = (a, value)
    assert best is not None
    return VertexSet(g.n, best[0]), best[1]


def partition_from_set(n: int, a: VertexSet | int) -> Partition:
    bits = a.bits if isinstance(a, VertexSet) else a
    return Partition(tuple(0 if bits >> v & 1 else 1 for v in range(n)), 2)


def members(mask: int) -> list[int]:
    return list(iter_bits(mask))
