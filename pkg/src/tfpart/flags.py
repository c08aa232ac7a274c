"""Exact flag densities, the averaging operator and inequality residuals.

A flag is a small graph ``h`` with an ordered tuple of labelled vertices.
Its density in a host graph at an anchor (the images of the labels) is the
fraction of ways to add the unlabelled vertices from the rest of the host so
that the induced labelled graph is a label-preserving copy of the flag. All
values are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import ast
import hashlib
import itertools
import math
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import AnchorMismatch, InfeasibleAnchor, PatternTooLarge, TfpartError, UnknownInequality
from .gen import _order_code, canonical_form
from .graphcore import Graph, edges_between, edges_within, iter_bits


@dataclass(frozen=True)
class Flag:
    h: Graph
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels) or any(not 0 <= x < self.h.n for x in labels):
            raise ValueError(f"labels {labels} must be distinct vertices of the pattern")

    @property
    def size(self) -> int:
        return self.h.n

    @property
    def k(self) -> int:
        return len(self.labels)

    def unlabeled(self) -> "Flag":
        return Flag(self.h, ())

    def type_edges(self) -> set[tuple[int, int]]:
        """Edges among labels, as pairs of label positions."""
        return {(i, j) for i, j in itertools.combinations(range(self.k), 2)
                if self.h.has_edge(self.labels[i], self.labels[j])}

    @classmethod
    def parse(cls, name: str, type_edges: Iterable[tuple[int, int]] = ()) -> "Flag":
        """Build a flag from a name such as ``luu212`` or ``llluu1211112``.

        Letters give the vertices (``l`` labelled first, then ``u``); digits give
        the pairs in lexicographic order with 1 for a non-edge and 2 for an edge.
        If the digits skip the pairs among labelled vertices, those are taken
        from ``type_edges`` (pairs of 0-based label positions).
        """
        m = re.fullmatch(r"(l*)(u*)([12]*)", name)
        if not m or not (m.group(1) or m.group(2)):
            raise ValueError(f"bad flag name {name!r}")
        k = len(m.group(1))
        size = k + len(m.group(2))
        digits = m.group(3)
        pairs = list(itertools.combinations(range(size), 2))
        if len(digits) == len(pairs):
            chosen = [p for p, d in zip(pairs, digits) if d == "2"]
        elif len(digits) == len(pairs) - k * (k - 1) // 2:
            free_pairs = [p for p in pairs if p[1] >= k]
            chosen = [p for p, d in zip(free_pairs, digits) if d == "2"]
            chosen += [tuple(sorted(p)) for p in type_edges]
        else:
            raise ValueError(f"flag {name!r} needs {len(pairs)} pair digits")
        return cls(Graph.from_edges(size, chosen), tuple(range(k)))


@dataclass(frozen=True)
class Anchor:
    phi: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(self.phi))


# ---------------------------------------------------------------------------
# densities

_CODE_PERM_LIMIT = 5040


@lru_cache(maxsize=None)
def _codes(flag: Flag) -> frozenset[int] | None:
    """Upper-triangle codes of every ordering that lists the labels first (in
    order) followed by the unlabelled vertices in any order."""
    rest = [v for v in range(flag.size) if v not in flag.labels]
    if math.factorial(len(rest)) > _CODE_PERM_LIMIT:
        return None
    adj = flag.h.adj
    return frozenset(_order_code(adj, list(flag.labels) + list(p)) for p in itertools.permutations(rest))


@lru_cache(maxsize=None)
def _colored_form(flag: Flag) -> str:
    return _colored_form_of(flag.h, flag.k)


def _colored_form_of(h: Graph, k: int) -> str:
    return canonical_form(h, list(range(k)) + [k] * (h.n - k))


def _matches(flag: Flag, g: Graph, order: Sequence[int]) -> bool:
    codes = _codes(flag)
    if codes is not None:
        return _order_code(g.adj, order) in codes
    return _colored_form_of(g.induced(order), flag.k) == _colored_form(flag)


def density(flag: Flag, g: Graph) -> Fraction:
    """Probability that a uniform |V(h)|-subset of the host induces a copy of h."""
    pattern = flag.unlabeled()
    m = pattern.size
    if m > g.n:
        raise PatternTooLarge(f"pattern has {m} vertices, host only {g.n}")
    edges = pattern.h.edge_count
    hits = 0
    for subset in itertools.combinations(range(g.n), m):
        mask = sum(1 << v for v in subset)
        if edges_within(g, mask) == edges and _matches(pattern, g, subset):
            hits += 1
    return Fraction(hits, math.comb(g.n, m))


def _check_anchor(flag: Flag, g: Graph, phi: Sequence[int]) -> None:
    if len(phi) != flag.k:
        raise AnchorMismatch(f"anchor has {len(phi)} vertices, flag has {flag.k} labels")
    if len(set(phi)) != len(phi) or any(not 0 <= x < g.n for x in phi):
        raise AnchorMismatch(f"anchor {tuple(phi)} must be distinct host vertices")
    for i, j in itertools.combinations(range(flag.k), 2):
        if flag.h.has_edge(flag.labels[i], flag.labels[j]) != g.has_edge(phi[i], phi[j]):
            raise AnchorMismatch(f"anchor {tuple(phi)} does not induce the flag's labelled part")


def _anchor_tuple(anchor: Anchor | Sequence[int]) -> tuple[int, ...]:
    return anchor.phi if isinstance(anchor, Anchor) else tuple(anchor)


def labeled_density(flag: Flag, g: Graph, anchor: Anchor | Sequence[int]) -> Fraction:
    """Density of a labelled flag at one anchor of the host."""
    phi = _anchor_tuple(anchor)
    _check_anchor(flag, g, phi)
    return _labeled_density(flag, g, phi)


def _labeled_density(flag: Flag, g: Graph, phi: tuple[int, ...]) -> Fraction:
    extra = flag.size - flag.k
    used = set(phi)
    rest = [v for v in range(g.n) if v not in used]
    if extra > len(rest):
        raise PatternTooLarge(f"flag needs {extra} free vertices, host has {len(rest)}")
    hits = sum(1 for x in itertools.combinations(rest, extra) if _matches(flag, g, phi + x))
    return Fraction(hits, math.comb(len(rest), extra))


def _type_valid(flag: Flag, g: Graph, phi: Sequence[int]) -> bool:
    return all(
        flag.h.has_edge(flag.labels[i], flag.labels[j]) == g.has_edge(phi[i], phi[j])
        for i, j in itertools.combinations(range(flag.k), 2)
    )


def unlabeling_coefficient(flag: Flag, ordered: bool = True) -> Fraction:
    """Multiplier of the averaging operator: the chance that a random labelling
    of h reproduces the flag.

    With ``ordered=True`` the labelling is a uniform injective map from the label
    positions into V(h), which is the convention under which the averaging
    identity is exact. ``ordered=False`` draws an unordered label set instead
    and accepts it when some ordering of it reproduces the flag.
    """
    m, k = flag.size, flag.k
    if ordered:
        hits = 0
        for theta in itertools.permutations(range(m), k):
            rest = tuple(v for v in range(m) if v not in theta)
            if _matches(flag, flag.h, theta + rest):
                hits += 1
        return Fraction(hits, math.perm(m, k))
    hits = 0
    for subset in itertools.combinations(range(m), k):
        rest = tuple(v for v in range(m) if v not in subset)
        if any(_matches(flag, flag.h, theta + rest) for theta in itertools.permutations(subset)):
            hits += 1
    return Fraction(hits, math.comb(m, k))


def average_operator_check(flag: Flag, g: Graph) -> tuple[Fraction, Fraction]:
    """Both sides of the averaging identity on one host.

    The left side averages the labelled density over all injective anchors,
    where anchors whose labelled part differs from the flag's contribute zero.
    The right side is the ordered coefficient times the density of h.
    """
    k = flag.k
    if flag.size > g.n:
        raise PatternTooLarge(f"pattern has {flag.size} vertices, host only {g.n}")
    total = Fraction(0)
    for phi in itertools.permutations(range(g.n), k):
        if _type_valid(flag, g, phi):
            total += _labeled_density(flag, g, phi)
    lhs = total / math.perm(g.n, k)
    rhs = unlabeling_coefficient(flag, ordered=True) * density(flag, g)
    return lhs, rhs


# ---------------------------------------------------------------------------
# expected cut cost over random completions

ANCHOR_KINDS = ("vertex", "edge", "edge_plus_nonneighbor")
ANCHOR_ARITY = {"none": 0, "vertex": 1, "edge": 2, "edge_plus_nonneighbor": 3}


def forced_sets(g: Graph, anchor_kind: str, anchor: Sequence[int], k: int) -> list[int]:
    """Vertex masks that the completion must place in classes 1, 2, ...

    vertex (v): N(v) in class 1. edge (u, v): N(u) in class 1, N(v) in class 2.
    edge_plus_nonneighbor (u, v, w): N(u), N(v) - N(w), N(w) - N(u) in classes 1-3.
    """
    anchor = tuple(anchor)
    if anchor_kind not in ANCHOR_KINDS:
        raise ValueError(f"unknown anchor kind {anchor_kind!r}")
    if len(anchor) != ANCHOR_ARITY[anchor_kind] or len(set(anchor)) != len(anchor):
        raise InfeasibleAnchor(f"{anchor_kind} anchor needs {ANCHOR_ARITY[anchor_kind]} distinct vertices")
    if any(not 0 <= x < g.n for x in anchor):
        raise InfeasibleAnchor(f"anchor {anchor} is outside the host")
    adj = g.adj
    if anchor_kind == "vertex":
        forced = [adj[anchor[0]]]
    elif anchor_kind == "edge":
        u, v = anchor
        if not g.has_edge(u, v):
            raise InfeasibleAnchor(f"({u}, {v}) is not an edge")
        forced = [adj[u], adj[v]]
    else:
        u, v, w = anchor
        if not g.has_edge(u, v) or g.has_edge(u, w) or g.has_edge(v, w):
            raise InfeasibleAnchor(f"({u}, {v}, {w}) needs uv an edge and w adjacent to neither")
        forced = [adj[u], adj[v] & ~adj[w], adj[w] & ~adj[u]]
    if len(forced) > k:
        raise InfeasibleAnchor(f"{anchor_kind} anchor needs at least {len(forced)} classes")
    for a, b in itertools.combinations(forced, 2):
        if a & b:
            raise InfeasibleAnchor("forced sets overlap; the host has a triangle through the anchor")
    return forced + [0] * (k - len(forced))


def _completion_setup(g: Graph, anchor_kind: str, anchor: Sequence[int], target_sizes: Sequence[int]):
    sizes = list(target_sizes)
    if sum(sizes) != g.n or any(s < 0 for s in sizes):
        raise InfeasibleAnchor(f"target sizes {sizes} do not partition {g.n} vertices")
    forced = forced_sets(g, anchor_kind, anchor, len(sizes))
    room = [s - f.bit_count() for s, f in zip(sizes, forced)]
    if any(r < 0 for r in room):
        raise InfeasibleAnchor(f"forced sets do not fit in target sizes {sizes}")
    free = g.vertex_mask
    for f in forced:
        free &= ~f
    return forced, room, free


def expected_cut_cost(
    g: Graph, anchor_kind: str, anchor: Sequence[int], target_sizes: Sequence[int]
) -> list[Fraction]:
    """E[e(A_i)] for each class under a uniform completion of the forced sets.

    A free vertex lands in class i with probability c_i/f and a free pair with
    probability c_i(c_i - 1)/(f(f - 1)), where c_i is the room left in class i
    and f the number of free vertices.
    """
    forced, room, free = _completion_setup(g, anchor_kind, anchor, target_sizes)
    f = free.bit_count()
    inner = edges_within(g, free)
    out = []
    for mask, c in zip(forced, room):
        value = Fraction(edges_within(g, mask))
        if f:
            value += Fraction(c, f) * edges_between(g, mask, free)
        if f > 1:
            value += Fraction(c * (c - 1), f * (f - 1)) * inner
        out.append(value)
    return out


def brute_force_expected_cut_cost(
    g: Graph, anchor_kind: str, anchor: Sequence[int], target_sizes: Sequence[int]
) -> list[Fraction]:
    """The same expectations by listing every completion explicitly."""
    forced, room, free = _completion_setup(g, anchor_kind, anchor, target_sizes)
    k = len(forced)
    totals = [0] * k
    count = 0
    free_list = list(iter_bits(free))

    def place(i: int, masks: list[int], left: list[int]) -> None:
        nonlocal count
        if i == len(free_list):
            count += 1
            for c in range(k):
                totals[c] += edges_within(g, masks[c])
            return
        bit = 1 << free_list[i]
        for c in range(k):
            if left[c]:
                left[c] -= 1
                masks[c] |= bit
                place(i + 1, masks, left)
                masks[c] &= ~bit
                left[c] += 1

    place(0, list(forced), list(room))
    return [Fraction(t, count) for t in totals]


# ---------------------------------------------------------------------------
# inequality catalog

CATALOG_RESOURCE = "inequalities.txt"
AGGREGATES = ("mean", "min", "substitute")


class CatalogError(TfpartError, ValueError):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _evaluate(node: ast.AST, env: Mapping[str, Fraction]) -> Fraction:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return Fraction(str(node.value))
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _evaluate(node.operand, env)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exponent = _evaluate(node.right, env)
            if exponent.denominator != 1:
                raise CatalogError("only integer powers are allowed")
            return _evaluate(node.left, env) ** int(exponent)
        if type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    raise CatalogError(f"unsupported expression element {ast.dump(node)}")


def _compile(text: str) -> ast.Expression:
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise CatalogError(f"cannot parse {text!r}: {exc}") from None
    _evaluate_check(tree)
    return tree


def _evaluate_check(tree: ast.AST) -> None:
    allowed = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load,
               ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)
    for node in ast.walk(tree):
        if not isinstance(node, allowed):
            raise CatalogError(f"unsupported expression element {type(node).__name__}")


def _names(tree: ast.AST) -> list[str]:
    return sorted({n.id for n in ast.walk(tree) if isinstance(n, ast.Name)})


@dataclass(frozen=True)
class Inequality:
    ineq_id: str
    anchor_kind: str
    params: tuple[tuple[str, ast.Expression], ...]
    expression: str
    tree: ast.Expression = field(repr=False)
    atoms: Mapping[str, Flag] = field(repr=False)
    note: str = ""

    def parameters(self, overrides: Mapping[str, object] | None = None) -> dict[str, Fraction]:
        overrides = dict(overrides or {})
        unknown = set(overrides) - {name for name, _ in self.params}
        if unknown:
            raise ValueError(f"{self.ineq_id} has no parameter(s) {sorted(unknown)}")
        env: dict[str, Fraction] = {}
        for name, tree in self.params:
            env[name] = Fraction(overrides[name]) if name in overrides else _evaluate(tree, env)
        return env


def _type_for(anchor_kind: str) -> list[tuple[int, int]]:
    return [(0, 1)] if anchor_kind in ("edge", "edge_plus_nonneighbor") else []


def parse_catalog(text: str) -> dict[str, Inequality]:
    catalog: dict[str, Inequality] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = [c.strip() for c in line.split("|")]
        if len(cols) < 4:
            raise CatalogError(f"line {lineno}: expected id | anchor | params | expression")
        ineq_id, anchor_kind, param_text, expression = cols[:4]
        note = cols[4] if len(cols) > 4 else ""
        if anchor_kind not in ANCHOR_ARITY:
            raise CatalogError(f"line {lineno}: unknown anchor kind {anchor_kind!r}")
        params = []
        for item in filter(None, (p.strip() for p in param_text.split(";"))):
            name, _, expr = item.partition("=")
            params.append((name.strip(), _compile(expr.strip())))
        tree = _compile(expression)
        param_names = {name for name, _ in params}
        arity = ANCHOR_ARITY[anchor_kind]
        atoms = {}
        for name in _names(tree):
            if name in param_names:
                continue
            flag = Flag.parse(name, _type_for(anchor_kind))
            if flag.k not in (0, arity):
                raise CatalogError(f"line {lineno}: atom {name} has {flag.k} labels, anchor has {arity}")
            if flag.k and flag.type_edges() != set(_type_for(anchor_kind)):
                raise CatalogError(f"line {lineno}: atom {name} disagrees with the {anchor_kind} anchor")
            atoms[name] = flag
        catalog[ineq_id] = Inequality(ineq_id, anchor_kind, tuple(params), expression, tree, atoms, note)
    return catalog


def catalog_text() -> str:
    return resources.files(__package__).joinpath(CATALOG_RESOURCE).read_text(encoding="utf-8")


def catalog_hash() -> str:
    return hashlib.sha256(catalog_text().encode("utf-8")).hexdigest()


@lru_cache(maxsize=1)
def catalog() -> dict[str, Inequality]:
    return parse_catalog(catalog_text())


def get_inequality(ineq_id: str) -> Inequality:
    try:
        return catalog()[ineq_id]
    except KeyError:
        raise UnknownInequality(ineq_id) from None


def anchors(g: Graph, anchor_kind: str) -> Iterator[tuple[int, ...]]:
    """Every valid anchor of the given kind, in lexicographic order."""
    n, adj = g.n, g.adj
    if anchor_kind == "none":
        yield ()
    elif anchor_kind == "vertex":
        yield from ((v,) for v in range(n))
    elif anchor_kind == "edge":
        for u in range(n):
            for v in iter_bits(adj[u]):
                yield (u, v)
    elif anchor_kind == "edge_plus_nonneighbor":
        for u in range(n):
            for v in iter_bits(adj[u]):
                for w in range(n):
                    if w not in (u, v) and not (adj[u] | adj[v]) >> w & 1:
                        yield (u, v, w)
    else:
        raise ValueError(f"unknown anchor kind {anchor_kind!r}")


@dataclass(frozen=True)
class ResidualReport:
    ineq_id: str
    aggregate: str
    value: Fraction | None
    anchors_used: int
    anchors_skipped: int
    note: str = ""


def inequality_report(
    g: Graph, ineq_id: str, params: Mapping[str, object] | None = None, aggregate: str = "mean"
) -> ResidualReport:
    """Evaluate a catalog residual on one host.

    ``mean`` averages the per-anchor residuals (the averaging operator applied
    to the labelled inequality), ``min`` reports the worst anchor, and
    ``substitute`` averages each atom over anchors before evaluating once.
    Anchors where the expression divides by zero are skipped.
    """
    ineq = get_inequality(ineq_id)
    if aggregate not in AGGREGATES:
        raise ValueError(f"aggregate must be one of {AGGREGATES}")
    env = ineq.parameters(params)
    plain = {name: density(f, g) for name, f in ineq.atoms.items() if f.k == 0}
    labelled = {name: f for name, f in ineq.atoms.items() if f.k}
    values: list[Fraction] = []
    sums = {name: Fraction(0) for name in labelled}
    skipped = 0
    used = 0
    for phi in anchors(g, ineq.anchor_kind):
        atom_values = {name: _labeled_density(f, g, phi) for name, f in labelled.items()}
        used += 1
        if aggregate == "substitute":
            for name, value in atom_values.items():
                sums[name] += value
            continue
        try:
            values.append(_evaluate(ineq.tree, {**env, **plain, **atom_values}))
        except ZeroDivisionError:
            skipped += 1
            used -= 1
    if aggregate == "substitute":
        value = None
        if used:
            try:
                value = _evaluate(ineq.tree, {**env, **plain, **{k: v / used for k, v in sums.items()}})
            except ZeroDivisionError:
                value = None
        return ResidualReport(ineq_id, aggregate, value, used, skipped, ineq.note)
    if not values:
        return ResidualReport(ineq_id, aggregate, None, 0, skipped, ineq.note)
    value = sum(values, Fraction(0)) / len(values) if aggregate == "mean" else min(values)
    return ResidualReport(ineq_id, aggregate, value, len(values), skipped, ineq.note)


def inequality_residual(
    g: Graph, ineq_id: str, params: Mapping[str, object] | None = None, aggregate: str = "mean"
) -> Fraction | None:
    """Right-hand side minus left-hand side; ``None`` when no anchor is usable."""
    return inequality_report(g, ineq_id, params, aggregate).value
