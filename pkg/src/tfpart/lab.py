"""Batch checks of partition bounds over enumerated or supplied graphs.

Every claim is an upper bound on an exact functional computed by the solver.
Records carry exact rationals, and a summary tallies statuses, equality
witnesses and violations. Proven claims (``PROVEN``) that come out violated
are flagged for manual review rather than ignored.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TextIO

from . import graph6
from .errors import GuardExceeded, UnknownClaim
from .gen import CANON_MAX_N, canonical_form, enumerate_free
from .graphcore import (
    Graph,
    VertexSet,
    cliques,
    edges_within,
    independence_number,
    is_clique_free,
    iter_bits,
)
from .solver import INF, CostVector, Norm, Partition, SizeSpec, parse_norm, solve, solve_subset

STATUSES = ("satisfied", "equality", "violated", "not_applicable")
PROVEN = frozenset({"T1", "T5", "T6", "RAZ"})


@dataclass(frozen=True)
class ClaimParams:
    alpha: Fraction | None = None
    r: int | None = None
    t7_slack: Fraction | None = None

    @classmethod
    def make(cls, alpha=None, r=None, t7_slack=None) -> "ClaimParams":
        return cls(
            None if alpha is None else Fraction(alpha),
            None if r is None else int(r),
            None if t7_slack is None else Fraction(t7_slack),
        )


@dataclass(frozen=True)
class CheckRecord:
    claim_id: str
    g6: str
    n: int
    value: Fraction | None
    bound: Fraction | None
    status: str
    witness: Partition | VertexSet | None = None

    def to_json(self) -> dict:
        def split(x: Fraction | None):
            return (None, None) if x is None else (x.numerator, x.denominator)

        value_num, value_den = split(self.value)
        bound_num, bound_den = split(self.bound)
        if isinstance(self.witness, Partition):
            witness = {"classes": [c.members() for c in self.witness.classes()]}
        elif isinstance(self.witness, VertexSet):
            witness = {"vertices": self.witness.members()}
        else:
            witness = None
        return {
            "claim_id": self.claim_id,
            "g6": self.g6,
            "n": self.n,
            "value_num": value_num,
            "value_den": value_den,
            "bound_num": bound_num,
            "bound_den": bound_den,
            "status": self.status,
            "witness": witness,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CheckRecord":
        def join(num, den):
            return None if num is None else Fraction(num, den)

        n = data["n"]
        w = data.get("witness")
        if w and "classes" in w:
            witness = Partition.from_classes(n, w["classes"])
        elif w and "vertices" in w:
            witness = VertexSet.of(n, w["vertices"])
        else:
            witness = None
        return cls(
            data["claim_id"], data["g6"], n,
            join(data["value_num"], data["value_den"]),
            join(data["bound_num"], data["bound_den"]),
            data["status"], witness,
        )


# ---------------------------------------------------------------------------
# claim catalog


@dataclass(frozen=True)
class Claim:
    claim_id: str
    description: str
    forbid: int
    applicable: Callable[[Graph, ClaimParams], bool]
    bound: Callable[[int, ClaimParams], Fraction]
    spec: Callable[[int, ClaimParams], SizeSpec] | None = None
    p: Norm = 1
    subset: Callable[[int, ClaimParams], tuple[int, str]] | None = None

    def evaluate(self, g: Graph, params: ClaimParams) -> tuple[int, Partition | VertexSet]:
        if self.spec is not None:
            part, cv = solve(g, self.spec(g.n, params), self.p)
            return cv.norm(self.p), part
        m, objective = self.subset(g.n, params)
        return solve_subset(g, m, objective)[::-1]

    def recompute(self, g: Graph, witness: Partition | VertexSet, params: ClaimParams) -> int:
        """Functional value of a witness, from scratch."""
        if isinstance(witness, Partition):
            return CostVector.of(g, witness).norm(self.p)
        value = edges_within(g, witness.bits)
        if self.subset(g.n, params)[1] == "two_sided":
            value += edges_within(g, witness.complement().bits)
        return value


def _sq(n: int) -> Fraction:
    return Fraction(n * n)


def _tri(g: Graph) -> bool:
    return is_clique_free(g, 3)


def _k4(g: Graph) -> bool:
    return is_clique_free(g, 4)


def _div(d: int) -> Callable[[Graph, ClaimParams], bool]:
    return lambda g, _: g.n > 0 and g.n % d == 0


def _both(*tests) -> Callable[[Graph, ClaimParams], bool]:
    return lambda g, params: all(t(g, params) for t in tests)


def sparse_threshold(alpha: Fraction) -> Fraction:
    """Edge-density threshold for sparse floor(alpha*n)-sets in triangle-free graphs."""
    if alpha >= Fraction(17, 30):
        return (2 * alpha - 1) / 4
    return (5 * alpha - 2) / 25


def two_sided_threshold(alpha: Fraction) -> Fraction:
    """Threshold for e(A) + e(A^c); the switch point 2 - sqrt(2) is compared exactly."""
    if (2 - alpha) ** 2 <= 2:
        return (2 * alpha - 1) / 4
    return (1 - alpha) ** 2 / 4


def _alpha_in(lo: Fraction, hi: Fraction) -> Callable[[Graph, ClaimParams], bool]:
    return lambda g, params: params.alpha is not None and lo <= params.alpha <= hi


def _floor_alpha(n: int, params: ClaimParams) -> int:
    return math.floor(params.alpha * n)


def _ks_applicable(g: Graph, params: ClaimParams) -> bool:
    if params.alpha is None or g.n == 0:
        return False
    r = params.r or 2
    return (
        Fraction(1, 2) <= params.alpha <= 1
        and (params.alpha * g.n).denominator == 1
        and is_clique_free(g, r + 1)
    )


def _t7_bound(n: int, params: ClaimParams) -> Fraction:
    slack = params.t7_slack if params.t7_slack is not None else Fraction(math.ceil(Fraction(n * n, 100)))
    return Fraction(n * n, 48) + slack


CLAIMS: dict[str, Claim] = {
    c.claim_id: c
    for c in [
        Claim("T1", "balanced bipartition with at most n^2/16 class-edges", 3,
              _both(_div(2), lambda g, _: _tri(g)), lambda n, _: _sq(n) / 16,
              spec=lambda n, _: SizeSpec.balanced(2)),
        Claim("T5", "balanced 3-partition with at most n^2/36 class-edges", 3,
              _both(_div(3), lambda g, _: _tri(g)), lambda n, _: _sq(n) / 36,
              spec=lambda n, _: SizeSpec.balanced(3)),
        Claim("T6", "balanced bipartition with each class spanning at most n^2/18", 3,
              _both(_div(2), lambda g, _: _tri(g)), lambda n, _: _sq(n) / 18,
              spec=lambda n, _: SizeSpec.balanced(2), p=INF),
        Claim("T7", "balanced 3-partition with each class at most n^2/48 plus slack", 3,
              _both(_div(3), lambda g, _: _tri(g)), _t7_bound,
              spec=lambda n, _: SizeSpec.balanced(3), p=INF),
        Claim("RAZ", "a floor(n/2)-set spanning at most 27n^2/1024 edges", 3,
              _both(lambda g, _: g.n > 0, lambda g, _: _tri(g)), lambda n, _: _sq(n) * 27 / 1024,
              subset=lambda n, _: (n // 2, "sparse")),
        Claim("C_D3", "at most n^2/121 edge deletions make the graph 3-partite", 3,
              lambda g, _: _tri(g), lambda n, _: _sq(n) / 121,
              spec=lambda n, _: SizeSpec.free(3)),
        Claim("C_UNB2", "a floor(alpha*n)-set below the sparse threshold", 3,
              _both(lambda g, _: _tri(g), _alpha_in(Fraction(53, 120), Fraction(1))),
              lambda n, params: sparse_threshold(params.alpha) * n * n,
              subset=lambda n, params: (_floor_alpha(n, params), "sparse")),
        Claim("C_UNB", "a floor(alpha*n)-set A with e(A)+e(A^c) below the threshold", 3,
              _both(lambda g, _: _tri(g), _alpha_in(Fraction(1, 2), Fraction(1))),
              lambda n, params: two_sided_threshold(params.alpha) * n * n,
              subset=lambda n, params: (_floor_alpha(n, params), "two_sided")),
        Claim("K4_A", "K4-free: balanced bipartition with at most n^2/9 class-edges", 4,
              _both(_div(2), lambda g, _: _k4(g)), lambda n, _: _sq(n) / 9,
              spec=lambda n, _: SizeSpec.balanced(2)),
        Claim("K4_B", "K4-free: balanced bipartition with each class at most n^2/16", 4,
              _both(_div(2), lambda g, _: _k4(g)), lambda n, _: _sq(n) / 16,
              spec=lambda n, _: SizeSpec.balanced(2), p=INF),
        Claim("K4_C", "K4-free: balanced 3-partition with at most 4n^2/81 class-edges", 4,
              _both(_div(3), lambda g, _: _k4(g)), lambda n, _: _sq(n) * 4 / 81,
              spec=lambda n, _: SizeSpec.balanced(3)),
        Claim("KS", "K_{r+1}-free: an alpha*n-set with e(A)+e(A^c) at most (r-1)/(2r)(2alpha-1)n^2", 0,
              _ks_applicable,
              lambda n, params: Fraction((params.r or 2) - 1, 2 * (params.r or 2)) * (2 * params.alpha - 1) * n * n,
              subset=lambda n, params: (int(params.alpha * n), "two_sided")),
    ]
}


def get_claim(claim_id: str) -> Claim:
    try:
        return CLAIMS[claim_id]
    except KeyError:
        raise UnknownClaim(claim_id) from None


def graph_key(g: Graph) -> str:
    """Canonical graph6 when canonical labelling is available, else plain graph6."""
    return canonical_form(g) if g.n <= CANON_MAX_N else graph6.encode(g)


def check(g: Graph, claim_id: str, params: ClaimParams | None = None, key: str | None = None, **kwargs) -> CheckRecord:
    """Evaluate one claim on one graph.

    Keyword arguments ``alpha``, ``r`` and ``t7_slack`` are shorthand for
    ``params``.
    """
    claim = get_claim(claim_id)
    if params is None:
        params = ClaimParams.make(**kwargs)
    key = key if key is not None else graph_key(g)
    if not claim.applicable(g, params):
        return CheckRecord(claim_id, key, g.n, None, None, "not_applicable")
    value, witness = claim.evaluate(g, params)
    value = Fraction(value)
    bound = claim.bound(g.n, params)
    status = "equality" if value == bound else "violated" if value > bound else "satisfied"
    return CheckRecord(claim_id, key, g.n, value, bound, status, witness)


def recheck(g: Graph, record: CheckRecord, params: ClaimParams | None = None) -> bool:
    """True when the record's witness reproduces its value."""
    if record.witness is None:
        return record.value is None
    claim = get_claim(record.claim_id)
    return Fraction(claim.recompute(g, record.witness, params or ClaimParams())) == record.value


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepSummary:
    records: int = 0
    by_status: dict[str, int] = field(default_factory=lambda: {s: 0 for s in STATUSES})
    by_claim: dict[str, dict[str, int]] = field(default_factory=dict)
    equality_witnesses: dict[str, list[str]] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)
    fractional_bounds: dict[str, list[int]] = field(default_factory=dict)

    def add(self, record: CheckRecord) -> None:
        self.records += 1
        self.by_status[record.status] += 1
        per = self.by_claim.setdefault(record.claim_id, {s: 0 for s in STATUSES})
        per[record.status] += 1
        if record.status == "equality":
            self.equality_witnesses.setdefault(record.claim_id, []).append(record.g6)
        elif record.status == "violated":
            self.violations.append({
                "claim_id": record.claim_id,
                "g6": record.g6,
                "n": record.n,
                "proven": record.claim_id in PROVEN,
            })
        if record.bound is not None and record.bound.denominator != 1:
            ns = self.fractional_bounds.setdefault(record.claim_id, [])
            if record.n not in ns:
                ns.append(record.n)

    @property
    def proven_violations(self) -> int:
        return sum(1 for v in self.violations if v["proven"])

    def to_json(self) -> dict:
        return {
            "summary": {
                "records": self.records,
                "by_status": self.by_status,
                "by_claim": self.by_claim,
                "equality_witnesses": self.equality_witnesses,
                "violations": self.violations,
                "proven_violations": self.proven_violations,
                # equality is impossible wherever the bound is not an integer
                "fractional_bounds": self.fractional_bounds,
            }
        }


def default_workers() -> int:
    env = os.environ.get("CUT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _check_many(args: tuple[str, tuple[str, ...], ClaimParams]) -> list[dict]:
    text, claims, params = args
    g = graph6.decode(text)
    key = graph_key(g)
    return [check(g, c, params, key=key).to_json() for c in claims]


def _regular_ok(g: Graph, regular: bool) -> bool:
    return not regular or g.is_regular()


def sweep(
    n_values: Iterable[int],
    r_plus_1: int,
    claims: Sequence[str],
    params: ClaimParams | None = None,
    regular: bool = False,
    workers: int = 1,
    guard: int | None = None,
    graphs: Iterable[Graph] | None = None,
) -> Iterator[CheckRecord]:
    """Check every claim on every enumerated K_{r_plus_1}-free graph.

    Records come out in enumeration order (then claim order) whatever the
    worker count. ``graphs`` replaces enumeration with a supplied stream.
    """
    claims = tuple(claims)
    for c in claims:
        get_claim(c)
    if not claims:
        return
    params = params or ClaimParams()

    def source() -> Iterator[Graph]:
        if graphs is not None:
            yield from graphs
            return
        for n in n_values:
            yield from enumerate_free(n, r_plus_1, guard=guard)

    stream = (g for g in source() if _regular_ok(g, regular))
    if workers > 1:
        texts = [graph6.encode(g) for g in stream]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(texts) // (4 * workers))
            for batch in pool.map(_check_many, [(t, claims, params) for t in texts], chunksize=chunk):
                for data in batch:
                    yield CheckRecord.from_json(data)
        return
    for g in stream:
        key = graph_key(g)
        for c in claims:
            yield check(g, c, params, key=key)


def _read_existing(path: str) -> list[dict]:
    if not os.path.exists(path):
        return []
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            data = json.loads(line)
            if "summary" not in data:
                rows.append(data)
    return rows


def run_sweep(
    out: TextIO,
    n_values: Iterable[int],
    r_plus_1: int,
    claims: Sequence[str],
    params: ClaimParams | None = None,
    regular: bool = False,
    workers: int = 1,
    guard: int | None = None,
    resume: str | None = None,
    graphs: Iterable[Graph] | None = None,
) -> SweepSummary:
    """Write records as JSONL followed by one summary object.

    With ``resume``, records already in that file are kept, generation skips
    past the last (graph, claim) pair found there, and new records are
    appended to the same file; ``out`` then only receives the summary.
    """
    summary = SweepSummary()
    previous = _read_existing(resume) if resume else []
    cursor = (previous[-1]["g6"], previous[-1]["claim_id"]) if previous else None
    sink = out
    if resume:
        with open(resume, "w", encoding="utf-8") as fh:
            for row in previous:
                fh.write(json.dumps(row) + "\n")
        sink = open(resume, "a", encoding="utf-8")
    for row in previous:
        summary.add(CheckRecord.from_json(row))
    try:
        skipping = cursor is not None
        for record in sweep(n_values, r_plus_1, claims, params, regular, workers, guard, graphs):
            if skipping:
                if (record.g6, record.claim_id) == cursor:
                    skipping = False
                continue
            summary.add(record)
            sink.write(json.dumps(record.to_json()) + "\n")
            sink.flush()
        line = json.dumps(summary.to_json()) + "\n"
        sink.write(line)
        if sink is not out:
            out.write(line)
    finally:
        if sink is not out:
            sink.close()
    return summary


# ---------------------------------------------------------------------------
# extremal graphs


def extremal(
    n: int, spec: SizeSpec, p: Norm = 1, r_plus_1: int = 3, guard: int | None = None
) -> list[tuple[Graph, int]]:
    """All enumerated K_{r_plus_1}-free graphs on n vertices maximising the
    optimal class-edge norm, with that maximum."""
    p = parse_norm(p)
    best: list[tuple[Graph, int]] = []
    top = None
    for g in enumerate_free(n, r_plus_1, guard=guard):
        value = solve(g, spec, p)[1].norm(p)
        if top is None or value > top:
            top, best = value, [(g, value)]
        elif value == top:
            best.append((g, value))
    return best


# ---------------------------------------------------------------------------
# clique-free ingredients

EXACT_COVER_MAX_N = 20


@dataclass(frozen=True)
class KSIngredients:
    r: int
    cover_greedy: int
    cover_exact: int
    independent_bound: Fraction
    independence_number: int
    xyz_bound: Fraction | None = None

    def to_json(self) -> dict:
        def frac(x):
            return None if x is None else str(x)

        return {
            "r": self.r,
            "cover_greedy": self.cover_greedy,
            "cover_exact": self.cover_exact,
            "covered_vertices": self.cover_exact * self.r,
            "independent_bound": frac(self.independent_bound),
            "independence_number": self.independence_number,
            "xyz_bound": frac(self.xyz_bound),
        }


def greedy_clique_packing(g: Graph, r: int) -> list[int]:
    """Vertex-disjoint K_r copies taken greedily in lexicographic order."""
    used = 0
    chosen = []
    for c in sorted(cliques(g, r), key=lambda m: list(iter_bits(m))):
        if not c & used:
            chosen.append(c)
            used |= c
    return chosen


def max_clique_packing(g: Graph, r: int) -> list[int]:
    """A maximum family of vertex-disjoint K_r copies (branch and bound)."""
    if g.n > EXACT_COVER_MAX_N:
        raise GuardExceeded(f"exact clique packing limited to n <= {EXACT_COVER_MAX_N}")
    all_cliques = cliques(g, r)
    by_low: dict[int, list[int]] = {}
    for c in all_cliques:
        by_low.setdefault((c & -c).bit_length() - 1, []).append(c)
    best: list[int] = []
    chosen: list[int] = []

    def search(v: int, used: int) -> None:
        nonlocal best
        free = g.vertex_mask & ~used & ~((1 << v) - 1)
        if len(chosen) + free.bit_count() // r <= len(best):
            return
        if v >= g.n:
            best = chosen[:]
            return
        if used >> v & 1:
            search(v + 1, used)
            return
        for c in by_low.get(v, []):
            if not c & used:
                chosen.append(c)
                search(v + 1, used | c)
                chosen.pop()
        search(v + 1, used)

    search(0, 0)
    return best


def xyz_edge_bound(r: int, x, y, z, e_z) -> Fraction:
    """Upper bound on e(G)/n^2 for a K_{r+1}-free graph split into an
    independent set X, a K_r-tiled set Y and a rest Z (sizes as fractions of n,
    ``e_z`` = e(Z)/n^2)."""
    x, y, z, e_z = (Fraction(t) for t in (x, y, z, e_z))
    return (
        Fraction(r - 1, 2 * r) * (x + y + z) ** 2
        - ((r - 1) * x - z) ** 2 / (2 * r * (r - 1))
        + e_z
        - Fraction(r - 2, 2 * (r - 1)) * z ** 2
    )


def xyz_check(g: Graph, r: int, x_set: Iterable[int], y_set: Iterable[int]) -> tuple[Fraction, Fraction]:
    """(e(G)/n^2, bound) for a concrete split; Z is everything else.

    Raises ``ValueError`` unless X is independent and Y is exactly tiled by
    vertex-disjoint K_r copies.
    """
    n = g.n
    x_mask = sum(1 << v for v in set(x_set))
    y_mask = sum(1 << v for v in set(y_set))
    if x_mask & y_mask:
        raise ValueError("X and Y must be disjoint")
    if edges_within(g, x_mask):
        raise ValueError("X must be independent")
    y_list = list(iter_bits(y_mask))
    if y_list and len(max_clique_packing(g.induced(y_list), r)) * r != len(y_list):
        raise ValueError("Y is not covered by vertex-disjoint K_r copies")
    z_mask = g.vertex_mask & ~x_mask & ~y_mask
    nn = Fraction(n * n)
    bound = xyz_edge_bound(
        r,
        Fraction(x_mask.bit_count(), n),
        Fraction(y_mask.bit_count(), n),
        Fraction(z_mask.bit_count(), n),
        edges_within(g, z_mask) / nn,
    )
    return g.edge_count / nn, bound


def independent_set_bound(g: Graph, r: int) -> Fraction:
    """2(r-1)m/n - (r-2)n: a lower bound on the independence number of a
    K_{r+1}-free graph with m edges (may be negative)."""
    if g.n == 0:
        return Fraction(0)
    return Fraction(2 * (r - 1) * g.edge_count, g.n) - (r - 2) * g.n


def ks_ingredients(g: Graph, r: int, x=None, y=None, z=None, e_z=None) -> KSIngredients:
    if r < 2:
        raise ValueError("r must be at least 2")
    greedy = len(greedy_clique_packing(g, r))
    exact = len(max_clique_packing(g, r))
    bound = None
    if None not in (x, y, z, e_z):
        bound = xyz_edge_bound(r, x, y, z, e_z)
    return KSIngredients(r, greedy, exact, independent_set_bound(g, r), independence_number(g), bound)
