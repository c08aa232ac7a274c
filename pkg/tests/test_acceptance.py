"""One PASS/FAIL line per acceptance criterion, collected in the terminal summary."""

import itertools
import subprocess
import sys
from fractions import Fraction
import pytest

from tfpart import flags as F
from tfpart import graph6, heuristics as H, lab
from tfpart.errors import DegreeTooLarge, InfeasibleAnchor
from tfpart.gen import enumerate_all, enumerate_free
from tfpart.graphcore import complete_bipartite, independence_number
from tfpart.solver import INF, SizeSpec, brute_force_solve, brute_force_subset, solve, solve_subset

from conftest import ACCEPTANCE_LINES

TRIANGLE_FREE_COUNTS = {3: 3, 4: 7, 5: 14, 6: 38, 7: 107, 8: 410}


def report(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def near_balanced(n, k):
    return tuple(n // k + (i < n % k) for i in range(k))


def test_1_solver_matches_brute_force(tf8):
    specs = [SizeSpec.balanced(2), SizeSpec.balanced(3), SizeSpec.free(2), SizeSpec.free(3)]
    counts = {n: sum(1 for g in tf8 if g.n == n) for n in range(3, 9)}
    mismatches = []
    checked = 0
    for g in tf8:
        for spec in specs:
            for p in (1, INF):
                fast, slow = solve(g, spec, p), brute_force_solve(g, spec, p)
                checked += 1
                if fast != slow:
                    mismatches.append((graph6.encode(g), spec, p))
    ok = counts == TRIANGLE_FREE_COUNTS and not mismatches
    report("1", ok, f"{checked} solves on triangle-free n<=8 ({counts}), mismatches={mismatches[:3]}")


def test_2_extremal_equalities():
    cases = []
    for m in (1, 2, 3):
        cases.append((f"D2b(K{3*m},{m})", complete_bipartite(3 * m, m), SizeSpec.balanced(2), m * m))
    for m in (1, 2):
        cases.append((f"D3b(K{5*m},{m})", complete_bipartite(5 * m, m), SizeSpec.balanced(3), m * m))
        cases.append((f"D3b(K{3*m},{3*m})", complete_bipartite(3 * m, 3 * m), SizeSpec.balanced(3), m * m))
    got = {name: solve(g, spec)[1].norm(1) for name, g, spec, _ in cases}
    bounds_met = all(
        got[name] == want and Fraction(want) == Fraction(g.n * g.n, 16 if spec.k == 2 else 36)
        for name, g, spec, want in cases
    )
    report("2", bounds_met, f"values {got}")


def test_3_mantel(tf8):
    bad = []
    for n in range(1, 9):
        layer = [g for g in tf8 if g.n == n]
        top = max(g.edge_count for g in layer)
        extremal = [g for g in layer if g.edge_count == top]
        balanced = complete_bipartite(n // 2, n - n // 2)
        if top != n * n // 4 or len(extremal) != 1 or graph6.encode(extremal[0]) != lab.graph_key(balanced):
            bad.append(n)
    report("3", not bad, f"max e(G) = floor(n^2/4), unique extremal K(n/2) for n=1..8; bad n={bad}")


def test_4_razborov_strict(tf8):
    worst = None
    fails = []
    for g in tf8:
        rec = lab.check(g, "RAZ")
        if not rec.value < rec.bound:
            fails.append(rec.g6)
        ratio = rec.value / rec.bound
        worst = ratio if worst is None else max(worst, ratio)
    report("4", not fails, f"{len(tf8)} graphs, all strict; max value/bound = {worst}; failures={fails[:3]}")


def test_5_expected_cut_closed_form():
    checked = 0
    mismatches = []
    for n in range(1, 8):
        for g in enumerate_free(n, 3):
            for kind in F.ANCHOR_KINDS:
                for k in (2, 3):
                    sizes = near_balanced(n, k)
                    for anchor in F.anchors(g, kind):
                        try:
                            closed = F.expected_cut_cost(g, kind, anchor, sizes)
                        except InfeasibleAnchor:
                            continue
                        checked += 1
                        if closed != F.brute_force_expected_cut_cost(g, kind, anchor, sizes):
                            mismatches.append((graph6.encode(g), kind, anchor, sizes))
    report("5", checked > 0 and not mismatches, f"{checked} anchored cases exact; mismatches={mismatches[:3]}")


def test_6_averaging_operator():
    cherry = F.Flag.parse("luu221")
    coefficient = F.unlabeling_coefficient(cherry)
    family = []
    for m in range(1, 4):
        for h in enumerate_all(m):
            for k in range(m + 1):
                for labels in itertools.permutations(range(m), k):
                    family.append(F.Flag(h, labels))
    hosts = 0
    failures = []
    for n in range(1, 8):
        for g in enumerate_all(n):
            hosts += 1
            for f in family:
                if f.size > n:
                    continue
                lhs, rhs = F.average_operator_check(f, g)
                if lhs != rhs:
                    failures.append((graph6.encode(g), f))
    ok = coefficient == Fraction(2, 6) and not failures
    report("6", ok, f"cherry coefficient {coefficient}; {len(family)} flags x {hosts} hosts, lhs=rhs failures={len(failures)}")


def test_7_graph6_round_trip():
    bad = 0
    total = 0
    for n in range(0, 9):
        for g in enumerate_all(n):
            total += 1
            if graph6.decode(graph6.encode(g)) != g:
                bad += 1
    a_edge, a_empty = graph6.decode("A_"), graph6.decode("A?")
    ok = bad == 0 and a_edge.edge_count == 1 and a_empty.edge_count == 0 and a_edge.n == a_empty.n == 2
    report("7", ok, f"{total} graphs on n<=8 round-trip, failures={bad}; A_ and A? decode correctly")


def test_8_heuristic_soundness(tf8):
    below = []
    over_bound = []
    applied = 0
    for g in tf8:
        n = g.n
        opt2 = solve(g, SizeSpec.balanced(2))[1].norm(1)
        opt3 = solve(g, SizeSpec.balanced(3))[1].norm(1)
        results = []
        ind = H.independent_bisection(g) if n % 2 == 0 else None
        if ind is not None:
            cost = H.partition_cost(g, ind)
            results.append(("ind-bisect", cost, opt2))
            if cost > n * n // 16:
                over_bound.append(graph6.encode(g))
        for v in range(n if n % 2 == 0 else 0):
            try:
                results.append(("nbhd", H.partition_cost(g, H.neighborhood_bisection(g, v)), opt2))
            except DegreeTooLarge:
                pass
        if n >= 2 and n % 2 == 0:
            results.append(("random-2", H.partition_cost(g, H.random_balanced_kpartition(g, 2)), opt2))
            start = H.random_balanced_kpartition(g, 2, trials=1)
            results.append(("swap", H.partition_cost(g, H.local_search_swap(g, start)), opt2))
        if n >= 3 and n % 3 == 0:
            results.append(("random-3", H.partition_cost(g, H.random_balanced_kpartition(g, 3)), opt3))
            tri = H.tripartition_via_independent(g)
            if tri is not None:
                results.append(("tri-ind", H.partition_cost(g, tri), opt3))
        if n >= 2:
            alpha = Fraction(3, 5)
            if (alpha * n).__floor__() >= n - (alpha * n).__floor__():
                res = H.biased_unbalanced(g, alpha)
                results.append(("biased", res.cost, solve_subset(g, len(res.vertices), "two_sided")[1]))
        if n % 4 == 0 and n:
            res = H.three_quarters_sparse(g, exact_limit=0)
            results.append(("three-quarters", res.cost, solve_subset(g, 3 * n // 4, "sparse")[1]))
        for name, cost, opt in results:
            applied += 1
            if cost < opt:
                below.append((graph6.encode(g), name))
    ok = not below and not over_bound
    report("8", ok, f"{applied} heuristic runs >= optimum (violations={below[:3]}); "
                    f"independent_bisection <= floor(n^2/16) failures={over_bound[:3]}")


@pytest.mark.xfail(strict=True, reason="K_{3,1} exceeds n^2/18 at n=4; the bound is asymptotic")
def test_9a_t6_small_even_n():
    summary = lab.SweepSummary()
    for rec in lab.sweep(range(2, 9, 2), 3, ["T6"]):
        summary.add(rec)
    report("9a", not summary.violations,
           f"T6 on even n<=8: violations={[v['g6'] for v in summary.violations]} (exploratory)")


def test_9b_k4_claims():
    summary = lab.SweepSummary()
    for rec in lab.sweep(range(1, 8), 4, ["K4_A", "K4_B", "K4_C"]):
        summary.add(rec)
    counts = {c: {s: v for s, v in per.items() if v} for c, per in summary.by_claim.items()}
    report("9b", not summary.violations, f"K4-free n<=7: {counts}; violations={summary.violations}")


def test_9c_independent_set_bound():
    failures = []
    checked = 0
    for r in (2, 3):
        for n in range(1, 9):
            for g in enumerate_free(n, r + 1):
                checked += 1
                if lab.independent_set_bound(g, r) > independence_number(g):
                    failures.append((r, graph6.encode(g)))
    report("9c", not failures, f"{checked} K_(r+1)-free graphs, r in (2,3), n<=8; failures={failures[:3]}")


def _cli(args, stdin=""):
    proc = subprocess.run([sys.executable, "-m", "tfpart", *args], input=stdin,
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout


def test_10_determinism(tmp_path):
    graphs = "\n".join(graph6.encode(g) for g in enumerate_free(8, 3)) + "\n"
    runs = [
        (["heur", "--method", "random-k", "--k", "3", "--seed", "11"], graphs),
        (["heur", "--method", "biased", "--alpha", "3/5", "--seed", "5"], graphs),
        (["heur", "--method", "nbhd", "--vertex", "0", "--seed", "2"], graphs),
        (["check", "--claims", "T1,T5,RAZ", "--n-range", "4..7", "--threads", "2"], ""),
    ]
    differ = []
    for args, stdin in runs:
        if _cli(args, stdin) != _cli(args, stdin):
            differ.append(" ".join(args))
    figs = []
    for name in ("a", "b"):
        out = tmp_path / name
        _cli(["check", "--claims", "T1", "--n-range", "4..6", "--figures", str(out)])
        figs.append((out / "T1.png").read_bytes())
    ok = not differ and figs[0] == figs[1]
    report("10", ok, f"{len(runs)} seeded commands and a figure run repeated byte-identically; differing={differ}")
