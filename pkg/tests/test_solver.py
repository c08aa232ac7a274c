import math

import pytest
from hypothesis import given, settings

from tfpart.errors import GuardExceeded, InfeasibleSpec
from tfpart.graphcore import Graph, complete_bipartite, cycle, edges_within, grotzsch, petersen
from tfpart.solver import (
    INF,
    CostVector,
    Partition,
    SizeSpec,
    brute_force_solve,
    brute_force_subset,
    parse_norm,
    solve,
    solve_subset,
)

from conftest import graphs


def cost(g, spec, p=1):
    return solve(g, spec, p)[1].norm(parse_norm(p))


def test_spec_parsing():
    assert SizeSpec.parse("balanced:2") == SizeSpec.balanced(2)
    assert SizeSpec.parse("exact:3,3") == SizeSpec.exact((3, 3))
    assert SizeSpec.parse("free:3") == SizeSpec.free(3)
    assert str(SizeSpec.parse("exact:2,1")) == "exact:2,1"
    assert parse_norm("inf") == INF and parse_norm("2") == 2
    with pytest.raises(ValueError):
        parse_norm("0")


def test_examples():
    assert cost(complete_bipartite(3, 1), SizeSpec.balanced(2)) == 1
    assert cost(complete_bipartite(5, 5), SizeSpec.balanced(2)) == 0
    assert cost(complete_bipartite(3, 3), SizeSpec.balanced(3)) == 1
    assert cost(complete_bipartite(5, 1), SizeSpec.balanced(3)) == 1
    assert cost(petersen(), SizeSpec.balanced(2)) == 4


def test_grotzsch_free3_golden():
    # one class-edge is unavoidable since the graph is 4-chromatic
    part, cv = solve(grotzsch(), SizeSpec.free(3))
    assert cv.norm(1) == 1
    assert brute_force_solve(grotzsch(), SizeSpec.free(3))[1].norm(1) == 1


def test_subset_examples():
    assert solve_subset(cycle(5), 2, "sparse")[1] == 0
    a, value = solve_subset(cycle(5), 3, "two_sided")
    assert value == 1 and a.members() == [0, 1, 3]
    assert solve_subset(complete_bipartite(3, 1), 3, "two_sided")[1] == 0


def test_lex_least_witness():
    # K_{3,1}: optimal balanced bipartitions all cost 1; lex-least assignment wins
    part, _ = solve(complete_bipartite(3, 1), SizeSpec.balanced(2))
    assert part.assign == (0, 0, 1, 1)
    assert brute_force_solve(complete_bipartite(3, 1), SizeSpec.balanced(2))[0] == part


def test_errors():
    with pytest.raises(InfeasibleSpec):
        solve(cycle(5), SizeSpec.exact((2, 2)))
    with pytest.raises(InfeasibleSpec):
        solve(cycle(5), SizeSpec.balanced(2, strict=True))
    with pytest.raises(GuardExceeded):
        solve(Graph.empty(25), SizeSpec.balanced(2))
    with pytest.raises(GuardExceeded):
        solve(Graph.empty(17), SizeSpec.free(3))


def test_guard_override():
    assert solve(Graph.empty(17), SizeSpec.free(2), guard=17)[1].norm(1) == 0


def test_cost_vector():
    cv = CostVector((3, 1, 2))
    assert cv.norm(1) == 6 and cv.norm(INF) == 3 and cv.norm(2) == 14
    assert cv.key(INF) == (3, 2, 1)


def test_partition_round_trip():
    part = Partition.from_classes(5, [[0, 3], [1, 2, 4]])
    assert part.assign == (0, 1, 1, 0, 1) and part.sizes() == [2, 3]
    assert [c.members() for c in part.classes()] == [[0, 3], [1, 2, 4]]


SPECS = [SizeSpec.balanced(2), SizeSpec.balanced(3), SizeSpec.free(2), SizeSpec.free(3), SizeSpec.exact((2, 1, 3))]


@settings(max_examples=40, deadline=None)
@given(graphs(min_n=6, max_n=8))
def test_solver_matches_brute_force_random(g):
    for spec in SPECS:
        if spec.kind == "exact" and sum(spec.sizes) != g.n:
            continue
        for p in (1, 2, INF):
            part, cv = solve(g, spec, p)
            bpart, bcv = brute_force_solve(g, spec, p)
            assert cv.key(p) == bcv.key(p)
            assert part == bpart
            assert CostVector.of(g, part) == cv


@settings(max_examples=40, deadline=None)
@given(graphs(min_n=1, max_n=9))
def test_subset_matches_brute_force(g):
    for m in {0, g.n // 2, (3 * g.n) // 4, g.n}:
        for objective in ("sparse", "two_sided"):
            a, value = solve_subset(g, m, objective)
            _, expected = brute_force_subset(g, m, objective)
            assert value == expected and len(a) == m
            recount = edges_within(g, a.bits) + (edges_within(g, a.complement().bits) if objective == "two_sided" else 0)
            assert recount == value


def test_balanced_sizes_near_balanced():
    part, _ = solve(cycle(7), SizeSpec.balanced(3))
    assert sorted(part.sizes()) == [2, 2, 3]
    assert math.isinf(parse_norm("inf"))
