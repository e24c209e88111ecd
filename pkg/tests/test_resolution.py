import itertools
import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_max_satisfied, check_certificate, clique, cycle, book
from weakflex.errors import NoColoringError, PreconditionError, ResourceGuardError, MalformedInputError
from weakflex.forbidden import parse_family
from weakflex.generator import figure1_chain
from weakflex.graph import Graph
from weakflex.resolution import (Resolution, RequestInstance, Step, all_colorings, build_resolution,
                                 distribution_feasible, epsilon_parameters, max_satisfied, refactor_tight,
                                 satisfaction_ratio, verify_resolution)

F_C = parse_family("K4,C5,C6,C7,B5")
F_D = parse_family("K4,C5,C6,C7,B8")
FD_PATTERNS = (clique(4), cycle(5), cycle(6), cycle(7), book(8))


def tight_witness():
    """Two degree-2 vertices hang on the edge x-y of a triangle whose corners carry outside neighbours."""
    names = "x y z a b c d w1 w2".split()
    ix = {n: i for i, n in enumerate(names)}
    pairs = [("x", "y"), ("y", "z"), ("x", "z"), ("x", "a"), ("y", "b"), ("z", "c"), ("z", "d"),
             ("w1", "x"), ("w1", "y"), ("w2", "x"), ("w2", "y")]
    g = Graph(9, tuple((ix[u], ix[v]) for u, v in pairs), tuple(names))
    ids = lambda *vs: tuple(ix[v] for v in vs)  # noqa: E731
    steps = [Step("single", ids("w1"), ids("w1"), (), "degree-k-2"),
             Step("single", ids("w2"), ids("w2"), (), "degree-k-2"),
             Step("enhanced-weak", ids("x", "y", "z", "a", "b", "c", "d"), ids("x", "y", "z"), ids("x")),
             *[Step("enhanced-weak", ids(v), ids(v), ids(v)) for v in "abcd"]]
    return g, Resolution(steps, F_D, 4, 3, 2), ix


def test_path_resolution():
    p4 = Graph(4, ((0, 1), (1, 2), (2, 3)))
    for cat, fam in (("C", F_C), ("D", F_D)):
        res = build_resolution(p4, fam, 4, cat)
        assert len(res.steps) == 4
        assert verify_resolution(p4, res).valid


def test_chain_resolution():
    pg = figure1_chain(5)
    res = build_resolution(pg, F_D, 4, "D")
    rep = verify_resolution(pg, res)
    assert rep.valid, rep.failures
    assert res.b == 3 and res.beta == 80
    assert sum(len(s.reduced) for s in res.steps) == 16
    assert [s.source for s in res.steps[:3]] == ["D2"] * 3
    assert verify_resolution(pg, build_resolution(pg, F_C, 4, "C")).valid


def test_resolution_needs_a_free_graph():
    with pytest.raises(PreconditionError):
        build_resolution(clique(4), F_C)


def test_corrupted_size_is_caught():
    pg = figure1_chain(5)
    res = build_resolution(pg, F_D, 4, "D")
    res.b = 1
    reasons = {f["reason"] for f in verify_resolution(pg, res).failures}
    assert "size" in reasons


def test_corrupted_fix_is_caught():
    pg = figure1_chain(5)
    res = build_resolution(pg, F_D, 4, "D")
    s = res.steps[0]
    outside = next(v for v in s.vertices if v not in s.reduced) if set(s.vertices) - set(s.reduced) else None
    res.steps[0] = replace(s, fix=())
    assert "fix" in {f["reason"] for f in verify_resolution(pg, res).failures}
    if outside is not None:
        res.steps[0] = replace(s, fix=(outside,))
        assert not verify_resolution(pg, res).valid


def test_single_step_must_have_degree_k_minus_2():
    p3 = Graph(3, ((0, 1), (1, 2)))
    res = Resolution([Step("single", (0,), (0,)), Step("enhanced-weak", (1,), (1,), (1,)),
                      Step("enhanced-weak", (2,), (2,), (2,))], F_D, 4, 1, 0)
    assert "single" in {f["reason"] for f in verify_resolution(p3, res).failures}


def test_tight_vertices_counted_and_refactored():
    g, res, ix = tight_witness()
    rep = verify_resolution(g, res)
    assert rep.valid, rep.failures
    assert rep.tight_counts[2] == 2
    res.beta = 1
    assert "tight" in {f["reason"] for f in verify_resolution(g, res).failures}
    res.beta = 2
    out = refactor_tight(g, res)
    assert (out.b, out.beta) == (5, 0)
    merged = next(s for s in out.steps if ix["x"] in s.reduced)
    assert set(merged.reduced) == {ix[v] for v in ("x", "y", "z", "w1", "w2")}
    assert len(merged.vertices) == 7 + 2
    assert merged.fix == (ix["x"],)
    assert verify_resolution(g, out).valid
    assert all(s.kind != "single" for s in out.steps)


def test_refactor_without_tight_vertices_is_identity():
    pg = figure1_chain(5)
    res = build_resolution(pg, F_D)
    out = refactor_tight(pg, res)
    assert out.steps == res.steps and out.b == res.b + res.beta and out.beta == 0


def test_epsilon_parameters():
    eps = epsilon_parameters(4, 3, 2)
    assert eps["p"] == Fraction(1, 4 ** 5)
    assert eps["eps_prime"] == Fraction(1, 4 ** 15)
    assert eps["eps_prime_over_b"] == Fraction(1, 3 * 4 ** 15)


# --- distributions -----------------------------------------------------------------------

def test_single_vertex_distribution_is_uniform():
    cert = distribution_feasible(Graph(1), [[1, 2, 3, 4]], [0], F_D, 4, 1, 0)
    assert cert.p == Fraction(1, 4) and cert.eps_prime == Fraction(1, 64)
    assert sorted(q for _, q in cert.support) == [Fraction(1, 4)] * 4


def test_triangle_distribution():
    tri = clique(3)
    lists = [[1, 2, 3, 4]] * 3
    cert = distribution_feasible(tri, lists, [0], F_D, 4, 3, 0)
    assert cert is not None and len(cert.support) == 24
    assert check_certificate(cert, tri, lists, [0], 4, FD_PATTERNS) == []


def test_no_coloring_means_no_certificate():
    assert distribution_feasible(clique(3), [[1, 2]] * 3, [0], F_D, 4, 3, 0) is None


def test_coloring_guard():
    with pytest.raises(ResourceGuardError):
        all_colorings(Graph(8), [[1, 2, 3, 4]] * 8)


# --- request satisfaction ------------------------------------------------------------------

def test_widespread_triangle():
    assert max_satisfied(clique(3), RequestInstance.widespread([[1, 2, 3]] * 3)) == (1, [1, 2, 3])


def test_no_coloring_raises():
    with pytest.raises(NoColoringError):
        max_satisfied(clique(3), RequestInstance.widespread([[1, 2]] * 3))


def test_request_validation():
    with pytest.raises(MalformedInputError):
        RequestInstance([[1, 2]], {0: 3})
    with pytest.raises(MalformedInputError):
        RequestInstance([[1, 2]], weights={(0, 1): -1})
    with pytest.raises(MalformedInputError):
        RequestInstance([[]])


def test_weighted_requests():
    p2 = Graph(2, ((0, 1),))
    inst = RequestInstance([[1, 2], [1, 2]], weights={(0, 1): Fraction(1, 2), (1, 1): 2})
    value, col = max_satisfied(p2, inst)
    assert value == 2 and col == [2, 1]
    assert satisfaction_ratio(value, inst) == Fraction(4, 5)


@st.composite
def request_instances(draw):
    n = draw(st.integers(1, 7))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=10)) if pairs else []
    lists = [sorted(draw(st.sets(st.integers(1, 4), min_size=1, max_size=3))) for _ in range(n)]
    if draw(st.booleans()):
        req = {v: draw(st.sampled_from(lists[v])) for v in range(n) if draw(st.booleans())}
        inst = RequestInstance(lists, req)
    else:
        w = {(v, c): draw(st.integers(0, 5)) for v in range(n) for c in lists[v] if draw(st.booleans())}
        inst = RequestInstance(lists, weights=w)
    return Graph(n, tuple(edges)), inst


@settings(max_examples=150, deadline=None)
@given(request_instances())
def test_max_satisfied_matches_enumeration(case):
    g, inst = case
    expected = brute_max_satisfied(g, inst.lists, inst.gain)
    if expected is None:
        with pytest.raises(NoColoringError):
            max_satisfied(g, inst)
    else:
        assert max_satisfied(g, inst) == expected


def test_max_satisfied_on_chain_is_fast_and_proper():
    pg = figure1_chain(5)
    rng = random.Random(1)
    lists = [rng.sample(range(1, 7), 4) for _ in range(16)]
    inst = RequestInstance(lists, {v: lists[v][0] for v in range(16)})
    value, col = max_satisfied(pg, inst)
    assert all(col[u] != col[v] for u, v in pg.graph.edges)
    assert value == sum(inst.gain(v, c) for v, c in enumerate(col))
