import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oracles import has_coloring, naive_always_colorable
from weakflex.choosability import (color_with_lists, colorable_for_all_assignments, degree_feasibility_shortcut,
                                   is_gallai_tree, is_proper_coloring)
from weakflex.errors import ContractError, MalformedInputError
from weakflex.generator import figure1_chain
from weakflex.graph import Graph


def cycle(n):
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def diamond():
    # middles 0, 1; sides 2, 3
    return Graph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3)))


@st.composite
def budgeted_graphs(draw, max_n=5, max_f=3):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    f = draw(st.lists(st.integers(1, max_f), min_size=n, max_size=n))
    return Graph(n, tuple(edges)), f


def test_fixed_lists():
    assert color_with_lists(Graph(1), [[1]]) == [1]
    assert color_with_lists(cycle(3), [[1, 2]] * 3) is None
    assert color_with_lists(figure1_chain(5).graph, [[1, 2, 3]] * 16) is None
    col = color_with_lists(cycle(4), [[1, 2]] * 4)
    assert is_proper_coloring(cycle(4), col, [[1, 2]] * 4)
    with pytest.raises(MalformedInputError):
        color_with_lists(Graph(1), [[]])


def test_known_universal_verdicts():
    assert colorable_for_all_assignments(Graph(1), [1]).always
    assert colorable_for_all_assignments(cycle(4), [2] * 4).always
    v = colorable_for_all_assignments(cycle(3), [2] * 3)
    assert not v.always and v.witness == {0: [1, 2], 1: [1, 2], 2: [1, 2]}
    assert colorable_for_all_assignments(diamond(), [3, 3, 2, 2]).always


def test_complete_bipartite_choosability():
    def kmn(m, n):
        return Graph(m + n, tuple((i, m + j) for i in range(m) for j in range(n)))

    assert colorable_for_all_assignments(kmn(2, 3), [2] * 5).always
    assert not colorable_for_all_assignments(kmn(2, 4), [2] * 6).always
    assert not colorable_for_all_assignments(kmn(3, 3), [2] * 6).always


def test_gallai_trees():
    assert is_gallai_tree(Graph(4, ((0, 1), (1, 2), (1, 3))))
    assert is_gallai_tree(cycle(5))
    assert not is_gallai_tree(diamond())
    assert not is_gallai_tree(cycle(4))
    with pytest.raises(ContractError):
        is_gallai_tree(Graph(2))


def test_degree_shortcut():
    path = Graph(3, ((0, 1), (1, 2)))
    assert degree_feasibility_shortcut(path, [2, 2, 2]) is True
    assert degree_feasibility_shortcut(diamond(), [3, 3, 2, 2]) is True
    assert degree_feasibility_shortcut(cycle(3), [2, 2, 2]) is False


def test_witness_is_a_real_counterexample():
    g = Graph(6, tuple((i, 3 + j) for i in range(3) for j in range(3)))
    v = colorable_for_all_assignments(g, [2] * 6)
    assert all(len(v.witness[x]) == 2 for x in range(6))
    assert not has_coloring(g, [v.witness[x] for x in range(6)])


@settings(max_examples=120, deadline=None)
@given(budgeted_graphs(max_n=4))
def test_agrees_with_naive_enumeration(case):
    g, f = case
    assert colorable_for_all_assignments(g, f).always == naive_always_colorable(g, f)


@settings(max_examples=80, deadline=None)
@given(budgeted_graphs(max_n=6, max_f=4))
def test_shortcuts_do_not_change_the_verdict(case):
    g, f = case
    assert (colorable_for_all_assignments(g, f, shortcuts=True).always
            == colorable_for_all_assignments(g, f, shortcuts=False).always)


@settings(max_examples=80, deadline=None)
@given(budgeted_graphs(max_n=6), st.data())
def test_larger_budgets_never_hurt(case, data):
    g, f = case
    v = data.draw(st.integers(0, g.n - 1))
    more = list(f)
    more[v] += 1
    if colorable_for_all_assignments(g, f).always:
        assert colorable_for_all_assignments(g, more).always


@settings(max_examples=60, deadline=None)
@given(budgeted_graphs(max_n=6))
def test_decided_shortcut_is_sound(case):
    g, f = case
    decided = degree_feasibility_shortcut(g, f)
    if decided is not None:
        assert decided == colorable_for_all_assignments(g, f, shortcuts=False).always


def test_palette_bound_restricts_the_adversary():
    # C3 with budgets 2 needs only two colors to defeat it
    assert not colorable_for_all_assignments(cycle(3), [2] * 3, palette_bound=2).always
    # K_{2,4} needs four colors; with three available it is always colorable
    k24 = Graph(6, tuple((i, 2 + j) for i in range(2) for j in range(4)))
    assert colorable_for_all_assignments(k24, [2] * 6, palette_bound=3).always
    assert not colorable_for_all_assignments(k24, [2] * 6, palette_bound=4).always
