import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import cycle, path, star
from motifsel.graph import (GraphError, GraphFormatError, LabeledGraph, all_shape_bijections,
                            canonical_code, embeds, is_min_code, label_isomorphic, order_size,
                            read_blocks, read_graphs, shape_isomorphic, write_graphs)
from motifsel.synth import random_connected_graph
from oracles import exhaustive_label_isomorphic, exhaustive_shape_bijections


@st.composite
def connected_graphs(draw, max_nodes=6, labels="ABC"):
    n = draw(st.integers(1, max_nodes))
    size = draw(st.integers(n - 1, n * (n - 1) // 2))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_connected_graph(random.Random(seed), n, size, labels)


def shuffled(g: LabeledGraph, rng: random.Random) -> LabeledGraph:
    perm = list(range(g.order))
    rng.shuffle(perm)
    return g.relabel(perm)


def test_construction_errors():
    with pytest.raises(GraphError):
        LabeledGraph("AB", [(0, 0)])
    with pytest.raises(GraphError):
        LabeledGraph("AB", [(0, 2)])
    with pytest.raises(GraphError):
        LabeledGraph("AB", [(0, 1), (1, 0)])


def test_order_size():
    assert order_size(LabeledGraph("A", [])) == (1, 0)
    assert order_size(cycle("A", "B", "C")) == (3, 3)
    assert order_size(path(*"ABCDE")) == (5, 4)


def test_single_node_code():
    code = canonical_code(LabeledGraph("A", []))
    assert code.edges == ()
    assert code.node_order == (0,)
    assert canonical_code(LabeledGraph("A", [])) != canonical_code(LabeledGraph("B", []))


def test_path_reversal_same_code():
    assert canonical_code(path("A", "B")) == canonical_code(path("B", "A"))
    assert canonical_code(path("A", "B", "C")) == canonical_code(path("C", "B", "A"))


def test_triangle_and_path_differ():
    tri, p3 = cycle("A", "B", "C"), path("A", "B", "C")
    assert not exhaustive_label_isomorphic(tri, p3)
    assert canonical_code(tri) != canonical_code(p3)


def test_disconnected_rejected():
    with pytest.raises(GraphError, match="pattern must be connected"):
        canonical_code(LabeledGraph("AB", []))


def test_shape_examples():
    assert shape_isomorphic(path("A", "B"), path("C", "D")) is not None
    assert shape_isomorphic(cycle("A", "B", "C"), path("A", "B", "C")) is None
    c4, s4 = cycle(*"AAAA"), star(*"AAAA")
    assert exhaustive_shape_bijections(c4, s4) == []
    assert shape_isomorphic(c4, s4) is None


def _positions(f, p, q):
    cp, cq = canonical_code(p), canonical_code(q)
    inv = {v: k for k, v in enumerate(cq.node_order)}
    return tuple(inv[f[cp.node_order[i]]] for i in range(p.order))


@settings(max_examples=150, deadline=None)
@given(connected_graphs(), st.integers(0, 2 ** 32 - 1))
def test_shape_matches_exhaustive_oracle(g, seed):
    rng = random.Random(seed)
    h = shuffled(random_connected_graph(rng, g.order, g.size, "ABC"), rng)
    h2 = shuffled(LabeledGraph(rng.choices("ABC", k=g.order), g.edges), rng)
    for q in (h, h2):
        oracle = exhaustive_shape_bijections(g, q)
        f = shape_isomorphic(g, q)
        assert (f is None) == (not oracle)
        assert (shape_isomorphic(q, g) is None) == (f is None)
        if f is None:
            continue
        as_maps = {tuple(m[u] for u in range(g.order)) for m in all_shape_bijections(g, q)}
        assert as_maps == set(oracle)
        # canonical choice: lexicographically smallest in canonical positions
        cands = [_positions(dict(enumerate(o)), g, q) for o in oracle]
        assert _positions(f, g, q) == min(cands)


@settings(max_examples=150, deadline=None)
@given(connected_graphs(), st.integers(0, 2 ** 32 - 1))
def test_code_invariant_under_renumbering(g, seed):
    h = shuffled(g, random.Random(seed))
    c = canonical_code(g)
    assert canonical_code(h) == c
    assert canonical_code(c.to_graph()) == c
    assert is_min_code(c.edges)
    assert label_isomorphic(g, h)
    assert shape_isomorphic(g, h) is not None


@settings(max_examples=150, deadline=None)
@given(connected_graphs(max_nodes=5, labels="AB"), connected_graphs(max_nodes=5, labels="AB"))
def test_code_equality_is_isomorphism(g, h):
    same = exhaustive_label_isomorphic(g, h)
    assert (canonical_code(g) == canonical_code(h)) == same
    assert label_isomorphic(g, h) == same


def test_embeds():
    g = cycle(*"ABCD")
    assert embeds(path("A", "B", "C"), g)
    assert embeds(path("D", "A"), g)
    assert not embeds(path("A", "C"), g)
    assert not embeds(cycle("A", "B", "C"), g)


def test_text_round_trip():
    gs = [LabeledGraph("ABC", [(0, 1), (1, 2)], id="x", tag="pos"), LabeledGraph("Q", [], id="y")]
    back = read_graphs(write_graphs(gs))
    assert [(g.id, g.nodes, g.edges, g.tag) for g in back] == \
        [(g.id, g.nodes, g.edges, g.tag) for g in gs]


def test_text_errors_name_line():
    with pytest.raises(GraphFormatError) as exc:
        read_graphs("t # a\nv 0 A\ne 0 5\n", source="f.graph")
    assert "f.graph" in str(exc.value)
    with pytest.raises(GraphFormatError, match=":2"):
        read_blocks("t # a\nv x A\n", source="f")
