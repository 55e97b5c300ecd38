import random

import pytest

from conftest import cycle, path
from motifsel.graph import LabeledGraph, canonical_code, embeds
from motifsel.miner import MiningConfig, MiningError, brute_force_mine, mine
from motifsel.synth import random_connected_graph


def random_dataset(rng: random.Random, n_graphs=None, labels="ABC"):
    graphs = []
    for i in range(n_graphs or rng.randint(1, 5)):
        n = rng.randint(1, 6)
        size = rng.randint(n - 1, min(n * (n - 1) // 2, n + 2))
        g = random_connected_graph(rng, n, size, labels)
        graphs.append(LabeledGraph(g.nodes, g.edges, id=f"g{i}"))
    return graphs


def signature(ps):
    return [(p.code, p.occurrences) for p in ps]


def test_two_identical_edges():
    data = [path("A", "B", id="g0"), path("A", "B", id="g1")]
    ps = mine(data, MiningConfig(min_support=0.5))
    assert [str(p.code) for p in ps] == ["A:", "B:", "AB:0-1"]
    assert all(p.support == 2 for p in ps)


def test_triangle_count():
    ps = mine([cycle("A", "B", "C", id="t")], MiningConfig(min_support=1.0, max_edges=3))
    assert len(ps) == 10
    assert [p.size for p in ps].count(2) == 3
    assert signature(ps) == signature(brute_force_mine([cycle("A", "B", "C", id="t")],
                                                       MiningConfig(1.0, 3)))


def test_rare_label_excluded():
    data = [path("A", "B", "Z", id="g0"), path("A", "B", id="g1"), path("B", "A", id="g2")]
    ps = mine(data, MiningConfig(min_support=1.0))
    assert ps and all("Z" not in p.labels for p in ps)


def test_oracle_edge_cases():
    assert len(brute_force_mine([path("A", id="a"), path("B", id="b")], MiningConfig(1.0, 3))) == 0
    one = brute_force_mine([LabeledGraph("Q", [], id="q")], MiningConfig(1.0, 3))
    assert [str(p.code) for p in one] == ["Q:"]
    with pytest.raises(ValueError):
        brute_force_mine([path(*"ABCDEFGHI", id="x")], MiningConfig(0.5, 3))
    with pytest.raises(ValueError):
        brute_force_mine([path("A", "B", id="x")], MiningConfig(0.5, 7))


def test_matches_brute_force():
    rng = random.Random(99)
    for trial in range(50):
        data = random_dataset(rng)
        cfg = MiningConfig(min_support=rng.choice([0.2, 0.5, 1.0]), max_edges=rng.randint(1, 6))
        assert signature(mine(data, cfg)) == signature(brute_force_mine(data, cfg)), trial


def test_worker_count_irrelevant():
    rng = random.Random(4)
    data = random_dataset(rng, n_graphs=6)
    cfg = MiningConfig(0.3, 5)
    assert signature(mine(data, cfg, workers=1)) == signature(mine(data, cfg, workers=3))


def test_occurrences_genuine_and_complete():
    rng = random.Random(7)
    data = random_dataset(rng, n_graphs=5)
    cfg = MiningConfig(0.2, 4)
    for p in mine(data, cfg):
        occ = {g.id for g in data if embeds(p.graph, g)}
        assert p.occurrences == occ


def test_anti_monotone():
    rng = random.Random(8)
    data = random_dataset(rng, n_graphs=5)
    cfg = MiningConfig(0.4, 5)
    ps = mine(data, cfg)
    found = {p.code: p for p in ps}
    for p in ps:
        for e in p.graph.edges:
            rest = [x for x in p.graph.edges if x != e]
            sub = LabeledGraph(p.graph.nodes, rest)
            if p.size > 1 and sub.is_connected():
                used = sorted({x for f in rest for x in f})
                inv = {u: k for k, u in enumerate(used)}
                sub = LabeledGraph([p.graph.nodes[u] for u in used],
                                   [(inv[a], inv[b]) for a, b in rest])
                q = found[canonical_code(sub)]
                assert q.occurrences >= p.occurrences


def test_config_validation_and_limit():
    with pytest.raises(ValueError):
        MiningConfig(min_support=1.1)
    with pytest.raises(ValueError):
        MiningConfig(min_support=0)
    data = [cycle(*"ABCDE", id="g")]
    with pytest.raises(MiningError, match="support"):
        mine(data, MiningConfig(1.0, 5, max_patterns=5))


def test_min_edges_drops_single_nodes():
    data = [path("A", "B", id="g0")]
    ps = mine(data, MiningConfig(1.0, 3, min_edges=1))
    assert [str(p.code) for p in ps] == ["AB:0-1"]


def test_output_sorted_and_named():
    ps = mine(random_dataset(random.Random(2), n_graphs=4), MiningConfig(0.5, 4))
    keys = [p.code.key for p in ps]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert [p.id for p in ps] == [f"p{k}" for k in range(len(ps))]
