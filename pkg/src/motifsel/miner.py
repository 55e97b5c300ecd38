"""Frequent connected subgraph mining by DFS-code pattern growth.

Support is transactional: a pattern counts once per dataset graph that
contains it as a (not necessarily induced) subgraph. ``brute_force_mine`` is
an exhaustive reference used by the tests.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .graph import (CanonicalCode, LabeledGraph, is_min_code,
                    label_isomorphic, rightmost_path)
from .patterns import Pattern, PatternSet

log = logging.getLogger(__name__)


class MiningError(RuntimeError):
    pass


@dataclass(frozen=True)
class MiningConfig:
    min_support: float = 0.3
    max_edges: int = 10
    max_patterns: int = 2_000_000
    min_edges: int = 0

    def __post_init__(self):
        if not (0 < self.min_support <= 1):
            raise ValueError(f"min_support must be in (0, 1], got {self.min_support}")
        if self.max_edges < 1:
            raise ValueError(f"max_edges must be >= 1, got {self.max_edges}")
        if self.min_edges < 0 or self.min_edges > self.max_edges:
            raise ValueError("min_edges must be in [0, max_edges]")
        if self.max_patterns < 1:
            raise ValueError("max_patterns must be >= 1")

    def frequent(self, count: int, n_graphs: int) -> bool:
        return count / n_graphs >= self.min_support


def _too_many(cfg: MiningConfig):
    return MiningError(f"more than {cfg.max_patterns} frequent patterns; raise the minimum "
                       f"support or lower max_edges")


Embedding = Tuple[int, ...]
Projection = List[Tuple[int, Embedding]]  # (graph position, dfs index -> node)


class _Search:
    def __init__(self, graphs: Sequence[LabeledGraph], cfg: MiningConfig):
        self.graphs = graphs
        self.cfg = cfg
        self.n = len(graphs)
        self.found: List[Tuple[Tuple, frozenset]] = []

    def support(self, proj: Projection) -> int:
        return len({gi for gi, _ in proj})

    def seeds(self) -> Dict[Tuple, Projection]:
        seeds: Dict[Tuple, Projection] = {}
        for gi, g in enumerate(self.graphs):
            for u, v in g.edges:
                for a, b in ((u, v), (v, u)):
                    la, lb = g.nodes[a], g.nodes[b]
                    if la <= lb:
                        seeds.setdefault((0, 1, la, lb), []).append((gi, (a, b)))
        return {k: p for k, p in seeds.items() if self.cfg.frequent(self.support(p), self.n)}

    def grow(self, code: List[Tuple], proj: Projection):
        if not is_min_code(code):
            return
        self.found.append((tuple(code), frozenset(self.graphs[gi].id for gi, _ in proj)))
        if len(self.found) > self.cfg.max_patterns:
            raise _too_many(self.cfg)
        if len(code) >= self.cfg.max_edges:
            return
        rmpath = rightmost_path(code)
        rm = rmpath[-1]
        new = 1 + max(max(e[0], e[1]) for e in code)
        present = {(min(e[0], e[1]), max(e[0], e[1])) for e in code}
        labels = {}
        for i, j, li, lj in code:
            labels[i], labels[j] = li, lj
        ext: Dict[Tuple, Projection] = {}
        for gi, emb in proj:
            g = self.graphs[gi]
            nb_rm = g.neighbors(emb[rm])
            for j in rmpath[:-1]:
                if (j, rm) not in present and emb[j] in nb_rm:
                    ext.setdefault((rm, j, labels[rm], labels[j]), []).append((gi, emb))
            for i in rmpath:
                for w in g.neighbors(emb[i]):
                    if w not in emb:
                        ext.setdefault((i, new, labels[i], g.nodes[w]), []).append((gi, emb + (w,)))
        for key in sorted(ext, key=_ext_order):
            p = ext[key]
            if self.cfg.frequent(self.support(p), self.n):
                self.grow(code + [key], p)


def _ext_order(e: Tuple) -> Tuple:
    # backward (by target) before forward (deepest source first), then label
    i, j, _, lj = e
    return (0, j, "") if i > j else (1, -i, lj)


def _mine_seed(args) -> List[Tuple[Tuple, frozenset]]:
    graphs, cfg, key, proj = args
    s = _Search(graphs, cfg)
    s.grow([key], proj)
    return s.found


def _check(dataset: Sequence[LabeledGraph]):
    if not dataset:
        raise ValueError("dataset is empty")
    ids = [g.id for g in dataset]
    if len(set(ids)) != len(ids):
        raise ValueError("graph ids must be unique")


def _code_patterns(found) -> List[Pattern]:
    pats = []
    for code, occ in found:
        n = 1 + max(max(e[0], e[1]) for e in code) if code else 1
        labels = [None] * n
        for i, j, li, lj in code:
            labels[i], labels[j] = li, lj
        cc = CanonicalCode(tuple(code), tuple(labels), tuple(range(n)))
        pats.append(Pattern(graph=cc.to_graph(), code=cc, occurrences=occ))
    return pats


def _finish(pats: List[Pattern], cfg: MiningConfig) -> PatternSet:
    if len(pats) > cfg.max_patterns:
        raise _too_many(cfg)
    pats = [p for p in pats if p.size >= cfg.min_edges]
    pats.sort(key=lambda p: p.code.key)
    out = []
    for k, p in enumerate(pats):
        pid = f"p{k}"
        out.append(Pattern(graph=LabeledGraph(p.graph.nodes, p.graph.edges, id=pid),
                           code=p.code, occurrences=p.occurrences, id=pid))
    return PatternSet(out, {"min_support": repr(cfg.min_support), "max_edges": str(cfg.max_edges)})


def mine(dataset: Sequence[LabeledGraph], cfg: MiningConfig = MiningConfig(),
         workers: int = 1) -> PatternSet:
    """All frequent connected subgraphs with at most ``cfg.max_edges`` edges.

    Top-level seeds (frequent single edges) are independent subtrees and may
    be mined in parallel; the merged output is sorted by canonical code, so it
    does not depend on ``workers``.
    """
    _check(dataset)
    n = len(dataset)
    node_occ: Dict[str, set] = {}
    for g in dataset:
        for lab in g.nodes:
            node_occ.setdefault(lab, set()).add(g.id)
    pats = []
    for lab, occ in node_occ.items():
        if cfg.frequent(len(occ), n):
            cc = CanonicalCode((), (lab,), (0,))
            pats.append(Pattern(graph=cc.to_graph(), code=cc, occurrences=frozenset(occ)))

    seeds = _Search(dataset, cfg).seeds()
    jobs = [(dataset, cfg, key, seeds[key]) for key in sorted(seeds, key=lambda k: (k[2], k[3]))]
    edge_found: List[Tuple[Tuple, frozenset]] = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for part in ex.map(_mine_seed, jobs):
                edge_found.extend(part)
                if len(edge_found) > cfg.max_patterns:
                    raise _too_many(cfg)
    else:
        for job in jobs:
            edge_found.extend(_mine_seed(job))
            if len(edge_found) > cfg.max_patterns:
                raise _too_many(cfg)

    out = _finish(pats + _code_patterns(edge_found), cfg)
    log.info("mined %d patterns from %d graphs", len(out), n)
    return out


# ---------------------------------------------------------------------------
# exhaustive reference


ORACLE_MAX_NODES = 8
ORACLE_MAX_EDGES = 6


def _connected_edge_subsets(g: LabeledGraph, max_edges: int):
    """Every connected edge subset with 1..max_edges edges, each exactly once."""
    seen = set()
    frontier = {frozenset([e]) for e in g.edges}
    for size in range(1, max_edges + 1):
        seen |= frontier
        yield from frontier
        if size == max_edges:
            break
        nxt = set()
        for sub in frontier:
            touched = {x for e in sub for x in e}
            for e in g.edges:
                if e not in sub and (e[0] in touched or e[1] in touched):
                    nxt.add(sub | {e})
        frontier = nxt


def _subgraph(g: LabeledGraph, edges) -> LabeledGraph:
    nodes = sorted({x for e in edges for x in e})
    inv = {u: k for k, u in enumerate(nodes)}
    return LabeledGraph([g.nodes[u] for u in nodes], [(inv[u], inv[v]) for u, v in edges])


def _invariant(h: LabeledGraph) -> Tuple:
    degs = sorted((h.nodes[u], h.degree(u)) for u in range(h.order))
    return (h.order, h.size, tuple(degs))


def brute_force_mine(dataset: Sequence[LabeledGraph], cfg: MiningConfig = MiningConfig()) -> PatternSet:
    """Enumerate every connected subgraph and deduplicate by isomorphism testing."""
    _check(dataset)
    if cfg.max_edges > ORACLE_MAX_EDGES or any(g.order > ORACLE_MAX_NODES for g in dataset):
        raise ValueError(f"brute force mining is limited to graphs of <= {ORACLE_MAX_NODES} "
                         f"nodes and max_edges <= {ORACLE_MAX_EDGES}")
    classes: Dict[Tuple, List[Tuple[LabeledGraph, set]]] = {}

    def record(h: LabeledGraph, gid: str):
        bucket = classes.setdefault(_invariant(h), [])
        for rep, occ in bucket:
            if label_isomorphic(rep, h):
                occ.add(gid)
                return
        bucket.append((h, {gid}))

    for g in dataset:
        for lab in set(g.nodes):
            record(LabeledGraph([lab]), g.id)
        for sub in _connected_edge_subsets(g, cfg.max_edges):
            record(_subgraph(g, sub), g.id)

    n = len(dataset)
    pats = []
    for bucket in classes.values():
        for rep, occ in bucket:
            if cfg.frequent(len(occ), n):
                pats.append(Pattern.from_graph(rep, occ))
    return _finish(pats, cfg)
