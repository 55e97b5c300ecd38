"""Synthetic graphs, pattern sets and toy proteins for tests and benchmarks."""

from __future__ import annotations

import random
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .graph import LabeledGraph, canonical_code
from .patterns import Pattern, PatternSet

# rough amino-acid background frequencies (percent), used to skew labels
AA_FREQ = {
    "A": 8.3, "R": 5.5, "N": 4.1, "D": 5.5, "C": 1.4, "Q": 3.9, "E": 6.7, "G": 7.1,
    "H": 2.3, "I": 5.9, "L": 9.7, "K": 5.8, "M": 2.4, "F": 3.9, "P": 4.7, "S": 6.6,
    "T": 5.3, "W": 1.1, "Y": 2.9, "V": 6.9,
}


def random_connected_graph(rng: random.Random, order: int, size: int,
                           labels: Sequence[str], weights: Optional[Sequence[float]] = None,
                           id: str = "") -> LabeledGraph:
    """Random spanning tree on ``order`` nodes plus extra random edges up to ``size``."""
    max_size = order * (order - 1) // 2
    if not (order - 1 <= size <= max_size):
        raise ValueError(f"no connected graph with {order} nodes and {size} edges")
    edges = set()
    for v in range(1, order):
        u = rng.randrange(v)
        edges.add((u, v))
    rest = [(u, v) for u in range(order) for v in range(u + 1, order) if (u, v) not in edges]
    rng.shuffle(rest)
    edges.update(rest[: size - len(edges)])
    nodes = rng.choices(list(labels), weights=weights, k=order)
    perm = list(range(order))
    rng.shuffle(perm)
    return LabeledGraph([nodes[perm[i]] for i in range(order)],
                        [(perm.index(u), perm.index(v)) for u, v in edges], id=id)


def random_pattern_set(rng: random.Random, n: int, max_nodes: int = 5,
                       labels: Sequence[str] = "AB", n_graphs: int = 10,
                       shapes: Optional[List[Tuple[int, int]]] = None,
                       max_tries: int = 50) -> PatternSet:
    """``n`` distinct random connected patterns with random occurrence sets."""
    gids = [f"g{i}" for i in range(n_graphs)]
    seen = {}
    tries = 0
    while len(seen) < n and tries < n * max_tries:
        tries += 1
        if shapes:
            order, size = rng.choice(shapes)
        else:
            order = rng.randint(1, max_nodes)
            size = rng.randint(order - 1, min(order * (order - 1) // 2, order + 2))
        g = random_connected_graph(rng, order, size, labels)
        occ = rng.sample(gids, rng.randint(1, n_graphs))
        p = Pattern.from_graph(g, occ)
        seen.setdefault(p.code, p)
    pats = sorted(seen.values(), key=lambda p: p.code.key)
    return PatternSet([Pattern(graph=LabeledGraph(p.graph.nodes, p.graph.edges, id=f"p{k}"),
                               code=p.code, occurrences=p.occurrences, id=f"p{k}")
                       for k, p in enumerate(pats)])


def shape_class_patterns(rng: random.Random, n: int, order: int, size: int,
                         labels: Sequence[str], n_shapes: int = 1,
                         n_graphs: int = 10) -> PatternSet:
    """Up to ``n`` patterns over ``n_shapes`` label-blind shapes of one (order, size).

    Within a shape no two patterns share a label multiset, so ties in mutation
    probability only happen by numerical coincidence.
    """
    gids = [f"g{i}" for i in range(n_graphs)]
    skeletons: List[LabeledGraph] = []
    keys = set()
    for _ in range(50 * n_shapes):
        if len(skeletons) == n_shapes:
            break
        g = random_connected_graph(rng, order, size, labels[:1])
        if canonical_code(g) not in keys:
            keys.add(canonical_code(g))
            skeletons.append(g)
    seen = {}
    used = set()
    for _ in range(50 * n):
        if len(seen) >= n:
            break
        k = rng.randrange(len(skeletons))
        nodes = rng.choices(list(labels), k=order)
        if (k, tuple(sorted(nodes))) in used:
            continue
        used.add((k, tuple(sorted(nodes))))
        p = Pattern.from_graph(LabeledGraph(nodes, skeletons[k].edges),
                               rng.sample(gids, rng.randint(1, n_graphs)))
        seen.setdefault(p.code, p)
    pats = sorted(seen.values(), key=lambda p: p.code.key)
    return PatternSet([Pattern(graph=LabeledGraph(p.graph.nodes, p.graph.edges, id=f"p{k}"),
                               code=p.code, occurrences=p.occurrences, id=f"p{k}")
                       for k, p in enumerate(pats)])


# shape mix loosely following mined contact-graph patterns: many small,
# fairly dense patterns, mass peaking around 4-5 edges
_BENCH_SHAPES = [
    ((1, 0), 1), ((2, 1), 3), ((3, 2), 6), ((3, 3), 4), ((4, 3), 8), ((4, 4), 7),
    ((4, 5), 4), ((4, 6), 1), ((5, 4), 8), ((5, 5), 8), ((5, 6), 6), ((5, 7), 4),
    ((6, 5), 6), ((6, 6), 6), ((6, 7), 5), ((6, 8), 3), ((7, 6), 4), ((7, 7), 4),
    ((7, 8), 3), ((8, 7), 3), ((8, 8), 2), ((8, 9), 2),
]


def benchmark_patterns(n: int, seed: int = 0, n_graphs: int = 66) -> PatternSet:
    """``n`` distinct patterns of up to 8 nodes over the amino-acid alphabet."""
    rng = random.Random(seed)
    shapes = [s for s, _ in _BENCH_SHAPES]
    wts = [w for _, w in _BENCH_SHAPES]
    labels = list(AA_FREQ)
    lw = list(AA_FREQ.values())
    gids = [f"g{i}" for i in range(n_graphs)]
    lo = max(1, int(0.3 * n_graphs))
    seen = {}
    singles = set()
    while len(seen) < n:
        order, size = rng.choices(shapes, weights=wts)[0]
        if order == 1 and len(singles) == len(labels):
            continue
        g = random_connected_graph(rng, order, size, labels, lw)
        p = Pattern.from_graph(g, rng.sample(gids, rng.randint(lo, n_graphs)))
        seen.setdefault(p.code, p)
        if order == 1:
            singles.add(p.code)
    pats = sorted(seen.values(), key=lambda p: p.code.key)
    return PatternSet([Pattern(graph=LabeledGraph(p.graph.nodes, p.graph.edges, id=f"p{k}"),
                               code=p.code, occurrences=p.occurrences, id=f"p{k}")
                       for k, p in enumerate(pats)])


# ---------------------------------------------------------------------------
# toy proteins

# residues of the planted motif; each slot draws from a family of
# mutually similar amino acids
MOTIF_FAMILIES = ("ILV", "DE", "KR", "FY")


def _chain(rng: np.random.Generator, n: int) -> np.ndarray:
    """Compact self-avoiding-ish Calpha trace with 3.8 A steps."""
    pts = [np.zeros(3)]
    direction = rng.normal(size=3)
    while len(pts) < n:
        direction = direction / np.linalg.norm(direction)
        step = direction + 0.9 * rng.normal(size=3)
        # pull towards the centroid to keep the chain globular
        step -= 0.08 * (pts[-1] - np.mean(pts, axis=0))
        step = 3.8 * step / np.linalg.norm(step)
        cand = pts[-1] + step
        if len(pts) > 2 and np.min(np.linalg.norm(np.array(pts[:-1]) - cand, axis=1)) < 3.5:
            direction = rng.normal(size=3)
            continue
        pts.append(cand)
        direction = step
    return np.array(pts)


def toy_proteins(n_per_class: int = 10, length: int = 36, seed: int = 11):
    """Two-class residue tables: (protein id, class, codes, coordinates).

    Positive proteins carry a compact four-residue motif whose residues vary
    within ``MOTIF_FAMILIES``; negatives are background sequence only.
    """
    rng = np.random.default_rng(seed)
    labels = list(AA_FREQ)
    p = np.array(list(AA_FREQ.values()))
    p = p / p.sum()
    out = []
    for cls in ("pos", "neg"):
        for k in range(n_per_class):
            coords = _chain(rng, length)
            seq = list(rng.choice(labels, size=length, p=p))
            if cls == "pos":
                centre = rng.integers(length)
                near = np.argsort(np.linalg.norm(coords - coords[centre], axis=1))[:4]
                for slot, res in enumerate(near):
                    fam = MOTIF_FAMILIES[slot]
                    seq[res] = fam[rng.integers(len(fam))]
            out.append((f"{cls}{k:02d}", cls, "".join(seq), coords))
    return out


def write_toy_dataset(directory, **kwargs) -> List[str]:
    """Write the toy proteins as residue CSV files; returns the file names."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for pid, cls, seq, coords in toy_proteins(**kwargs):
        lines = [f"# class {cls}"]
        for i, (aa, xyz) in enumerate(zip(seq, coords), 1):
            lines.append(f"{i},{aa},{xyz[0]:.3f},{xyz[1]:.3f},{xyz[2]:.3f}")
        (d / f"{pid}.csv").write_text("\n".join(lines) + "\n")
        names.append(f"{pid}.csv")
    return names
