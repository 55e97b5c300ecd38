"""Node-labeled undirected graphs, minimal DFS codes and label-blind isomorphism.

A ``LabeledGraph`` is immutable. Its canonical form is the minimum DFS code
(gSpan ordering) over edge tuples ``(from_pos, to_pos, from_label, to_label)``
together with the node order realizing it; canonical position ``i`` is what
pattern scoring calls ``P[i]``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

Edge = Tuple[int, int]
DFSEdge = Tuple[int, int, str, str]


class GraphError(ValueError):
    pass


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<text>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LabeledGraph:
    """Undirected graph with one label per node and unlabeled edges.

    ``tag`` is free metadata (the class label ``pos``/``neg`` for proteins).
    """

    nodes: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    id: str = ""
    tag: Optional[str] = None
    _adj: Tuple[frozenset, ...] = field(default=(), repr=False, compare=False)

    def __init__(self, nodes: Iterable[str], edges: Iterable[Sequence[int]] = (),
                 id: str = "", tag: Optional[str] = None):
        nodes = tuple(nodes)
        n = len(nodes)
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for {n} nodes")
            e = _norm_edge(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add(e)
        adj = [set() for _ in range(n)]
        for u, v in seen:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def size(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> frozenset:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.nodes)

    def relabel(self, order: Sequence[int]) -> "LabeledGraph":
        """Return the graph with node ``order[i]`` moved to index ``i``."""
        inv = {old: new for new, old in enumerate(order)}
        return LabeledGraph([self.nodes[o] for o in order],
                            [(inv[u], inv[v]) for u, v in self.edges],
                            id=self.id, tag=self.tag)


def order_size(g: LabeledGraph) -> Tuple[int, int]:
    return g.order, g.size


# ---------------------------------------------------------------------------
# canonical codes


@dataclass(frozen=True, order=False)
class CanonicalCode:
    """Minimum DFS code plus the node labels in canonical position order.

    Labels are kept alongside the edge tuples so that one-node graphs with
    different labels still get different codes.
    """

    edges: Tuple[DFSEdge, ...]
    labels: Tuple[str, ...]
    node_order: Tuple[int, ...] = field(compare=False, hash=False)

    @property
    def key(self) -> tuple:
        return (len(self.labels), len(self.edges), self.edges, self.labels)

    def __lt__(self, other: "CanonicalCode") -> bool:
        return self.key < other.key

    def __le__(self, other: "CanonicalCode") -> bool:
        return self.key <= other.key

    def __str__(self) -> str:
        return "".join(self.labels) + ":" + ",".join(f"{i}-{j}" for i, j, _, _ in self.edges)

    def to_graph(self, id: str = "") -> LabeledGraph:
        return LabeledGraph(self.labels, [(i, j) for i, j, _, _ in self.edges], id=id)


def rightmost_path(code: Sequence[Tuple[int, int]]) -> List[int]:
    """DFS indices on the rightmost path, root first."""
    if not code:
        return [0]
    parent = {}
    last = 0
    for e in code:
        i, j = e[0], e[1]
        if i < j:
            parent[j] = i
            last = max(last, j)
    path = [last]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _greedy_min_code(labels: Sequence, adj: Sequence[frozenset], target=None):
    """Grow the minimum DFS code of a connected graph one edge at a time.

    With ``target`` given, stop early and return ``None`` as soon as the greedy
    minimum departs from it (gSpan's minimality check).
    """
    n = len(labels)
    m = sum(len(a) for a in adj) // 2
    if n == 1:
        return (), [(0,)]
    if m == 0:
        raise GraphError("pattern must be connected")
    first = min((labels[u], labels[v]) for u in range(n) for v in adj[u])
    embs = [(u, v) for u in range(n) for v in adj[u] if (labels[u], labels[v]) == first]
    code: List[tuple] = [(0, 1, first[0], first[1])]
    if target is not None and code[0] != tuple(target[0]):
        return None
    pairs = {(0, 1)}
    rmpath = [0, 1]
    while len(code) < m:
        rm = rmpath[-1]
        step = None
        for j in rmpath[:-2]:
            if (j, rm) in pairs:
                continue
            kept = [e for e in embs if e[j] in adj[e[rm]]]
            if kept:
                embs = kept
                step = (rm, j, labels[embs[0][rm]], labels[embs[0][j]])
                pairs.add((j, rm))
                break
        if step is None:
            for i in reversed(rmpath):
                grown = [(labels[w], e + (w,)) for e in embs for w in adj[e[i]] if w not in e]
                if grown:
                    low = min(g[0] for g in grown)
                    embs = [e for lab, e in grown if lab == low]
                    new = len(embs[0]) - 1
                    step = (i, new, labels[embs[0][i]], low)
                    pairs.add((i, new))
                    rmpath = rmpath[: rmpath.index(i) + 1] + [new]
                    break
        if step is None:
            raise GraphError("pattern must be connected")
        if target is not None and step != tuple(target[len(code)]):
            return None
        code.append(step)
    if len(embs[0]) != n:
        raise GraphError("pattern must be connected")
    return tuple(code), embs


def canonical_code(g: LabeledGraph) -> CanonicalCode:
    if g.order == 0:
        raise GraphError("pattern must be connected")
    code, embs = _greedy_min_code(g.nodes, g._adj)
    order = min(embs)
    return CanonicalCode(edges=code, labels=tuple(g.nodes[o] for o in order), node_order=order)


def is_min_code(code: Sequence[DFSEdge]) -> bool:
    """True when ``code`` is the minimum DFS code of the graph it describes."""
    if not code:
        return True
    n = 1 + max(max(e[0], e[1]) for e in code)
    labels = [None] * n
    adj = [set() for _ in range(n)]
    for i, j, li, lj in code:
        labels[i], labels[j] = li, lj
        adj[i].add(j)
        adj[j].add(i)
    return _greedy_min_code(labels, [frozenset(a) for a in adj], target=code) is not None


@functools.lru_cache(maxsize=200_000)
def shape_code(pairs: Tuple[Edge, ...], n: int) -> Tuple[Tuple[Edge, ...], Tuple[int, ...]]:
    """Label-blind canonical form of a graph given as sorted edge pairs.

    Returns the unlabeled minimum DFS code (as position pairs) and the node
    order that realizes it.
    """
    adj = [set() for _ in range(n)]
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    code, embs = _greedy_min_code([0] * n, [frozenset(a) for a in adj])
    return tuple((i, j) for i, j, _, _ in code), min(embs)


# ---------------------------------------------------------------------------
# isomorphism


def _positional(g: LabeledGraph, code: CanonicalCode):
    inv = {old: new for new, old in enumerate(code.node_order)}
    adj = [set() for _ in range(g.order)]
    for u, v in g.edges:
        adj[inv[u]].add(inv[v])
        adj[inv[v]].add(inv[u])
    return adj


def _bijections(adj_p, adj_q, first_only: bool) -> Iterator[Tuple[int, ...]]:
    """Adjacency-preserving bijections, in lexicographic order of the image."""
    n = len(adj_p)
    deg_p = [len(a) for a in adj_p]
    deg_q = [len(a) for a in adj_q]
    image: List[int] = []
    used = [False] * n

    def extend(i: int):
        for c in range(n):
            if used[c] or deg_q[c] != deg_p[i]:
                continue
            if all((i2 in adj_p[i]) == (image[i2] in adj_q[c]) for i2 in range(i)):
                image.append(c)
                used[c] = True
                if i + 1 == n:
                    yield tuple(image)
                else:
                    yield from extend(i + 1)
                used[c] = False
                image.pop()

    if n == 0:
        yield ()
        return
    for b in extend(0):
        yield b
        if first_only:
            return


def shape_isomorphic(p: LabeledGraph, q: LabeledGraph) -> Optional[Dict[int, int]]:
    """Label-blind isomorphism ``f: V_p -> V_q`` or ``None``.

    Among all adjacency-preserving bijections the one whose sequence of mapped
    canonical positions is lexicographically smallest is returned.
    """
    if p.order != q.order or p.size != q.size:
        return None
    if sorted(p.degree(u) for u in range(p.order)) != sorted(q.degree(u) for u in range(q.order)):
        return None
    cp, cq = canonical_code(p), canonical_code(q)
    pi = next(_bijections(_positional(p, cp), _positional(q, cq), True), None)
    if pi is None:
        return None
    return {cp.node_order[i]: cq.node_order[pi[i]] for i in range(p.order)}


def all_shape_bijections(p: LabeledGraph, q: LabeledGraph) -> List[Dict[int, int]]:
    """Every label-blind isomorphism between ``p`` and ``q`` (node-index maps)."""
    if p.order != q.order or p.size != q.size:
        return []
    cp, cq = canonical_code(p), canonical_code(q)
    out = []
    for pi in _bijections(_positional(p, cp), _positional(q, cq), False):
        out.append({cp.node_order[i]: cq.node_order[pi[i]] for i in range(p.order)})
    return out


def label_isomorphic(p: LabeledGraph, q: LabeledGraph) -> bool:
    """Graph isomorphism respecting labels, by plain backtracking."""
    if p.order != q.order or p.size != q.size or sorted(p.nodes) != sorted(q.nodes):
        return False
    n = p.order
    image = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for c in range(n):
            if used[c] or q.nodes[c] != p.nodes[i] or q.degree(c) != p.degree(i):
                continue
            if all(p.has_edge(i, i2) == q.has_edge(c, image[i2]) for i2 in range(i)):
                image[i] = c
                used[c] = True
                if extend(i + 1):
                    return True
                used[c] = False
        return False

    return extend(0)


def embeds(pattern: LabeledGraph, g: LabeledGraph) -> bool:
    """True when ``pattern`` is a (not necessarily induced) subgraph of ``g``."""
    n = pattern.order
    if n > g.order or pattern.size > g.size:
        return False
    order = sorted(range(n), key=lambda u: -pattern.degree(u))
    image: Dict[int, int] = {}
    used = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        u = order[k]
        for c in range(g.order):
            if c in used or g.nodes[c] != pattern.nodes[u] or g.degree(c) < pattern.degree(u):
                continue
            if all(g.has_edge(c, image[w]) for w in pattern.neighbors(u) if w in image):
                image[u] = c
                used.add(c)
                if extend(k + 1):
                    return True
                used.discard(c)
                del image[u]
        return False

    return extend(0)


# ---------------------------------------------------------------------------
# text format


def format_graph(g: LabeledGraph, comments: Sequence[str] = ()) -> str:
    lines = [f"t # {g.id}"]
    if g.tag is not None:
        lines.append(f"# class {g.tag}")
    lines.extend(f"# {c}" for c in comments)
    lines.extend(f"v {i} {lab}" for i, lab in enumerate(g.nodes))
    lines.extend(f"e {u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def write_graphs(graphs: Iterable[LabeledGraph]) -> str:
    return "".join(format_graph(g) for g in graphs)


@dataclass
class GraphBlock:
    """Raw block read from the text format, before graph construction."""

    id: str
    line: int
    labels: Dict[int, str] = field(default_factory=dict)
    edges: List[Edge] = field(default_factory=list)
    tag: Optional[str] = None
    support: Optional[int] = None
    occurrences: Optional[List[str]] = None
    comments: List[str] = field(default_factory=list)

    def graph(self, source: str = "<text>") -> LabeledGraph:
        n = len(self.labels)
        if sorted(self.labels) != list(range(n)):
            raise GraphFormatError(f"graph {self.id!r}: vertex indices must be 0..{n - 1}",
                                   self.line, source)
        try:
            return LabeledGraph([self.labels[i] for i in range(n)], self.edges,
                                id=self.id, tag=self.tag)
        except GraphError as exc:
            raise GraphFormatError(f"graph {self.id!r}: {exc}", self.line, source) from None


def read_blocks(text: str, source: str = "<text>") -> List[GraphBlock]:
    """Parse ``t``/``v``/``e`` blocks plus ``s``/``x`` occurrence lines.

    Accepts gSpan-style headers (``t # 3 * 12``) and ignores edge labels.
    """
    blocks: List[GraphBlock] = []
    cur: Optional[GraphBlock] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "t":
            if len(parts) >= 3 and parts[1] == "#":
                gid = parts[2]
            elif len(parts) == 2:
                gid = parts[1]
            else:
                raise GraphFormatError("bad graph header", lineno, source)
            cur = GraphBlock(id=gid, line=lineno)
            if len(parts) >= 5 and parts[3] == "*":
                cur.support = _int(parts[4], lineno, source)
            blocks.append(cur)
            continue
        if head.startswith("#"):
            if cur is None:
                continue
            words = line.lstrip("#").split()
            if len(words) == 2 and words[0] == "class":
                cur.tag = words[1]
            elif len(words) == 2 and words[0] == "support":
                cur.support = _int(words[1], lineno, source)
            elif words:
                cur.comments.append(" ".join(words))
            continue
        if cur is None:
            raise GraphFormatError(f"{head!r} line before any 't' header", lineno, source)
        if head == "v":
            if len(parts) < 3:
                raise GraphFormatError("vertex line needs index and label", lineno, source)
            idx = _int(parts[1], lineno, source)
            if idx in cur.labels:
                raise GraphFormatError(f"duplicate vertex {idx}", lineno, source)
            cur.labels[idx] = parts[2]
        elif head == "e":
            if len(parts) < 3:
                raise GraphFormatError("edge line needs two endpoints", lineno, source)
            cur.edges.append((_int(parts[1], lineno, source), _int(parts[2], lineno, source)))
        elif head in ("s", "x"):
            cur.occurrences = (cur.occurrences or []) + parts[1:]
        else:
            raise GraphFormatError(f"unknown line type {head!r}", lineno, source)
    return blocks


def _int(tok: str, lineno: int, source: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"expected integer, got {tok!r}", lineno, source) from None


def read_graphs(text: str, source: str = "<text>") -> List[LabeledGraph]:
    return [b.graph(source) for b in read_blocks(text, source)]
