"""Pattern and pattern-set types shared by mining, selection and evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from .graph import (CanonicalCode, GraphFormatError, LabeledGraph, canonical_code,
                    read_blocks)


@dataclass(frozen=True)
class Pattern:
    """A connected subgraph stored in canonical node order.

    ``graph.nodes[i]`` is the label at canonical position ``i``.
    """

    graph: LabeledGraph
    code: CanonicalCode
    occurrences: FrozenSet[str] = frozenset()
    id: str = ""
    mutation_probability: Optional[float] = field(default=None, compare=False)

    @classmethod
    def from_graph(cls, g: LabeledGraph, occurrences: Iterable[str] = (), id: str = "") -> "Pattern":
        code = canonical_code(g)
        graph = g.relabel(code.node_order)
        graph = LabeledGraph(graph.nodes, graph.edges, id=id or g.id)
        code = CanonicalCode(code.edges, code.labels, tuple(range(g.order)))
        return cls(graph=graph, code=code, occurrences=frozenset(occurrences), id=id or g.id)

    @property
    def order(self) -> int:
        return self.graph.order

    @property
    def size(self) -> int:
        return self.graph.size

    @property
    def support(self) -> int:
        return len(self.occurrences)

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.code.labels

    def with_occurrences(self, occ: Iterable[str]) -> "Pattern":
        return replace(self, occurrences=frozenset(occ))


@dataclass
class PatternSet:
    patterns: List[Pattern] = field(default_factory=list)
    meta: Dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.patterns)

    @property
    def groups(self) -> Dict[Tuple[int, int], List[Pattern]]:
        """Partition by (order, size); each group in canonical-code order."""
        out: Dict[Tuple[int, int], List[Pattern]] = {}
        for p in sorted(self.patterns, key=lambda p: p.code.key):
            out.setdefault((p.order, p.size), []).append(p)
        return dict(sorted(out.items()))

    def sorted(self) -> "PatternSet":
        return PatternSet(sorted(self.patterns, key=lambda p: p.code.key), dict(self.meta))

    def codes(self) -> List[CanonicalCode]:
        return [p.code for p in self.patterns]

    def by_code(self) -> Dict[CanonicalCode, Pattern]:
        return {p.code: p for p in self.patterns}


def group_patterns(omega: PatternSet) -> Dict[Tuple[int, int], List[Pattern]]:
    return omega.groups


# ---------------------------------------------------------------------------
# pattern file format


def format_patterns(ps: PatternSet) -> str:
    lines = [f"# {k}={v}" for k, v in sorted(ps.meta.items())]
    for p in ps.patterns:
        lines.append(f"t # {p.id}")
        lines.append(f"# support {p.support}")
        lines.extend(f"v {i} {lab}" for i, lab in enumerate(p.graph.nodes))
        lines.extend(f"e {u} {v}" for u, v in p.graph.edges)
        lines.append("s " + " ".join(sorted(p.occurrences)) if p.occurrences else "s")
    return "\n".join(lines) + "\n"


def parse_patterns(text: str, source: str = "<text>") -> PatternSet:
    meta: Dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("t"):
            break
        if line.startswith("#") and "=" in line:
            k, _, v = line.lstrip("#").strip().partition("=")
            meta[k.strip()] = v.strip()
    patterns = []
    for b in read_blocks(text, source):
        g = b.graph(source)
        if not g.is_connected():
            raise GraphFormatError(f"pattern {b.id!r} must be connected", b.line, source)
        occ = b.occurrences or []
        if b.support is not None and b.occurrences is not None and b.support != len(set(occ)):
            raise GraphFormatError(f"pattern {b.id!r}: support {b.support} but "
                                   f"{len(set(occ))} occurrences listed", b.line, source)
        patterns.append(Pattern.from_graph(g, occ, id=b.id))
    return PatternSet(patterns, meta)
