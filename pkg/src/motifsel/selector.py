"""Greedy selection of unsubstituted patterns.

Patterns are grouped by (order, size) and sorted by mutation probability,
highest first. Each pattern with a positive mutation probability removes
every still-present pattern of the same shape with a strictly smaller
mutation probability that it substitutes at threshold ``tau``, absorbing its
occurrence set. Patterns with zero mutation probability are never compared.

Within a group only patterns of the same label-blind shape can interact, so
the scan runs per shape class with numpy over all candidates at once. Every
bijection between two patterns of a class is ``phi_q^-1 . a . phi_p`` for an
automorphism ``a`` of the class representative, which is how the canonical
(lexicographically smallest) bijection and the maximizing one are found.
``reference_select`` is the plain transcription used to cross-check this.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .graph import _bijections, shape_code
from .patterns import Pattern, PatternSet
from .substitution import (SubstitutionMatrix, pattern_mutation_probability, substitutes)

log = logging.getLogger(__name__)

BIJECTION_MODES = ("canonical", "maximizing")
MAXIMIZING_NODE_LIMIT = 8
_CHUNK = 1 << 22


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class SelectionConfig:
    tau: float
    matrix: SubstitutionMatrix
    bijection: str = "canonical"
    workers: int = 1

    def __post_init__(self):
        if not (0 <= self.tau <= 100):
            raise SelectionError(f"tau must be a percentage in [0, 100], got {self.tau}")
        if self.bijection not in BIJECTION_MODES:
            raise SelectionError(f"bijection mode must be one of {BIJECTION_MODES}")
        if self.workers < 1:
            raise SelectionError("workers must be >= 1")

    @property
    def threshold(self) -> float:
        return self.tau / 100.0


@dataclass(frozen=True)
class Removal:
    removed: str
    removed_code: str
    representative: str
    representative_code: str
    score: float


@dataclass(frozen=True)
class GroupStats:
    order: int
    size: int
    before: int
    after: int
    seconds: float


@dataclass
class SelectionReport:
    selected: PatternSet
    removals: List[Removal]
    groups: List[GroupStats]
    before: int
    seconds: float = 0.0

    @property
    def after(self) -> int:
        return len(self.selected)

    @property
    def selection_rate(self) -> float:
        return self.after * 100.0 / self.before if self.before else 100.0


# ---------------------------------------------------------------------------
# fast path


def _mutation_probabilities(patterns: Sequence[Pattern], m: SubstitutionMatrix) -> List[float]:
    cache: Dict[Tuple[str, ...], float] = {}
    out = []
    for p in patterns:
        key = tuple(sorted(p.labels))
        if key not in cache:
            try:
                cache[key] = pattern_mutation_probability(m, p)
            except KeyError as exc:
                raise SelectionError(f"pattern {p.id or p.code}: {exc.args[0]}") from None
        out.append(cache[key])
    return out


def _automorphisms(pairs: Tuple[Tuple[int, int], ...], n: int) -> np.ndarray:
    adj = [set() for _ in range(n)]
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    return np.array(list(_bijections(adj, adj, False)), dtype=np.int64).reshape(-1, n)


class _ShapeClass:
    def __init__(self, code_pairs, k: int):
        self.k = k
        self.aut = _automorphisms(code_pairs, k)
        self.members: List[int] = []
        self.phi_inv: List[Tuple[int, ...]] = []

    def finalize(self, labels: np.ndarray, mp: List[float]):
        self.idx = np.array(self.members, dtype=np.int64)
        self.phi_inv_arr = np.array(self.phi_inv, dtype=np.int64).reshape(-1, self.k)
        self.phi = np.argsort(self.phi_inv_arr, axis=1)
        self.lab = labels[self.idx]
        self.mp = np.array([mp[i] for i in self.members])
        self.weights = self.k ** np.arange(self.k - 1, -1, -1, dtype=np.int64)


def _scores(sc: _ShapeClass, r: int, cand: np.ndarray, table: np.ndarray,
            maximizing: bool) -> np.ndarray:
    k = sc.k
    targets = sc.aut[:, sc.phi[r]]  # (A, k) shape positions reached from r's positions
    n_aut = targets.shape[0]
    step = max(1, _CHUNK // (n_aut * k))
    rows = table[sc.lab[r]]  # (k, |L|): substitution of any label by r's label at each position
    out = np.empty(len(cand))
    for s in range(0, len(cand), step):
        c = cand[s:s + step]
        pi = sc.phi_inv_arr[c][:, targets]  # (c, A, k) candidate positions
        if maximizing:
            qlab = sc.lab[c[:, None, None], pi]
            vals = rows[np.arange(k), qlab]  # (c, A, k)
            total = vals[..., 0].copy()
            for i in range(1, k):
                total += vals[..., i]
            out[s:s + step] = (total / k).max(axis=1)
        else:
            if n_aut == 1:
                best = pi[:, 0, :]
            elif k <= 15:
                best = pi[np.arange(len(c)), (pi * sc.weights).sum(axis=2).argmin(axis=1)]
            else:
                best = np.array([min(map(tuple, row)) for row in pi])
            qlab = sc.lab[c[:, None], best]
            vals = rows[np.arange(k), qlab]  # (c, k)
            # left-to-right sum keeps results bit-identical to scalar scoring
            total = vals[:, 0].copy()
            for i in range(1, k):
                total += vals[:, i]
            out[s:s + step] = total / k
    return out


def _select_group(args):
    patterns, cfg = args
    t0 = time.perf_counter()
    m = cfg.matrix
    mp = _mutation_probabilities(patterns, m)
    order = sorted(range(len(patterns)), key=lambda i: (-mp[i], patterns[i].code.key))
    k = patterns[0].order
    if cfg.bijection == "maximizing" and k > MAXIMIZING_NODE_LIMIT:
        raise SelectionError(f"maximizing bijection mode is limited to patterns of "
                             f"<= {MAXIMIZING_NODE_LIMIT} nodes")
    try:
        labels = np.array([[m.index[lab] for lab in p.labels] for p in patterns],
                          dtype=np.int64).reshape(len(patterns), k)
    except KeyError:
        bad = next(p for p in patterns if any(lab not in m.index for lab in p.labels))
        raise SelectionError(f"pattern {bad.id or bad.code} has a label outside the matrix "
                             f"alphabet") from None

    classes: Dict[tuple, _ShapeClass] = {}
    for i in order:
        pairs, node_order = shape_code(patterns[i].graph.edges, k)
        sc = classes.get(pairs)
        if sc is None:
            sc = classes[pairs] = _ShapeClass(pairs, k)
        sc.members.append(i)
        sc.phi_inv.append(node_order)

    occ = [set(p.occurrences) for p in patterns]
    removed = np.zeros(len(patterns), dtype=bool)
    removals: List[Removal] = []
    table = m.substitution_table
    thr = cfg.threshold
    maximizing = cfg.bijection == "maximizing"
    for sc in classes.values():
        sc.finalize(labels, mp)
        alive = np.ones(len(sc.members), dtype=bool)
        positive = sc.mp > 0
        neg_mp = -sc.mp
        for r in range(len(sc.members)):
            if not alive[r] or not positive[r]:
                continue
            start = int(np.searchsorted(neg_mp, neg_mp[r], side="right"))
            cand = np.flatnonzero(alive[start:] & positive[start:]) + start
            if not len(cand):
                continue
            score = _scores(sc, r, cand, table, maximizing)
            hit = score >= thr
            if not hit.any():
                continue
            rep = sc.members[r]
            for c, s in zip(cand[hit], score[hit]):
                q = sc.members[c]
                occ[rep] |= occ[q]
                removed[q] = True
                removals.append(Removal(patterns[q].id, str(patterns[q].code),
                                        patterns[rep].id, str(patterns[rep].code), float(s)))
            alive[cand[hit]] = False
    kept = [Pattern(graph=p.graph, code=p.code, occurrences=frozenset(occ[i]), id=p.id,
                    mutation_probability=mp[i])
            for i, p in enumerate(patterns) if not removed[i]]
    stats = GroupStats(patterns[0].order, patterns[0].size, len(patterns), len(kept),
                       time.perf_counter() - t0)
    return kept, removals, stats


def _meta(cfg: SelectionConfig) -> Dict[str, str]:
    meta = {"tau": repr(cfg.tau), "matrix": cfg.matrix.name or "custom",
            "bijection": cfg.bijection}
    if cfg.matrix.bottom is not None:
        meta["bottom"] = repr(cfg.matrix.bottom)
    if cfg.matrix.top is not None:
        meta["top"] = repr(cfg.matrix.top)
    return meta


def select(omega: PatternSet, cfg: SelectionConfig) -> SelectionReport:
    """Select the unsubstituted patterns of ``omega``; groups may run in parallel."""
    t0 = time.perf_counter()
    groups = omega.groups
    jobs = [(g, cfg) for g in groups.values()]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_select_group, jobs))
    else:
        results = [_select_group(j) for j in jobs]
    kept: List[Pattern] = []
    removals: List[Removal] = []
    stats: List[GroupStats] = []
    for k, r, s in results:
        kept.extend(k)
        removals.extend(r)
        stats.append(s)
    meta = dict(omega.meta)
    meta.update(_meta(cfg))
    selected = PatternSet(sorted(kept, key=lambda p: p.code.key), meta)
    report = SelectionReport(selected, removals, stats, len(omega), time.perf_counter() - t0)
    log.info("selected %d of %d patterns (%.2f%%)", report.after, report.before,
             report.selection_rate)
    return report


# ---------------------------------------------------------------------------
# reference transcription


def reference_select(omega: PatternSet, cfg: SelectionConfig) -> PatternSet:
    """Line-by-line greedy selection, no caching or vectorization."""
    m = cfg.matrix
    maximizing = cfg.bijection == "maximizing"
    groups: Dict[Tuple[int, int], List[Pattern]] = {}
    for p in omega.patterns:
        groups.setdefault((p.order, p.size), []).append(p)
    result: List[Pattern] = []
    for key in sorted(groups):
        group = sorted(groups[key], key=lambda p: (-pattern_mutation_probability(m, p), p.code.key))
        supports = [set(p.occurrences) for p in group]
        removed = set()
        for i, p in enumerate(group):
            if i in removed:
                continue
            mp = pattern_mutation_probability(m, p)
            if mp > 0:
                for j, q in enumerate(group):
                    if j == i or j in removed:
                        continue
                    mq = pattern_mutation_probability(m, q)
                    if mq < mp and mq > 0:
                        if substitutes(m, p.graph, q.graph, cfg.tau, maximizing):
                            supports[i] |= supports[j]
                            removed.add(j)
        for i, p in enumerate(group):
            if i not in removed:
                result.append(p.with_occurrences(supports[i]))
    return PatternSet(sorted(result, key=lambda p: p.code.key))


# ---------------------------------------------------------------------------
# verification


@dataclass
class Verification:
    ok: bool
    reason: str = ""
    pair: Optional[Tuple[str, str]] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_selection(omega: PatternSet, report: SelectionReport,
                     cfg: SelectionConfig) -> Verification:
    """Check a report for idempotence, valid removals and no substitutable retained pair."""
    m = cfg.matrix
    maximizing = cfg.bijection == "maximizing"
    selected = report.selected
    by_id = {p.id: p for p in omega.patterns}
    kept_ids = {p.id for p in selected.patterns}

    for grp in selected.groups.values():
        mps = [pattern_mutation_probability(m, p) for p in grp]
        for a, p in enumerate(grp):
            for b, q in enumerate(grp):
                if mps[a] > mps[b] > 0 and substitutes(m, p.graph, q.graph, cfg.tau, maximizing):
                    return Verification(False, "retained pattern is substituted", (p.id, q.id))

    seen = set()
    for r in report.removals:
        if r.removed in seen:
            return Verification(False, "pattern removed twice", (r.representative, r.removed))
        seen.add(r.removed)
        if r.representative not in kept_ids:
            return Verification(False, "representative not retained", (r.representative, r.removed))
        p, q = by_id.get(r.representative), by_id.get(r.removed)
        if p is None or q is None:
            return Verification(False, "removal names an unknown pattern",
                                (r.representative, r.removed))
        if r.score < cfg.threshold or not substitutes(m, p.graph, q.graph, cfg.tau, maximizing):
            return Verification(False, "removed pattern is not substituted by its representative",
                                (r.representative, r.removed))
    if len(seen) + len(kept_ids) != len(omega):
        return Verification(False, "removals and retained patterns do not cover the input")

    again = select(selected, SelectionConfig(cfg.tau, m, cfg.bijection, 1)).selected
    if _signature(again) != _signature(selected):
        return Verification(False, "selection is not stable under reselection")
    return Verification(True)


def _signature(ps: PatternSet):
    return sorted((p.code.key, tuple(sorted(p.occurrences))) for p in ps.patterns)


# ---------------------------------------------------------------------------
# report output


def format_report(report: SelectionReport, cfg: SelectionConfig) -> str:
    lines = [
        "# selection report",
        f"patterns_before {report.before}",
        f"patterns_after {report.after}",
        f"selection_rate {report.selection_rate:.4f}",
        f"tau {cfg.tau:g}",
        f"matrix {cfg.matrix.name or 'custom'}",
        f"bijection {cfg.bijection}",
        f"seconds {report.seconds:.4f}",
        "",
        "# group order size before after seconds",
    ]
    for g in report.groups:
        lines.append(f"group {g.order} {g.size} {g.before} {g.after} {g.seconds:.4f}")
    lines += ["", "# removed representative score removed_code representative_code"]
    for r in report.removals:
        lines.append(f"removal {r.removed} {r.representative} {r.score:.6f} "
                     f"{r.removed_code} {r.representative_code}")
    return "\n".join(lines) + "\n"


def report_csv(report: SelectionReport) -> str:
    lines = ["group,order,size,before,after,seconds"]
    for g in report.groups:
        lines.append(f"{g.order}-{g.size},{g.order},{g.size},{g.before},{g.after},{g.seconds:.6f}")
    return "\n".join(lines) + "\n"
