"""Independent slow implementations used to check the library."""

import itertools
import math

from motifsel.graph import LabeledGraph


def exhaustive_shape_bijections(p: LabeledGraph, q: LabeledGraph):
    """Every label-blind adjacency-preserving bijection, by trying all n! maps."""
    if p.order != q.order or p.size != q.size:
        return []
    ep = {frozenset(e) for e in p.edges}
    eq = {frozenset(e) for e in q.edges}
    out = []
    for perm in itertools.permutations(range(q.order)):
        if {frozenset((perm[u], perm[v])) for u, v in ep} == eq:
            out.append(perm)
    return out


def exhaustive_label_isomorphic(p: LabeledGraph, q: LabeledGraph) -> bool:
    return any(all(p.nodes[u] == q.nodes[f[u]] for u in range(p.order))
               for f in exhaustive_shape_bijections(p, q))


def toy_scores():
    """Toy 2-letter matrix worked by hand: raw A,A=1; A,B=B,A=0; B,B=2."""
    e = math.e
    m_el_a = e / (e + 1)
    m_el_b = e ** 2 / (e ** 2 + 1)
    return {
        "m_el_a": m_el_a,
        "m_el_b": m_el_b,
        "m_patt_aa": 1 - m_el_a ** 2,
        "m_patt_ab": 1 - m_el_a * m_el_b,
        "s_el_ab": 1 / e,
        "s_el_ba": 1 / e ** 2,
        "s_patt_aa_ab": (1 + 1 / e) / 2,
        "s_patt_ab_aa": (1 + 1 / e ** 2) / 2,
    }


def classic_nb_accuracy(X, y, test_mask):
    """Textbook Bernoulli NB with Laplace smoothing, written with plain loops."""
    train = [i for i in range(len(y)) if not test_mask[i]]
    classes = sorted(set(y))
    correct = 0
    for i in (i for i in range(len(y)) if test_mask[i]):
        best, best_c = -math.inf, None
        for c in classes:
            rows = [r for r in train if y[r] == c]
            ll = math.log(len(rows) / len(train))
            for j in range(len(X[i])):
                p = (sum(X[r][j] for r in rows) + 1) / (len(rows) + 2)
                ll += math.log(p if X[i][j] else 1 - p)
            if ll > best:
                best, best_c = ll, c
        correct += best_c == y[i]
    return correct
