import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from motifsel.graph import LabeledGraph  # noqa: E402
from motifsel.patterns import Pattern, PatternSet  # noqa: E402
from motifsel.substitution import parse_matrix  # noqa: E402

TOY_MATRIX_TEXT = """\
   A  B
A  1  0
B  0  2
"""


def toy_matrix(**kw):
    return parse_matrix(TOY_MATRIX_TEXT, keep=None, name="toy", **kw)


def path(*labels, id=""):
    return LabeledGraph(list(labels), [(i, i + 1) for i in range(len(labels) - 1)], id=id)


def cycle(*labels, id=""):
    n = len(labels)
    return LabeledGraph(list(labels), [(i, (i + 1) % n) for i in range(n)], id=id)


def star(center, *leaves, id=""):
    return LabeledGraph([center, *leaves], [(0, i) for i in range(1, len(leaves) + 1)], id=id)


def pattern_set(graphs_and_occ):
    pats = [Pattern.from_graph(g, occ, id=f"p{k}") for k, (g, occ) in enumerate(graphs_and_occ)]
    return PatternSet(pats)


@pytest.fixture
def toy():
    return toy_matrix()


@pytest.fixture
def rng():
    return random.Random(1234)
