import math

import pytest
from hypothesis import given, settings, strategies as st

from motifsel.ingest import (ContactConfig, ResidueParseError, build_contact_graph,
                             graph_from_text, parse_residues)

PDB = """\
HEADER    TEST
ATOM      1  N   ALA A   1       0.000   0.000   0.000  1.00  0.00           N
ATOM      2  CA  ALA A   1       1.000   0.000   0.000  1.00  0.00           C
ATOM      3  CA AGLY A   2       4.000   4.000   0.000  1.00  0.00           C
ATOM      4  CA BGLY A   2       9.000   9.000   0.000  1.00  0.00           C
ATOM      5  CA  TRP A   3      30.000   0.000   0.000  1.00  0.00           C
ENDMDL
ATOM      6  CA  LYS A   4       1.000   1.000   1.000  1.00  0.00           C
"""


def test_two_records_distance_five():
    recs = parse_residues("1,A,0,0,0\n2,G,3,4,0\n")
    assert [r.amino_acid for r in recs] == ["A", "G"]
    assert math.dist(recs[0].ca, recs[1].ca) == 5.0
    assert build_contact_graph(recs, ContactConfig(7.0)).edges == ((0, 1),)


def test_inclusive_boundary():
    recs = parse_residues("1,A,0,0,0\n2,G,7,0,0\n")
    assert build_contact_graph(recs, ContactConfig(7.0)).size == 1
    assert build_contact_graph(recs, ContactConfig(6.999)).size == 0


def test_empty_and_single():
    assert parse_residues("") == []
    g = build_contact_graph(parse_residues("1,M,0,0,0\n"))
    assert (g.order, g.size) == (1, 0)
    with pytest.raises(ValueError):
        build_contact_graph([])


@pytest.mark.parametrize("text, match", [
    ("1,J,0,0,0\n", "amino-acid"),
    ("1,A,0,x,0\n", "non-numeric"),
    ("1,A,0,0,0\n1,G,1,1,1\n", "duplicate"),
    ("1,A,0,0\n", "5"),
    ("1,A,0,nan,0\n", "finite"),
])
def test_parse_errors_name_line(text, match):
    with pytest.raises(ResidueParseError, match=match) as exc:
        parse_residues(text, source="bad.csv")
    assert str(exc.value).startswith("bad.csv:")


def test_header_comments_and_class():
    text = "# class neg\nposition,code,x,y,z\n2,L,0,0,0\n1,K,1,0,0\n"
    g = graph_from_text(text, id="x")
    assert g.nodes == ("K", "L") and g.tag == "neg"


def test_pdb_ca_extraction():
    recs = parse_residues(PDB)
    assert [r.amino_acid for r in recs] == ["A", "G", "W"]
    assert recs[1].ca == (4.0, 4.0, 0.0)
    g = build_contact_graph(recs)
    assert g.edges == ((0, 1),)


def test_bad_delta():
    for d in (0, -1, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            ContactConfig(d)


coords = st.lists(st.tuples(*[st.floats(-20, 20, allow_nan=False)] * 3), min_size=1, max_size=25)


@settings(max_examples=60, deadline=None)
@given(coords, st.floats(0.5, 15), st.floats(0.5, 15))
def test_edges_monotone_in_delta(xyz, d1, d2):
    text = "".join(f"{i + 1},A,{x!r},{y!r},{z!r}\n" for i, (x, y, z) in enumerate(xyz))
    recs = parse_residues(text)
    lo, hi = sorted((d1, d2))
    g_lo = build_contact_graph(recs, ContactConfig(lo))
    g_hi = build_contact_graph(recs, ContactConfig(hi))
    assert set(g_lo.edges) <= set(g_hi.edges)
    assert g_lo.order == len(xyz)
