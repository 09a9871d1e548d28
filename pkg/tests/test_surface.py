import math

import pytest

from pa_resonances.errors import DisconnectedSurface, NotAPermutation, ParseError
from pa_resonances.surface import (Origami, cone_data, l_origami, parse_origami, perm_cycles, perm_inverse,
                                   perm_power, torus)


def corner_classes(o):
    """Vertices by brute-force identification of square corners (union-find)."""
    n = o.n_squares
    parent = {(s, cx, cy): (s, cx, cy) for s in range(n) for cx in (0, 1) for cy in (0, 1)}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    for s in range(n):
        r, u = o.h[s], o.v[s]
        union((s, 1, 0), (r, 0, 0))
        union((s, 1, 1), (r, 0, 1))
        union((s, 0, 1), (u, 0, 0))
        union((s, 1, 1), (u, 1, 0))
    return {find(k) for k in parent}


def test_perm_helpers():
    p = (2, 0, 1, 3)
    assert perm_inverse(p) == [1, 2, 0, 3] or tuple(perm_inverse(p)) == (1, 2, 0, 3)
    assert sorted(len(c) for c in perm_cycles(p)) == [1, 3]
    assert tuple(perm_power(p, 3)) == (0, 1, 2, 3)


def test_torus():
    o = torus()
    assert o.genus == 1
    assert len(o.vertices) == 1
    assert o.singular_vertices == ()
    assert cone_data(o).gauss_bonnet_defect == 0


def test_l_origami_cone_point():
    o = l_origami()
    assert o.genus == 2
    assert [len(c) for c in o.vertices] == [3]
    assert o.singular_vertices == (0,)
    prof = cone_data(o)
    assert prof.cone_angles == (6 * math.pi,)
    assert prof.gauss_bonnet_defect == 0


@pytest.mark.parametrize("h,v", [
    ((0,), (0,)),
    ((1, 0, 2), (2, 1, 0)),
    ((1, 2, 0), (0, 2, 1)),
    ((1, 2, 3, 0), (1, 0, 3, 2)),
    ((1, 0, 3, 2), (2, 3, 1, 0)),
    ((1, 2, 3, 4, 0), (0, 2, 1, 4, 3)),
])
def test_vertex_count_matches_corner_identification(h, v):
    o = Origami(h, v)
    assert len(o.vertices) == len(corner_classes(o))
    # Euler characteristic V - E + F = V - 2N + N
    assert 2 - 2 * o.genus == len(o.vertices) - o.n_squares
    assert sum(o.cone_multiplicity(k) - 1 for k in range(len(o.vertices))) == 2 * o.genus - 2


def test_sectors_cover_each_corner_once():
    o = Origami((1, 2, 3, 0), (1, 0, 3, 2))
    seen = [key for sec in o.sectors for key in sec]
    assert len(seen) == 4 * o.n_squares
    assert len(set(seen)) == len(seen)
    for k, sec in enumerate(o.sectors):
        assert len(sec) == 4 * o.cone_multiplicity(k)
        for sq, cx, cy in sec:
            assert o.corner_vertex(sq, cx, cy) == k


def test_parse_roundtrip_and_relabel():
    text = "# L\nn=3\nh=2 1 3\nv=3 2 1\n"
    o = parse_origami(text)
    assert o == l_origami()
    assert parse_origami(o.serialize()) == o
    r = o.relabel((2, 0, 1))
    assert r.genus == o.genus and len(r.vertices) == len(o.vertices)


@pytest.mark.parametrize("text,exc", [
    ("n=2\nh=1 1\nv=1 2\n", NotAPermutation),
    ("n=2\nh=1 2\nv=1 2\n", DisconnectedSurface),
    ("n=2\nh=2 1\n", ParseError),
    ("n=2\nh=2 1\nv=1\n", ParseError),
    ("n=x\nh=1\nv=1\n", ParseError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_origami(text)


def test_bundled_files(data_dir):
    assert parse_origami((data_dir / "L3.txt").read_text()) == l_origami()
    assert parse_origami((data_dir / "torus.txt").read_text()) == torus()
