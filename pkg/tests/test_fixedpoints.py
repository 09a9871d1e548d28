import pytest

from pa_resonances import geometry as geo
from pa_resonances.automorphism import synthesize
from pa_resonances.fixedpoints import (enumerate_fixed_points, flat_trace, lefschetz_index, model_index,
                                       power_map)
from pa_resonances.homology import homology_action
from pa_resonances.surface import Origami, torus

from .conftest import CAT

L_COUNTS = [3, 35, 210, 1195, 6843]
NEG = ((-2, -1), (-1, -1))


@pytest.mark.parametrize("n", range(1, 9))
def test_torus_fixed_point_count(cat_map, n):
    recs = enumerate_fixed_points(cat_map, n)
    assert len(recs) == abs(2 - geo.trace(geo.mat_pow(CAT, n)))
    assert all(r.index == -1 for r in recs)


def test_negative_trace_torus_map():
    t = synthesize(torus(), NEG, 0)
    recs = enumerate_fixed_points(t, 1)
    assert len(recs) == 5 and all(r.index == 1 for r in recs)
    assert lefschetz_index(t, recs[0], method="pointwise") == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_l_map_counts_and_lefschetz_numbers(l_map, n):
    recs = enumerate_fixed_points(l_map, n)
    assert len(recs) == L_COUNTS[n - 1]
    vertex = [r for r in recs if r.kind == "singular"]
    assert len(vertex) == 1 and vertex[0].index == -5 and vertex[0].sheet_shift == 0
    assert sum(r.index for r in recs) == homology_action(l_map).lefschetz_number(n)


@pytest.mark.parametrize("n", [2, 3])
def test_power_methods_agree(l_map, n):
    a = enumerate_fixed_points(l_map, n, "synthesize")
    b = enumerate_fixed_points(l_map, n, "compose")
    assert [r.location for r in a] == [r.location for r in b]
    assert [r.index for r in a] == [r.index for r in b]


def test_power_map_vertex_action(l_map):
    assert power_map(l_map, 3).matrix == geo.mat_pow(l_map.matrix, 3)


@pytest.mark.parametrize("matrix,k,shift,expected", [
    (((5, 2), (2, 1)), 1, 0, -1),
    (((5, 2), (2, 1)), 2, 0, -3),
    (((5, 2), (2, 1)), 3, 0, -5),
    (((5, 2), (2, 1)), 4, 0, -7),
    (((5, 2), (2, 1)), 2, 1, 1),
    (((5, 2), (2, 1)), 3, 1, 1),
    (((5, 2), (2, 1)), 3, 2, 1),
    (NEG, 1, 0, 1),
    (NEG, 2, 0, 1),
    (NEG, 3, 1, 1),
])
def test_model_index_table(matrix, k, shift, expected):
    assert model_index(matrix, k, shift) == expected
    # stable under two refinements of the loop sampling
    assert model_index(matrix, k, shift, 1024) == expected
    assert model_index(matrix, k, shift, 2048) == expected


@pytest.mark.parametrize("n", [1, 2])
def test_pointwise_index_matches_model(l_map, n):
    for rec in enumerate_fixed_points(l_map, n):
        assert lefschetz_index(l_map, rec, method="pointwise") == rec.index


def test_rotated_cone_points_have_index_one():
    o = Origami((1, 2, 3, 0), (1, 0, 3, 2))
    t = synthesize(o, ((5, 2), (2, 1)), 1)
    assert all(r.kind == "regular" for r in enumerate_fixed_points(t, 1))  # vertices swapped
    recs = enumerate_fixed_points(t, 2)
    cones = [r for r in recs if r.kind == "singular"]
    assert len(cones) == 2 and all(r.index == 1 and r.sheet_shift == 1 for r in cones)
    for r in cones:
        assert lefschetz_index(t, r, method="pointwise") == 1


@pytest.mark.parametrize("n", range(1, 9))
def test_torus_flat_trace(cat_map, n):
    rep = flat_trace(cat_map, n)
    assert rep.lhs == pytest.approx(1, abs=1e-12)
    assert rep.residual < 1e-10


def test_h11_flat_trace():
    t = synthesize(Origami((1, 2, 3, 0), (1, 0, 3, 2)), ((3, 2), (4, 3)), 0)
    for n in (1, 2, 3):
        rep = flat_trace(t, n)
        assert rep.residual < 1e-10
        assert rep.index_sum == rep.lefschetz_number
