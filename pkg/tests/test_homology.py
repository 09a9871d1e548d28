import math

import numpy as np
import pytest
import sympy

from pa_resonances.automorphism import synthesize
from pa_resonances.errors import DivisionFailure
from pa_resonances.homology import (charpoly, homology_action, int_det, poly_divmod, poly_eval, poly_exact_div,
                                    poly_mul, poly_to_str, vertex_charpoly, xi_roots)
from pa_resonances.surface import Origami

PHI = (1 + 5 ** 0.5) / 2


def sympy_charpoly(m):
    t = sympy.Symbol("t")
    coeffs = sympy.Matrix(m).charpoly(t).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def test_poly_arithmetic():
    p = poly_mul((1, 1), (-1, 1))  # (1 + t)(t - 1) = t^2 - 1
    assert p == (-1, 0, 1)
    q, r = poly_divmod((1, 2, 3, 1), (1, 1))
    back = poly_mul(q, (1, 1))
    assert tuple(a + (r[i] if i < len(r) else 0) for i, a in enumerate(back)) == (1, 2, 3, 1)
    assert poly_exact_div((-1, 0, 1), (-1, 1), "x") == (1, 1)
    with pytest.raises(DivisionFailure):
        poly_exact_div((1, 0, 1), (-1, 1), "x")
    assert poly_eval((1, -3, 1), 2) == -1
    assert poly_to_str((1, -3, 1)) == "t^2 - 3*t + 1"


@pytest.mark.parametrize("seed", range(5))
def test_charpoly_and_det_against_sympy(seed):
    rng = np.random.default_rng(seed)
    m = rng.integers(-4, 5, (5, 5)).tolist()
    assert charpoly(m) == sympy_charpoly(m)
    assert int_det(m) == int(sympy.Matrix(m).det())


def test_vertex_charpoly():
    assert vertex_charpoly((0,)) == (1,)
    assert vertex_charpoly((1, 0)) == (1, 1)  # (t^2 - 1) / (t - 1)
    assert vertex_charpoly((1, 2, 0)) == (1, 1, 1)


def test_torus_action(cat_map):
    h = homology_action(cat_map)
    assert h.chi_abs == (1, -3, 1)
    assert h.chi_xi == (1,)
    assert xi_roots(h) == []
    assert [h.lefschetz_number(n) for n in (1, 2, 3)] == [-1, -5, -16]


def test_l_map_polynomials(l_map):
    h = homology_action(l_map)
    assert h.chi_rel == (1, -9, 20, -9, 1)
    assert h.chi_vertex == (1,)
    assert h.chi_abs == (1, -9, 20, -9, 1)
    assert h.chi_A == (1, -6, 1)
    assert h.chi_xi == (1, -3, 1)
    assert poly_mul(poly_mul(h.chi_vertex, h.chi_A), h.chi_xi) == h.chi_rel
    assert h.chi_rel == sympy_charpoly(h.edge_matrix)
    # the action on H_1(M) is symplectic: palindromic characteristic polynomial
    assert h.chi_abs == tuple(reversed(h.chi_abs))
    assert [h.lefschetz_number(n) for n in range(1, 6)] == [-7, -39, -214, -1199, -6847]


def test_l_map_xi_roots(l_map):
    roots = xi_roots(homology_action(l_map))
    assert [m for _, m in roots] == [1, 1]
    assert roots[0][0] == pytest.approx(PHI ** 2, abs=1e-14)
    assert roots[1][0] == pytest.approx(PHI ** -2, abs=1e-14)
    lam = l_map.expansion
    assert all(1 / lam < abs(r) < lam for r, _ in roots)


@pytest.fixture(scope="module")
def h11():
    return Origami((1, 2, 3, 0), (1, 0, 3, 2))


def test_two_fixed_cone_points(h11):
    assert h11.genus == 2 and [len(c) for c in h11.vertices] == [2, 2]
    h = homology_action(synthesize(h11, ((3, 2), (4, 3)), 0))
    assert h.vertex_image == (0, 1)
    assert h.chi_vertex == (-1, 1)
    assert h.chi_xi == (1, -4, 1)
    assert poly_mul(poly_mul(h.chi_vertex, h.chi_A), h.chi_xi) == h.chi_rel
    assert h.chi_rel == sympy_charpoly(h.edge_matrix)
    roots = sorted(abs(r) for r, _ in xi_roots(h))
    assert roots == pytest.approx([2 - 3 ** 0.5, 2 + 3 ** 0.5], abs=1e-14)


def test_swapped_cone_points(h11):
    t = synthesize(h11, ((5, 2), (2, 1)), 1)
    h = homology_action(t)
    assert h.vertex_image == (1, 0)
    assert h.chi_vertex == (1, 1)
    assert h.chi_xi == (1, 2, 1)
    assert poly_mul(poly_mul(h.chi_vertex, h.chi_A), h.chi_xi) == h.chi_rel
    assert xi_roots(h) == [(complex(-1.0), 2)]
