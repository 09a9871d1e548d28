from fractions import Fraction as F

from pa_resonances import geometry as geo

SQ = ((0, 0), (1, 0), (1, 1), (0, 1))
CAT = ((2, 1), (1, 1))


def test_matrix_helpers():
    assert geo.mat_pow(CAT, 3) == geo.mat_mul(CAT, geo.mat_mul(CAT, CAT))
    assert geo.mat_mul(CAT, geo.mat_inv_sl2(CAT)) == ((1, 0), (0, 1))
    assert geo.det(CAT) == 1 and geo.trace(CAT) == 3
    assert geo.mat_vec(CAT, (1, 0)) == (2, 1)


def test_clip_keeps_nonnegative_side():
    lower = geo.clip_halfplane(SQ, -1, -1, 1)  # 1 - x - y >= 0
    assert geo.area(lower) == F(1, 2)
    assert geo.contains(lower, (F(1, 4), F(1, 4)))
    assert not geo.contains(lower, (F(3, 4), F(3, 4)))


def test_parallelogram_pieces_tile_its_area():
    img = geo.affine_image(SQ, CAT, (0, 0))
    assert geo.area(img) == 1
    cells = geo.cells_meeting(img)
    assert sum(geo.area(piece) for _, piece in cells) == 1
    # P = A [0,1]^2 for the cat map meets 4 lattice cells (x in [0,3], y in [0,2])
    assert sorted(c for c, _ in cells) == [(0, 0), (1, 0), (1, 1), (2, 1)]


def test_clip_convex_is_exact():
    img = geo.affine_image(SQ, CAT, (0, 0))
    piece = geo.clip_convex(img, SQ)
    assert geo.area(piece) == F(1, 4)
    assert all(isinstance(c, (int, F)) for p in piece for c in p)
    assert geo.clip_convex(SQ, geo.affine_image(SQ, ((1, 0), (0, 1)), (2, 0))) == []
