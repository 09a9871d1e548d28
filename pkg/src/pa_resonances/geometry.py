"""Exact convex-polygon and 2x2 integer-matrix helpers (``Fraction`` based)."""
from __future__ import annotations

import math
from fractions import Fraction

UNIT_SQUARE = ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
               (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1)))


def mat_mul(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def mat_pow(a, n):
    out = ((1, 0), (0, 1))
    for _ in range(n):
        out = mat_mul(out, a)
    return out


def mat_vec(a, p):
    return (a[0][0] * p[0] + a[0][1] * p[1], a[1][0] * p[0] + a[1][1] * p[1])


def mat_inv_sl2(a):
    """Inverse of an integer matrix of determinant 1."""
    (p, q), (r, s) = a
    if p * s - q * r != 1:
        raise ValueError("matrix is not in SL(2, Z)")
    return ((s, -q), (-r, p))


def det(a):
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def trace(a):
    return a[0][0] + a[1][1]


def mat_norm_inf(a):
    return max(abs(a[0][0]) + abs(a[0][1]), abs(a[1][0]) + abs(a[1][1]))


def area(poly):
    n = len(poly)
    s = 0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s / 2


def clip_halfplane(poly, a, b, c):
    """Part of ``poly`` where ``a x + b y + c >= 0`` (Sutherland-Hodgman)."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    vals = [a * x + b * y + c for x, y in poly]
    for i in range(n):
        p, fp = poly[i], vals[i]
        q, fq = poly[(i + 1) % n], vals[(i + 1) % n]
        if fp >= 0:
            out.append(p)
        if (fp > 0 > fq) or (fp < 0 < fq):
            t = fp / (fp - fq) if isinstance(fp - fq, float) else Fraction(fp) / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return _dedupe(out)


def _dedupe(poly):
    out = []
    for p in poly:
        if not out or out[-1] != p:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def halfplanes(poly):
    """Half-planes ``a x + b y + c >= 0`` whose intersection is the CCW ``poly``."""
    hp = []
    n = len(poly)
    for i in range(n):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % n]
        a, b = y0 - y1, x1 - x0
        hp.append((a, b, -(a * x0 + b * y0)))
    return hp


def clip_convex(poly, other):
    """Intersection of two CCW convex polygons."""
    out = list(poly)
    for a, b, c in halfplanes(other):
        out = clip_halfplane(out, a, b, c)
        if len(out) < 3:
            return []
    return out


def affine_image(poly, m, t):
    """Image of ``poly`` under ``x -> m x + t`` (orientation kept, det m = 1)."""
    return [(m[0][0] * x + m[0][1] * y + t[0], m[1][0] * x + m[1][1] * y + t[1]) for x, y in poly]


def contains(poly, p):
    """Closed containment of a point in a CCW convex polygon."""
    for a, b, c in halfplanes(poly):
        if a * p[0] + b * p[1] + c < 0:
            return False
    return True


def bbox(poly):
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return min(xs), min(ys), max(xs), max(ys)


def cells_meeting(poly):
    """Unit lattice cells ``(X, Y)`` meeting ``poly`` in positive area, with pieces."""
    x0, _, x1, _ = bbox(poly)
    out = []
    for X in range(math.floor(x0), math.ceil(x1)):
        strip = clip_halfplane(poly, 1, 0, -X)
        strip = clip_halfplane(strip, -1, 0, X + 1)
        if len(strip) < 3 or area(strip) <= 0:
            continue
        ys = [p[1] for p in strip]
        for Y in range(math.floor(min(ys)), math.ceil(max(ys))):
            piece = clip_halfplane(strip, 0, 1, -Y)
            piece = clip_halfplane(piece, 0, -1, Y + 1)
            if len(piece) >= 3 and area(piece) > 0:
                out.append(((X, Y), piece))
    return out
