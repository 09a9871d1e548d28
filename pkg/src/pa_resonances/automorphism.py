r"""
Affine automorphisms of origamis with hyperbolic derivative in SL(2, Z).

An affine automorphism ``T`` with derivative ``A`` is stored as a list of
branches: convex pieces of the unit squares on which ``T`` is the affine map
``x -> A x + b`` between unit-square charts.

Construction
------------
In the chart of a source square ``i`` the image ``T(Q_i)`` is the
parallelogram ``P = A [0,1]^2`` placed at the image of the bottom-left
corner.  Since ``det A = 1``, ``P`` has no lattice point except its four
corners, so the developing map of the surface is single valued on ``P``:
labelling one lattice cell meeting ``P`` with a square of the origami
determines the label of every other cell (crossing a vertical grid line to
the right applies ``h``, crossing a horizontal one upwards applies ``v``).

The anchor fixes the germ of ``T`` at the bottom-left corner of square 1: it
is the square containing ``T(s d)`` for small ``s > 0`` and the first
direction ``d`` among :data:`GERM_DIRECTIONS` whose image ``A d`` has no
zero coordinate.  Labels are propagated from square to square through the
shared edges; ``T`` exists for this anchor iff the propagated labels agree on
every one of the ``2N`` edges.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import geometry as geo
from .errors import BranchBudgetExceeded, NotAnAutomorphism, NotFound, ParseError, ValidationError
from .surface import Origami, parse_origami

GERM_DIRECTIONS = ((1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3))

DEFAULT_BRANCH_BUDGET = 400_000


def germ_direction(a):
    for d in GERM_DIRECTIONS:
        x, y = geo.mat_vec(a, d)
        if x != 0 and y != 0:
            return d
    raise AssertionError("no generic germ direction")  # pragma: no cover


@dataclass(frozen=True)
class Branch:
    source_square: int
    domain: tuple
    target_square: int
    linear_part: tuple
    translation: tuple

    def apply(self, p):
        m, t = self.linear_part, self.translation
        return (m[0][0] * p[0] + m[0][1] * p[1] + t[0], m[1][0] * p[0] + m[1][1] * p[1] + t[1])

    @property
    def image(self):
        return tuple(geo.affine_image(self.domain, self.linear_part, self.translation))

    @property
    def area(self):
        return geo.area(self.domain)

    def inverse(self):
        mi = geo.mat_inv_sl2(self.linear_part)
        t = geo.mat_vec(mi, self.translation)
        return Branch(self.target_square, self.image, self.source_square, mi, (-t[0], -t[1]))

    def to_dict(self):
        return {
            "source": self.source_square + 1,
            "target": self.target_square + 1,
            "linear": [list(r) for r in self.linear_part],
            "translation": [str(x) for x in self.translation],
            "domain": [[str(x), str(y)] for x, y in self.domain],
        }


def _signs(a):
    tr = geo.trace(a)
    s = 1 if tr > 0 else -1
    return s, s


@dataclass(frozen=True, eq=False)
class AffineAutomorphism:
    origami: Origami
    matrix: tuple
    anchor: int
    vertex_image: tuple
    branches: tuple
    power: int = 1
    developments: tuple = field(default=None, repr=False)

    @property
    def trace(self):
        return geo.trace(self.matrix)

    @property
    def expansion(self):
        """The expansion factor ``lambda > 1`` (spectral radius of the matrix)."""
        tr = abs(self.trace)
        return (tr + math.sqrt(tr * tr - 4)) / 2

    @property
    def eps_h(self):
        return _signs(self.matrix)[0]

    @property
    def eps_v(self):
        return _signs(self.matrix)[1]

    @cached_property
    def branches_by_square(self):
        out = [[] for _ in range(self.origami.n_squares)]
        for b in self.branches:
            out[b.source_square].append(b)
        return tuple(tuple(x) for x in out)

    @cached_property
    def inverse_branches_by_square(self):
        out = [[] for _ in range(self.origami.n_squares)]
        for b in self.branches:
            out[b.target_square].append(b.inverse())
        return tuple(tuple(x) for x in out)

    def locate(self, square, p, inverse=False):
        table = self.inverse_branches_by_square if inverse else self.branches_by_square
        for b in table[square]:
            if geo.contains(b.domain, p):
                return b
        raise ValueError(f"point {p} of square {square} lies in no branch")

    def apply_exact(self, square, p, inverse=False):
        """Exact image of a point given in the chart of ``square``."""
        b = self.locate(square, p, inverse)
        return b.target_square, b.apply(p)

    @property
    def anchor_vertex(self):
        return self.vertex_image[self.origami.vertex_of_corner[0]]

    def to_dict(self):
        return {
            "origami": self.origami.serialize(),
            "matrix": [list(r) for r in self.matrix],
            "power": self.power,
            "anchor": self.anchor + 1,
            "vertex_image": [k + 1 for k in self.vertex_image],
            "branches": [b.to_dict() for b in self.branches],
        }

    def __repr__(self):
        return (f"AffineAutomorphism(matrix={self.matrix}, anchor={self.anchor + 1}, "
                f"power={self.power}, branches={len(self.branches)})")


class _Parallelogram:
    """Cell structure of ``A [0,1]^2`` shared by every square."""

    def __init__(self, a):
        self.a = a
        self.ainv = geo.mat_inv_sl2(a)
        poly = geo.affine_image(geo.UNIT_SQUARE, a, (0, 0))
        self.cells = dict(geo.cells_meeting(poly))
        self.adjacency = {c: [] for c in self.cells}
        for (X, Y) in self.cells:
            for dx, dy, move in ((1, 0, "h"), (0, 1, "v")):
                nb = (X + dx, Y + dy)
                if nb not in self.cells:
                    continue
                if dx:
                    seg = ((X + 1, Y), (X + 1, Y + 1))
                else:
                    seg = ((X, Y + 1), (X + 1, Y + 1))
                if self._meets_interior(seg):
                    self.adjacency[(X, Y)].append((nb, move))
                    self.adjacency[nb].append(((X, Y), move + "-"))
        self.e1 = (a[0][0], a[1][0])
        self.e2 = (a[0][1], a[1][1])
        self.right_probe = self._edge_probe(lambda t: (1, t))
        self.top_probe = self._edge_probe(lambda t: (t, 1))

    def _meets_interior(self, seg):
        p0 = geo.mat_vec(self.ainv, seg[0])
        p1 = geo.mat_vec(self.ainv, seg[1])
        lo, hi = Fraction(0), Fraction(1)
        for k in range(2):
            d = p1[k] - p0[k]
            if d == 0:
                if not 0 < p0[k] < 1:
                    return False
            else:
                t1 = Fraction(-p0[k], d)
                t2 = Fraction(1 - p0[k], d)
                lo = max(lo, min(t1, t2))
                hi = min(hi, max(t1, t2))
        return lo < hi

    def _edge_probe(self, param):
        """A point ``A param(t)`` on an edge of ``P`` lying inside a cell."""
        a = self.a
        breaks = {Fraction(0), Fraction(1)}
        for k in range(2):
            p0 = geo.mat_vec(a, param(0))[k]
            p1 = geo.mat_vec(a, param(1))[k]
            if p1 != p0:
                lo, hi = sorted((p0, p1))
                for m in range(math.floor(lo), math.ceil(hi) + 1):
                    t = Fraction(m - p0, p1 - p0)
                    if 0 < t < 1:
                        breaks.add(t)
        b = sorted(breaks)
        t = (b[0] + b[1]) / 2
        q = geo.mat_vec(a, tuple(Fraction(x) for x in param(t)))
        return (math.floor(q[0]), math.floor(q[1]))

    def develop(self, origami, seed_cell, seed_label):
        moves = {"h": origami.h, "v": origami.v, "h-": origami.h_inv, "v-": origami.v_inv}
        labels = {seed_cell: seed_label}
        queue = deque([seed_cell])
        while queue:
            c = queue.popleft()
            for nb, move in self.adjacency[c]:
                if nb not in labels:
                    labels[nb] = moves[move][labels[c]]
                    queue.append(nb)
        if len(labels) != len(self.cells):
            raise AssertionError("parallelogram cells are not connected")
        return labels


def _corner_cell_vertex(o, cell, label):
    """Vertex at the lattice point ``(0, 0)`` seen as a corner of ``cell``."""
    X, Y = cell
    return o.corner_vertex(label, -X, -Y)


def synthesize(o: Origami, a, anchor: int) -> AffineAutomorphism:
    """
    Affine automorphism of ``o`` with derivative ``a`` and germ ``anchor``.

    ``anchor`` is the (0-indexed) square containing the image of a point of
    square 1 close to its bottom-left corner, see the module docstring.
    Raises :class:`NotAnAutomorphism` when the edge propagation is
    inconsistent.
    """
    a = tuple(tuple(int(x) for x in row) for row in a)
    if geo.det(a) != 1:
        raise ValidationError(f"det {a} must be 1")
    if abs(geo.trace(a)) <= 2:
        raise ValidationError(f"{a} is not hyperbolic (|trace| <= 2)")
    n = o.n_squares
    if not 0 <= anchor < n:
        raise ValidationError(f"anchor square {anchor + 1} out of range")
    par = _Parallelogram(a)
    d = geo.mat_vec(a, germ_direction(a))
    seed = (0 if d[0] > 0 else -1, 0 if d[1] > 0 else -1)

    labels = [None] * n
    labels[0] = par.develop(o, seed, anchor)
    queue = deque([0])
    rp, tp = par.right_probe, par.top_probe
    while queue:
        i = queue.popleft()
        for nb, probe, shift in ((o.h[i], rp, par.e1), (o.v[i], tp, par.e2)):
            cell = (probe[0] - shift[0], probe[1] - shift[1])
            lab = labels[i][probe]
            if labels[nb] is None:
                labels[nb] = par.develop(o, cell, lab)
                queue.append(nb)
    for i in range(n):
        for nb, probe, shift in ((o.h[i], rp, par.e1), (o.v[i], tp, par.e2)):
            cell = (probe[0] - shift[0], probe[1] - shift[1])
            if labels[nb][cell] != labels[i][probe]:
                raise NotAnAutomorphism(
                    f"matrix {a} with anchor {anchor + 1}: inconsistent gluing across an edge of square {i + 1}")

    # vertex images
    vimg = [None] * len(o.vertices)
    for i in range(n):
        k = o.vertex_of_corner[i]
        for cell in ((0, 0), (-1, 0), (-1, -1), (0, -1)):
            if cell in labels[i]:
                w = _corner_cell_vertex(o, cell, labels[i][cell])
                if vimg[k] is None:
                    vimg[k] = w
                elif vimg[k] != w:
                    raise NotAnAutomorphism(f"vertex {k + 1} has two images")
    if sorted(vimg) != list(range(len(o.vertices))):
        raise NotAnAutomorphism("vertex images are not a bijection")

    branches = []
    covered = [Fraction(0)] * n
    for i in range(n):
        for (X, Y), piece in par.cells.items():
            dom = tuple(geo.affine_image(piece, par.ainv, (0, 0)))
            tgt = labels[i][(X, Y)]
            branches.append(Branch(i, dom, tgt, a, (-X, -Y)))
            covered[tgt] += geo.area(piece)
    if any(c != 1 for c in covered):
        raise NotAnAutomorphism("branch images do not tile the surface")
    return AffineAutomorphism(o, a, anchor, tuple(vimg), tuple(branches),
                              developments=tuple(labels))


def search_automorphism(o: Origami, a) -> AffineAutomorphism:
    """First anchor (ascending) for which :func:`synthesize` succeeds."""
    for anchor in range(o.n_squares):
        try:
            return synthesize(o, a, anchor)
        except NotAnAutomorphism:
            continue
    raise NotFound(f"{a} is not the derivative of an affine automorphism of {o!r}")


def compose(t: AffineAutomorphism, s: AffineAutomorphism, max_branches=DEFAULT_BRANCH_BUDGET):
    """Branch decomposition of ``s o t`` by clipping images of ``t`` against ``s``."""
    o = t.origami
    out = []
    s_by_sq = s.branches_by_square
    s_boxes = [[geo.bbox(b.domain) for b in bs] for bs in s_by_sq]
    for b in t.branches:
        img = b.image
        bx0, by0, bx1, by1 = geo.bbox(img)
        mi = geo.mat_inv_sl2(b.linear_part)
        for b2, (x0, y0, x1, y1) in zip(s_by_sq[b.target_square], s_boxes[b.target_square]):
            if x0 >= bx1 or bx0 >= x1 or y0 >= by1 or by0 >= y1:
                continue
            piece = geo.clip_convex(img, b2.domain)
            if len(piece) < 3 or geo.area(piece) <= 0:
                continue
            tb = b.translation
            dom = tuple(geo.affine_image(piece, mi, geo.mat_vec(mi, (-tb[0], -tb[1]))))
            lin = geo.mat_mul(b2.linear_part, b.linear_part)
            tr = b2.apply(tb)
            out.append(Branch(b.source_square, dom, b2.target_square, lin, tr))
            if len(out) > max_branches:
                raise BranchBudgetExceeded(f"more than {max_branches} branches")
    vimg = tuple(s.vertex_image[k] for k in t.vertex_image)
    return AffineAutomorphism(o, geo.mat_mul(s.matrix, t.matrix), t.anchor, vimg, tuple(out),
                              power=t.power + s.power)


def compose_power(t: AffineAutomorphism, n: int, max_branches=DEFAULT_BRANCH_BUDGET):
    """Branch decomposition of ``T^n`` by iterated clip-and-compose."""
    if n < 1:
        raise ValidationError("power must be positive")
    estimate = t.origami.n_squares * t.expansion ** n
    if estimate > 4 * max_branches:
        raise BranchBudgetExceeded(f"about {estimate:.0f} branches expected for n={n}")
    cur = t
    for _ in range(n - 1):
        cur = compose(cur, t, max_branches)
    return cur


def power_anchor(t: AffineAutomorphism, n: int) -> int:
    """Anchor of ``T^n``, obtained by pushing a germ point through ``T`` exactly."""
    an = geo.mat_pow(t.matrix, n)
    d = germ_direction(an)
    scale = 16 * max(geo.mat_norm_inf(geo.mat_pow(t.matrix, j)) for j in range(n + 1))
    p = (Fraction(d[0], scale), Fraction(d[1], scale))
    sq = 0
    for _ in range(n):
        sq, p = t.apply_exact(sq, p)
    return sq


# fixture files --------------------------------------------------------------

def parse_fixture(text: str, base_dir=None):
    """
    Parse an automorphism fixture::

        origami=L3.txt        # path relative to the fixture, or inline below
        A=2 1 3 2
        anchor=1

    Instead of ``origami=`` the three origami lines ``n=``, ``h=``, ``v=``
    may be given inline.  Returns ``(origami, matrix, anchor or None)``.
    """
    import os

    fields = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key=value', got {raw!r}")
        k, _, val = line.partition("=")
        fields[k.strip().lower()] = val.strip()
    if "a" not in fields:
        raise ParseError("fixture needs an 'A=' line")
    if "origami" in fields:
        path = fields["origami"]
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        with open(path) as fh:
            o = parse_origami(fh.read())
    else:
        o = parse_origami("\n".join(f"{k}={fields[k]}" for k in ("n", "h", "v") if k in fields))
    a = parse_matrix(fields["a"])
    anchor = int(fields["anchor"]) - 1 if "anchor" in fields else None
    return o, a, anchor


def parse_matrix(text: str):
    try:
        vals = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise ParseError(f"matrix entries must be integers: {text!r}") from None
    if len(vals) != 4:
        raise ParseError(f"a 2x2 matrix needs 4 entries, got {text!r}")
    return ((vals[0], vals[1]), (vals[2], vals[3]))


def branches_json(t: AffineAutomorphism) -> str:
    return json.dumps(t.to_dict(), indent=1, sort_keys=True)
