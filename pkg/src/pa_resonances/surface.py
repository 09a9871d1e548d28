r"""
Square-tiled translation surfaces (origamis).

An origami with ``N`` unit squares is encoded by two permutations of the
squares: ``h[i]`` is the square glued to the right of square ``i`` and
``v[i]`` the square glued on top of it.  Squares are 0-indexed in the Python
API and 1-indexed in the text format.

Text format::

    # comment lines start with '#'
    n=3
    h=2 1 3
    v=3 2 1

Keys may appear in any order, blank lines are ignored, and ``h``/``v`` list
the images of squares ``1..n``.

Corner convention
-----------------
Every vertex of the surface is labelled by the bottom-left corners it
carries.  Walking counterclockwise around the bottom-left corner of square
``i`` one meets, in turn, the square to its left (``h^-1``), the square
below that one (``v^-1``), the square to the right of that one (``h``) and
finally the square above, whose bottom-left corner is the next one on the
same vertex.  Hence the corner permutation is ``c = v o h o v^-1 o h^-1``
(rightmost applied first).  A cycle of length ``k`` of ``c`` is a vertex of
cone angle ``2 pi k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DisconnectedSurface, NotAPermutation, ParseError


def perm_inverse(p):
    q = [0] * len(p)
    for i, j in enumerate(p):
        q[j] = i
    return tuple(q)


def perm_cycles(p):
    """Cycles of ``p``, each starting at its smallest element, sorted."""
    seen = [False] * len(p)
    cycles = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        cycles.append(tuple(cyc))
    return cycles


def perm_power(p, n):
    out = list(range(len(p)))
    for _ in range(n):
        out = [p[j] for j in out]
    return tuple(out)


def _check_perm(p, n, name):
    if len(p) != n or sorted(p) != list(range(n)):
        raise NotAPermutation(f"{name} is not a permutation of 1..{n}: {[x + 1 for x in p]}")


@dataclass(frozen=True)
class Origami:
    h: tuple
    v: tuple

    def __post_init__(self):
        h = tuple(int(x) for x in self.h)
        v = tuple(int(x) for x in self.v)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)
        n = len(h)
        if n == 0:
            raise ParseError("an origami needs at least one square")
        _check_perm(h, n, "h")
        _check_perm(v, n, "v")
        # connectivity of the <h, v> action
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in (h[i], v[i]):
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != n:
            raise DisconnectedSurface(
                f"squares {sorted(x + 1 for x in set(range(n)) - seen)} are not connected to square 1")

    @property
    def n_squares(self):
        return len(self.h)

    @cached_property
    def h_inv(self):
        return perm_inverse(self.h)

    @cached_property
    def v_inv(self):
        return perm_inverse(self.v)

    @cached_property
    def corner_perm(self):
        h, v, hi, vi = self.h, self.v, self.h_inv, self.v_inv
        return tuple(v[h[vi[hi[i]]]] for i in range(self.n_squares))

    @cached_property
    def vertices(self):
        """Vertices as tuples of squares whose bottom-left corner they are."""
        return perm_cycles(self.corner_perm)

    @cached_property
    def vertex_of_corner(self):
        out = [0] * self.n_squares
        for k, cyc in enumerate(self.vertices):
            for i in cyc:
                out[i] = k
        return tuple(out)

    def cone_multiplicity(self, vertex):
        """The integer ``k`` such that ``vertex`` has cone angle ``2 pi k``."""
        return len(self.vertices[vertex])

    @cached_property
    def singular_vertices(self):
        return tuple(k for k, cyc in enumerate(self.vertices) if len(cyc) >= 2)

    @cached_property
    def genus(self):
        return 1 + (self.n_squares - len(self.vertices)) // 2

    def corner_vertex(self, square, cx, cy):
        """Vertex at corner ``(cx, cy)`` (each 0 or 1) of ``square``."""
        s = square
        if cx == 1:
            s = self.h[s]
        if cy == 1:
            s = self.v[s]
        return self.vertex_of_corner[s]

    @cached_property
    def sectors(self):
        r"""
        Quadrant sectors around each vertex in counterclockwise order.

        ``sectors[k]`` lists, for the vertex ``k`` of cone angle ``2 pi m``,
        the ``4 m`` triples ``(square, cx, cy)`` such that the quadrant number
        ``q`` (angles in ``[q pi/2, (q+1) pi/2)`` of the developed cone) is
        the corner ``(cx, cy)`` of ``square``.
        """
        h, v, hi, vi = self.h, self.v, self.h_inv, self.v_inv
        out = []
        for cyc in self.vertices:
            sec = []
            s = cyc[0]
            for _ in cyc:
                nw = hi[s]
                sw = vi[nw]
                se = h[sw]
                sec.extend([(s, 0, 0), (nw, 1, 0), (sw, 1, 1), (se, 0, 1)])
                s = v[se]
            assert s == cyc[0]
            out.append(tuple(sec))
        return tuple(out)

    @cached_property
    def sector_index(self):
        """Map ``(square, cx, cy) -> (vertex, quadrant number)``."""
        out = {}
        for k, sec in enumerate(self.sectors):
            for q, key in enumerate(sec):
                out[key] = (k, q)
        return out

    def relabel(self, perm):
        """Origami with square ``i`` renamed ``perm[i]``."""
        n = self.n_squares
        _check_perm(tuple(perm), n, "relabelling")
        h = [0] * n
        v = [0] * n
        for i in range(n):
            h[perm[i]] = perm[self.h[i]]
            v[perm[i]] = perm[self.v[i]]
        return Origami(tuple(h), tuple(v))

    def serialize(self):
        return "n={}\nh={}\nv={}\n".format(
            self.n_squares,
            " ".join(str(x + 1) for x in self.h),
            " ".join(str(x + 1) for x in self.v))

    def __repr__(self):
        return "Origami(h={}, v={})".format(
            [x + 1 for x in self.h], [x + 1 for x in self.v])


@dataclass(frozen=True)
class SingularityProfile:
    vertex_cycles: tuple
    cone_angles: tuple
    singular_indices: tuple
    genus: int
    n_vertices: int
    euler_genus: int = field(default=0)

    @property
    def gauss_bonnet_defect(self):
        """``sum (k - 1)`` over singular vertices minus ``2 g - 2``."""
        excess = sum(round(a / (2 * math.pi)) - 1 for a in self.cone_angles)
        return excess - (2 * self.genus - 2)

    def to_dict(self):
        return {
            "genus": self.genus,
            "n_vertices": self.n_vertices,
            "vertex_cycles": [[s + 1 for s in c] for c in self.vertex_cycles],
            "cone_angle_multiples": [round(a / (2 * math.pi)) for a in self.cone_angles],
            "singular_vertices": [k + 1 for k in self.singular_indices],
            "gauss_bonnet_ok": self.gauss_bonnet_defect == 0,
        }


def cone_data(o: Origami) -> SingularityProfile:
    cycles = o.vertices
    n_vertices = len(cycles)
    twice = 2 + o.n_squares - n_vertices  # 2g from V - N = 2 - 2g
    if twice % 2:
        raise AssertionError("Euler characteristic of an origami must be even")
    genus = twice // 2
    # independent genus from Gauss-Bonnet: sum (k - 1) = 2g - 2
    excess = sum(len(c) - 1 for c in cycles)
    return SingularityProfile(
        vertex_cycles=tuple(cycles),
        cone_angles=tuple(2 * math.pi * len(c) for c in cycles),
        singular_indices=tuple(k for k, c in enumerate(cycles) if len(c) >= 2),
        genus=genus,
        n_vertices=n_vertices,
        euler_genus=(excess + 2) // 2,
    )


def parse_origami(text: str) -> Origami:
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key=value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key in fields:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = value.strip()
    missing = {"n", "h", "v"} - set(fields)
    if missing:
        raise ParseError(f"missing keys: {sorted(missing)}")
    try:
        n = int(fields["n"])
        h = [int(x) - 1 for x in fields["h"].split()]
        v = [int(x) - 1 for x in fields["v"].split()]
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if n < 1:
        raise ParseError("n must be positive")
    if len(h) != n or len(v) != n:
        raise ParseError(f"h and v must list exactly n={n} images")
    return Origami(tuple(h), tuple(v))


def torus() -> Origami:
    return Origami((0,), (0,))


def l_origami() -> Origami:
    """Three squares in an L: square 2 right of 1, square 3 above 1."""
    return Origami((1, 0, 2), (2, 1, 0))
