r"""
Action of an affine automorphism on ``H_1(M, P; Z)`` with ``P`` the full
vertex set, and the exact factorization of its characteristic polynomial.

Generators are the oriented edges ``e^h_i`` (bottom edge of square ``i``,
pointing right) and ``e^v_i`` (left edge, pointing up).  The boundary of
square ``i`` gives the relation

    e^h_i + e^v_{h(i)} - e^h_{v(i)} - e^v_i = 0.

A basis of the quotient is given by the edges not crossed by a spanning tree
of the dual graph; tree edges are eliminated leaf first.

Polynomials are integer coefficient tuples, lowest degree first.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import BasisError, ClusterAmbiguity, DivisionFailure, ValidationError
from .surface import perm_cycles, perm_power


# integer polynomials ---------------------------------------------------------

def poly_trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_divmod(p, q):
    """Division by a polynomial with leading coefficient +-1 (stays integral)."""
    q = poly_trim(q)
    if q[-1] not in (1, -1):
        raise ValueError("divisor must have unit leading coefficient")
    r = list(poly_trim(p))
    dq = len(q) - 1
    if len(r) - 1 < dq:
        return (0,), tuple(r)
    quo = [0] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] * q[-1]
        quo[k] = c
        for j in range(dq + 1):
            r[k + j] -= c * q[j]
    return poly_trim(quo), poly_trim(r[:dq] or [0])


def poly_exact_div(p, q, what):
    quo, rem = poly_divmod(p, q)
    if any(rem):
        raise DivisionFailure(f"{what}: remainder {rem}")
    return quo


def poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def charpoly(m):
    """Characteristic polynomial ``det(t I - m)`` by integer Faddeev-LeVerrier."""
    n = len(m)
    if n == 0:
        return (1,)
    m = [list(map(int, row)) for row in m]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # mk <- m * mk + c_{n-k+1} I
        prod = [[sum(m[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        c = coeffs[n - k + 1]
        for i in range(n):
            prod[i][i] += c
        mk = prod
        tr = sum(sum(m[i][l] * mk[l][i] for l in range(n)) for i in range(n))
        if tr % k:
            raise AssertionError("non-integral Faddeev-LeVerrier step")
        coeffs[n - k] = -tr // k
    return tuple(coeffs)


def int_matmul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum(a[i][l] * b[l][j] for l in range(k)) for j in range(m)] for i in range(n)]


def int_det(m):
    """Bareiss fraction-free determinant."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


# edge bookkeeping ------------------------------------------------------------

def edge_index(kind, square, n):
    return square if kind == "h" else n + square


def square_boundary(o, i):
    """Boundary of square ``i`` as ``{edge index: coefficient}``."""
    n = o.n_squares
    out = {}
    for key, c in ((edge_index("h", i, n), 1), (edge_index("v", o.h[i], n), 1),
                   (edge_index("h", o.v[i], n), -1), (edge_index("v", i, n), -1)):
        out[key] = out.get(key, 0) + c
    return out


def edge_endpoints(o, kind, square):
    """(start vertex, end vertex) of an oriented edge."""
    if kind == "h":
        return o.corner_vertex(square, 0, 0), o.corner_vertex(square, 1, 0)
    return o.corner_vertex(square, 0, 0), o.corner_vertex(square, 0, 1)


class EdgeBasis:
    """Spanning-tree-complement basis of ``C_1 / d C_2``."""

    def __init__(self, o):
        self.o = o
        n = o.n_squares
        # dual graph: e^h_i separates i and v^-1(i); e^v_i separates i and h^-1(i)
        parent = {0: None}
        order = [0]
        queue = deque([0])
        while queue:
            s = queue.popleft()
            for e, nb in ((edge_index("h", s, n), o.v_inv[s]), (edge_index("v", s, n), o.h_inv[s]),
                          (edge_index("h", o.v[s], n), o.v[s]), (edge_index("v", o.h[s], n), o.h[s])):
                if nb not in parent:
                    parent[nb] = (s, e)
                    order.append(nb)
                    queue.append(nb)
        tree = {parent[s][1]: s for s in order[1:]}
        self.basis = tuple(e for e in range(2 * n) if e not in tree)
        if len(self.basis) != n + 1:
            raise BasisError(f"expected {n + 1} basis edges, got {len(self.basis)}")
        self.position = {e: k for k, e in enumerate(self.basis)}
        # eliminate tree edges, deepest square first
        expr = {}
        for s in reversed(order[1:]):
            e = parent[s][1]
            rel = square_boundary(o, s)
            ce = rel.pop(e)
            if ce not in (1, -1):
                raise BasisError("tree edge with non-unit coefficient")
            vec = [0] * (n + 1)
            for f, c in rel.items():
                if f in self.position:
                    vec[self.position[f]] -= c * ce
                else:
                    sub = expr[f]
                    for k in range(n + 1):
                        vec[k] -= c * ce * sub[k]
            expr[e] = vec
        self.tree_expr = expr

    def reduce(self, chain):
        """Coordinates of a chain ``{edge: coefficient}`` in the basis."""
        vec = [0] * len(self.basis)
        for e, c in chain.items():
            if e in self.position:
                vec[self.position[e]] += c
            else:
                for k, x in enumerate(self.tree_expr[e]):
                    vec[k] += c * x
        return vec


def _staircase(p, q):
    """Lattice points of a monotone path from 0 to ``(p, q)`` hugging the segment."""
    sx, sy = (1 if p >= 0 else -1), (1 if q >= 0 else -1)
    a, b = abs(p), abs(q)
    pts = [(0, 0)]
    if a == 0:
        pts += [(0, y) for y in range(1, b + 1)]
    else:
        y = 0
        for x in range(a):
            pts.append((x + 1, y))
            top = (b * (x + 1)) // a
            while y < top:
                y += 1
                pts.append((x + 1, y))
    return [(sx * x, sy * y) for x, y in pts]


def developed_path(o, labels, vec):
    """Chain of the lattice path homotopic to the developed segment from 0 to ``vec``."""
    n = o.n_squares
    chain = {}
    pts = _staircase(*vec)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 == y1:
            x = min(x0, x1)
            sign = x1 - x0
            if (x, y0) in labels:
                e = edge_index("h", labels[(x, y0)], n)
            elif (x, y0 - 1) in labels:
                e = edge_index("h", o.v[labels[(x, y0 - 1)]], n)
            else:
                raise BasisError("developed path leaves the image parallelogram")
        else:
            y = min(y0, y1)
            sign = y1 - y0
            if (x0, y) in labels:
                e = edge_index("v", labels[(x0, y)], n)
            elif (x0 - 1, y) in labels:
                e = edge_index("v", o.h[labels[(x0 - 1, y)]], n)
            else:
                raise BasisError("developed path leaves the image parallelogram")
        chain[e] = chain.get(e, 0) + sign
    return {e: c for e, c in chain.items() if c}


def edge_images(t):
    """``{edge index: image chain}`` for all ``2N`` edges."""
    if t.developments is None:
        raise ValidationError("homology needs a synthesized (not composed) automorphism")
    o, a = t.origami, t.matrix
    n = o.n_squares
    e1 = (a[0][0], a[1][0])
    e2 = (a[0][1], a[1][1])
    out = {}
    for i in range(n):
        out[edge_index("h", i, n)] = developed_path(o, t.developments[i], e1)
        out[edge_index("v", i, n)] = developed_path(o, t.developments[i], e2)
    return out


@dataclass(frozen=True)
class HomologyAction:
    edge_matrix: tuple
    basis_edges: tuple
    chi_rel: tuple
    chi_vertex: tuple
    chi_abs: tuple
    chi_A: tuple
    chi_xi: tuple
    genus: int
    n_vertices: int
    vertex_image: tuple
    expansion: float

    @property
    def dim(self):
        return len(self.edge_matrix)

    def absolute_trace(self, n):
        """Trace of ``T_*^n`` on ``H_1(M)`` (exact integer)."""
        m = [list(r) for r in self.edge_matrix]
        p = [[int(i == j) for j in range(self.dim)] for i in range(self.dim)]
        for _ in range(n):
            p = int_matmul(p, m)
        rel = sum(p[i][i] for i in range(self.dim))
        vp = perm_power(self.vertex_image, n)
        fixed = sum(1 for k, w in enumerate(vp) if k == w)
        return rel - (fixed - 1)

    def lefschetz_number(self, n):
        return 2 - self.absolute_trace(n)

    def to_dict(self):
        return {
            "genus": self.genus,
            "edge_matrix": [list(r) for r in self.edge_matrix],
            "basis_edges": [_edge_name(e, len(self.basis_edges) - 1) for e in self.basis_edges],
            "chi_rel": list(self.chi_rel),
            "chi_vertex": list(self.chi_vertex),
            "chi_abs": list(self.chi_abs),
            "chi_A": list(self.chi_A),
            "chi_xi": list(self.chi_xi),
        }


def _edge_name(e, n):
    return f"h{e + 1}" if e < n else f"v{e - n + 1}"


def vertex_charpoly(perm):
    """Characteristic polynomial of a permutation on reduced 0-homology."""
    p = (1,)
    for cyc in perm_cycles(perm):
        p = poly_mul(p, (-1,) + (0,) * (len(cyc) - 1) + (1,))
    return poly_exact_div(p, (-1, 1), "permutation polynomial by t - 1")


def homology_action(t) -> HomologyAction:
    o = t.origami
    basis = EdgeBasis(o)
    images = edge_images(t)
    cols = [basis.reduce(images[e]) for e in basis.basis]
    k = len(cols)
    m = tuple(tuple(cols[j][i] for j in range(k)) for i in range(k))
    chi_rel = charpoly(m)
    chi_vertex = vertex_charpoly(t.vertex_image)
    chi_abs = poly_exact_div(chi_rel, chi_vertex, "chi_rel by chi_vertex")
    chi_a = (1, -geo.trace(t.matrix), 1)
    chi_xi = poly_exact_div(chi_abs, chi_a, "chi_abs by chi_A")
    g = o.genus
    if len(chi_abs) - 1 != 2 * g:
        raise BasisError(f"deg chi_abs = {len(chi_abs) - 1}, expected {2 * g}")
    return HomologyAction(m, basis.basis, chi_rel, chi_vertex, chi_abs, chi_a, chi_xi, g,
                          len(o.vertices), t.vertex_image, t.expansion)


def xi_roots(h: HomologyAction, tol: float = 1e-9):
    """
    Roots of ``chi_xi`` with multiplicities, as ``[(complex, mult)]``.

    The polynomial is first factored over the rationals; roots of distinct
    irreducible factors closer than ``tol`` raise :class:`ClusterAmbiguity`.
    """
    import sympy

    if len(h.chi_xi) == 1:
        return []
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(h.chi_xi)), t)
    _, factors = sympy.factor_list(poly)
    roots = []
    for fid, (fac, mult) in enumerate(factors):
        coeffs = [float(c) for c in fac.all_coeffs()]
        if len(coeffs) == 2:
            rs = [-coeffs[1] / coeffs[0]]
        else:
            rs = np.roots(coeffs)
        for r in rs:
            roots.append((complex(r), mult, fid))
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i][0] - roots[j][0]) < tol:
                raise ClusterAmbiguity(f"roots {roots[i][0]} and {roots[j][0]} closer than {tol}")
    out = []
    for r, mult, _ in roots:
        if abs(r.imag) < tol:
            r = complex(r.real, 0.0)
        out.append((r, mult))
    out.sort(key=lambda z: (-abs(z[0]), -z[0].real, -z[0].imag))
    return _conjugate_symmetrize(out, tol)


def _conjugate_symmetrize(roots, tol):
    """Replace each non-real root by an exact conjugate partner."""
    out = []
    used = [False] * len(roots)
    for i, (r, m) in enumerate(roots):
        if used[i]:
            continue
        used[i] = True
        if r.imag == 0:
            out.append((r, m))
            continue
        for j in range(i + 1, len(roots)):
            if not used[j] and abs(roots[j][0] - r.conjugate()) < 10 * tol + 1e-12 * abs(r):
                used[j] = True
                z = complex(r.real, abs(r.imag))
                out.append((z, m))
                out.append((z.conjugate(), m))
                break
        else:
            raise ClusterAmbiguity(f"root {r} has no conjugate partner")
    return out


def poly_to_str(p, var="t"):
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and abs(c) == 1:
            coef = "-" if c < 0 else "+"
            terms.append(f"{coef} {mono}")
        else:
            terms.append(("- " if c < 0 else "+ ") + f"{abs(c)}{('*' + mono) if mono else ''}")
    s = " ".join(terms) or "0"
    return s[2:] if s.startswith("+ ") else "-" + s[2:]
