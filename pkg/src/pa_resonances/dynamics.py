"""
Pointwise kinematics on an origami: the map ``T^n`` and straight-line flows.

Points are ``SurfacePoint(square, x, y)`` with ``0 <= x, y < 1``; a
coordinate equal to 1 (or below 0) is moved to the neighbouring square
through ``h`` / ``v``.  Coordinates may be floats or ``Fraction``; the map
and the flows keep exact arithmetic when given exact input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import geometry as geo
from .errors import HitSingularity, HitVertex


@dataclass(frozen=True)
class SurfacePoint:
    square: int
    x: object
    y: object

    def as_float(self):
        return SurfacePoint(self.square, float(self.x), float(self.y))


def normalize(o, square, x, y):
    """Canonical representative of a chart point (half-open convention)."""
    while x >= 1:
        x -= 1
        square = o.h[square]
    while x < 0:
        x += 1
        square = o.h_inv[square]
    while y >= 1:
        y -= 1
        square = o.v[square]
    while y < 0:
        y += 1
        square = o.v_inv[square]
    return SurfacePoint(square, x, y)


def is_vertex(p):
    return p.x == 0 and p.y == 0


# the map ---------------------------------------------------------------------

class _BranchTable:
    """Float half-plane tables of the branches of one square, for vectorized lookup."""

    def __init__(self, branches):
        self.branches = branches
        m = max(len(b.domain) for b in branches)
        hp = np.zeros((len(branches), m, 3))
        hp[:, :, 2] = np.inf
        for j, b in enumerate(branches):
            for e, (a, bb, c) in enumerate(geo.halfplanes(b.domain)):
                norm = math.hypot(a, bb)
                hp[j, e] = (float(a) / norm, float(bb) / norm, float(c) / norm)
        self.hp = hp
        self.lin = np.array([[[float(x) for x in row] for row in b.linear_part] for b in branches])
        self.trans = np.array([[float(x) for x in b.translation] for b in branches])
        self.target = np.array([b.target_square for b in branches])

    def locate(self, x, y):
        """Index of the branch with the largest slack for each point."""
        slack = self.hp[None, :, :, 0] * x[:, None, None] + self.hp[None, :, :, 1] * y[:, None, None] \
            + self.hp[None, :, :, 2]
        return np.argmax(slack.min(axis=2), axis=1)


@lru_cache(maxsize=64)
def _tables(t, inverse):
    table = t.inverse_branches_by_square if inverse else t.branches_by_square
    return tuple(_BranchTable(bs) for bs in table)


def map_step_batch(t, squares, x, y, inverse=False):
    """One step of ``T`` (or ``T^-1``) on arrays of points."""
    squares = np.asarray(squares)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out_s = np.empty_like(squares)
    out_x = np.empty_like(x)
    out_y = np.empty_like(y)
    tables = _tables(t, inverse)
    for s in np.unique(squares):
        idx = np.nonzero(squares == s)[0]
        tab = tables[s]
        j = tab.locate(x[idx], y[idx])
        lin = tab.lin[j]
        tr = tab.trans[j]
        nx = lin[:, 0, 0] * x[idx] + lin[:, 0, 1] * y[idx] + tr[:, 0]
        ny = lin[:, 1, 0] * x[idx] + lin[:, 1, 1] * y[idx] + tr[:, 1]
        out_s[idx] = tab.target[j]
        out_x[idx] = nx
        out_y[idx] = ny
    return _normalize_batch(t.origami, out_s, out_x, out_y)


def _normalize_batch(o, s, x, y):
    h = np.array(o.h)
    hi = np.array(o.h_inv)
    v = np.array(o.v)
    vi = np.array(o.v_inv)
    for _ in range(2):
        m = x >= 1
        s = np.where(m, h[s], s)
        x = np.where(m, x - 1, x)
        m = x < 0
        s = np.where(m, hi[s], s)
        x = np.where(m, x + 1, x)
        m = y >= 1
        s = np.where(m, v[s], s)
        y = np.where(m, y - 1, y)
        m = y < 0
        s = np.where(m, vi[s], s)
        y = np.where(m, y + 1, y)
    return s, x, y


def apply_map_batch(t, squares, x, y, n):
    squares = np.asarray(squares)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for _ in range(abs(n)):
        squares, x, y = map_step_batch(t, squares, x, y, inverse=n < 0)
    return squares, x, y


def _exact(v):
    return isinstance(v, (int, Fraction))


def apply_map(t, p: SurfacePoint, n: int) -> SurfacePoint:
    """``T^n p``; exact for ``Fraction`` coordinates, float otherwise."""
    o = t.origami
    p = normalize(o, p.square, p.x, p.y)
    if is_vertex(p):
        raise HitVertex(f"{p} is a vertex")
    if _exact(p.x) and _exact(p.y):
        for _ in range(abs(n)):
            s, (x, y) = t.apply_exact(p.square, (Fraction(p.x), Fraction(p.y)), inverse=n < 0)
            p = normalize(o, s, x, y)
            if is_vertex(p):
                raise HitVertex("orbit reaches a vertex")
        return p
    if n == 0:
        return p
    s, x, y = apply_map_batch(t, [p.square], [p.x], [p.y], n)
    q = SurfacePoint(int(s[0]), float(x[0]), float(y[0]))
    if q.x == 0 and q.y == 0:
        raise HitVertex("orbit reaches a vertex")
    return q


# flows -----------------------------------------------------------------------

@dataclass(frozen=True)
class FlowOutcome:
    endpoint: SurfacePoint
    time_consumed: object  # unsigned, also for backward flow
    hit_singularity: bool
    crossings: int
    segments: tuple = ()


def vertical_flow(o, p: SurfacePoint, time) -> FlowOutcome:
    """Unit-speed vertical flow for ``time`` (either sign), stopping at cone points."""
    return flow_segments(o, p, (0, 1), time)[1]


def flow_segments(o, p: SurfacePoint, direction, time, stop_at_singularity=True):
    """
    Pieces of the straight trajectory from ``p`` with velocity ``direction``.

    Returns ``(segments, outcome)``; a segment is
    ``(square, x, y, t_start, t_end)`` with ``(x, y)`` the chart position at
    ``t_start``.  Grid crossing times are two arithmetic progressions which
    are merged; a simultaneous crossing is a passage through a vertex.
    """
    dx, dy = direction
    exact = all(_exact(v) for v in (dx, dy, time, p.x, p.y))
    num = Fraction if exact else float
    sign = 1 if time >= 0 else -1
    dx, dy = num(sign * dx), num(sign * dy)
    total = num(abs(time))
    p = normalize(o, p.square, num(p.x), num(p.y))
    s, x, y = p.square, p.x, p.y
    inf = float("inf")

    def first(pos, d):
        if d > 0:
            return (1 - pos) / d, 1 / d
        if d < 0:
            return pos / -d, 1 / -d
        return inf, inf

    tx0, stepx = first(x, dx)
    ty0, stepy = first(y, dy)
    kx = ky = 0
    tx, ty = tx0, ty0
    t = 0 * total
    segs = []
    crossings = 0
    if x == 0 and y == 0 and o.cone_multiplicity(o.corner_vertex(s, 0, 0)) > 1 and stop_at_singularity:
        return segs, FlowOutcome(p, t, True, 0, ())
    while True:
        nxt = min(tx, ty, total)
        if nxt > t:
            segs.append((s, x, y, sign * t, sign * nxt))
        x = x + (nxt - t) * dx
        y = y + (nxt - t) * dy
        t = nxt
        if t >= total:
            break
        cross_x = tx == t
        cross_y = ty == t
        # a crossing through a lattice point of the chart is a passage through a vertex
        through = (cross_x and cross_y) or (cross_y and dx == 0 and x == 0) or (cross_x and dy == 0 and y == 0)
        if through:
            cx = 1 if cross_x and dx > 0 else 0
            cy = 1 if cross_y and dy > 0 else 0
            vert = o.corner_vertex(s, cx, cy)
            if o.cone_multiplicity(vert) > 1 and stop_at_singularity:
                end = normalize(o, s, cx, cy)
                return segs, FlowOutcome(end, t, True, crossings, tuple(segs))
        if cross_x:
            if dx > 0:
                s, x = o.h[s], 0 * x
            else:
                s, x = o.h_inv[s], 1 + 0 * x
            kx += 1
            tx = tx0 + kx * stepx
        if cross_y:
            if dy > 0:
                s, y = o.v[s], 0 * y
            else:
                s, y = o.v_inv[s], 1 + 0 * y
            ky += 1
            ty = ty0 + ky * stepy
        crossings += 1
    end = normalize(o, s, x, y)
    return segs, FlowOutcome(end, t, False, crossings, tuple(segs))


def linear_flow(o, p: SurfacePoint, direction, time) -> FlowOutcome:
    return flow_segments(o, p, direction, time)[1]


def eigen_directions(a):
    """Unit ``(expanding, contracting)`` eigenvectors of ``a``, each with ``y >= 0``."""
    m = np.array(a, dtype=float)
    w, vecs = np.linalg.eig(m)
    order = np.argsort(-np.abs(w))
    out = []
    for k in order:
        e = vecs[:, k].real
        e = e / np.linalg.norm(e)
        if e[1] < 0 or (e[1] == 0 and e[0] < 0):
            e = -e
        out.append((float(e[0]), float(e[1])))
    return out[0], out[1]


def stable_direction(a):
    return eigen_directions(a)[1]


def chart_offset(o, base, q, reach=1):
    """Vector from ``base`` to ``q`` if ``q`` lies in a square at most ``reach`` steps away."""
    best = None
    for ox in range(-reach, reach + 1):
        for oy in range(-reach, reach + 1):
            for order in ("hv", "vh"):
                s = base.square
                for move in order:
                    steps = ox if move == "h" else oy
                    perm = (o.h if steps > 0 else o.h_inv) if move == "h" else (o.v if steps > 0 else o.v_inv)
                    for _ in range(abs(steps)):
                        s = perm[s]
                if s == q.square:
                    vec = (q.x + ox - base.x, q.y + oy - base.y)
                    d = math.hypot(float(vec[0]), float(vec[1]))
                    if best is None or d < best[0]:
                        best = (d, vec)
    return None if best is None else best[1]


def chart_distance(o, p, q):
    vec = chart_offset(o, p, q)
    return math.inf if vec is None else math.hypot(float(vec[0]), float(vec[1]))


def conjugacy_identity_check(t, p: SurfacePoint, s: float) -> float:
    """Residual of ``T(g^E_s p) = g^E_{c s}(T p)`` along the contracting direction ``E``."""
    o = t.origami
    e = stable_direction(t.matrix)
    c = t.eps_v / t.expansion
    a = linear_flow(o, p, e, s)
    if a.hit_singularity:
        raise HitSingularity("trajectory from p meets a cone point", a.time_consumed)
    lhs = apply_map(t, a.endpoint.as_float(), 1)
    tp = apply_map(t, p.as_float(), 1)
    b = linear_flow(o, tp, e, c * s)
    if b.hit_singularity:
        raise HitSingularity("trajectory from T p meets a cone point", b.time_consumed)
    return chart_distance(o, lhs, b.endpoint)
