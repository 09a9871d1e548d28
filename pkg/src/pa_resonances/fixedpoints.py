r"""
Fixed points of ``T^n``, their Lefschetz indices, and the flat trace.

Indices are winding numbers of the displacement ``p - T^n p`` along a loop
around the fixed point.  At a vertex of cone angle ``2 pi k`` the loop is
taken in the cone coordinate ``zeta = r^{1/k} e^{i theta / k}``, ``theta``
being the developed angle in ``[0, 2 pi k)``.

Two evaluations are available:

``model``
    The map near a fixed point is linear in each sector chart, so in
    developed polar coordinates it is ``(r, theta) -> (r |M u|, L(theta) +
    2 pi m)`` with ``M = A^n``, ``u = (cos theta, sin theta)``, ``L`` the
    continuous lift of ``arg M u`` and ``m`` the number of sheets by which
    the sectors are rotated.  ``m`` is read off one exact evaluation of
    ``T^n``.  The loop is refined adaptively.
``pointwise``
    Sample points on a small loop on the surface and push them through the
    branch decomposition of ``T^n`` in floating point.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import geometry as geo
from .automorphism import DEFAULT_BRANCH_BUDGET, compose_power, germ_direction, power_anchor, synthesize
from .dynamics import SurfacePoint, apply_map_batch, chart_offset, normalize
from .errors import DegenerateDisplacement, UnstableWinding, ValidationError
from .surface import perm_power

TWO_PI = 2 * math.pi


@lru_cache(maxsize=32)
def power_map(t, n, method="synthesize", max_branches=DEFAULT_BRANCH_BUDGET):
    """Branch decomposition of ``T^n``.

    ``synthesize`` develops ``A^n`` directly with the germ of ``T^n`` (fewer
    and larger branches); ``compose`` uses iterated clip-and-compose.
    """
    if n == 1:
        return t
    if method == "compose":
        return compose_power(t, n, max_branches)
    if method != "synthesize":
        raise ValidationError(f"unknown power method {method!r}")
    an = geo.mat_pow(t.matrix, n)
    out = synthesize(t.origami, an, power_anchor(t, n))
    object.__setattr__(out, "power", n)
    vp = perm_power(t.vertex_image, n)
    if tuple(out.vertex_image) != vp:
        raise AssertionError("vertex action of the developed power disagrees with the iterate")
    return out


@dataclass(frozen=True)
class FixedPointRecord:
    kind: str  # "regular" or "singular"
    location: SurfacePoint
    index: int
    n: int
    branch_id: int = None
    vertex: int = None
    cone_multiplicity: int = 1
    sheet_shift: int = 0

    def to_dict(self):
        return {
            "kind": self.kind,
            "square": self.location.square + 1,
            "x": str(self.location.x),
            "y": str(self.location.y),
            "index": self.index,
            "n": self.n,
            "branch_id": self.branch_id,
            "vertex": None if self.vertex is None else self.vertex + 1,
            "cone_multiplicity": self.cone_multiplicity,
        }


# winding machinery -------------------------------------------------------------

def _principal(a):
    return (a + math.pi) % TWO_PI - math.pi


def lifted_argument(m, thetas):
    """Continuous lift of ``arg(m u(theta))`` on increasing ``thetas``.

    The lift is increasing (``det m > 0``), so consecutive increments are the
    differences of arguments taken modulo ``2 pi``.
    """
    thetas = np.asarray(thetas, dtype=float)
    u = np.stack([np.cos(thetas), np.sin(thetas)])
    w = np.asarray(m, dtype=float) @ u
    a = np.arctan2(w[1], w[0])
    inc = np.mod(np.diff(a), TWO_PI)
    return np.concatenate([[a[0]], a[0] + np.cumsum(inc)]), np.hypot(w[0], w[1])


def _winding(fun, lo, hi, samples, max_depth=48):
    """Winding number of a nonvanishing complex function over ``[lo, hi]``."""
    ts = list(np.linspace(lo, hi, samples + 1))
    vals = list(fun(np.array(ts)))
    total = 0.0
    stack = [(ts[i], vals[i], ts[i + 1], vals[i + 1], 0) for i in range(samples)][::-1]
    while stack:
        a, fa, b, fb, depth = stack.pop()
        if fa == 0 or fb == 0:
            raise DegenerateDisplacement("displacement vanishes on the loop")
        step = _principal(cmath.phase(fb) - cmath.phase(fa))
        if abs(step) < math.pi / 4:
            total += step
            continue
        if depth >= max_depth:
            raise UnstableWinding("winding refinement did not converge")
        c = 0.5 * (a + b)
        fc = fun(np.array([c]))[0]
        stack.append((c, fc, b, fb, depth + 1))
        stack.append((a, fa, c, fc, depth + 1))
    w = total / TWO_PI
    k = round(w)
    if abs(w - k) > 1e-6:
        raise UnstableWinding(f"non-integral winding {w}")
    return int(k)


def _lift_at(m, theta):
    """Lift of ``arg(m u)`` at ``theta``, normalized so the lift at 0 is the principal value."""
    grid = np.linspace(0.0, theta, 9) if theta > 0 else np.array([0.0])
    return float(lifted_argument(m, grid)[0][-1])


def model_displacement(m, k, shift):
    """Displacement in the cone coordinate for the local model ``(m, k, shift)``."""
    m = np.asarray(m, dtype=float)

    def fun(thetas):
        thetas = np.asarray(thetas, dtype=float)
        # lift from 0 up to each theta: refine on a common grid through the samples
        grid = np.union1d(np.linspace(0.0, TWO_PI * k, 64 * k + 1), thetas)
        lift, norm = lifted_argument(m, grid)
        idx = np.searchsorted(grid, thetas)
        big_theta = lift[idx] + TWO_PI * shift
        r_img = norm[idx]
        return np.exp(1j * thetas / k) - r_img ** (1.0 / k) * np.exp(1j * big_theta / k)

    return fun


@lru_cache(maxsize=256)
def model_index(m, k=1, shift=0, samples=512):
    """Lefschetz index of the exact local model (see module docstring)."""
    return _winding(model_displacement(m, k, shift % k), 0.0, TWO_PI * k, samples)


# locating sectors ---------------------------------------------------------------

def _developed_angle(o, square, cx, cy, wx, wy):
    """Developed angle of the vector ``w`` from corner ``(cx, cy)`` of ``square``."""
    vert, q = o.sector_index[(square, cx, cy)]
    mid = (q % 4) * math.pi / 2 + math.pi / 4
    # clamp into the quadrant: rounding may push a boundary ray across it
    rel = min(max(_principal(math.atan2(float(wy), float(wx)) - mid), -math.pi / 4), math.pi / 4)
    a = mid + rel
    return vert, TWO_PI * (q // 4) + a


def sheet_shift(tn, vertex):
    """Number of sheets by which ``T^n`` rotates the sectors at a fixed vertex."""
    o = tn.origami
    m = tn.matrix
    k = o.cone_multiplicity(vertex)
    s0, _, _ = o.sectors[vertex][0]
    d = germ_direction(m)
    eps = Fraction(1, 4 * geo.mat_norm_inf(m) * (abs(d[0]) + abs(d[1])))
    p = (eps * d[0], eps * d[1])
    s1, (x1, y1) = tn.apply_exact(s0, p)
    cx, cy = round(x1), round(y1)
    vert, big_theta = _developed_angle(o, s1, cx, cy, x1 - cx, y1 - cy)
    if vert != vertex:
        raise AssertionError("germ image left the fixed vertex")
    theta0 = math.atan2(d[1], d[0])
    lift = _lift_at(m, theta0)
    shift = round((big_theta - lift) / TWO_PI)
    if abs(big_theta - lift - TWO_PI * shift) > 1e-6:
        raise AssertionError("germ image direction is not the linear image")
    return shift % k


# enumeration ---------------------------------------------------------------------

def enumerate_fixed_points(t, n, method="synthesize", index_method="model", max_branches=DEFAULT_BRANCH_BUDGET):
    """All fixed points of ``T^n`` with their indices."""
    if n < 1:
        raise ValidationError("n must be positive")
    tn = power_map(t, n, method, max_branches)
    o = t.origami
    an = tn.matrix
    ia = ((1 - an[0][0], -an[0][1]), (-an[1][0], 1 - an[1][1]))
    det = geo.det(ia)
    adj = ((ia[1][1], -ia[0][1]), (-ia[1][0], ia[0][0]))
    found = {}
    for bid, b in enumerate(tn.branches):
        if b.source_square != b.target_square:
            continue
        c = b.translation
        z = (Fraction(adj[0][0] * c[0] + adj[0][1] * c[1], det),
             Fraction(adj[1][0] * c[0] + adj[1][1] * c[1], det))
        if not (0 <= z[0] <= 1 and 0 <= z[1] <= 1):
            continue
        if not geo.contains(b.domain, z):
            continue
        if z[0] in (0, 1) and z[1] in (0, 1):
            continue  # a vertex, handled below
        p = normalize(o, b.source_square, z[0], z[1])
        if p not in found:
            found[p] = bid
    regular_index = model_index(an, 1, 0) if index_method == "model" else None
    records = []
    for p, bid in sorted(found.items(), key=lambda kv: (kv[0].square, kv[0].x, kv[0].y)):
        rec = FixedPointRecord("regular", p, 0, n, branch_id=bid)
        ind = regular_index if regular_index is not None else lefschetz_index(t, rec, method="pointwise")
        records.append(FixedPointRecord("regular", p, ind, n, branch_id=bid))
    vp = tn.vertex_image
    for vert, cyc in enumerate(o.vertices):
        if vp[vert] != vert:
            continue
        k = len(cyc)
        shift = sheet_shift(tn, vert)
        loc = SurfacePoint(cyc[0], Fraction(0), Fraction(0))
        rec = FixedPointRecord("singular" if k > 1 else "regular", loc, 0, n, vertex=vert,
                               cone_multiplicity=k, sheet_shift=shift)
        if index_method == "model":
            ind = model_index(an, k, shift)
        else:
            ind = lefschetz_index(t, rec, method="pointwise")
        records.append(FixedPointRecord(rec.kind, loc, ind, n, vertex=vert, cone_multiplicity=k,
                                        sheet_shift=shift))
    return records


def lefschetz_index(t, record: FixedPointRecord, radius=None, samples=512, method="model",
                    power_method="synthesize"):
    """Winding-number index of a fixed point of ``T^n``; ``n`` is taken from the record."""
    n = record.n
    tn = power_map(t, n, power_method)
    m = tn.matrix
    k = record.cone_multiplicity
    if method == "model":
        shift = sheet_shift(tn, record.vertex) if record.vertex is not None else 0
        return model_index(m, k, shift, samples)
    if method != "pointwise":
        raise ValidationError(f"unknown index method {method!r}")
    norm = geo.mat_norm_inf(m)
    if radius is None:
        radius = min(1 / 64, 1 / (4 * norm))
    if record.vertex is None:
        z = record.location
        dist = _distance_to_corners(z)
        radius = min(radius, dist / (2 * (1 + norm)))
        fun = _pointwise_regular(tn, z, float(radius))
        count = samples
        prev = None
        for _ in range(6):
            w = _winding_sampled(fun, 0.0, TWO_PI, count)
            if w == prev:
                return w
            prev, count = w, 2 * count
        raise UnstableWinding("pointwise winding did not stabilise")
    fun = _pointwise_vertex(tn, record.vertex, k, float(radius))
    count = samples * k
    prev = None
    for _ in range(6):
        w = _winding_sampled(fun, 0.0, TWO_PI * k, count)
        if w == prev:
            return w
        prev, count = w, 2 * count
    raise UnstableWinding("pointwise winding did not stabilise")


def _distance_to_corners(p):
    x, y = float(p.x), float(p.y)
    return min(math.hypot(x - a, y - b) for a in (0, 1) for b in (0, 1))


def _winding_sampled(fun, lo, hi, count):
    ts = np.linspace(lo, hi, count + 1)
    vals = fun(ts)
    if np.any(np.abs(vals) == 0):
        raise DegenerateDisplacement("displacement vanishes on the loop")
    steps = np.angle(vals[1:] / vals[:-1])
    if np.max(np.abs(steps)) > math.pi / 2:
        return None
    w = steps.sum() / TWO_PI
    return int(round(w))


def _pointwise_regular(tn, z, r):
    o = tn.origami
    zf = z.as_float()

    def fun(thetas):
        ps = [normalize(o, zf.square, zf.x + r * math.cos(a), zf.y + r * math.sin(a)) for a in thetas]
        s, x, y = apply_map_batch(tn, [p.square for p in ps], [p.x for p in ps], [p.y for p in ps], 1)
        out = []
        for a, si, xi, yi in zip(thetas, s, x, y):
            off = chart_offset(o, zf, SurfacePoint(int(si), float(xi), float(yi)))
            if off is None:
                raise DegenerateDisplacement("image left the chart around the fixed point")
            out.append(complex(r * math.cos(a) - off[0], r * math.sin(a) - off[1]))
        return np.array(out)

    return fun


def _pointwise_vertex(tn, vertex, k, r):
    o = tn.origami
    sectors = o.sectors[vertex]

    def fun(thetas):
        pts = []
        for a in thetas:
            q = int(a // (math.pi / 2)) % (4 * k)
            sq, cx, cy = sectors[q]
            pts.append(normalize(o, sq, cx + r * math.cos(a), cy + r * math.sin(a)))
        s, x, y = apply_map_batch(tn, [p.square for p in pts], [p.x for p in pts], [p.y for p in pts], 1)
        out = []
        for a, si, xi, yi in zip(thetas, s, x, y):
            si = int(si)
            cx, cy = round(xi), round(yi)
            vert, big = _developed_angle(o, si, cx, cy, xi - cx, yi - cy)
            if vert != vertex:
                raise DegenerateDisplacement("loop image is not near the fixed vertex")
            rho = math.hypot(xi - cx, yi - cy)
            zp = r ** (1 / k) * cmath.exp(1j * a / k)
            zq = rho ** (1 / k) * cmath.exp(1j * big / k)
            out.append(zp - zq)
        return np.array(out)

    return fun


# flat trace ------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceReport:
    n: int
    lhs: float
    rhs_truncated: float
    rhs_closed: float
    residual: float
    fixed_point_count: int
    index_sum: int
    lefschetz_number: int = None
    tail_bound: float = None
    breakdown: tuple = field(default=(), repr=False)

    def to_dict(self):
        return {
            "n": self.n,
            "lhs": self.lhs,
            "rhs_truncated": self.rhs_truncated,
            "rhs_closed": self.rhs_closed,
            "residual": self.residual,
            "fixed_point_count": self.fixed_point_count,
            "index_sum": self.index_sum,
            "lefschetz_number": self.lefschetz_number,
            "tail_bound": self.tail_bound,
            "breakdown": self.breakdown_summary(),
        }

    def breakdown_summary(self):
        out = {}
        for r in self.breakdown:
            key = f"{r.kind}:k={r.cone_multiplicity}:ind={r.index}"
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))


def flat_trace_lhs(t, records, n):
    lam, eh, ev = t.expansion, t.eps_h, t.eps_v
    den = (1 - eh ** n * lam ** n) * (1 - ev ** n * lam ** (-n))
    return sum(r.index for r in records) / den


def flat_trace(t, n, homology=None, cutoff=1e-8, method="synthesize", index_method="model"):
    """Flat trace of ``T^n`` from fixed points against the resonance sums."""
    from .homology import homology_action, xi_roots
    from .resonances import closed_form_sum, enumerate_spectrum, resonance_sum

    h = homology if homology is not None else homology_action(t)
    xi = xi_roots(h)
    records = enumerate_fixed_points(t, n, method, index_method)
    lhs = flat_trace_lhs(t, records, n)
    spec = enumerate_spectrum(xi, t.expansion, t.eps_h, t.eps_v, cutoff)
    trunc, tb = resonance_sum(spec, n)
    closed = closed_form_sum(xi, t.expansion, t.eps_h, t.eps_v, n)
    return TraceReport(n, float(lhs), float(trunc.real), float(closed.real), abs(lhs - closed.real),
                       len(records), sum(r.index for r in records), h.lefschetz_number(n), tb,
                       tuple(records))
