"""
Numerical experiments: correlation decay, weighted Birkhoff integrals along a
straight-line flow, obstruction exponents and the Giulietti-Liverani
coboundary ``F_n(x) = int_0^{lambda^n} chi(t / lambda^n) f(g_t x) dt``.

The flow direction is a parameter.  On an origami the vertical direction is
rational, so its flow is periodic; the flow that the automorphism
renormalizes is the straight-line flow along the contracting eigendirection
``E`` of ``A`` (``T g^E_s = g^E_{c s} T`` with ``|c| = 1/lambda``).  The
experiments that involve ``T`` use ``E`` by default.

Observables are finite sums of bumps ``a exp(-1 / (1 - |x - c|^2 / r^2))``
whose support discs lie strictly inside a square, or directional
derivatives of such sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import exp1

from .dynamics import SurfacePoint, apply_map_batch, normalize, stable_direction
from .errors import HitSingularity, NoiseFloor, UnreachableBothDirections, ValidationError

DEFAULT_ORDER = 32

# integral of exp(-1/(1-s)) over [0, 1], i.e. of exp(-1/u) over [0, 1]
_RADIAL = math.exp(-1.0) - float(exp1(1.0))
BUMP_MASS = math.pi * _RADIAL  # integral of the unit bump of radius 1


@dataclass(frozen=True)
class Bump:
    square: int
    center: tuple
    radius: float
    amplitude: float
    direction: tuple = None  # set for the directional derivative of the bump

    def check(self, o):
        cx, cy = self.center
        r = self.radius
        if not (0 <= self.square < o.n_squares):
            raise ValidationError(f"bump square {self.square + 1} out of range")
        if not (r > 0 and cx - r > 0 and cx + r < 1 and cy - r > 0 and cy + r < 1):
            raise ValidationError(f"bump support {self.center}, r={r} is not strictly inside its square")

    def values(self, x, y):
        dx = (x - self.center[0]) / self.radius
        dy = (y - self.center[1]) / self.radius
        s = dx * dx + dy * dy
        inside = s < 1
        out = np.zeros(np.shape(s))
        si = s[inside]
        e = np.exp(-1.0 / (1.0 - si))
        if self.direction is None:
            out[inside] = self.amplitude * e
        else:
            # gradient of a exp(-1/(1-s)) is -a exp(-1/(1-s)) / (1-s)^2 * 2 (x - c) / r^2
            g = -self.amplitude * e / (1.0 - si) ** 2 * 2.0 / self.radius
            ex, ey = self.direction
            out[inside] = g * (dx[inside] * ex + dy[inside] * ey)
        return out

    @property
    def integral(self):
        return 0.0 if self.direction is not None else self.amplitude * self.radius ** 2 * BUMP_MASS


@dataclass(frozen=True)
class Observable:
    bumps: tuple
    mean_normalized: bool = False

    def check(self, o):
        for b in self.bumps:
            b.check(o)
        if self.mean_normalized and abs(self.integral()) > 1e-12 * max(1.0, self.l1()):
            raise ValidationError("observable flagged mean-zero has nonzero integral")

    def evaluate(self, squares, x, y):
        squares = np.asarray(squares)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(x.shape)
        for b in self.bumps:
            m = squares == b.square
            if m.any():
                out[m] += b.values(x[m], y[m])
        return out

    def __call__(self, p: SurfacePoint):
        return float(self.evaluate([p.square], [p.x], [p.y])[0])

    def integral(self):
        return sum(b.integral for b in self.bumps)

    def l1(self):
        return sum(abs(b.amplitude) * b.radius ** 2 * BUMP_MASS for b in self.bumps)

    def mean(self, o):
        """Average over the surface (total area ``N``)."""
        return self.integral() / o.n_squares

    def derivative(self, direction):
        """Directional derivative ``L_E`` of a sum of plain bumps."""
        if any(b.direction is not None for b in self.bumps):
            raise ValidationError("only plain bumps can be differentiated")
        d = tuple(float(c) for c in direction)
        return Observable(tuple(Bump(b.square, b.center, b.radius, b.amplitude, d) for b in self.bumps), True)


def random_observable(o, n_bumps, seed, mean_zero=True, radius=(0.08, 0.2)):
    """Sum of bumps with random centres; with ``mean_zero`` the amplitudes cancel in mean."""
    rng = np.random.default_rng(seed)
    bumps = []
    for _ in range(n_bumps):
        r = float(rng.uniform(*radius))
        c = (float(rng.uniform(r + 0.02, 1 - r - 0.02)), float(rng.uniform(r + 0.02, 1 - r - 0.02)))
        bumps.append([int(rng.integers(o.n_squares)), c, r, float(rng.uniform(-1, 1))])
    if mean_zero:
        # remove the mean by adjusting the amplitudes along their masses
        masses = np.array([b[2] ** 2 * BUMP_MASS for b in bumps])
        amps = np.array([b[3] for b in bumps])
        amps = amps - masses * (amps @ masses) / (masses @ masses)
        for b, a in zip(bumps, amps):
            b[3] = float(a)
    obs = Observable(tuple(Bump(*b) for b in bumps), mean_zero)
    obs.check(o)
    return obs


# profiles ---------------------------------------------------------------------

def _psi(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    m = u > 0
    out[m] = np.exp(-1.0 / u[m])
    return out


def chi(s):
    """Smooth cutoff: 1 on ``(-inf, 0.1]``, 0 on ``[0.9, inf)``."""
    a = _psi(0.9 - np.asarray(s, dtype=float))
    b = _psi(np.asarray(s, dtype=float) - 0.1)
    return a / (a + b)


def standard_phi(s):
    """Bump ``exp(-1 / (1 - (2s - 1)^2))`` supported in ``(0, 1)``."""
    u = 2 * np.asarray(s, dtype=float) - 1
    out = np.zeros(u.shape)
    m = np.abs(u) < 1
    out[m] = np.exp(-1.0 / (1.0 - u[m] ** 2))
    return out


def profile_integral(phi, order=200):
    x, w = np.polynomial.legendre.leggauss(order)
    return float(0.5 * (w * phi(0.5 * (x + 1))).sum())


# trajectories -------------------------------------------------------------------

CHUNK = 1 << 17  # grid crossings handled per block


@dataclass(frozen=True)
class Trajectory:
    """A block of a straight trajectory, cut at square crossings."""
    t0: np.ndarray
    t1: np.ndarray
    squares: np.ndarray
    mid_x: np.ndarray
    mid_y: np.ndarray
    direction: tuple


def _orbit(steps, start):
    """Images of ``start`` under the prefix compositions ``steps[j] o ... o steps[0]`` (a log-depth scan)."""
    q = steps
    shift = 1
    while shift < len(q):
        q = np.concatenate([q[:shift], np.take_along_axis(q[shift:], q[:-shift], axis=1)])
        shift *= 2
    return q[:, start] if len(q) else np.empty(0, dtype=steps.dtype)


class _Progression:
    """Crossing times ``first + k step`` of one family of grid lines."""

    def __init__(self, pos, d):
        if d > 0:
            self.first, self.step = (1 - pos) / d, 1 / d
        elif d < 0:
            self.first, self.step = pos / -d, 1 / -d
        else:
            self.first = self.step = None

    def index(self, time):
        if self.step is None:
            return 0
        return max(0, math.ceil((time - self.first) / self.step))

    def times(self, a, b):
        if self.step is None:
            return np.empty(0)
        return self.first + self.step * np.arange(self.index(a), self.index(b))


def trajectory_blocks(o, p: SurfacePoint, direction, tau, chunk=CHUNK):
    """
    Yield the forward trajectory of length ``tau`` from ``p`` in blocks.

    The crossing times of vertical and horizontal grid lines are two
    arithmetic progressions; they are merged and the square sequence follows
    from the prefix products of ``h^{+-1}`` / ``v^{+-1}``.  A coincident
    crossing through a cone point ends the iteration by raising
    :class:`HitSingularity` with the hit time.
    """
    ex, ey = float(direction[0]), float(direction[1])
    p = normalize(o, p.square, float(p.x), float(p.y))
    s, x, y = p.square, p.x, p.y
    if ex < 0 and x == 0:
        s, x = o.h_inv[s], 1.0
    if ey < 0 and y == 0:
        s, y = o.v_inv[s], 1.0
    dtype = np.int16 if o.n_squares < 2 ** 15 else np.int64
    perms = np.array([o.h if ex > 0 else o.h_inv, o.v if ey > 0 else o.v_inv], dtype=dtype)
    gx, gy = _Progression(x, ex), _Progression(y, ey)
    cx = 1 if ex > 0 else 0
    cy = 1 if ey > 0 else 0
    width = chunk / (abs(ex) + abs(ey))
    a = 0.0
    while a < tau:
        b = min(tau, a + width)
        tx, ty = gx.times(a, b), gy.times(a, b)
        times = np.concatenate([tx, ty])
        order = np.argsort(times, kind="mergesort")
        times = times[order]
        labels = np.concatenate([np.zeros(len(tx), dtype=np.int8), np.ones(len(ty), dtype=np.int8)])[order]
        seq = np.empty(len(times) + 1, dtype=dtype)
        seq[0] = s
        seq[1:] = _orbit(perms[labels], s)
        for j in np.nonzero(times[1:] == times[:-1])[0]:
            if o.cone_multiplicity(o.corner_vertex(int(seq[j]), cx, cy)) > 1:
                raise HitSingularity(f"trajectory meets a cone point at time {times[j]}", float(times[j]))
        bounds = np.concatenate([[a], times, [b]])
        t0, t1 = bounds[:-1], bounds[1:]
        keep = t1 > t0
        tm = 0.5 * (t0 + t1)
        yield Trajectory(t0[keep], t1[keep], seq[keep], np.mod(x + tm[keep] * ex, 1.0),
                         np.mod(y + tm[keep] * ey, 1.0), (ex, ey))
        s = int(seq[-1])
        a = b


def _gauss(order):
    return np.polynomial.legendre.leggauss(order)


def trajectory_integral(traj: Trajectory, f: Observable, weight, order=DEFAULT_ORDER):
    """``int weight(t) f(g_t p) dt`` over one block, chord by chord."""
    nodes, wts = _gauss(order)
    ex, ey = traj.direction
    speed2 = ex * ex + ey * ey
    tm = 0.5 * (traj.t0 + traj.t1)
    total = 0.0
    for b in f.bumps:
        m = traj.squares == b.square
        if not m.any():
            continue
        mx = traj.mid_x[m] - b.center[0]
        my = traj.mid_y[m] - b.center[1]
        # |mid + u e - c|^2 = r^2
        bb = (mx * ex + my * ey) / speed2
        disc = bb * bb - (mx * mx + my * my - b.radius ** 2) / speed2
        ok = disc > 0
        if not ok.any():
            continue
        sq = np.sqrt(disc[ok])
        lo = np.maximum(-bb[ok] - sq, (traj.t0[m] - tm[m])[ok])
        hi = np.minimum(-bb[ok] + sq, (traj.t1[m] - tm[m])[ok])
        good = hi > lo
        if not good.any():
            continue
        lo, hi = lo[good], hi[good]
        cxm = mx[ok][good]
        cym = my[ok][good]
        centre_t = tm[m][ok][good]
        half = 0.5 * (hi - lo)
        u = 0.5 * (hi + lo)[:, None] + half[:, None] * nodes[None, :]
        px = cxm[:, None] + u * ex + b.center[0]
        py = cym[:, None] + u * ey + b.center[1]
        vals = b.values(px, py) * weight(centre_t[:, None] + u)
        total += float((vals * wts[None, :]).sum(axis=1) @ half)
    return total


def path_integral(o, f: Observable, p: SurfacePoint, tau, weight, direction, order=DEFAULT_ORDER):
    """``int_0^tau weight(t) f(g_t p) dt``; raises :class:`HitSingularity`."""
    return sum(trajectory_integral(blk, f, weight, order) for blk in trajectory_blocks(o, p, direction, tau))


def weighted_birkhoff(o, f: Observable, p: SurfacePoint, tau, phi=standard_phi, direction=(0.0, 1.0),
                      order=DEFAULT_ORDER):
    """``int_0^tau phi(t / tau) f(g_t p) dt`` for the unit-speed flow along ``direction``."""
    if tau <= 0:
        return 0.0
    return path_integral(o, f, p, tau, lambda t: phi(t / tau), direction, order)


# correlations ---------------------------------------------------------------------

def _grid(o, grid):
    c = (np.arange(grid) + 0.5) / grid
    gx, gy = np.meshgrid(c, c, indexing="ij")
    n = o.n_squares
    squares = np.repeat(np.arange(n), grid * grid)
    return squares, np.tile(gx.ravel(), n), np.tile(gy.ravel(), n)


def correlation(t, f: Observable, g: Observable, n: int, grid: int = 256, split=None):
    """
    ``int f . g o T^n`` over the surface, normalized by its area.

    Midpoint rule on a ``grid x grid`` mesh of every square.  The integrand
    is evaluated as ``(f o T^-k) . (g o T^(n-k))`` with ``k = split`` (default
    ``n // 2``), which equals the original by invariance of Lebesgue measure
    and halves the oscillation frequency the mesh has to resolve.
    """
    if grid < 32:
        raise ValidationError("grid must be at least 32")
    o = t.origami
    k = n // 2 if split is None else split
    s, x, y = _grid(o, grid)
    sf, xf, yf = apply_map_batch(t, s, x, y, -k)
    sg, xg, yg = apply_map_batch(t, s, x, y, n - k)
    vals = f.evaluate(sf, xf, yf) * g.evaluate(sg, xg, yg)
    return float(vals.sum() / (grid * grid * o.n_squares))


def leaf_correlation(t, f: Observable, g: Observable, n: int, leaves: int = 64, order=DEFAULT_ORDER):
    """
    ``int f . g o T^n`` (normalized by the area) integrated along unstable leaves.

    Each bump disc of ``f`` is swept by segments ``c + w E_s + u E_u``.  On
    such a segment ``T^n`` coincides with the straight-line flow along
    ``E_u`` for time ``lambda^n u`` (up to the eigenvalue sign), so the inner
    integral is a trajectory integral of ``g`` weighted by ``f``; it is exact
    chord by chord.  The outer integrand in ``w`` is smooth and compactly
    supported, and a Gauss-Legendre rule with ``leaves`` nodes converges
    spectrally.  Requires ``n >= 0``.
    """
    if n < 0:
        raise ValidationError("leaf correlation needs n >= 0")
    from .dynamics import eigen_directions

    o = t.origami
    eu, es = eigen_directions(t.matrix)
    eu, es = np.array(eu), np.array(es)
    jac = abs(eu[0] * es[1] - eu[1] * es[0])
    sign = 1 if sum(t.matrix[i][i] for i in range(2)) > 0 else -1  # sign of the expanding eigenvalue
    scale = t.expansion ** n
    direction = tuple(float(c) for c in (sign ** n) * eu)
    nodes, wts = _gauss(leaves)
    total = 0.0
    for b in f.bumps:
        # x = c + w es + u eu lies in the disc iff |w es + u eu| < r
        m = np.array([[es @ es, es @ eu], [es @ eu, eu @ eu]])
        wmax = b.radius / math.sqrt(m[0, 0] - m[0, 1] ** 2 / m[1, 1])
        ws = wmax * nodes
        bb = ws * m[0, 1] / m[1, 1]
        half = np.sqrt(np.maximum(bb * bb - (ws * ws * m[0, 0] - b.radius ** 2) / m[1, 1], 0.0))
        u_lo = -bb - half
        length = 2 * half
        start = np.array(b.center)[None, :] + ws[:, None] * es[None, :] + u_lo[:, None] * eu[None, :]
        sq, xs, ys = apply_map_batch(t, np.full(leaves, b.square), start[:, 0], start[:, 1], n)
        inner = np.zeros(leaves)
        for j in range(leaves):
            if length[j] <= 0:
                continue
            bx0, by0 = start[j, 0], start[j, 1]

            def weight(tt, bx0=bx0, by0=by0):
                u = tt / scale
                return b.values(bx0 + u * eu[0], by0 + u * eu[1])

            p = SurfacePoint(int(sq[j]), float(xs[j]), float(ys[j]))
            inner[j] = path_integral(o, g, p, scale * length[j], weight, direction, order) / scale
        total += wmax * float(wts @ inner) * jac
    return total / o.n_squares


@dataclass(frozen=True)
class CorrelationPoint:
    n: int
    value: float
    noise: float


def correlation_series(t, f, g, n_max, grid=256, n_min=0):
    """``C_n`` for ``n_min..n_max`` with a noise estimate from the half-resolution mesh."""
    out = []
    for n in range(n_min, n_max + 1):
        c = correlation(t, f, g, n, grid)
        coarse = correlation(t, f, g, n, grid // 2)
        out.append(CorrelationPoint(n, c, abs(c - coarse)))
    return out


@dataclass(frozen=True)
class ExponentFit:
    abscissae: tuple
    values: tuple
    slope: float
    intercept: float
    r_squared: float
    slope_corrected: float = None
    poly_degree: float = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "abscissae": list(self.abscissae),
            "values": list(self.values),
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "slope_corrected": self.slope_corrected,
            "poly_degree": self.poly_degree,
            **self.extra,
        }


def linear_fit(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    a = np.vstack([xs, np.ones_like(xs)]).T
    (slope, icpt), *_ = np.linalg.lstsq(a, ys, rcond=None)
    pred = slope * xs + icpt
    ss = ((ys - ys.mean()) ** 2).sum()
    r2 = 1.0 - ((ys - pred) ** 2).sum() / ss if ss > 0 else 1.0
    return float(slope), float(icpt), float(r2)


def decay_exponent(series, window=None, noise=None) -> ExponentFit:
    """
    Least-squares slope of ``log |C_n|`` against ``n``.

    ``series`` holds ``(n, C_n)`` pairs or :class:`CorrelationPoint` values;
    ``window = (n_lo, n_hi)`` is inclusive.  A joint fit of
    ``a + b n + d log n`` gives ``slope_corrected = b`` and the polynomial
    degree estimate ``d`` (informational).
    """
    pts = []
    for item in series:
        if isinstance(item, CorrelationPoint):
            pts.append((item.n, item.value, item.noise))
        else:
            pts.append((item[0], item[1], None if noise is None else noise))
    if window is not None:
        pts = [p for p in pts if window[0] <= p[0] <= window[1]]
    if len(pts) < 2:
        raise ValidationError("need at least two points in the window")
    for n, c, nz in pts:
        if c == 0 or (nz is not None and abs(c) <= nz):
            raise NoiseFloor(f"|C_{n}| = {abs(c):.3g} is below the noise estimate {nz}")
    ns = [p[0] for p in pts]
    logs = [math.log(abs(p[1])) for p in pts]
    slope, icpt, r2 = linear_fit(ns, logs)
    corrected, degree = None, None
    if len(pts) >= 3 and min(ns) >= 1:
        a = np.vstack([np.array(ns, float), np.log(ns), np.ones(len(ns))]).T
        coef, *_ = np.linalg.lstsq(a, np.array(logs), rcond=None)
        corrected, degree = float(coef[0]), float(coef[1])
    return ExponentFit(tuple(ns), tuple(logs), slope, icpt, r2, corrected, degree)


# obstruction exponents -------------------------------------------------------------

def sample_points(o, count, seed):
    rng = np.random.default_rng(seed)
    return [SurfacePoint(int(rng.integers(o.n_squares)), float(rng.uniform()), float(rng.uniform()))
            for _ in range(count)]


def _flow_direction(t, direction):
    return stable_direction(t.matrix) if direction is None else direction


def obstruction_exponent(o, t, f: Observable, n_max, sample_points_count=64, seed=0, n_min=3,
                         phi=standard_phi, direction=None, order=DEFAULT_ORDER) -> ExponentFit:
    """
    Slope of ``log max_p |int_0^{lambda^n} phi(t/lambda^n) f(g_t p) dt|``
    against ``n log lambda``.
    """
    e = _flow_direction(t, direction)
    lam = t.expansion
    pts = sample_points(o, sample_points_count, seed)
    xs, ys = [], []
    for n in range(n_min, n_max + 1):
        tau = lam ** n
        best = 0.0
        for p in pts:
            try:
                best = max(best, abs(weighted_birkhoff(o, f, p, tau, phi, e, order)))
            except HitSingularity:
                continue
        if best == 0:
            raise NoiseFloor(f"all weighted integrals vanish at n={n}")
        xs.append(n * math.log(lam))
        ys.append(math.log(best))
    slope, icpt, r2 = linear_fit(xs, ys)
    return ExponentFit(tuple(xs), tuple(ys), slope, icpt, r2,
                       extra={"seed": seed, "sample_points": sample_points_count})


# coboundary -------------------------------------------------------------------------

def solve_coboundary(o, t, f: Observable, n, p: SurfacePoint, direction=None, order=DEFAULT_ORDER):
    """
    ``F_n(p)``: forward integral ``int_0^{lambda^n} chi(t/lambda^n) f(g_t p) dt``
    when the forward trajectory avoids the cone points, else the backward
    ``-int_0^{lambda^n} chi(t/lambda^n) f(g_{-t} p) dt``.

    ``F = lim F_n`` solves ``int_0^tau f(g_t x) dt = F(x) - F(g_tau x)``.
    """
    e = _flow_direction(t, direction)
    tau = t.expansion ** n
    cut = lambda s: chi(s / tau)  # noqa: E731
    try:
        return path_integral(o, f, p, tau, cut, e, order)
    except HitSingularity:
        pass
    try:
        return -path_integral(o, f, p, tau, cut, (-e[0], -e[1]), order)
    except HitSingularity:
        raise UnreachableBothDirections(f"{p} meets cone points in both time directions") from None


@dataclass(frozen=True)
class CoboundaryReport:
    n_values: tuple
    sup_differences: tuple
    contraction_ratios: tuple
    sup_error: float = None
    error_constant: float = None
    residual_max: float = None
    holder_exponent: float = None
    seed: int = 0

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def coboundary_report(o, t, f: Observable, n_values, sample_count=16, seed=0, reference=None,
                      residual_pairs=100, residual_n=None, holder=True, direction=None, order=DEFAULT_ORDER):
    """
    Convergence of ``F_n`` on random sample points.

    ``reference`` (a callable on points) is the expected limit up to an
    additive constant, which is estimated as the average difference.
    The coboundary residual ``|F(p) - F(g_tau p) - int_0^tau f(g_t p) dt|``
    and the Hoelder fit use ``residual_n`` (default: the largest ``n``) on
    ``residual_pairs`` random ``(p, tau)``.
    """
    from .dynamics import linear_flow

    e = _flow_direction(t, direction)
    pts = sample_points(o, sample_count, seed)
    table = np.array([[solve_coboundary(o, t, f, n, p, e, order) for p in pts] for n in n_values])
    sups = tuple(float(np.max(np.abs(table[i + 1] - table[i]))) for i in range(len(n_values) - 1))
    ratios = tuple(sups[i + 1] / sups[i] if sups[i] > 0 else float("nan") for i in range(len(sups) - 1))
    sup_error = const = None
    if reference is not None:
        ref = np.array([reference(p) for p in pts])
        diff = table[-1] - ref
        const = float(diff.mean())
        sup_error = float(np.max(np.abs(diff - const)))
    n_top = n_values[-1] if residual_n is None else residual_n
    rng = np.random.default_rng(seed + 1)
    res = 0.0
    for _ in range(residual_pairs):
        p = SurfacePoint(int(rng.integers(o.n_squares)), float(rng.uniform()), float(rng.uniform()))
        tau = float(rng.uniform(0.1, 2.0))
        q = linear_flow(o, p, e, tau)
        if q.hit_singularity:
            continue
        lhs = solve_coboundary(o, t, f, n_top, p, e, order) - solve_coboundary(o, t, f, n_top, q.endpoint, e, order)
        rhs = weighted_birkhoff(o, f, p, tau, lambda s: np.ones(np.shape(s)), e, order)
        res = max(res, abs(lhs - rhs))
    noise = sups[-1] if sups else 0.0
    hol = holder_exponent(o, t, f, n_top, seed=seed, noise=noise, direction=e, order=order) if holder else None
    return CoboundaryReport(tuple(n_values), sups, ratios, sup_error, const, res, hol, seed)


def holder_exponent(o, t, f, n, seed=0, base_points=8, scales=(0.2, 0.1, 0.05, 0.025, 0.0125),
                    noise=0.0, direction=None, order=DEFAULT_ORDER):
    """
    Fitted exponent of ``max |F_n(p) - F_n(p + d e_x)|`` against ``d`` over
    horizontal pairs inside one square.  Scales whose largest difference is
    below ``noise`` (the convergence error of ``F_n``) are dropped.
    """
    e = _flow_direction(t, direction)
    rng = np.random.default_rng(seed + 2)
    room = 1.0 - max(scales)
    bases = [SurfacePoint(int(rng.integers(o.n_squares)), float(rng.uniform(0.02, room - 0.02)),
                          float(rng.uniform())) for _ in range(base_points)]
    f0 = [solve_coboundary(o, t, f, n, p, e, order) for p in bases]
    logs_d, logs_f = [], []
    for d in scales:
        best = max(abs(solve_coboundary(o, t, f, n, SurfacePoint(p.square, p.x + d, p.y), e, order) - v)
                   for p, v in zip(bases, f0))
        if best > noise:
            logs_d.append(math.log(d))
            logs_f.append(math.log(best))
    if len(logs_d) < 2:
        return float("nan")
    return linear_fit(logs_d, logs_f)[0]
