"""
Predicted Ruelle resonances of a linear pseudo-Anosov map.

For ``Xi = {mu_i}`` (the part of the spectrum of ``T^*`` on ``H^1`` besides
``lambda^{+-1}``) the resonances are ``1`` and the twisted ladders
``eps_h^k eps_v^l lambda^{-k-l} mu_i`` for ``k >= 1, l >= 0``.  Equal
values are merged and their multiplicities added.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

from .errors import PremiseViolation, TailBoundTooLarge, ValidationError

log = logging.getLogger(__name__)

MERGE_TOL = 1e-10


@dataclass(frozen=True)
class Resonance:
    value: complex
    multiplicity: int
    provenance: tuple = ()

    def to_dict(self):
        return {"re": self.value.real, "im": self.value.imag, "mult": self.multiplicity,
                "provenance": [list(p) for p in self.provenance]}


@dataclass(frozen=True)
class ResonanceSpectrum:
    entries: tuple
    cutoff: float
    lam: float
    eps_h: int
    eps_v: int
    orientable_foliations: bool = True
    extended: bool = False
    sigma_cycles: tuple = ()
    xi: tuple = ()
    mu_minus: tuple = ()
    j_max: int = 0
    merge_warnings: tuple = field(default=(), compare=False)

    def values(self):
        return [e.value for e in self.entries]

    def multiplicity(self, z, tol=1e-9):
        return sum(e.multiplicity for e in self.entries if abs(e.value - z) < tol)

    def total_multiplicity(self):
        return sum(e.multiplicity for e in self.entries)

    def to_dict(self):
        return {
            "entries": [e.to_dict() for e in self.entries],
            "cutoff": self.cutoff,
            "lambda": self.lam,
            "eps_h": self.eps_h,
            "eps_v": self.eps_v,
            "orientable_foliations": self.orientable_foliations,
            "extended": self.extended,
            "sigma_cycles": list(self.sigma_cycles),
        }


def _check_premise(mus, lam):
    for mu, _ in mus:
        r = abs(mu)
        if not (1 / lam < r < lam):
            raise PremiseViolation(f"|mu| = {r} is not in ({1 / lam}, {lam})")


def _ladder(mus, lam, eps_h, eps_v, cutoff, parity, tag_offset=0):
    """Raw (value, mult, provenance) triples, merged exactly by (i, k+l, sign)."""
    out = {}
    for i, (mu, d) in enumerate(mus):
        mu = complex(mu)
        n = 1
        while abs(mu) * lam ** (-n) >= cutoff:
            for k in range(1, n + 1):
                l = n - k
                if parity is not None and (k + l) % 2 != parity:
                    continue
                sign = eps_h ** k * eps_v ** l
                key = (i + tag_offset, n, sign)
                if key not in out:
                    out[key] = [sign * lam ** (-n) * mu, 0, []]
                out[key][1] += d
                out[key][2].append((i + 1 + tag_offset, k, l))
            n += 1
    return [(v, m, tuple(p)) for v, m, p in out.values()]


def _merge(raw, tol=MERGE_TOL):
    """Numerical merge of coinciding values; returns entries and warnings."""
    raw = sorted(raw, key=lambda r: (-abs(r[0]), -r[0].real, -r[0].imag))
    groups = []
    warnings = []
    for v, m, p in raw:
        for g in groups:
            if abs(g[0] - v) < tol * max(1.0, abs(v)):
                warnings.append(f"merged {v:.12g} into {g[0]:.12g}: provenance {list(p)} + {list(g[2])}")
                g[1] += m
                g[2] = g[2] + p
                break
        else:
            groups.append([v, m, p])
    for w in warnings:
        log.warning(w)
    entries = []
    for v, m, p in groups:
        if abs(v.imag) < tol:
            v = complex(v.real, 0.0)
        entries.append(Resonance(v, m, tuple(p)))
    entries.sort(key=lambda e: (-abs(e.value), -e.value.real, -e.value.imag))
    return tuple(entries), tuple(warnings)


def _one():
    return (complex(1.0), 1, (("const",),))


def enumerate_spectrum(xi, lam, eps_h=1, eps_v=1, cutoff=1e-3) -> ResonanceSpectrum:
    """Resonances of modulus ``>= cutoff`` in the orientable case."""
    if cutoff <= 0:
        raise ValidationError("cutoff must be positive")
    if lam <= 1:
        raise ValidationError("lambda must exceed 1")
    xi = tuple((complex(mu), int(d)) for mu, d in xi)
    _check_premise(xi, lam)
    raw = [_one()] + _ladder(xi, lam, eps_h, eps_v, cutoff, None)
    entries, warns = _merge(raw)
    return ResonanceSpectrum(entries, cutoff, lam, eps_h, eps_v, xi=xi, merge_warnings=warns)


def enumerate_spectrum_nonorientable(mu_plus, mu_minus, lam, eps_h, eps_v, cutoff=1e-3,
                                     parity_split=True) -> ResonanceSpectrum:
    """
    Resonances when the invariant foliations are not orientable.

    ``mu_plus`` contributes along ``k + l`` even, ``mu_minus`` along ``k + l``
    odd.  With ``parity_split=False`` every ``(k, l)`` is used for both lists,
    which is the orientable formula.
    """
    if cutoff <= 0:
        raise ValidationError("cutoff must be positive")
    mu_plus = tuple((complex(mu), int(d)) for mu, d in mu_plus)
    mu_minus = tuple((complex(mu), int(d)) for mu, d in mu_minus)
    _check_premise(mu_plus + mu_minus, lam)
    if parity_split:
        raw = (_ladder(mu_plus, lam, eps_h, eps_v, cutoff, 0)
               + _ladder(mu_minus, lam, eps_h, eps_v, cutoff, 1, tag_offset=len(mu_plus)))
    else:
        raw = _ladder(mu_plus + mu_minus, lam, eps_h, eps_v, cutoff, None)
    entries, warns = _merge([_one()] + raw)
    if not parity_split:
        return ResonanceSpectrum(entries, cutoff, lam, eps_h, eps_v, xi=mu_plus + mu_minus,
                                 merge_warnings=warns)
    return ResonanceSpectrum(entries, cutoff, lam, eps_h, eps_v, orientable_foliations=False,
                             xi=mu_plus, mu_minus=mu_minus, merge_warnings=warns)


def addition_count(j, k_h=None, k_v=None):
    """Number of ``(i_h, i_v)`` with ``i_h + i_v + 1 = j`` inside the given bounds."""
    return sum(1 for ih in range(j) if (k_h is None or ih <= k_h) and (k_v is None or j - 1 - ih <= k_v))


def extended_additions(spec: ResonanceSpectrum, sigma_cycles, j_max, k_h=None, k_v=None) -> ResonanceSpectrum:
    """
    Add the eigenvalues ``exp(2 pi i k / p) lambda^-j`` coming from
    singularities (one family per cycle of length ``p`` of the singularity
    permutation), for ``1 <= j <= j_max``.
    """
    if spec.extended:
        raise ValidationError("spectrum already contains the extended additions")
    if not spec.orientable_foliations:
        raise ValidationError("extended additions are defined for orientable foliations only")
    if spec.eps_h != 1 or spec.eps_v != 1:
        raise PremiseViolation("extended additions need eps_h = eps_v = +1")
    raw = [(e.value, e.multiplicity, e.provenance) for e in spec.entries]
    lam = spec.lam
    for c, p in enumerate(sigma_cycles):
        for j in range(1, j_max + 1):
            mult = addition_count(j, k_h, k_v)
            if mult == 0:
                continue
            for k in range(p):
                z = cmath.exp(2j * math.pi * k / p) * lam ** (-j)
                if abs(z.imag) < 1e-15:
                    z = complex(z.real, 0.0)
                raw.append((z, mult, (("sigma", c + 1, j, k),)))
    entries, warns = _merge(raw)
    return ResonanceSpectrum(entries, spec.cutoff, lam, spec.eps_h, spec.eps_v, True, True,
                             tuple(sigma_cycles), spec.xi, spec.mu_minus, j_max,
                             spec.merge_warnings + warns)


# trace sums ------------------------------------------------------------------

def geometric_tail(x, m):
    """``sum_{j > m} j x^j`` for ``0 <= x < 1``."""
    return x ** (m + 1) * ((m + 1) - m * x) / (1 - x) ** 2


def tail_bound(spec: ResonanceSpectrum, n: int) -> float:
    """Certified bound on ``sum |d_alpha alpha^n|`` over resonances below the cutoff."""
    lam = spec.lam
    x = lam ** (-n)
    total = 0.0
    for mu, d in spec.xi + spec.mu_minus:
        r = abs(mu)
        m = 0
        while r * lam ** (-(m + 1)) >= spec.cutoff:
            m += 1
        total += d * r ** n * geometric_tail(x, m)
    if spec.extended:
        total += sum(spec.sigma_cycles) * geometric_tail(x, spec.j_max)
    return total


def truncated_sum(spec: ResonanceSpectrum, n: int) -> complex:
    return sum(e.multiplicity * e.value ** n for e in spec.entries)


def resonance_sum(spec: ResonanceSpectrum, n: int, tol=None):
    """``(sum d_alpha alpha^n over the entries, certified tail bound)``."""
    if n < 1:
        raise ValidationError("n must be positive")
    tb = tail_bound(spec, n)
    if tol is not None and tb > tol:
        raise TailBoundTooLarge(f"tail bound {tb:.3g} exceeds {tol:.3g} at n={n}; lower the cutoff")
    return truncated_sum(spec, n), tb


def _denominators(lam, eps_h, eps_v, n):
    dm = (1 - eps_h ** n * lam ** n) * (1 - eps_v ** n * lam ** (-n))
    dp = (1 + eps_h ** n * lam ** n) * (1 + eps_v ** n * lam ** (-n))
    return dm, dp


def closed_form_sum(xi, lam, eps_h, eps_v, n) -> complex:
    """``1 - sum mu^n / ((1 - eps_h^n lam^n)(1 - eps_v^n lam^-n))``."""
    dm, _ = _denominators(lam, eps_h, eps_v, n)
    s = sum(d * complex(mu) ** n for mu, d in xi)
    return 1 - s / dm


def closed_form_sum_nonorientable(mu_plus, mu_minus, lam, eps_h, eps_v, n) -> complex:
    dm, dp = _denominators(lam, eps_h, eps_v, n)
    sp = sum(d * complex(mu) ** n for mu, d in mu_plus)
    sm = sum(d * complex(mu) ** n for mu, d in mu_minus)
    return 1 - 0.5 * sp * (1 / dm + 1 / dp) - 0.5 * sm * (1 / dm - 1 / dp)


def spectrum_closed_form(spec: ResonanceSpectrum, n: int) -> complex:
    if spec.extended:
        raise ValidationError("no closed form for the extended spectrum")
    if spec.mu_minus or not spec.orientable_foliations:
        return closed_form_sum_nonorientable(spec.xi, spec.mu_minus, spec.lam, spec.eps_h, spec.eps_v, n)
    return closed_form_sum(spec.xi, spec.lam, spec.eps_h, spec.eps_v, n)


# invariant distributions -------------------------------------------------------

@dataclass(frozen=True)
class DimensionGrowth:
    slope: int
    constant: int
    classes: dict
    order: int = None

    @property
    def dimension(self):
        return None if self.order is None else self.at(self.order)

    def at(self, order):
        return self.slope * order + self.constant


def invariant_distribution_dimension(g: int, card_sigma: int, N: int = None,
                                     restricted: bool = False) -> DimensionGrowth:
    """
    Dimension of the vertically invariant distributions of order ``>= -N``
    as ``slope * N + constant``.

    Classes counted: constants; ``L_h^n`` of the ``2g - 2`` ladders
    (``n < N``); differences ``xi_s - xi_s'`` (``|Sigma| - 1``); and
    ``L_h^n xi_s`` for ``1 <= n < N``.  The last two are dropped when
    ``restricted``.
    """
    if g < 1:
        raise ValidationError("genus must be at least 1")
    classes = {"constants": (0, 1), "ladders": (2 * g - 2, 0)}
    if not restricted and card_sigma:
        classes["differences"] = (0, card_sigma - 1)
        classes["derivatives"] = (card_sigma, -card_sigma)
    slope = sum(s for s, _ in classes.values())
    constant = sum(c for _, c in classes.values())
    return DimensionGrowth(slope, constant, classes, N)
