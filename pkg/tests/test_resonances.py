import cmath
import itertools
import math

import pytest

from pa_resonances.errors import PremiseViolation, TailBoundTooLarge, ValidationError
from pa_resonances.resonances import (addition_count, closed_form_sum, closed_form_sum_nonorientable,
                                      enumerate_spectrum, enumerate_spectrum_nonorientable, extended_additions,
                                      geometric_tail, invariant_distribution_dimension, resonance_sum,
                                      spectrum_closed_form, tail_bound, truncated_sum)

LAM = 3 + 2 * math.sqrt(2)
PHI2 = (3 + math.sqrt(5)) / 2
L_XI = [(PHI2, 1), (1 / PHI2, 1)]
CAT_LAM = (3 + math.sqrt(5)) / 2


def brute_spectrum(xi, lam, eh, ev, cutoff):
    """Multiset {1} + {eps_h^k eps_v^l lam^-(k+l) mu : k >= 1, l >= 0} above the cutoff."""
    vals = [1.0 + 0j]
    for (mu, d), k, l in itertools.product(xi, range(1, 40), range(0, 40)):
        z = eh ** k * ev ** l * lam ** (-(k + l)) * mu
        if abs(z) >= cutoff:
            vals.extend([z] * d)
    return vals


def as_multiset(spec):
    out = []
    for e in spec.entries:
        out.extend([e.value] * e.multiplicity)
    return out


def same_multiset(a, b, tol=1e-12):
    a = sorted(a, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    b = sorted(b, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return len(a) == len(b) and all(abs(x - y) < tol for x, y in zip(a, b))


@pytest.mark.parametrize("cutoff", [1e-1, 1e-3, 1e-8])
def test_torus_spectrum_is_one(cutoff):
    spec = enumerate_spectrum([], CAT_LAM, 1, 1, cutoff)
    assert [(e.value, e.multiplicity) for e in spec.entries] == [(1, 1)]


@pytest.mark.parametrize("eh,ev", [(1, 1), (-1, -1), (1, -1)])
def test_spectrum_matches_brute_force(eh, ev):
    spec = enumerate_spectrum(L_XI, LAM, eh, ev, 1e-4)
    assert same_multiset(as_multiset(spec), brute_spectrum(L_XI, LAM, eh, ev, 1e-4))


def test_leading_resonance_values():
    spec = enumerate_spectrum(L_XI, LAM, 1, 1, 1e-3)
    vals = [e.value.real for e in spec.entries]
    assert vals[0] == 1
    assert vals[1] == pytest.approx(PHI2 / LAM, rel=1e-14)  # 0.4491...
    assert spec.multiplicity(PHI2 / LAM ** 2) == 2  # (k, l) = (1, 1), (2, 0)
    assert spec.multiplicity(PHI2 / LAM ** 3) == 3


def test_premise_and_cutoff_checks():
    with pytest.raises(PremiseViolation):
        enumerate_spectrum([(LAM * 1.1, 1)], LAM)
    with pytest.raises(ValidationError):
        enumerate_spectrum(L_XI, LAM, cutoff=0)


@pytest.mark.parametrize("xi,lam,eh,ev", [
    ([], CAT_LAM, 1, 1),
    (L_XI, LAM, 1, 1),
    (L_XI, LAM, -1, -1),
    ([(2 + 3 ** 0.5, 1), (2 - 3 ** 0.5, 1)], LAM, 1, 1),
    ([(-1, 2)], LAM, 1, 1),
    ([(1.5j, 1), (-1.5j, 1)], LAM, 1, 1),
])
def test_truncated_vs_closed_within_tail_bound(xi, lam, eh, ev):
    spec = enumerate_spectrum(xi, lam, eh, ev, 1e-3)
    for n in range(1, 9):
        trunc, tb = resonance_sum(spec, n)
        closed = closed_form_sum(xi, lam, eh, ev, n)
        assert abs(trunc - closed) <= tb + 1e-14
        assert spectrum_closed_form(spec, n) == closed


def test_tail_bound_helpers():
    x = 0.3
    assert geometric_tail(x, 4) == pytest.approx(sum(j * x ** j for j in range(5, 400)), rel=1e-12)
    spec = enumerate_spectrum(L_XI, LAM, 1, 1, 1e-1)
    with pytest.raises(TailBoundTooLarge):
        resonance_sum(spec, 1, tol=1e-12)
    assert tail_bound(spec, 8) < tail_bound(spec, 1)


FLIP_CASES = [
    ([(PHI2, 1)], [(1 / PHI2, 1)], 1, 1),
    ([(2.0, 1)], [(-1.5, 1), (0.5, 1)], 1, -1),
    ([(1.2 + 0.5j, 1), (1.2 - 0.5j, 1)], [(-0.7, 2)], -1, 1),
]


@pytest.mark.parametrize("mp,mm,eh,ev", FLIP_CASES)
def test_nonorientable_lift_independence(mp, mm, eh, ev):
    a = enumerate_spectrum_nonorientable(mp, mm, LAM, eh, ev, 1e-4)
    flipped = [(-mu, d) for mu, d in mm]
    b = enumerate_spectrum_nonorientable(mp, flipped, LAM, -eh, -ev, 1e-4)
    assert same_multiset(as_multiset(a), as_multiset(b))
    for n in range(1, 9):
        ca = closed_form_sum_nonorientable(mp, mm, LAM, eh, ev, n)
        cb = closed_form_sum_nonorientable(mp, flipped, LAM, -eh, -ev, n)
        assert abs(ca - cb) < 1e-12
        trunc, tb = resonance_sum(a, n)
        assert abs(trunc - ca) <= tb + 1e-14


@pytest.mark.parametrize("eh,ev", [(1, 1), (-1, 1)])
def test_nonorientable_reduces_to_orientable(eh, ev):
    a = enumerate_spectrum_nonorientable(L_XI, [], LAM, eh, ev, 1e-4, parity_split=False)
    b = enumerate_spectrum(L_XI, LAM, eh, ev, 1e-4)
    assert same_multiset(as_multiset(a), as_multiset(b))
    assert a.orientable_foliations
    for n in range(1, 6):
        assert spectrum_closed_form(a, n) == closed_form_sum(L_XI, LAM, eh, ev, n)


def test_addition_count():
    assert [addition_count(j) for j in range(1, 6)] == [1, 2, 3, 4, 5]
    assert [addition_count(j, 1, 1) for j in range(1, 5)] == [1, 2, 1, 0]


@pytest.mark.parametrize("cycles", [(1,), (2,), (1, 3)])
def test_extended_counts_and_roots_of_unity(cycles):
    spec = extended_additions(enumerate_spectrum(L_XI, LAM, 1, 1, 1e-3), cycles, 3)
    card = sum(cycles)
    for j in (1, 2, 3):
        mod = LAM ** (-j)
        extra = [e for e in spec.entries if all(p[0] == "sigma" for p in e.provenance)
                 and abs(abs(e.value) - mod) < 1e-12]
        assert sum(e.multiplicity for e in extra) == j * card
        for p in cycles:
            for k in range(p):
                z = cmath.exp(2j * math.pi * k / p) * mod
                assert any(abs(e.value - z) < 1e-12 for e in extra)


def test_extended_requires_positive_signs():
    with pytest.raises(PremiseViolation):
        extended_additions(enumerate_spectrum(L_XI, LAM, -1, -1, 1e-3), (1,), 2)


@pytest.mark.parametrize("g,card", [(2, 1), (2, 2), (3, 4)])
def test_invariant_distribution_dimension(g, card):
    full = invariant_distribution_dimension(g, card, N=3)
    assert full.slope == 2 * g - 2 + card
    assert full.dimension == 1 + (2 * g - 2) * 3 + (card - 1) + card * 2
    restricted = invariant_distribution_dimension(g, card, N=3, restricted=True)
    assert restricted.dimension == 1 + (2 * g - 2) * 3
