import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecke_spectra.eichler_selberg import trace_new
from hecke_spectra.spectral import (
    DiscreteMeasure,
    chebyshev_moment,
    discrepancy,
    discrepancy_lower_bound_moments,
    empirical_mu_star,
    nu_moment,
    plancherel_cdf,
    plancherel_measure,
    semicircle_measure,
    trace_discrepancy_bound,
)


def test_plancherel_cdf_endpoints_and_center():
    for p in (2, 3, 5, 7):
        assert abs(plancherel_cdf(p, -2.0)) < 1e-9
        assert abs(plancherel_cdf(p, 2.0) - 1.0) < 1e-9
        assert abs(plancherel_cdf(p, 0.0) - 0.5) < 1e-9


def test_plancherel_cdf_against_quadrature():
    from scipy.integrate import quad

    p = 3
    s = (math.sqrt(p) + 1.0 / math.sqrt(p)) ** 2
    rho = lambda x: (p + 1) / math.pi * math.sqrt(max(1 - x * x / 4, 0)) / (s - x * x)
    for x in np.linspace(-1.9, 1.9, 15):
        want, _ = quad(rho, -2.0, float(x), points=[-2.0], limit=200)
        assert abs(plancherel_cdf(p, float(x)) - want) < 1e-9


def test_plancherel_clamps_with_warning():
    with pytest.warns(UserWarning):
        v = plancherel_cdf(2, 2.5)
    assert v == 1.0


def test_plancherel_chebyshev_moments():
    mu = plancherel_measure(2)
    for m in range(0, 12):
        want = 2.0 ** (-m / 2.0) if m % 2 == 0 else 0.0
        assert abs(chebyshev_moment(mu, m) - want) < 1e-12


def test_semicircle_moments():
    sc = semicircle_measure()
    assert chebyshev_moment(sc, 0) == 1.0
    for m in range(1, 8):
        assert chebyshev_moment(sc, m) == 0.0


def test_discrete_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure((1.0, -1.0), (0.5, 0.5), 1.0)  # unsorted
    with pytest.raises(ValueError):
        DiscreteMeasure((0.0,), (0.5,), 1.0)  # total mismatch
    with pytest.raises(ValueError):
        DiscreteMeasure((2.5,), (1.0,), 1.0)  # atom out of range


def test_empirical_atom_weight_12():
    mu = empirical_mu_star(12, 1, 2)
    assert len(mu.atoms) == 1
    assert abs(mu.atoms[0] - (-24.0 / 2 ** 5.5)) < 1e-9


def test_empirical_roundtrip_moments():
    for (k, N, p) in [(40, 1, 2), (12, 11, 3), (24, 5, 2)]:
        d = round(trace_new(1, k, N).total)
        mu = empirical_mu_star(k, N, p)
        assert len(mu.atoms) == d
        for m in range(d + 1):
            want = trace_new(p ** m, k, N).total / d
            assert abs(chebyshev_moment(mu, m) - want) < 1e-6, (k, N, p, m)


def test_empirical_requires_coprime():
    with pytest.raises(ValueError):
        empirical_mu_star(12, 11, 11)


def test_nu_moment_zeroth():
    # m = 0 at large weight: the diagonal survives, the c-sums are negligible
    v = nu_moment(40, 1, 2, 0)
    assert abs(v - 1.0) < 1e-8


def test_discrepancy_atom_vs_semicircle():
    # the closed singleton {0} carries full mass against none
    one = DiscreteMeasure((0.0,), (1.0,), 1.0)
    assert abs(discrepancy(one, semicircle_measure()) - 1.0) < 1e-12


def test_discrepancy_brute_force_scan():
    # compare against a dense two-endpoint grid scan
    rng = np.random.default_rng(5)
    atoms = np.sort(rng.uniform(-2, 2, 6))
    mu = DiscreteMeasure(tuple(atoms), tuple([1.0 / 6] * 6), 1.0)
    sc = semicircle_measure()
    got = discrepancy(mu, sc)

    eps = 1e-9
    pts = sorted(set([-2.0, 2.0] + [a - eps for a in atoms] + [a + eps for a in atoms]))
    cum = np.concatenate([[0.0], np.cumsum(mu.weights)])

    def mass_d(a, b):
        lo = np.searchsorted(atoms, a, side="left")
        hi = np.searchsorted(atoms, b, side="right")
        return cum[hi] - cum[lo]

    brute = 0.0
    for i, a in enumerate(pts):
        for b in pts[i:]:
            brute = max(brute, abs(mass_d(a, b) - (sc.cdf(b) - sc.cdf(a))))
    assert abs(got - brute) < 1e-6


def test_moment_lower_bound_sanity():
    # measures realizing a moment gap Delta_m must differ by at least the bound
    assert abs(discrepancy_lower_bound_moments([0.8], 1) - 0.8 / 8.0) < 1e-12
    lb = discrepancy_lower_bound_moments([0.0, 0.5], 2)
    # atom at 0 vs plancherel(2): the actual discrepancy dominates the bound
    one = DiscreteMeasure((0.0,), (1.0,), 1.0)
    gap = chebyshev_moment(one, 2) - chebyshev_moment(plancherel_measure(2), 2)
    bound = discrepancy_lower_bound_moments([0.0, gap], 2)
    assert bound <= discrepancy(one, plancherel_measure(2)) + 1e-9


def test_trace_discrepancy_bound_values():
    tdb = trace_discrepancy_bound(2, 12, 1)
    assert abs(tdb - 24.0 / 2 ** 5.5 / 2.0) < 1e-9
    assert trace_discrepancy_bound(2, 4, 1) is None
    with pytest.raises(ValueError):
        trace_discrepancy_bound(6, 12, 1)  # not a prime power


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=1, max_size=8))
def test_discrepancy_bounded_by_one(xs):
    atoms = tuple(sorted(xs))
    w = 1.0 / len(atoms)
    mu = DiscreteMeasure(atoms, tuple([w] * len(atoms)), 1.0)
    d = discrepancy(mu, semicircle_measure())
    assert 0.0 <= d <= 1.0 + 1e-12
