import math

import pytest

from hecke_spectra.oracles import delta_tau, level_one_eigenform
from hecke_spectra.petersson import (
    delta_full,
    delta_new,
    maint_main_terms,
    maint_residual,
    orbital_integral_A,
)


def test_rank_one_tau_ratios():
    # dim S_12(1) = 1, so Delta(m,n) is a rank-one product of tau values
    tau = delta_tau(30)
    base = delta_full(12, 1, 1, 1)
    for n in range(2, 21):
        r = delta_full(12, 1, 1, n)
        want = tau.a(n) / n ** 5.5
        assert abs(r.value / base.value - want) < 1e-9, n


def test_rank_one_other_weights():
    for k in (16, 18, 20, 22, 26):
        f = level_one_eigenform(k, 10)
        base = delta_full(k, 1, 1, 1)
        for n in (2, 3, 5, 7):
            r = delta_full(k, 1, 1, n)
            want = f.a(n) / n ** ((k - 1) / 2.0)
            assert abs(r.value / base.value - want) < 1e-9


def test_empty_space_vanishing():
    for k in (4, 6, 8, 10, 14):
        for n in (1, 2, 7, 13, 20):
            r = delta_full(k, 1, 1, n)
            assert abs(r.value) <= r.truncation_bound + 1e-8, (k, n)


def test_off_diagonal_symmetry():
    for (m, n) in [(2, 3), (1, 6), (4, 5)]:
        a = delta_full(12, 1, m, n)
        b = delta_full(12, 1, n, m)
        assert abs(a.value - b.value) < 1e-9


def test_truncation_consistency():
    # doubling c_max must not move the value beyond the claimed tail
    from hecke_spectra.special_functions import bessel_j
    from hecke_spectra.kloosterman import kloosterman_sum_fast

    k, N, m, n = 12, 1, 1, 2
    r = delta_full(k, N, m, n)
    x0 = 4.0 * math.pi * math.sqrt(m * n)
    extra = sum(
        kloosterman_sum_fast(m, n, c) / c * bessel_j(k - 1, x0 / c).value
        for c in range(r.c_max + 1, 2 * r.c_max + 1)
    )
    assert 2.0 * math.pi * abs(extra) <= r.truncation_bound + 1e-12


def test_delta_new_level_one_reduces_to_full():
    for n in (1, 2, 5):
        a = delta_new(12, 1, 1, n)
        b = delta_full(12, 1, 1, n)
        assert abs(a.value - b.value) < 1e-10


def test_delta_new_symmetric_in_m_n():
    a = delta_new(12, 5, 2, 3)
    b = delta_new(12, 5, 3, 2)
    assert abs(a.value - b.value) < 1e-9


def test_maint_residual_small_in_window():
    k, N = 500, 1
    n = round((k / (4.0 * math.pi)) ** 2)
    res = maint_residual(k, N, 1, n)
    main = maint_main_terms(k, N, 1, n)
    assert abs(res) <= max(0.5 * abs(main), 5.0 / math.sqrt(k))


def test_maint_rejects_outside_window():
    with pytest.raises(ValueError):
        maint_residual(500, 1, 1, 10)


def test_orbital_integral_matches_closed_form():
    for (t, k) in [(0.5, 12), (1.0, 24), (2.0, 12)]:
        quad, closed = orbital_integral_A(t, k)
        assert abs(quad - closed) <= 1e-6 * abs(closed)


def test_orbital_domain_checks():
    with pytest.raises(ValueError):
        orbital_integral_A(1.0, 13)
    with pytest.raises(ValueError):
        orbital_integral_A(0.1, 12)


def test_rejects_bad_weight():
    with pytest.raises(ValueError):
        delta_full(2, 1, 1, 1)
    with pytest.raises(ValueError):
        delta_full(11, 1, 1, 1)
