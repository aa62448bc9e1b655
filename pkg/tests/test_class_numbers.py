import math
from fractions import Fraction

import pytest

from hecke_spectra.class_numbers import (
    admissible_n0,
    class_number,
    count_A,
    h_w,
    hurwitz_H,
    r3,
    r3_from_hurwitz,
)


def brute_class_number(D):
    """Count reduced positive forms (a,b,c) with b^2-4ac = D directly."""
    count = 0
    b = D % 2
    while b * b <= -D // 3:
        q = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= q:
            if q % a == 0:
                c = q // a
                # primitive reduced: |b| <= a <= c, gcd 1, and b >= 0 when
                # a == c or |b| == a
                if b <= a and math.gcd(math.gcd(a, b), c) == 1:
                    count += 1
                    if 0 < b < a < c:
                        count += 1  # (a,-b,c) is a distinct reduced form
            a += 1
        b += 2
    return count


def test_class_number_brute_force():
    for D in range(-3, -600, -1):
        if D % 4 not in (0, 1):
            continue
        assert class_number(D).h == brute_class_number(D), D


def test_known_class_numbers():
    known = {-3: 1, -4: 1, -7: 1, -8: 1, -11: 1, -15: 2, -20: 2, -23: 3,
             -47: 5, -71: 7, -84: 4, -95: 8, -163: 1, -427: 2}
    for D, h in known.items():
        assert class_number(D).h == h


def test_h_w_unit_corrections():
    assert h_w(-3) == Fraction(1, 3)
    assert h_w(-4) == Fraction(1, 2)
    assert h_w(-7) == 1
    assert h_w(-12) == 1  # h(-12) = 1, trivial units


def test_hurwitz_small_values():
    assert hurwitz_H(3) == Fraction(1, 3)
    assert hurwitz_H(4) == Fraction(1, 2)
    assert hurwitz_H(7) == 1
    assert hurwitz_H(8) == 1
    assert hurwitz_H(11) == 1
    assert hurwitz_H(12) == Fraction(4, 3)
    assert hurwitz_H(16) == Fraction(3, 2)
    assert hurwitz_H(23) == 3


def test_hurwitz_rejects_non_discriminant():
    with pytest.raises(ValueError):
        hurwitz_H(5)


def brute_r3(n):
    m = math.isqrt(n)
    return sum(
        1
        for x in range(-m, m + 1)
        for y in range(-m, m + 1)
        for z in range(-m, m + 1)
        if x * x + y * y + z * z == n
    )


def test_r3_brute_force():
    for n in range(0, 150):
        assert r3(n) == brute_r3(n)


def test_gauss_identity():
    # r3(n) expressed through Hurwitz class numbers, exact integers
    for n in range(1, 2000):
        assert r3(n) == r3_from_hurwitz(n)


def brute_count_A(N, n, n0):
    total = 0
    m = math.isqrt(4 * n)
    for t in range(-m, m + 1):
        if (t - n0) % (2 * N):
            continue
        total += brute_r3(4 * n - t * t)
    return total


def test_count_A_brute_force():
    for (N, n) in [(2, 15), (3, 25), (5, 9), (6, 35)]:
        n0 = admissible_n0(N, n)
        if n0 is None:
            continue
        assert count_A(N, n, n0) == brute_count_A(N, n, n0)


def test_admissible_n0_properties():
    for (N, n) in [(2, 15), (3, 7), (5, 11), (6, 25), (15, 7)]:
        n0 = admissible_n0(N, n)
        if n0 is not None:
            assert n0 % 2 == 1 and 0 < n0 < 2 * N
