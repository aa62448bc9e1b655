"""Class numbers of imaginary quadratic orders, Hurwitz class numbers by two
independent routes, r3 lattice counts, and congruence-restricted four-square
counts.

All arithmetic in this module is exact (ints and Fractions).  The class
number convention: h(D) counts reduced primitive positive-definite binary
quadratic forms (a,b,c) of discriminant D = b^2-4ac, i.e. |b| <= a <= c,
gcd(a,b,c) = 1, with b >= 0 whenever |b| = a or a = c.  The weighted count
h_w divides by the unit count w(-3)=3, w(-4)=2, w=1 otherwise; this is the
unique convention under which the f-sum and Cohen routes for the Hurwitz
class number agree.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve

from .arithmetic import divisors, factor, kronecker_chi, mobius, sigma


@dataclass(frozen=True)
class ClassNumberRecord:
    discriminant: int
    h: int
    w: int
    h_w: Fraction

    def __post_init__(self):
        expected_w = 3 if self.discriminant == -3 else (2 if self.discriminant == -4 else 1)
        if self.w != expected_w or self.h_w != Fraction(self.h, self.w):
            raise ValueError("inconsistent ClassNumberRecord")


_table_lock = threading.Lock()
_h_table: np.ndarray | None = None  # _h_table[m] = h(-m) for m <= len-1


def _check_disc(D: int) -> None:
    if D >= 0:
        raise ValueError(f"class_number: D = {D} must be negative")
    if D % 4 not in (0, 1):
        raise ValueError(f"class_number: D = {D} not 0 or 1 mod 4")
    if -D > 10 ** 7:
        raise ValueError("class_number: |D| <= 1e7 supported")


def build_form_table(limit: int) -> np.ndarray:
    """Count reduced primitive forms for every |D| <= limit in one sieve pass."""
    h = np.zeros(limit + 1, dtype=np.int64)
    amax = math.isqrt(limit // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            cmax = (limit + b * b) // (4 * a)
            cmin = a if (b >= 0) else a + 1  # a = c requires b >= 0
            if cmax < cmin:
                continue
            cs = np.arange(cmin, cmax + 1, dtype=np.int64)
            gab = math.gcd(a, b)
            if gab > 1:
                cs = cs[np.gcd(cs, gab) == 1]
                if cs.size == 0:
                    continue
            absD = 4 * a * cs - b * b
            np.add.at(h, absD, 1)
    return h


def ensure_table(limit: int) -> np.ndarray:
    """Grow the shared class-number table to cover |D| <= limit."""
    global _h_table
    with _table_lock:
        if _h_table is None or len(_h_table) <= limit:
            _h_table = build_form_table(limit)
        return _h_table


def _h_single(D: int) -> int:
    absD = -D
    count = 0
    for a in range(1, math.isqrt(absD // 3) + 1):
        for b in range(-a + 1, a + 1):
            num = b * b + absD
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                count += 1
    return count


def class_number(D: int) -> ClassNumberRecord:
    _check_disc(D)
    table = _h_table
    if table is not None and -D < len(table):
        h = int(table[-D])
    else:
        h = _h_single(D)
    w = 3 if D == -3 else (2 if D == -4 else 1)
    return ClassNumberRecord(D, h, w, Fraction(h, w))


def h_w(D: int) -> Fraction:
    return class_number(D).h_w


def _is_fundamental(D: int) -> bool:
    if D % 4 == 1:
        return all(e == 1 for _, e in factor(-D).factors)
    if D % 4 == 0:
        m = D // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for _, e in factor(-m).factors)
    return False


def hurwitz_H(n: int) -> Fraction:
    """Hurwitz class number H(n), i.e. discriminant -n.  Computed by the
    f-sum over suborders and independently by Cohen's fundamental-discriminant
    formula; the two must agree exactly."""
    if n <= 0 or n % 4 in (1, 2):
        raise ValueError(f"hurwitz_H: n = {n} is not 0 or 3 mod 4")
    # route 1: sum of weighted class numbers over f with f^2 | n
    route1 = Fraction(0)
    for f in range(1, math.isqrt(n) + 1):
        if n % (f * f):
            continue
        m = n // (f * f)
        if (-m) % 4 in (0, 1):
            route1 += h_w(-m)
    # route 2: Cohen's formula from the fundamental discriminant
    D = None
    f0 = None
    for f in range(1, math.isqrt(n) + 1):
        if n % (f * f):
            continue
        cand = -(n // (f * f))
        if cand % 4 in (0, 1) and _is_fundamental(cand):
            D, f0 = cand, f
    if D is None:
        raise ValueError(f"hurwitz_H: no fundamental discriminant under -{n}")
    route2 = h_w(D) * sum(
        mobius(d) * kronecker_chi(D, d) * sigma(1, f0 // d) for d in divisors(f0)
    )
    if route1 != route2:
        raise ArithmeticError(
            f"hurwitz_H({n}): suborder route {route1} != Cohen route {route2}"
        )
    return route1


_r3_lock = threading.Lock()
_r3_table: np.ndarray | None = None


def build_r3_table(limit: int) -> np.ndarray:
    """r3(m) for all m <= limit by convolving one-dimensional square counts."""
    r1 = np.zeros(limit + 1)
    r1[0] = 1.0
    squares = np.arange(1, math.isqrt(limit) + 1) ** 2
    r1[squares] = 2.0
    r2 = fftconvolve(r1, r1)[: limit + 1]
    r3_float = fftconvolve(r2, r1)[: limit + 1]
    return np.rint(r3_float).astype(np.int64)


def ensure_r3_table(limit: int) -> np.ndarray:
    global _r3_table
    with _r3_lock:
        if _r3_table is None or len(_r3_table) <= limit:
            _r3_table = build_r3_table(limit)
        return _r3_table


def r3(n: int) -> int:
    """Number of (x,y,z) in Z^3 with x^2+y^2+z^2 = n."""
    if n < 0 or n > 10 ** 7:
        raise ValueError("r3: 0 <= n <= 1e7 required")
    table = _r3_table
    if table is not None and n < len(table):
        return int(table[n])
    count = 0
    for x in range(-math.isqrt(n), math.isqrt(n) + 1):
        rest = n - x * x
        for y in range(-math.isqrt(rest), math.isqrt(rest) + 1):
            z2 = rest - y * y
            z = math.isqrt(z2)
            if z * z == z2:
                count += 1 if z == 0 else 2
    return count


def r3_from_hurwitz(n: int) -> int:
    """Gauss's formula expressing r3 through Hurwitz class numbers."""
    if n <= 0 or n > 10 ** 7:
        raise ValueError("r3_from_hurwitz: 1 <= n <= 1e7 required")
    m = n % 8
    if m == 7:
        return 0
    if n % 4 == 0:
        return r3_from_hurwitz(n // 4)
    if m == 3:
        val = 24 * hurwitz_H(n)
    else:  # n = 1,2 mod 4
        val = 12 * hurwitz_H(4 * n)
    if val.denominator != 1:
        raise ArithmeticError(f"r3_from_hurwitz({n}): non-integer value {val}")
    return int(val)


def count_A(N: int, n: int, n0: int) -> int:
    """#{(x,y,z,t) : 4n = t^2+x^2+y^2+z^2, t = n0 mod 2N}."""
    if n % 2 == 0:
        raise ValueError("count_A: n must be odd")
    if not (0 < n0 < 2 * N) or n0 % 2 == 0:
        raise ValueError("count_A: need odd 0 < n0 < 2N")
    table = ensure_r3_table(4 * n)
    tmax = math.isqrt(4 * n)
    total = 0
    for t in range(-tmax, tmax + 1):
        if (t - n0) % (2 * N):
            continue
        total += int(table[4 * n - t * t])
    return total


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def admissible_n0(N: int, n: int) -> int | None:
    """Smallest odd 0 < n0 < 2N with (n0^2-4n | p) = -1 for every odd p | N."""
    if n % 2 == 0:
        raise ValueError("admissible_n0: n must be odd")
    odd_primes = [p for p, _ in factor(N).factors if p > 2]
    for n0 in range(1, 2 * N, 2):
        if all(_legendre(n0 * n0 - 4 * n, p) == -1 for p in odd_primes):
            return n0
    return None
