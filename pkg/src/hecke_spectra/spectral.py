"""Spectral measures attached to Hecke eigenvalue systems: Plancherel and
semicircle reference measures, empirical measures recovered from Chebyshev
moments (= normalized traces at prime powers), interval discrepancy, and
certified discrepancy lower bounds from single moments.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import mpmath as mp
import numpy as np
from scipy.interpolate import PchipInterpolator

from .arithmetic import factor
from .special_functions import MP_CONTEXT_LOCK


@dataclass(frozen=True)
class DiscreteMeasure:
    atoms: Tuple[float, ...]
    weights: Tuple[float, ...]
    total: float

    def __post_init__(self):
        if len(self.atoms) != len(self.weights) or not self.atoms:
            raise ValueError("DiscreteMeasure: atoms/weights mismatch or empty")
        if any(a2 < a1 for a1, a2 in zip(self.atoms, self.atoms[1:])):
            raise ValueError("DiscreteMeasure: atoms must be sorted")
        if any(abs(a) > 2.0 + 1e-6 for a in self.atoms):
            raise ValueError("DiscreteMeasure: atom outside [-2, 2] + 1e-6")
        if any(w <= 0 for w in self.weights):
            raise ValueError("DiscreteMeasure: weights must be positive")
        if abs(math.fsum(self.weights) - self.total) > 1e-9:
            raise ValueError("DiscreteMeasure: weights do not sum to total")


@dataclass(frozen=True)
class ContinuousMeasure:
    kind: str  # "plancherel(p)" or "semicircle"
    cdf: Callable[[float], float] = field(compare=False)

    def __post_init__(self):
        if abs(self.cdf(-2.0)) > 1e-9 or abs(self.cdf(2.0) - 1.0) > 1e-9:
            raise ValueError(f"{self.kind}: cdf endpoints not (0, 1)")
        grid = np.linspace(-2.0, 2.0, 10 ** 4)
        vals = np.array([self.cdf(float(x)) for x in grid])
        if np.any(np.diff(vals) < -1e-12):
            raise ValueError(f"{self.kind}: cdf not monotone")


def _plancherel_density(p: int):
    s = (math.sqrt(p) + 1.0 / math.sqrt(p)) ** 2

    def rho(x):
        return (p + 1) / math.pi * np.sqrt(np.maximum(1.0 - x * x / 4.0, 0.0)) / (s - x * x)

    return rho


@lru_cache(maxsize=32)
def _plancherel_interpolant(p: int) -> PchipInterpolator:
    """Cumulative mass on a 4096-point Chebyshev grid (clustered at the
    square-root endpoints), panel-wise Gauss-Legendre, monotone interpolation."""
    rho = _plancherel_density(p)
    j = np.arange(4097)
    grid = -2.0 * np.cos(math.pi * j / 4096.0)
    nodes, wts = np.polynomial.legendre.leggauss(12)
    a, b = grid[:-1], grid[1:]
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    panel = np.sum(wts[None, :] * rho(mid[:, None] + half[:, None] * nodes[None, :]), axis=1) * half
    cdf_vals = np.concatenate([[0.0], np.cumsum(panel)])
    # the total mass is 1 analytically; fold the quadrature defect (~1e-12)
    # back in so cdf(2) = 1 exactly
    cdf_vals /= cdf_vals[-1]
    return PchipInterpolator(grid, cdf_vals)


def plancherel_cdf(p: int, x: float) -> float:
    """CDF at x of the measure with density (p+1)/pi (1-x^2/4)^{1/2} / ((p^{1/2}+p^{-1/2})^2-x^2)."""
    if len(factor(p).factors) != 1 or factor(p).factors[0][1] != 1:
        raise ValueError("plancherel_cdf: p must be prime")
    if not -2.0 <= x <= 2.0:
        warnings.warn(f"plancherel_cdf: clamping x = {x} to [-2, 2]")
        x = min(2.0, max(-2.0, x))
    return float(np.clip(_plancherel_interpolant(p)(x), 0.0, 1.0))


def plancherel_measure(p: int) -> ContinuousMeasure:
    return ContinuousMeasure(f"plancherel({p})", lambda x: plancherel_cdf(p, x))


def semicircle_cdf(x: float) -> float:
    x = min(2.0, max(-2.0, x))
    return 0.5 + x * math.sqrt(4.0 - x * x) / (4.0 * math.pi) + math.asin(x / 2.0) / math.pi


def semicircle_measure() -> ContinuousMeasure:
    return ContinuousMeasure("semicircle", semicircle_cdf)


def _u_value(m: int, half_x: float) -> float:
    """Chebyshev U_m evaluated at half_x = x/2, by the three-term recurrence."""
    u_prev, u = 1.0, 2.0 * half_x
    if m == 0:
        return u_prev
    for _ in range(m - 1):
        u_prev, u = u, 2.0 * half_x * u - u_prev
    return u


def chebyshev_moment(measure, m: int) -> float:
    """integral of U_m(x/2) against the measure."""
    if not (0 <= m <= 200):
        raise ValueError("chebyshev_moment: 0 <= m <= 200 required")
    if isinstance(measure, DiscreteMeasure):
        return math.fsum(w * _u_value(m, a / 2.0) for a, w in zip(measure.atoms, measure.weights))
    if measure.kind == "semicircle":
        return 1.0 if m == 0 else 0.0
    if measure.kind.startswith("plancherel("):
        p = int(measure.kind[11:-1])
        return p ** (-m / 2.0) if m % 2 == 0 else 0.0
    raise ValueError(f"unknown measure kind {measure.kind}")


def _power_sums_from_chebyshev(c: Sequence[float]) -> list:
    """s_j = sum of j-th powers of atoms, from moments c_m = sum U_m(atom/2).

    Uses x U_m(x/2) = U_{m+1}(x/2) + U_{m-1}(x/2) to expand monomials in the
    U basis with exact integer coefficients."""
    d = len(c) - 1
    coeffs = [mp.mpf(1)] + [mp.mpf(0)] * d  # x^0 = U_0
    sums = [mp.mpf(c[0])]
    for j in range(1, d + 1):
        new = [mp.mpf(0)] * (d + 1)
        for m, a in enumerate(coeffs):
            if a == 0:
                continue
            if m == 0:
                new[1] += a
            else:
                new[m + 1] += a
                new[m - 1] += a
        coeffs = new
        sums.append(mp.fsum(a * c[m] for m, a in enumerate(coeffs) if a != 0))
    return sums


_NEWTON_DPS = 40
_COEFF_THRESHOLD = mp.mpf(10) ** 8


def empirical_mu_star(k: int, N: int, p: int):
    """Atoms of the eigenvalue measure of T_p on the newform space, recovered
    from the normalized traces at 1, p, ..., p^dim via Newton's identities."""
    from .eichler_selberg import trace_new

    if math.gcd(p, N) != 1:
        raise ValueError("empirical_mu_star: gcd(p, N) = 1 required")
    d = round(trace_new(1, k, N).total)
    if d < 1:
        raise ValueError(f"empirical_mu_star: S_{k}({N})* is empty")
    if d > 40:
        raise ValueError(f"empirical_mu_star: dim {d} > 40 is out of recovery range")
    c = [trace_new(p ** m, k, N).total for m in range(d + 1)]
    with MP_CONTEXT_LOCK, mp.workdps(_NEWTON_DPS):
        s = _power_sums_from_chebyshev(c)
        e = [mp.mpf(1)]
        for i in range(1, d + 1):
            acc = mp.fsum((-1) ** (j - 1) * e[i - j] * s[j] for j in range(1, i + 1))
            e.append(acc / i)
        if max(abs(x) for x in e) > _COEFF_THRESHOLD:
            raise ArithmeticError(
                f"empirical_mu_star({k},{N},{p}): Newton identities ill-conditioned"
            )
        poly = [(-1) ** i * e[i] for i in range(d + 1)]
        roots = mp.polyroots(poly, maxsteps=200, extraprec=120)
    atoms = []
    for r in roots:
        if abs(mp.im(r)) > 1e-4 or abs(mp.re(r)) > 2.0 + 1e-4:
            raise ArithmeticError(
                f"empirical_mu_star({k},{N},{p}): root {r} outside the eigenvalue range"
            )
        atoms.append(min(2.0, max(-2.0, float(mp.re(r)))))
    atoms.sort()
    return DiscreteMeasure(tuple(atoms), tuple([1.0 / d] * d), 1.0)


def nu_moment(k: int, N: int, p: int, m: int) -> float:
    """m-th Chebyshev moment of the coefficient-weighted eigenvalue measure,
    which the Petersson formula evaluates as a geometric sum."""
    from .petersson import delta_new

    if math.gcd(p, N) != 1:
        raise ValueError("nu_moment: gcd(p, N) = 1 required")
    return delta_new(k, N, 1, p ** m).value


def discrepancy(d: DiscreteMeasure, c: ContinuousMeasure) -> float:
    """sup over closed intervals [a,b] of |d([a,b]) - c([a,b])|.

    Candidate cuts are the atoms approached from both sides plus the interval
    ends; over cuts, the interval mass difference telescopes to a difference
    of W - F values, so the sup is max(G) - min(G) with G = W - F."""
    if abs(d.total - 1.0) > 1e-9:
        raise ValueError("discrepancy: probability measure required")
    cum = np.concatenate([[0.0], np.cumsum(d.weights)])
    g = [0.0, cum[-1] - 1.0]  # cuts at -2 and +2
    for i, a in enumerate(d.atoms):
        f = c.cdf(a)
        g.append(cum[i] - f)      # cut just left of the atom
        g.append(cum[i + 1] - f)  # cut just right of the atom
    return max(g) - min(g)


def _u_total_variation(m: int) -> float:
    xs = np.linspace(-2.0, 2.0, 20001)
    vals = np.array([_u_value(m, x / 2.0) for x in xs])
    return float(np.sum(np.abs(np.diff(vals))))


def discrepancy_lower_bound_moments(moment_diffs: Sequence[float], m: int) -> float:
    """|Delta_m| / (2 max|U_m| + TV(U_m)): any two probability measures on
    [-2,2] whose m-th Chebyshev moments differ by Delta_m have interval
    discrepancy at least this (integration by parts)."""
    if m < 1 or m > len(moment_diffs):
        raise ValueError("discrepancy_lower_bound_moments: need 1 <= m <= len(diffs)")
    max_u = m + 1.0  # |U_m(x/2)| <= U_m(1) = m+1 on [-2,2]
    return abs(moment_diffs[m - 1]) / (2.0 * max_u + _u_total_variation(m))


def trace_discrepancy_bound(n: int, k: int, N: int):
    """|Tr - dim * delta(n,square)/sqrt(n)| / (2 m^2 dim), a lower bound for
    the discrepancy between the empirical measure and the Plancherel measure
    at the prime p, for n = p^m.  None when the space is empty."""
    from .eichler_selberg import trace_new

    fn = factor(n)
    if len(fn.factors) != 1:
        raise ValueError("trace_discrepancy_bound: n must be a prime power")
    if math.gcd(n, N) != 1:
        raise ValueError("trace_discrepancy_bound: gcd(n, N) = 1 required")
    m = fn.factors[0][1]
    dim = round(trace_new(1, k, N).total)
    if dim == 0:
        return None
    main = dim / math.sqrt(n) if math.isqrt(n) ** 2 == n else 0.0
    return abs(trace_new(n, k, N).total - main) / (2.0 * m * m * dim)
