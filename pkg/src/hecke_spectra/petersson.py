"""Geometric side of the Petersson formula: full-level and newform averages,
their transition-window main terms, and the appendix orbital integral.

The c-sum is evaluated with scipy's J-Bessel (cross-checked in tests against
the certified quadrature evaluator) and the paired Kloosterman fast path.
Tails are certified: the c-tail from the exponential regime of J_nu past
x = 0.8 nu, the l-tail from the Weil bound times the uniform nu^{-1/3}
envelope, summed over the sparse l | L^infinity lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import lgamma
from typing import List

import numpy as np
from scipy.special import jv

from .arithmetic import divisors, euler_phi, factor, mobius
from .kloosterman import kloosterman_sum_fast

# uniform bounds: |J_nu(x)| <= C_LANDAU nu^{-1/3} for all x, nu > 0
_C_LANDAU = 0.6749
_L_MAX = 10 ** 4
_L_ENUM = 10 ** 16


@dataclass(frozen=True)
class PeterssonResult:
    k: int
    N: int
    m: int
    n: int
    value: float
    truncation_bound: float
    c_max: int
    l_max: int

    def __post_init__(self):
        if self.truncation_bound < 0:
            raise ValueError("truncation_bound must be non-negative")


def _check_kn(k: int, N: int, m: int, n: int) -> None:
    if k % 2 or k < 4:
        raise ValueError("petersson: even k >= 4 required (weight 2 is out of scope)")
    if N < 1 or m < 1 or n < 1:
        raise ValueError("petersson: N, m, n must be positive")


def _exp_tail(nu: int, x0: float, C: float, step: int, g0: int) -> float:
    """Bound on 2 pi sum_{c >= C, step | c} |S(m,n;c)/c| |J_nu(x0/c)|,
    valid when x0/C < nu (series-head envelope for J, sigma_0(c) <= 2 sqrt c)."""
    if C <= x0 / nu:
        return math.inf
    lt = nu * math.log(x0 / (2.0 * C)) - lgamma(nu + 1)
    if lt > 700.0:
        return math.inf
    return 2.0 * math.pi * 2.0 * math.sqrt(g0) * math.exp(lt) * (
        1.0 + C / (step * max(nu - 1, 1))
    )


def _c_stop(nu: int, x0: float, step: int, g0: int, target: float):
    """First multiple of step where the certified exponential tail <= target
    (or a work cap is hit; the honest tail is returned either way)."""
    C = step * max(1, math.ceil(x0 / (0.8 * nu) / step) + 1)
    cap = C + 2000 * step
    tail = _exp_tail(nu, x0, C, step, g0)
    while tail > target and C < cap:
        C += step * max(1, C // (8 * step))
        tail = _exp_tail(nu, x0, C, step, g0)
    return C, tail


@dataclass
class _Task:
    step: int        # c runs over multiples of this
    m_eff: int
    n: int
    weight: float
    x0: float = 0.0
    c_stop: int = 0
    tail: float = 0.0
    acc: float = 0.0


def _run_c_sums(k: int, tasks: List[_Task]) -> None:
    """Accumulate sum_{c = 0 mod step, c <= c_stop} S(m_eff,n;c)/c J_{k-1}(x0/c)
    into each task, sharing the Kloosterman unit tables across tasks per c."""
    nu = k - 1
    for t in tasks:
        t.x0 = 4.0 * math.pi * math.sqrt(t.m_eff * t.n)
        g0 = math.gcd(t.m_eff, t.n)
        target = 1e-12 / max(abs(t.weight), 1e-6)
        t.c_stop, t.tail = _c_stop(nu, t.x0, t.step, g0, target)
    c_max = max(t.c_stop for t in tasks)
    for c in range(1, c_max + 1):
        active = [t for t in tasks if c % t.step == 0 and c <= t.c_stop]
        if not active:
            continue
        xs = np.array([t.x0 / c for t in active])
        js = jv(nu, xs)
        for t, j in zip(active, js):
            t.acc += kloosterman_sum_fast(t.m_eff, t.n, c) / c * float(j)


def delta_full(k: int, N: int, m: int, n: int) -> PeterssonResult:
    """delta(m,n) + 2 pi (-1)^{k/2} sum_{c = 0 mod N} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)."""
    _check_kn(k, N, m, n)
    task = _Task(step=N, m_eff=m, n=n, weight=1.0)
    _run_c_sums(k, [task])
    sign = -1.0 if (k // 2) % 2 else 1.0
    value = (1.0 if m == n else 0.0) + 2.0 * math.pi * sign * task.acc
    return PeterssonResult(k, N, m, n, value, task.tail, task.c_stop, 1)


def _prime_lattice(primes, bound: int) -> list:
    """All products of powers of the given primes that are <= bound, sorted."""
    out = [1]
    for p in primes:
        ext = []
        for l in out:
            q = l * p
            while q <= bound:
                ext.append(q)
                q *= p
        out += ext
    return sorted(out)


def _sigma0_sqrt_sum_bound(X: float) -> float:
    """Upper bound for sum_{j <= X} sigma_0(j)/sqrt(j)."""
    if X < 1:
        return 0.0
    return 2.0 * math.sqrt(X) * (math.log(X) + 2.0)


def _single_l_tail(nu: int, x0: float, step: int, g0: int) -> float:
    """Bound on 2 pi |Delta-geometric sum| for one discarded l: the c-range
    up to the Bessel transition via the nu^{-1/3} envelope and Weil, the
    rest via the exponential tail."""
    c_star = x0 / (0.8 * nu)
    osc = 0.0
    if c_star >= step:
        s0_step = len(divisors(step))
        osc = (
            2.0
            * math.pi
            * _C_LANDAU
            / nu ** (1.0 / 3.0)
            * math.sqrt(g0)
            * s0_step
            / math.sqrt(step)
            * _sigma0_sqrt_sum_bound(c_star / step)
        )
    C = step * max(1, math.ceil(c_star / step) + 1)
    return osc + _exp_tail(nu, x0, C, step, g0)


def delta_new(k: int, N: int, m: int, n: int) -> PeterssonResult:
    """Newform-projected Petersson average: sum over LM = N of (mu(L)/L)
    sum_{l | L^inf} (1/l) delta_full(k, M, m l^2, n), with the l-sum cut at
    10^4 and its tail certified from the sparse-lattice envelope."""
    _check_kn(k, N, m, n)
    if mobius(N) == 0:
        raise ValueError("delta_new: N must be squarefree")
    if math.gcd(m * n, N) != 1:
        raise ValueError("delta_new: gcd(mn, N) = 1 required")
    nu = k - 1
    g0 = math.gcd(m, n)
    tasks = []
    weights = []
    l_tail = 0.0
    l_max = 1
    for L in divisors(N):
        M = N // L
        wL = mobius(L) / L
        primes = factor(L).primes
        lattice = _prime_lattice(primes, _L_ENUM)
        for l in lattice:
            if l <= _L_MAX:
                w = wL / l
                tasks.append(_Task(step=max(M, 1), m_eff=m * l * l, n=n, weight=w))
                weights.append(w)
                l_max = max(l_max, l)
            else:
                x0 = 4.0 * math.pi * l * math.sqrt(m * n)
                l_tail += abs(wL) / l * _single_l_tail(nu, x0, max(M, 1), g0)
        # lattice points beyond the enumeration horizon: the per-l bound
        # grows like sqrt(l) log(l), so (1/l) * bound decays like
        # log(l)/sqrt(l); bound the remainder by its value at the horizon
        # times sum over the full lattice of l^{-1/4}
        if primes:
            lh = float(_L_ENUM)
            x0h = 4.0 * math.pi * lh * math.sqrt(m * n)
            head = abs(wL) / lh * _single_l_tail(nu, x0h, max(M, 1), g0)
            lat_quarter = 1.0
            for p in primes:
                lat_quarter /= 1.0 - p ** -0.25
            l_tail += head * lh ** 0.25 * lat_quarter
    _run_c_sums(k, tasks)
    sign = -1.0 if (k // 2) % 2 else 1.0
    # the diagonal survives only at l = 1 (l > 1 shares a factor with N,
    # which is coprime to n), giving delta(m,n) phi(N)/N
    value = (euler_phi(N) / N if m == n else 0.0) + 2.0 * math.pi * sign * math.fsum(
        t.weight * t.acc for t in tasks
    )
    bound = math.fsum(abs(t.weight) * t.tail for t in tasks) + l_tail
    c_max = max(t.c_stop for t in tasks)
    return PeterssonResult(k, N, m, n, value, bound, c_max, l_max)


def _check_window(k: int, N: int, m: int, n: int) -> None:
    if mobius(N) == 0:
        raise ValueError("transition window: N must be squarefree")
    if math.gcd(m * n, N) != 1:
        raise ValueError("transition window: gcd(mn, N) = 1 required")
    if abs(4.0 * math.pi * math.sqrt(m * n) - k) >= 2.0 * k ** (1.0 / 3.0):
        raise ValueError(
            f"(m,n)=({m},{n}) lies outside the transition window of k={k}"
        )


def maint_main_terms(k: int, N: int, m: int, n: int) -> float:
    """phi(N)/N delta(m,n) + 2 pi (-1)^{k/2} (mu(N)/N) prod(1 - p^-2) J_{k-1}(4 pi sqrt(mn))."""
    from .special_functions import bessel_j

    _check_kn(k, N, m, n)
    _check_window(k, N, m, n)
    sign = -1.0 if (k // 2) % 2 else 1.0
    pref = mobius(N) / N
    for p in factor(N).primes:
        pref *= 1.0 - p ** -2
    bess = bessel_j(k - 1, 4.0 * math.pi * math.sqrt(m * n))
    diag = euler_phi(N) / N if m == n else 0.0
    return diag + 2.0 * math.pi * sign * pref * bess.value


def maint_residual(k: int, N: int, m: int, n: int) -> float:
    """delta_new minus its transition-window main terms."""
    return delta_new(k, N, m, n).value - maint_main_terms(k, N, m, n)


def _orbital_quadrature(t: float, k: int, half_width: float, per_wave: int) -> complex:
    """Composite Gauss-Legendre tensor quadrature of the matrix-coefficient
    double integral over [-X, X]^2."""
    kappa = t + 1.0 / t
    wavelength = 4.0 * math.pi / k
    panels = max(8, math.ceil(2.0 * half_width / wavelength * per_wave))
    nodes, wts = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(-half_width, half_width, panels + 1)
    h = edges[1] - edges[0]
    x = (edges[:-1, None] + h / 2.0 + h / 2.0 * nodes[None, :]).ravel()
    w = np.tile(h / 2.0 * wts, panels)
    # e(k(-x+y)/4pi) = exp(ik(y-x)/2); split into separable phases
    px = w * np.exp(-0.5j * k * x)
    py = w * np.exp(+0.5j * k * x)  # same grid in y
    pref = (k - 1) / (4.0 * math.pi) * (2.0j) ** k
    total = 0.0 + 0.0j
    chunk = max(1, (1 << 21) // len(x))
    for lo in range(0, len(x), chunk):
        xs = x[lo : lo + chunk, None]
        denom = (xs * t * x[None, :] + kappa) + 1j * (t * x[None, :] - t * xs)
        total += np.sum(px[lo : lo + chunk, None] * denom ** (-k) * py[None, :])
    return pref * complex(total)


def orbital_integral_A(t: float, k: int):
    """The horocycle matrix-coefficient integral A(t,k): (quadrature, closed form).

    closed form: e^{-k} i^k 4 pi k^{k-1} / (2t (k-2)!) J_{k-1}(k/t), built in
    log space.  The quadrature is certified by agreement under refinement."""
    from .special_functions import bessel_j

    if not (8 <= k <= 60) or k % 2:
        raise ValueError("orbital_integral_A: even k in [8, 60] required")
    if not (0.3 <= t <= 3.0):
        raise ValueError("orbital_integral_A: t in [0.3, 3] required")
    bess = bessel_j(k - 1, k / t)
    log_pref = -k + math.log(4.0 * math.pi) + (k - 1) * math.log(k) - math.log(2.0 * t) - lgamma(k - 1)
    sign = -1.0 if (k // 2) % 2 else 1.0
    closed = complex(sign * math.exp(log_pref) * bess.value, 0.0)
    # domain half-width from the polynomial decay (2/(t|x|))^k of the
    # integrand, targeting well below the closed form's magnitude
    target = max(abs(closed) * 1e-9, 1e-280)
    X = (2.0 / t) * ((k - 1) / (4.0 * math.pi * target)) ** (1.0 / (k - 2.0)) + 8.0
    X = min(X, 400.0)
    quad = _orbital_quadrature(t, k, X, 8)
    refined = _orbital_quadrature(t, k, X * 1.15, 12)
    scale = max(abs(closed), abs(refined), 1e-280)
    if abs(quad - refined) > 1e-7 * scale:
        raise ArithmeticError(
            f"orbital_integral_A({t},{k}): quadrature not converged "
            f"({quad} vs {refined})"
        )
    return refined, closed
