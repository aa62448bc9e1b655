"""Eichler-Selberg traces of Hecke operators on S_k(N) and on the newform
subspace, with the normalization Tr T_n / n^{(k-1)/2} throughout.

The elliptic term is evaluated in the numerically stable angular form
sin((k-1)theta)/(sqrt(n) sin theta) rather than through powers of the root
rho = sqrt(n) e^{i theta}; the rational terms (identity, hyperbolic, k=2
correction) are carried as exact Fraction coefficients of n^{-1/2}.

The newform trace is always computed twice: once from its own closed-form
terms and once as the Mobius/divisor-count combination of full-level traces.
A disagreement raises rather than returning a value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

from .arithmetic import divisors, euler_phi, mobius, nu_index, sigma, count_congruence_roots
from .class_numbers import ensure_table, h_w
from .special_functions import phi_eval, psi_eval

Rational = Union[Fraction, float]


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def _over_sqrt(coeff: Fraction, n: int) -> Rational:
    """coeff / sqrt(n), exact when n is a perfect square."""
    if coeff == 0:
        return Fraction(0)
    if _is_square(n):
        return coeff / math.isqrt(n)
    return float(coeff) / math.sqrt(n)


@dataclass(frozen=True)
class TraceBreakdown:
    n: int
    k: int
    N: int
    tag: str  # "full" or "new"
    term1: Rational
    term2: float
    term3: Rational
    term4: Rational
    total: float
    # exact coefficients of n^{-1/2} behind the rational terms
    coeff1: Fraction
    coeff3: Fraction
    coeff4: Fraction

    def __post_init__(self):
        if self.tag not in ("full", "new"):
            raise ValueError("tag must be 'full' or 'new'")
        s = float(self.term1) + self.term2 + float(self.term3) + float(self.term4)
        if abs(self.total - s) > 1e-12 * (1.0 + abs(self.total)):
            raise ValueError(f"TraceBreakdown total {self.total} != term sum {s}")
        if self.tag == "new" and self.N > 1 and self.coeff3 != 0:
            raise ValueError("newform hyperbolic term must vanish for N > 1")
        if self.k != 2 and self.coeff4 != 0:
            raise ValueError("term4 only occurs at weight 2")


@dataclass(frozen=True)
class AngleData:
    t: int
    n: int
    theta: float

    def __post_init__(self):
        if self.t * self.t >= 4 * self.n:
            raise ValueError("AngleData: need t^2 < 4n")
        root_re = math.sqrt(self.n) * math.cos(self.theta)
        root_im = math.sqrt(self.n) * math.sin(self.theta)
        if abs(root_re - self.t / 2.0) > 1e-12 * math.sqrt(self.n) or abs(
            root_im - math.sqrt(4 * self.n - self.t * self.t) / 2.0
        ) > 1e-12 * math.sqrt(self.n):
            raise ValueError("AngleData: theta does not reproduce the root")
        if math.sin(self.theta) < 1.0 / (2.0 * math.sqrt(self.n)) - 1e-12:
            raise ValueError("AngleData: sin(theta) below 1/(2 sqrt n)")


@dataclass(frozen=True)
class WindowSpec:
    K: float
    delta: float
    T: float
    truncation_radius: float

    def __post_init__(self):
        if not (0.2 < self.delta < 1.0 / 3.0):
            raise ValueError("WindowSpec: delta must lie in (1/5, 1/3)")
        if self.K <= 0 or self.T <= 0 or self.truncation_radius <= 0:
            raise ValueError("WindowSpec: K, T, truncation_radius must be positive")


def angle_data(t: int, n: int) -> AngleData:
    """theta in (0,pi) with sqrt(n) e^{i theta} = (t + i sqrt(4n-t^2))/2."""
    return AngleData(t, n, math.atan2(math.sqrt(4 * n - t * t), t))


def _ensure_class_table(n: int) -> None:
    # round the needed limit up to a power of two so a sweep of growing n
    # does not rebuild the sieve at every step
    ensure_table(max(4096, 1 << (4 * n - 1).bit_length()))


def _mu_weight(t: int, f: int, n: int, N: int) -> Fraction:
    """Local solution-count weight: nu(N)/nu(N/N_f) times the number of
    x mod N whose lifts solve x^2 - tx + n = 0 mod N*N_f.

    The roots mod N*N_f fall into full fibers over x mod N (counting mod
    N*N_f and not dividing by N_f makes the weight-2 trace fail to vanish
    on empty spaces; see the dimension tests)."""
    if N == 1:
        return Fraction(1)
    Nf = math.gcd(N, f)
    roots = count_congruence_roots(t, n, N * Nf)
    if roots % Nf:
        raise ArithmeticError(
            f"local root count {roots} mod {N * Nf} not divisible by {Nf}"
        )
    return Fraction(nu_index(N), nu_index(N // Nf)) * (roots // Nf)


def mu_tilde(t: int, f: int, n: int, N: int) -> int:
    """Divisor-count/Mobius combination of the local weights across levels d | N."""
    acc = Fraction(0)
    for d in divisors(N):
        acc += sigma(0, N // d) * mobius(N // d) * _mu_weight(t, f, n, d)
    if acc.denominator != 1:
        raise ArithmeticError(f"mu_tilde({t},{f},{n},{N}) non-integer: {acc}")
    return int(acc)


@lru_cache(maxsize=1 << 19)
def _hw_sum(t: int, n: int, N: int, tilde: bool) -> Fraction:
    """sum over f with f^2 | 4n-t^2, (t^2-4n)/f^2 = 0,1 mod 4 of
    h_w((t^2-4n)/f^2) times the (plain or tilde) local weight."""
    disc = t * t - 4 * n
    _ensure_class_table(n)
    total = Fraction(0)
    for f in range(1, math.isqrt(-disc) + 1):
        if (-disc) % (f * f):
            continue
        D = disc // (f * f)
        if D % 4 not in (0, 1):
            continue
        w = h_w(D)
        total += w * (mu_tilde(t, f, n, N) if tilde else _mu_weight(t, f, n, N))
    return total


def d_coefficient(t: int, n: int, N: int) -> float:
    """Magnitude of the elliptic-term coefficient D_N(t,n); even in t.
    (The signed convention that flips under t -> -t also carries a factor i;
    both are bookkeeping and cancel in every observable quantity here.)"""
    if t * t >= 4 * n:
        raise ValueError("d_coefficient: need t^2 < 4n")
    return float(_hw_sum(t, n, N, True)) / (2.0 * math.sqrt(4 * n - t * t))


def _elliptic_term(n: int, k: int, N: int, tilde: bool) -> float:
    """-sum_{t^2<4n} sin((k-1)theta_t) (4n-t^2)^{-1/2} * class-number sum."""
    tmax = math.isqrt(4 * n - 1)
    terms = []
    for t in range(-tmax, tmax + 1):
        s = _hw_sum(t, n, N, tilde)
        if s == 0:
            continue
        th = math.atan2(math.sqrt(4 * n - t * t), t)
        terms.append(-math.sin((k - 1) * th) * float(s) / math.sqrt(4 * n - t * t))
    return math.fsum(terms)


def _hyperbolic_coeff(n: int, k: int, N: int) -> Fraction:
    """Exact coefficient of n^{-1/2} in the divisor-pair term."""
    acc = Fraction(0)
    npow = n ** (k // 2 - 1)
    for d in divisors(n):
        if d * d > n:
            continue
        csum = sum(
            euler_phi(g)
            for c in divisors(N)
            if (n // d - d) % (g := math.gcd(c, N // c)) == 0
        )
        w = Fraction(1, 2) if d * d == n else Fraction(1)
        acc -= w * csum * Fraction(d ** (k - 1), npow)
    return acc


def _check_trace_args(n: int, k: int, N: int) -> None:
    if n < 1 or N < 1:
        raise ValueError("trace: n >= 1 and N >= 1 required")
    if k < 2 or k % 2:
        raise ValueError("trace: even k >= 2 required")
    if math.gcd(n, N) != 1:
        raise ValueError(f"trace: gcd(n, N) = {math.gcd(n, N)} > 1 not supported")


def _assemble(n, k, N, tag, c1: Fraction, t2: float, c3: Fraction, c4: Fraction) -> TraceBreakdown:
    term1 = _over_sqrt(c1, n)
    term3 = _over_sqrt(c3, n)
    term4 = _over_sqrt(c4, n)
    total = float(term1) + t2 + float(term3) + float(term4)
    return TraceBreakdown(n, k, N, tag, term1, t2, term3, term4, total, c1, c3, c4)


def trace_full(n: int, k: int, N: int) -> TraceBreakdown:
    """Normalized trace of T_n on S_k(N), gcd(n,N)=1."""
    _check_trace_args(n, k, N)
    c1 = Fraction(k - 1, 12) * nu_index(N) if _is_square(n) else Fraction(0)
    t2 = _elliptic_term(n, k, N, tilde=False)
    c3 = _hyperbolic_coeff(n, k, N)
    c4 = Fraction(sigma(1, n)) if k == 2 else Fraction(0)
    return _assemble(n, k, N, "full", c1, t2, c3, c4)


def _trace_new_direct(n: int, k: int, N: int) -> TraceBreakdown:
    c1 = Fraction(k - 1, 12) * euler_phi(N) if _is_square(n) else Fraction(0)
    t2 = _elliptic_term(n, k, N, tilde=True)
    c3 = _hyperbolic_coeff(n, k, 1) if N == 1 else Fraction(0)
    c4 = Fraction(mobius(N) * sigma(1, n)) if k == 2 else Fraction(0)
    return _assemble(n, k, N, "new", c1, t2, c3, c4)


def trace_new(n: int, k: int, N: int) -> TraceBreakdown:
    """Normalized trace of T_n on the newform subspace of S_k(N), N squarefree.

    Evaluated from the closed-form newform terms and independently as
    sum_{d|N} sigma_0(N/d) mu(N/d) trace_full(n,k,d); any disagreement is an
    internal error, not a return value."""
    _check_trace_args(n, k, N)
    if mobius(N) == 0:
        raise ValueError("trace_new: N must be squarefree")
    direct = _trace_new_direct(n, k, N)
    x1 = Fraction(0)
    x2 = []
    x3 = Fraction(0)
    x4 = Fraction(0)
    for d in divisors(N):
        w = sigma(0, N // d) * mobius(N // d)
        if w == 0:
            continue
        full = trace_full(n, k, d)
        x1 += w * full.coeff1
        x2.append(w * full.term2)
        x3 += w * full.coeff3
        x4 += w * full.coeff4
    if (x1, x3, x4) != (direct.coeff1, direct.coeff3, direct.coeff4):
        raise ArithmeticError(
            f"trace_new({n},{k},{N}): rational terms disagree between routes"
        )
    t2_cross = math.fsum(x2)
    if abs(t2_cross - direct.term2) > 1e-9 * (1.0 + abs(direct.term2)):
        raise ArithmeticError(
            f"trace_new({n},{k},{N}): elliptic term {direct.term2} vs "
            f"cross-route {t2_cross}"
        )
    return direct


def averaged_trace_window(n: int, N: int, spec: WindowSpec) -> float:
    """(1/K^delta) sum over even k of psi((k-K)/K^delta) (-1)^{k/2} trace_new."""
    K, delta = spec.K, spec.delta
    if abs(K - 4.0 * math.pi * math.sqrt(n)) > n ** (1.0 / 6.0):
        raise ValueError("averaged_trace_window: K must be within n^(1/6) of 4 pi sqrt(n)")
    h = K ** delta
    lo = 2 * math.ceil((K - h) / 2)
    hi = 2 * math.floor((K + h) / 2)
    terms = []
    for k in range(lo, hi + 2, 2):
        w = psi_eval((k - K) / h)
        if w == 0.0:
            continue
        sign = -1.0 if (k // 2) % 2 else 1.0
        terms.append(w * sign * trace_new(n, k, N).total)
    return math.fsum(terms) / h


def noweight_main_term(n: int, N: int, K: int) -> float:
    """(mu(N) K / 2 pi) (sigma_1(n)/n) J_K(4 pi sqrt n)."""
    from .special_functions import bessel_j

    if mobius(N) == 0:
        raise ValueError("noweight_main_term: N must be squarefree")
    if abs(K - 4.0 * math.pi * math.sqrt(n)) > n ** (1.0 / 6.0):
        raise ValueError("noweight_main_term: K must be within n^(1/6) of 4 pi sqrt(n)")
    bess = bessel_j(int(K), 4.0 * math.pi * math.sqrt(n))
    return mobius(N) * K / (2.0 * math.pi) * sigma(1, n) / n * bess.value


def _phi_weights(j: np.ndarray, T: float) -> np.ndarray:
    # np.sinc(x) = sin(pi x)/(pi x), so this is exactly phi_eval vectorized
    return np.sinc(j / (800.0 * T)) ** 16


def _phi_tail(j0: float, T: float) -> float:
    """Bound on sum over odd j >= j0 of phi(j/T) from the (800T/(pi j))^16 envelope."""
    c = 800.0 * T / math.pi
    if j0 <= c:
        return math.inf
    return (c / j0) ** 16 + c ** 16 * j0 ** -15 / 30.0


def _odd_cutoff(T: float, coeff: float, abs_target: float) -> int:
    """Smallest odd j0 with coeff * phi-tail(j0) <= abs_target."""
    c = 800.0 * T / math.pi
    j0 = 2 * math.ceil(c) + 1
    while coeff * _phi_tail(j0, T) > abs_target:
        j0 = 2 * math.ceil(j0 * 1.3 / 2) + 1
    return j0


def _variance_inputs(n: int, N: int, T: float):
    if mobius(N) == 0 or N <= 1:
        raise ValueError("variance sums: squarefree N > 1 required")
    if math.gcd(n, N) != 1:
        raise ValueError("variance sums: gcd(n, N) = 1 required")
    if T < math.sqrt(n):
        raise ValueError("variance sums: T >= sqrt(n) required")
    tmax = math.isqrt(4 * n - 1)
    ts = np.arange(-tmax, tmax + 1)
    y = np.array([d_coefficient(int(t), n, N) for t in ts])
    theta = np.arctan2(np.sqrt(4.0 * n - ts.astype(float) ** 2), ts.astype(float))
    return ts, y, theta


def variance_window(n: int, N: int, T: float) -> float:
    """sum_{k>0 even} phi((k-1)/T) |trace_new(n,k,N) - identity term|^2.

    The identity term is (k-1)/12 phi(N)/sqrt(n) when n is a square; what is
    left is the elliptic term plus the weight-2 correction, which this
    evaluates vectorized over k (the closed-form pieces are exactly the
    per-k trace_new totals; tests spot-check that)."""
    _, y, theta = _variance_inputs(n, N, T)
    b4 = mobius(N) * sigma(1, n) / math.sqrt(n)
    m_bound = 2.0 * float(np.sum(np.abs(y))) + abs(b4)
    j_max = _odd_cutoff(T, m_bound ** 2, 1e-8)
    total = 0.0
    block = max(1, (1 << 22) // max(len(y), 1))
    for k_lo in range(2, j_max + 2, 2 * block):
        ks = np.arange(k_lo, min(k_lo + 2 * block, j_max + 2), 2)
        s = -2.0 * np.sin(np.outer(ks - 1.0, theta)) @ y
        s[ks == 2] += b4
        total += float(np.sum(_phi_weights(ks - 1.0, T) * s ** 2))
    return total


def diagonal_side(n: int, N: int, T: float) -> float:
    """2 sum_{k in 2Z} phi((k-1)/T) sum_{t^2<4n} |D_N(t,n)|^2 - phi(1/T) sigma_1(n)^2/n."""
    _, y, _ = _variance_inputs(n, N, T)
    s2 = float(np.sum(y ** 2))
    j_max = _odd_cutoff(T, max(1.0, 4.0 * s2), 1e-8)
    js = np.arange(1, j_max + 1, 2)
    # the two-sided even-k sum is twice the sum over positive odd j = k-1
    phi_sum = 2.0 * float(np.sum(_phi_weights(js.astype(float), T)))
    return 2.0 * phi_sum * s2 - phi_eval(1.0 / T) * sigma(1, n) ** 2 / n


def poisson_character_sum(T: float, theta: float) -> Tuple[float, float]:
    """sum_{k even} phi((k-1)/T) e^{i(k-1)theta}: (real value, imaginary residual).

    Vanishes identically for theta in [1/(2 sqrt n), pi - 1/(2 sqrt n)] with
    T >= sqrt(n): the transform of phi is supported in [-1/100, 1/100], so
    after Poisson summation no frequency survives."""
    if T < 1.0:
        raise ValueError("poisson_character_sum: T >= 1 required")
    if not (0.0 < theta < math.pi):
        raise ValueError("poisson_character_sum: theta in (0, pi) required")
    j_max = _odd_cutoff(T, 1.0, 1e-10)
    js = np.arange(1, j_max + 1, 2).astype(float)
    w = _phi_weights(js, T)
    # both signs of j = k-1 summed explicitly; the sine parts should cancel
    re = 2.0 * float(np.sum(w * np.cos(js * theta)))
    im = float(np.sum(w * np.sin(js * theta)) + np.sum(w * np.sin(-js * theta)))
    return re, abs(im)
