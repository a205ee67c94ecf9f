"""Certified inequality checks: exponential sums, the lpf bound, van der Corput
differencing, the uniform norm bound for polynomial averages, and thresholds.

Decisions (``holds``) are made on exact rationals only. Where a root appears,
both sides are raised to a power of two first. Floating point shows up in
cross-checks and in reports on non-rational signals, which are then left
unasserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np

from .ntt import MOD, cyclic_correlate, direct_cyclic_correlate
from .polynomials import IntValuedPoly, histogram_vector, values_mod
from .ring import DomainError, Modulus, factorize, mod_inverse
from .sets import ResidueSet

__all__ = [
    "ComplexSignal",
    "BoundReport",
    "NormBoundReport",
    "ThresholdReport",
    "InapplicableBound",
    "expsum_exact",
    "expsum_literal",
    "expsum_bound_check",
    "weighted_linear_check",
    "average_norm_check",
    "thresholds",
]

Number = Union[Fraction, float]


class InapplicableBound(DomainError):
    """The bound's hypotheses fail; ``report`` still carries the computed lhs."""

    def __init__(self, message: str, report: "BoundReport"):
        self.report = report
        super().__init__(message)


# ---------------------------------------------------------------------------
# signals


@dataclass(frozen=True, eq=False)
class ComplexSignal:
    """f : Z/NZ -> C, with values[x] = f(x). Rational real values stay exact."""

    modulus: Modulus
    values: Tuple

    def __post_init__(self):
        if len(self.values) != self.modulus.N:
            raise ValueError(f"signal needs {self.modulus.N} values, got {len(self.values)}")
        if all(isinstance(v, (int, Fraction, np.integer)) for v in self.values):
            vals = tuple(Fraction(int(v)) if isinstance(v, np.integer) else Fraction(v) for v in self.values)
        else:
            vals = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, N, values) -> "ComplexSignal":
        M = N if isinstance(N, Modulus) else factorize(int(N))
        return cls(M, tuple(values))

    @classmethod
    def centered_indicator(cls, A: ResidueSet) -> "ComplexSignal":
        mu = A.measure
        return cls(A.modulus, tuple(Fraction(int(b)) - mu for b in A.membership))

    @property
    def N(self) -> int:
        return self.modulus.N

    @property
    def exact(self) -> bool:
        return bool(self.values) and isinstance(self.values[0], Fraction)

    @property
    def mean(self) -> Number:
        s = sum(self.values, Fraction(0) if self.exact else 0j)
        return s / self.N

    @property
    def norm_sq(self) -> Number:
        if self.exact:
            return sum((v * v for v in self.values), Fraction(0)) / self.N
        return float(sum(abs(v) ** 2 for v in self.values) / self.N)

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)

    @property
    def sup(self) -> Number:
        return max(abs(v) for v in self.values)

    def centered(self) -> "ComplexSignal":
        m = self.mean
        return ComplexSignal(self.modulus, tuple(v - m for v in self.values))

    def compose(self, perm: np.ndarray) -> "ComplexSignal":
        """x -> f(perm[x])."""
        return ComplexSignal(self.modulus, tuple(self.values[int(i)] for i in perm))

    def as_complex(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values])

    def fourier(self) -> np.ndarray:
        """fhat(j) = (1/N) sum_{m=1}^N e^{-2 pi i j m / N} f(m), floating."""
        return np.fft.fft(self.as_complex()) / self.N

    def plancherel_gap(self) -> float:
        return abs(float(np.sum(np.abs(self.fourier()) ** 2)) - float(self.norm_sq))

    def inversion_error(self) -> float:
        N = self.N
        fh = self.fourier()
        j = np.arange(N)
        rebuilt = np.array([np.sum(np.exp(2j * np.pi * j * m / N) * fh) for m in range(N)])
        return float(np.max(np.abs(rebuilt - self.as_complex())))

    def scaled_integers(self) -> Tuple[np.ndarray, int]:
        """(F, L) with F = L * f an integer vector; exact signals only."""
        L = math.lcm(1, *(v.denominator for v in self.values))
        F = [int(v * L) for v in self.values]
        dtype = np.int64 if max(map(abs, F), default=0) < 1 << 62 else object
        return np.array(F, dtype=dtype), L


def _exact_correlate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """c[h] = sum_x a[x] b[x - h] for integer vectors, exactly."""
    N = a.size
    if a.dtype != object and b.dtype != object:
        amin, bmin = int(a.min()), int(b.min())
        a0, b0 = a - amin, b - bmin
        if N * int(a0.max()) * int(b0.max()) < MOD and N >= 64:
            # sum_x (a0+amin)(b0+bmin) expanded; the cross terms are constant in h
            core = cyclic_correlate(a0, b0).astype(object)
            return (core + bmin * int(a0.sum()) + amin * int(b0.sum()) + N * amin * bmin)
    return direct_cyclic_correlate(a, b).astype(object)


def _autocorrelation_exact(f: ComplexSignal) -> List[Fraction]:
    """R(t) = <T^t f, f> = (1/N) sum_x f(x + t) f(x) for a rational signal."""
    F, L = f.scaled_integers()
    raw = _exact_correlate(F, F)
    den = f.N * L * L
    return [Fraction(int(r), den) for r in raw]


def _autocorrelation_float(f: ComplexSignal) -> np.ndarray:
    v = f.as_complex()
    return np.array([np.vdot(v, np.roll(v, -t)) for t in range(f.N)]) / f.N


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class BoundReport:
    lhs: Number
    rhs: Number
    holds: Optional[bool]  # None: not asserted (hypotheses fail or values inexact)
    note: str = ""

    @property
    def slack(self) -> Number:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class NormBoundReport(BoundReport):
    lhs_squared: Optional[Fraction] = None
    compared_power: int = 1  # holds decides lhs_squared ** compared_power <= (k-1)/lpf
    chain: Tuple[Tuple[int, Number, Number, Optional[bool]], ...] = ()
    reduction_ok: Optional[bool] = None


@dataclass(frozen=True)
class ThresholdReport:
    C_P: int
    threshold: Fraction
    epsilon: Fraction
    delta: Fraction
    C: Fraction
    degenerate: bool = False
    quantitative_threshold: Fraction = Fraction(0)  # C / eps^(2^(d-1))


# ---------------------------------------------------------------------------
# exponential sums


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@lru_cache(maxsize=65536)
def _expsum_count(N: int, g: int, d: int) -> int:
    """#{h in [1,N]^d : g * prod h = 0 mod N} for g | N, via per-prime valuations."""
    total = 1
    for p, a in factorize(N).factorization if N > 1 else ():
        need = max(0, a - _valuation(g, p))
        # weight[v] = #{h mod p^a : v_p(h) = v}, v capped at a (h = 0)
        weight = [p ** (a - v) - p ** (a - v - 1) for v in range(a)] + [1]
        dist = [1] + [0] * a  # empty product has valuation 0
        for _ in range(d):
            new = [0] * (a + 1)
            for v1, c1 in enumerate(dist):
                if c1:
                    for v2, c2 in enumerate(weight):
                        new[min(a, v1 + v2)] += c1 * c2
            dist = new
        total *= sum(dist[need:])
    return total


def expsum_exact(N, j: int, d: int) -> Fraction:
    """|N^{-(d+1)} sum_{n,h_1..h_d} e^{2 pi i n (prod h) j / N}| as an exact fraction.

    Summing over n first kills every term with j * prod h != 0 mod N, leaving
    N^{-d} times the number of h-tuples that do satisfy it.
    """
    M = N if isinstance(N, Modulus) else factorize(int(N))
    if d < 1:
        raise DomainError("d must be at least 1")
    if int(j) % M.N == 0:
        raise DomainError("j must be a nonzero residue")
    g = math.gcd(int(j), M.N)
    return Fraction(_expsum_count(M.N, g, d), M.N ** d)


def expsum_literal(N: int, j: int, d: int) -> complex:
    """Floating evaluation of the full (d+1)-fold exponential sum; a cross-check."""
    N = int(N)
    idx = np.arange(1, N + 1)
    prod = np.ones(1, dtype=np.int64)
    for _ in range(d):
        prod = (prod[:, None] * idx[None, :] % N).ravel()
    phase = (idx[:, None] * ((prod * j) % N)[None, :]) % N
    return complex(np.exp(2j * np.pi * phase / N).sum() / N ** (d + 1))


@dataclass(frozen=True)
class ExpsumBoundReport(BoundReport):
    worst_j: int = 0


def expsum_bound_check(N, d: int) -> ExpsumBoundReport:
    """Worst case over j of expsum_exact against d / lpf(N).

    The value depends on j only through gcd(j, N), so the scan runs over the
    proper divisors of N and reports the least j attaining the maximum.
    """
    M = N if isinstance(N, Modulus) else factorize(int(N))
    best, best_j = Fraction(-1), 0
    for g in _divisors(M):
        if g == M.N:
            continue
        val = expsum_exact(M, g, d)
        if val > best or (val == best and g < best_j):
            best, best_j = val, g
    rhs = Fraction(d, M.lpf)
    return ExpsumBoundReport(best, rhs, best <= rhs, worst_j=best_j)


def _divisors(M: Modulus) -> List[int]:
    divs = [1]
    for p, a in M.factorization:
        divs = [x * p ** e for x in divs for e in range(a + 1)]
    return sorted(divs)


# ---------------------------------------------------------------------------
# linear weighted average (lpf bound)


def _product_weights(N: int, d: int) -> np.ndarray:
    """w[t] = #{(n, h_1..h_d) in [1,N]^{d+1} : n * prod h = t mod N}."""
    idx = np.arange(N, dtype=np.int64)
    dist = np.ones(N, dtype=object)  # n ranges over all residues once
    for _ in range(d):
        new = np.zeros(N, dtype=object)
        for h in range(N):
            np.add.at(new, (idx * h) % N, dist)
        dist = new
    return dist


def weighted_linear_check(f: ComplexSignal, d: int) -> BoundReport:
    """|N^{-d} sum_h (1/N) sum_n <T^{n prod h} f, f>| <= |mean f|^2 + (d / lpf N) ||f||^2.

    Rational signals: lhs is computed exactly as sum_t w(t) <T^t f, f>.
    Other signals: lhs is reported in floating point and ``holds`` is decided
    from the spectral form sum_j |fhat(j)|^2 E(j), whose j != 0 terms each sit
    below (d / lpf) |fhat(j)|^2 because the exact weight E(j) does.
    """
    if d < 1:
        raise DomainError("d must be at least 1")
    M = f.modulus
    N = M.N
    rate = Fraction(d, M.lpf)
    if f.exact:
        R = _autocorrelation_exact(f)
        w = _product_weights(N, d)
        lhs = abs(sum((int(w[t]) * R[t] for t in range(N)), Fraction(0)) / N ** (d + 1))
        mean = f.mean
        rhs = mean * mean + rate * f.norm_sq
        return BoundReport(lhs, rhs, lhs <= rhs, "exact")
    fh = f.fourier()
    weights = [Fraction(1)] + [expsum_exact(M, j, d) for j in range(1, N)]
    lhs = abs(float(sum(abs(fh[j]) ** 2 * float(weights[j]) for j in range(N))))
    rhs = abs(complex(f.mean)) ** 2 + float(rate) * f.norm_sq
    termwise = all(rate - weights[j] >= 0 for j in range(1, N))
    return BoundReport(lhs, rhs, termwise, "spectral: each j != 0 weight certified <= d/lpf")


# ---------------------------------------------------------------------------
# polynomial averages and van der Corput


def _difference_table(Q: IntValuedPoly, N: int, d: int) -> np.ndarray:
    """Delta_d(Q(n); h_1..h_d) mod N for every (n, h_1..h_d) in [1,N]^{d+1}.

    Inclusion-exclusion over subsets S of the shifts:
    Delta_d = sum_S (-1)^{d-|S|} Q(n + sum_{i in S} h_i), all mod N (Q is N-periodic).
    """
    qv = values_mod(Q, np.arange(N, dtype=np.int64), N)
    axes = [np.arange(1, N + 1, dtype=np.int64) % N] * (d + 1)
    grids = np.meshgrid(*axes, indexing="ij", sparse=True)
    n, hs = grids[0], grids[1:]
    out = np.zeros((N,) * (d + 1), dtype=np.int64)
    for mask in range(1 << d):
        arg = n
        for i in range(d):
            if mask >> i & 1:
                arg = arg + hs[i]
        sign = -1 if (d - bin(mask).count("1")) % 2 else 1
        out = (out + sign * qv[arg % N]) % N
    return out.ravel()


def _chain_rhs(Q: IntValuedPoly, f: ComplexSignal, d: int, R) -> Number:
    N = f.N
    table = _difference_table(Q, N, d)
    w = np.bincount(table, minlength=N)
    if f.exact:
        return sum((int(w[t]) * R[t] for t in range(N) if w[t]), Fraction(0)) / N ** (d + 1)
    return float(np.real(np.dot(w, R)) / N ** (d + 1))


_CHAIN_BUDGET = 30_000_000


def average_norm_check(A_or_f, P: IntValuedPoly, chain: bool = True) -> NormBoundReport:
    """|| (1/N) sum_{n=1}^N T^{P(n)} f - mean f || <= ((k-1) / lpf N)^(2^-(k-1)), k = deg P.

    Sets A become f = 1_A - mu(A). The comparison is made exactly between
    ||.||^(2^(k-1)) = (lhs^2)^(2^(k-2)) and (k-1)/lpf N. With chain=True the
    differencing inequality ||.||^(2^d) <= N^-d sum_h <(1/N) sum_n T^{Delta_d} f, f>
    is also checked for d = 1..k-1 (as long as the N^(d+1) table is affordable).

    Polynomials with c' > 1 are handled through g = f o phi, phi(m) = m / c',
    which turns the average along P into the average along c'P. This needs
    c' invertible mod N.
    """
    if isinstance(A_or_f, ResidueSet):
        f = ComplexSignal.centered_indicator(A_or_f)
    else:
        if A_or_f.sup > 1:
            raise DomainError("the signal must satisfy |f| <= 1")
        # centering keeps ||f|| <= 1, which is all the differencing step uses
        f = A_or_f.centered()
    M = f.modulus
    N = M.N
    k = P.degree
    if k < 1:
        raise DomainError("the polynomial must be nonconstant")

    c = histogram_vector(P, N)
    if f.exact:
        F, L = f.scaled_integers()
        G = _exact_correlate(F, c)  # G[x] = sum_h c_h F(x + h)
        lhs_sq = Fraction(sum(int(g) * int(g) for g in G), N ** 3 * L * L)
        lhs: Number = lhs_sq
    else:
        v = f.as_complex()
        g = np.array([np.dot(c, np.roll(v, -x)) for x in range(N)]) / N
        lhs_sq = None
        lhs = float(np.mean(np.abs(g) ** 2))

    rate = Fraction(k - 1, M.lpf)
    power = 1 << max(k - 2, 0)
    cp = P.c_prime
    lead = abs(P.integer_coeffs[-1])
    applicable = M.lpf > max(k, lead, cp)

    if f.exact:
        if k == 1:
            holds = lhs_sq == 0
        else:
            holds = lhs_sq ** power <= rate
    else:
        holds = None
    rhs_display: Number = rate if k >= 2 else Fraction(0)
    # report both sides of the comparison actually made: ||.||^(2^(k-1)) vs (k-1)/lpf
    lhs_display: Number = lhs_sq ** power if f.exact else float(lhs) ** power

    chain_rows = []
    reduction_ok = None
    if applicable and chain and k >= 2:
        Q = P.scaled(cp) if cp > 1 else P
        g_sig = f
        if cp > 1:
            inv = mod_inverse(cp, M).value
            g_sig = f.compose((np.arange(N) * inv) % N)
        R = _autocorrelation_exact(g_sig) if g_sig.exact else _autocorrelation_float(g_sig)
        if cp > 1 and g_sig.exact:
            cq = histogram_vector(Q, N)
            Fg, Lg = g_sig.scaled_integers()
            Gq = _exact_correlate(Fg, cq)
            reduction_ok = Fraction(sum(int(x) * int(x) for x in Gq), N ** 3 * Lg * Lg) == lhs_sq
        for d in range(1, k):
            if N ** (d + 1) > _CHAIN_BUDGET:
                break
            rhs_d = _chain_rhs(Q, g_sig, d, R)
            if f.exact:
                left = lhs_sq ** (1 << (d - 1))
                chain_rows.append((d, left, rhs_d, left <= rhs_d))
            else:
                chain_rows.append((d, float(lhs) ** (1 << (d - 1)), rhs_d, None))

    note = f"lhs = ||avg||^{2 * power}, rhs = (k-1)/lpf N" if k >= 2 else "degree 1: lhs = ||avg||^2, rhs = 0"
    if not applicable:
        report = NormBoundReport(lhs_display, rhs_display, None, "hypotheses fail: " + note, lhs_sq, power,
                                 tuple(chain_rows), reduction_ok)
        raise InapplicableBound(
            f"lpf(N) = {M.lpf} does not exceed max(k, |c_k|, c') = {max(k, lead, cp)}", report
        )
    if f.exact and chain_rows and not all(r[3] for r in chain_rows):
        holds = False
    if reduction_ok is False:
        holds = False
    return NormBoundReport(lhs_display, rhs_display, holds, note, lhs_sq, power, tuple(chain_rows), reduction_ok)


# ---------------------------------------------------------------------------
# thresholds


def thresholds(
    P: IntValuedPoly,
    muA: Fraction,
    muB: Fraction,
    eps: Fraction = Fraction(1),
    delta: Fraction = Fraction(1),
) -> ThresholdReport:
    """lpf thresholds for dense pair counts and the simpler constant C.

    threshold = max{C_P, (d-1) muA (1-muA) (eps muA sqrt(muB))^(-2^(d-1))}
    C         = max{C_P, (d-1)/4 * delta^(-2^(d-2))}
    (sqrt(muB))^(2^(d-1)) = muB^(2^(d-2)) keeps everything rational for d >= 2.
    """
    d = P.degree
    if d <= 1:
        raise DomainError("thresholds need deg(P) > 1")
    muA, muB, eps, delta = map(Fraction, (muA, muB, eps, delta))
    if not (0 <= muA <= 1 and 0 < muB <= 1):
        raise DomainError("measures must lie in [0, 1] (muB > 0)")
    if not 0 < eps <= 1 or not 0 < delta <= 1:
        raise DomainError("eps and delta must lie in (0, 1]")
    CP = P.C_P
    degenerate = muA in (0, 1)
    if degenerate:
        term = Fraction(0)
    else:
        e = 1 << (d - 1)
        term = (d - 1) * muA * (1 - muA) / ((eps * muA) ** e * muB ** (e // 2))
    threshold = max(Fraction(CP), term)
    C = max(Fraction(CP), Fraction(d - 1, 4) / delta ** (1 << (d - 2)))
    quant = C / eps ** (1 << (d - 1))
    return ThresholdReport(CP, threshold, eps, delta, C, degenerate, quant)
