"""Sumsets, pair counts, coverage of Z/NZ by A + B + S, solution counts against
the Weil bound, and explicit constructions where averages misbehave."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .averages import AverageReport, correlation_profile, polynomial_average
from .bounds import thresholds
from .ntt import cyclic_convolve
from .polynomials import (
    IntValuedPoly,
    from_coeffs,
    histogram_vector,
    image_set,
    parse_and_validate,
    values_mod,
)
from .ring import DomainError, Modulus, factorize, is_prime, legendre_symbol
from .sets import ResidueSet, same_modulus

__all__ = [
    "NotFound",
    "PairCountReport",
    "CoverageReport",
    "WeilCountReport",
    "CounterexampleWitness",
    "sumset",
    "pair_count",
    "brute_force_pair_count",
    "coverage_check",
    "solution_count_three",
    "construct_counterexample",
    "trivial_disjoint_demo",
]

DIRICHLET_SEARCH_BOUND = 10**6


class NotFound(DomainError):
    def __init__(self, what: str, bound: int):
        self.bound = bound
        super().__init__(f"no {what} found up to {bound}")


def sumset(A: ResidueSet, B: ResidueSet) -> ResidueSet:
    """{a + b mod N}."""
    M = same_modulus(A, B)
    N = M.N
    if A.size == 0 or B.size == 0:
        return ResidueSet.empty(M)
    small, big = (A, B) if A.size <= B.size else (B, A)
    if small.size <= 64 or N <= 256:
        bits = big.bits
        full = (1 << N) - 1
        acc = 0
        for s in small.elements:
            acc |= ((bits << s) | (bits >> (N - s))) & full if s else bits
            if acc == full:
                break
        return ResidueSet.from_bits(M, acc) if N <= 4096 else _bits_to_set(M, acc)
    conv = cyclic_convolve(A.indicator(), B.indicator())
    return ResidueSet(M, conv > 0)


def _bits_to_set(M: Modulus, bits: int) -> ResidueSet:
    raw = np.frombuffer(bits.to_bytes((M.N + 7) // 8, "little"), dtype=np.uint8)
    return ResidueSet(M, np.unpackbits(raw, bitorder="little")[: M.N].astype(bool))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairCountReport:
    s: int
    expected: int
    epsilon_achieved: Optional[Fraction]  # None when |A||B| = 0
    threshold_ok: Optional[bool]  # None when deg P <= 1
    threshold: Optional[Fraction] = None


def pair_count(
    A: ResidueSet, B: ResidueSet, P: IntValuedPoly, eps: Fraction = Fraction(1)
) -> PairCountReport:
    """s = #{(n, m) : n in B, n + P(m) in A}, by contracting the image
    histogram of P with the shift counts |A ∩ (B + h)|."""
    M = same_modulus(A, B)
    N = M.N
    prof = correlation_profile(A, B, backend="transform" if N > 256 else "bitset")
    c = histogram_vector(P, N)
    if N < 2_000_000:
        s = int(np.dot(c, prof.counts))
    else:
        s = sum(int(x) * int(y) for x, y in zip(c, prof.counts))
    expected = A.size * B.size
    achieved = Fraction(abs(s - expected), expected) if expected else None
    ok, thr = None, None
    if P.degree > 1 and A.size and B.size:
        thr = thresholds(P, A.measure, B.measure, eps).threshold
        ok = M.lpf > thr
    return PairCountReport(s, expected, achieved, ok, thr)


def brute_force_pair_count(A: ResidueSet, B: ResidueSet, P: IntValuedPoly) -> int:
    same_modulus(A, B)
    N = A.N
    a = A.membership.tolist()
    b = B.membership.tolist()
    return sum(1 for m in range(1, N + 1) for n in range(N) if b[n] and a[(n + P(m)) % N])


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    missing: Tuple[int, ...]
    witness_triples: Tuple[Tuple[int, int, int, int], ...]  # (x, a, b, s) with a + b + s = x


def _decompose(x: int, A: ResidueSet, B: ResidueSet, S: ResidueSet, BS: ResidueSet):
    N = A.N
    for a in A.elements:
        if (x - a) % N in BS:
            r = (x - a) % N
            for b in B.elements:
                if (r - b) % N in S:
                    return (x, a, b, (r - b) % N)
    return None


def coverage_check(
    A: ResidueSet, B: ResidueSet, Q: IntValuedPoly, witnesses: int = 8
) -> CoverageReport:
    """Whether A + B + S is all of Z/NZ, with S the image of Q mod N."""
    M = same_modulus(A, B)
    S = ResidueSet(M, image_set(Q, M.N))
    BS = sumset(B, S)
    total = sumset(A, BS)
    missing = tuple(int(x) for x in np.flatnonzero(~total.membership))
    covered_els = np.flatnonzero(total.membership)
    triples = []
    if covered_els.size and witnesses > 0:
        picks = np.unique(np.linspace(0, covered_els.size - 1, min(witnesses, covered_els.size)).astype(int))
        for i in picks:
            t = _decompose(int(covered_els[i]), A, B, S, BS)
            if t is not None:
                triples.append(t)
    return CoverageReport(not missing, missing, tuple(triples))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeilCountReport:
    count: int
    weil_lower: float
    holds: Optional[bool]  # None when the Weil hypotheses fail
    degrees: Tuple[int, int, int]


def _degree_mod_p(F: IntValuedPoly, p: int) -> int:
    coeffs = F.integer_coeffs
    for i in range(len(coeffs) - 1, -1, -1):
        if coeffs[i] % p:
            return i
    return -1


def solution_count_three(
    F1: IntValuedPoly, F2: IntValuedPoly, F3: IntValuedPoly, c: int, p: int
) -> WeilCountReport:
    """#{(x1, x2, x3) in (Z/pZ)^3 : F1(x1) + F2(x2) + F3(x3) = c mod p}.

    Counted from the three value histograms in O(p^2). The lower bound
    p^2 (1 - prod(deg F_i - 1) / sqrt p) is compared exactly by squaring.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    for F in (F1, F2, F3):
        if not F.has_integer_coeffs:
            raise DomainError(f"{F} does not have integer coefficients")
    hists = []
    for F in (F1, F2, F3):
        vals = values_mod(F, np.arange(p, dtype=np.int64), p)
        hists.append(np.bincount(vals, minlength=p).astype(np.int64))
    H1, H2, H3 = hists
    conv23 = np.zeros(p, dtype=np.int64)
    for b in np.flatnonzero(H2):
        conv23 += int(H2[b]) * np.roll(H3, int(b))
    idx = (int(c) - np.arange(p)) % p
    count = int(np.dot(H1, conv23[idx]))

    degs = tuple(_degree_mod_p(F, p) for F in (F1, F2, F3))
    prod = math.prod(d - 1 for d in degs)
    weil_lower = p * p * (1 - prod / math.sqrt(p))
    ok = all(1 <= d < p and math.gcd(d, p) == 1 for d in degs)
    holds = None
    if ok:
        gap = p * p - count  # need gap <= p^(3/2) * prod
        holds = gap <= 0 or gap * gap <= p ** 3 * prod * prod
    return WeilCountReport(count, weil_lower, holds, degs)


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CounterexampleWitness:
    kind: str
    modulus: Modulus
    sets: Dict[str, ResidueSet]
    polynomial: Optional[IntValuedPoly]
    predicted: Optional[Fraction]
    observed: Fraction
    params: Dict[str, int] = field(default_factory=dict)

    @property
    def matches(self) -> bool:
        return self.predicted is None or self.predicted == self.observed


_SQUARE = parse_and_validate("n^2")


def _residue_pair(p: int, symbol: int) -> Tuple[int, int]:
    for q1 in range(1, p):
        q2 = p - q1
        if legendre_symbol(q1, p) == symbol and legendre_symbol(q2, p) == symbol:
            return q1, q2
    raise NotFound(f"pair q, -q of Legendre symbol {symbol} mod {p}", p)


def _dirichlet_prime(Q: IntValuedPoly, lower: int, bound: int) -> int:
    d = Q.degree
    lead = Q.integer_coeffs[-1]
    p = max(2, lower + 1)
    # p = 1 mod d, so step through that progression
    p += (1 - p) % d
    while p <= bound:
        if is_prime(p) and lead % p:
            return p
        p += d
    raise NotFound(f"prime p = 1 mod {d} above {lower} not dividing {lead}", bound)


def construct_counterexample(
    kind: str,
    p: Optional[int] = None,
    k: int = 1,
    P: Optional[IntValuedPoly] = None,
    N: Optional[int] = None,
    c: Optional[int] = None,
    search_bound: int = DIRICHLET_SEARCH_BOUND,
) -> CounterexampleWitness:
    """Build one of the explicit finite examples.

    under / over: p = 1 mod 4, N = k p, A = U_c {cp, cp + q1} with q1 = -q2 both
    nonresidues (under) or both residues (over); average along n^2 is
    (1/2) mu(A)^2 or (3/2) mu(A)^2.

    nonpermutation: P of degree d > 1, Q(n) = P(c n) with c = c' by default.
    Picks the least prime p > max(c, c') with d | p - 1 and p not dividing the
    leading coefficient of Q (unless p is given), then the least a with
    m_a = #{n mod p : Q(n) = a} >= 2. With A = 0 mod p and B = a mod p in Z/NZ
    (N = p unless given), the average of mu(A ∩ T^{-P(n)} B) is m_a / p^2.

    interval: A = {0, ..., floor(N/10)}; observed is
    (1/N) sum_n |mu(A ∩ T^n A) - mu(A)^2|.
    """
    if kind in ("under", "over"):
        if p is None or not is_prime(p):
            raise DomainError("under/over need a prime p")
        if p % 4 != 1:
            raise DomainError(
                f"p = {p} is not 1 mod 4: -1 is then a nonresidue, so q and -q never "
                "share a quadratic character"
            )
        if k < 1:
            raise DomainError("k must be positive")
        q1, q2 = _residue_pair(p, -1 if kind == "under" else 1)
        M = factorize(k * p)
        A = ResidueSet.from_elements(M, [x for cc in range(k) for x in (cc * p, cc * p + q1)])
        mu = A.measure
        predicted = mu * mu * (Fraction(1, 2) if kind == "under" else Fraction(3, 2))
        observed = polynomial_average(A, A, _SQUARE).average
        return CounterexampleWitness(kind, M, {"A": A}, _SQUARE, predicted, observed,
                                     {"p": p, "k": k, "q1": q1, "q2": q2})

    if kind == "nonpermutation":
        P = P or _SQUARE
        d = P.degree
        if d <= 1:
            raise DomainError("need deg(P) > 1")
        c = P.c_prime if c is None else int(c)
        if c <= 0:
            raise DomainError("c must be positive")
        Q = P.compose_linear(c)
        if not Q.has_integer_coeffs:
            raise DomainError(f"P({c} n) does not have integer coefficients")
        if p is None:
            p = _dirichlet_prime(Q, max(c, P.c_prime), search_bound)
        elif not (is_prime(p) and p > max(c, P.c_prime) and (p - 1) % d == 0
                  and Q.integer_coeffs[-1] % p):
            raise DomainError(f"p = {p} does not meet the prime conditions")
        N = p if N is None else int(N)
        if N % p:
            raise DomainError(f"p = {p} must divide N = {N}")
        if math.gcd(c, N) != 1:
            raise DomainError(f"c = {c} must be invertible mod N = {N}")
        hist = np.bincount(values_mod(Q, np.arange(p, dtype=np.int64), p), minlength=p)
        repeated = np.flatnonzero(hist >= 2)
        if repeated.size == 0:
            raise DomainError(f"{Q} permutes Z/{p}Z")
        a = int(repeated[0])
        M = factorize(N)
        A = ResidueSet.from_mask(M, np.arange(N) % p == 0)
        B = ResidueSet.from_mask(M, np.arange(N) % p == a)
        # mu(A ∩ T^{-h} B) = mu(B ∩ (A + h)), so the engine is called with (B, A)
        rep = polynomial_average(B, A, P)
        m_a = int(hist[a])
        predicted = Fraction(m_a - 1, p * p)
        return CounterexampleWitness(kind, M, {"A": A, "B": B}, P, predicted, rep.deviation,
                                     {"p": p, "a": a, "m_a": m_a, "c": c})

    if kind == "interval":
        if N is None:
            raise DomainError("interval needs N")
        M = factorize(int(N))
        A = ResidueSet.from_elements(M, range(M.N // 10 + 1))
        prof = correlation_profile(A, A)
        sq = A.size * A.size
        # |counts/N - |A|^2/N^2| = |N counts - |A|^2| / N^2, averaged over n
        total = int(np.abs(M.N * prof.counts - sq).sum())
        observed = Fraction(total, M.N ** 3)
        return CounterexampleWitness(kind, M, {"A": A}, None, None, observed, {"N": M.N})

    raise DomainError(f"unknown counterexample kind {kind!r}")


def trivial_disjoint_demo(p: int, N: int) -> AverageReport:
    """P(n) = p n with A = 0 mod p and B = 1 mod p: every intersection is empty."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if N % p:
        raise DomainError(f"p = {p} does not divide N = {N}")
    M = factorize(N)
    A = ResidueSet.from_mask(M, np.arange(N) % p == 0)
    B = ResidueSet.from_mask(M, np.arange(N) % p == 1 % p)
    return polynomial_average(A, B, from_coeffs([0, p]))
