"""Exact polynomial ergodic averages on the rotation of Z/NZ.

Everything here is rational. The one place floating point appears is the
sampled deviation scan, which uses a BLAS matrix product on integer-valued
float64 data whose partial sums stay below 2^53, so each result is an exact
integer.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .ntt import cyclic_correlate
from .polynomials import IntValuedPoly, histogram_vector, parse_and_validate
from .ring import DomainError, Modulus, factorize, is_prime
from .sets import ResidueSet, same_modulus

__all__ = [
    "RefuseExhaustive",
    "CorrelationProfile",
    "AverageReport",
    "DeviationResult",
    "ConditionalTerm",
    "PkGoalReport",
    "correlation_profile",
    "polynomial_average",
    "brute_force_average",
    "max_deviation_exhaustive",
    "max_deviation_sampled",
    "conditional_inner",
    "pkgoal_check",
    "DEFAULT_MAX_EXHAUSTIVE",
]

DEFAULT_MAX_EXHAUSTIVE = 24
_ENGINE_LIMIT = 40  # masks are uint64 and the search is 2^N anyway


class RefuseExhaustive(DomainError):
    def __init__(self, N: int, bound: int):
        self.N = N
        self.bound = bound
        super().__init__(
            f"exhaustive search over 2^{N} subsets refused (bound {bound}); "
            "use the sampled scan instead"
        )


@dataclass(frozen=True, eq=False)
class CorrelationProfile:
    """counts[h] = |A ∩ (B + h)|, i.e. N * mu(A ∩ T^h B)."""

    modulus: Modulus
    counts: np.ndarray = field(repr=False)
    size_a: int
    size_b: int

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        c.flags.writeable = False
        object.__setattr__(self, "counts", c)

    def measure(self, h: int) -> Fraction:
        return Fraction(int(self.counts[int(h) % self.modulus.N]), self.modulus.N)


@dataclass(frozen=True)
class AverageReport:
    average: Fraction
    product: Fraction
    deviation: Fraction

    @property
    def abs_deviation(self) -> Fraction:
        return abs(self.deviation)


def _bitset_profile(A: ResidueSet, B: ResidueSet) -> np.ndarray:
    N = A.N
    a, b = A.bits, B.bits
    full = (1 << N) - 1
    out = np.empty(N, dtype=np.int64)
    out[0] = (a & b).bit_count()
    for h in range(1, N):
        rot = ((b << h) | (b >> (N - h))) & full
        out[h] = (a & rot).bit_count()
    return out


def _transform_profile(A: ResidueSet, B: ResidueSet) -> np.ndarray:
    return cyclic_correlate(A.indicator(), B.indicator())


def correlation_profile(A: ResidueSet, B: ResidueSet, backend: str = "auto") -> CorrelationProfile:
    """Shift counts |A ∩ (B + h)| for all h.

    backend: "bitset" rotates a big-integer bit vector and popcounts,
    "transform" runs an exact number theoretic transform, "auto" picks by size.
    """
    M = same_modulus(A, B)
    if backend == "auto":
        backend = "bitset" if M.N <= 256 else "transform"
    if backend == "bitset":
        counts = _bitset_profile(A, B)
    elif backend == "transform":
        counts = _transform_profile(A, B)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return CorrelationProfile(M, counts, A.size, B.size)


def _weighted_sum(weights: np.ndarray, counts: np.ndarray) -> int:
    N = weights.size
    if N < 2_000_000:
        return int(np.dot(weights, counts))
    return sum(int(w) * int(c) for w, c in zip(weights, counts) if w)


def polynomial_average(
    A: ResidueSet,
    B: ResidueSet,
    P: IntValuedPoly,
    profile: Optional[CorrelationProfile] = None,
) -> AverageReport:
    """(1/N) sum_{n=1}^N mu(A ∩ T^{P(n)} B) as an exact fraction.

    Contracts the image histogram of P against the shift counts:
    average = (1/N^2) sum_h c_h |A ∩ (B + h)|.
    """
    M = same_modulus(A, B)
    N = M.N
    if profile is None:
        profile = correlation_profile(A, B)
    total = _weighted_sum(histogram_vector(P, N), profile.counts)
    avg = Fraction(total, N * N)
    prod = A.measure * B.measure
    return AverageReport(avg, prod, avg - prod)


def brute_force_average(A: ResidueSet, B: ResidueSet, P: IntValuedPoly) -> Fraction:
    """O(N^2) double loop, kept as an independent oracle."""
    same_modulus(A, B)
    N = A.N
    a = A.membership.tolist()
    b = B.membership.tolist()
    total = 0
    for n in range(1, N + 1):
        h = P(n) % N
        total += sum(1 for x in range(N) if a[x] and b[(x - h) % N])
    return Fraction(total, N * N)


# ---------------------------------------------------------------------------
# deviation scans


@dataclass(frozen=True)
class DeviationResult:
    witness: ResidueSet
    max_deviation: Fraction
    signed_deviation: Fraction
    mode: str  # "exhaustive" or "sampled"; only exhaustive is a proven maximum
    examined: int


def _rotate(masks: np.ndarray, h: int, N: int, full: np.uint64) -> np.ndarray:
    if h == 0:
        return masks
    return ((masks << np.uint64(h)) | (masks >> np.uint64(N - h))) & full


def _scan_chunk(args) -> Tuple[int, int, int]:
    """Return (best |numerator|, its mask, number of masks evaluated) on [lo, hi)."""
    lo, hi, N, weights, symmetry = args
    full = np.uint64((1 << N) - 1)
    masks = np.arange(lo, hi, dtype=np.uint64)
    if symmetry:
        keep = np.ones(masks.size, dtype=bool)
        for r in range(1, N):
            keep &= masks <= _rotate(masks, r, N, full)
        masks = masks[keep]
    if masks.size == 0:
        return (-1, 0, 0)
    size = np.bitwise_count(masks).astype(np.int64)
    num = np.zeros(masks.size, dtype=np.int64)
    for h in np.flatnonzero(weights):
        num += int(weights[h]) * np.bitwise_count(masks & _rotate(masks, int(h), N, full)).astype(np.int64)
    num -= size * size
    mag = np.abs(num)
    i = int(np.argmax(mag))
    return (int(mag[i]), int(masks[i]), int(masks.size))


def max_deviation_exhaustive(
    N,
    P: IntValuedPoly,
    symmetry: bool = True,
    max_exhaustive: int = DEFAULT_MAX_EXHAUSTIVE,
    workers: int = 1,
) -> DeviationResult:
    """max over all A ⊆ Z/NZ of |(1/N) sum_n mu(A ∩ T^{P(n)} A) - mu(A)^2|.

    With symmetry, only the least rotation of each cyclic class is evaluated;
    shifting A does not change the deviation. Ties go to the smallest bit mask,
    which is always a class representative, so both modes return the same witness.
    """
    M = N if isinstance(N, Modulus) else factorize(int(N))
    N = M.N
    if N > min(max_exhaustive, _ENGINE_LIMIT):
        raise RefuseExhaustive(N, min(max_exhaustive, _ENGINE_LIMIT))
    weights = histogram_vector(P, N)
    total = 1 << N
    chunk = 1 << 18
    tasks = [(lo, min(lo + chunk, total), N, weights, symmetry) for lo in range(0, total, chunk)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_chunk, tasks))
    else:
        results = [_scan_chunk(t) for t in tasks]
    best, mask = -1, 0
    for mag, m, _ in results:  # chunks are in mask order, strict > keeps the first
        if mag > best:
            best, mask = mag, m
    witness = ResidueSet.from_bits(M, mask)
    rep = polynomial_average(witness, witness, P)
    return DeviationResult(witness, Fraction(best, N * N), rep.deviation, "exhaustive",
                           sum(r[2] for r in results))


def shift_weight_matrix(P: IntValuedPoly, N: int) -> np.ndarray:
    """W[x, y] = c_{(x - y) mod N}; then A^T W B = N^2 * average."""
    c = histogram_vector(P, N)
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return c[idx]


def max_deviation_sampled(
    N,
    P: IntValuedPoly,
    samples: int = 10_000,
    seed: int = 0,
    batch: int = 4096,
) -> DeviationResult:
    """Largest deviation among uniformly random subsets (each element kept with
    probability 1/2). A lower bound on the true maximum, never a proof of it."""
    M = N if isinstance(N, Modulus) else factorize(int(N))
    N = M.N
    if N ** 3 >= 1 << 53:
        raise DomainError(f"sampled scan keeps integers exact only for N < 2^(53/3); got {N}")
    W = shift_weight_matrix(P, N).astype(np.float64)
    rng = np.random.default_rng(seed)
    best, best_row = -1, None
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        X = rng.integers(0, 2, size=(b, N), dtype=np.int8).astype(np.float64)
        quad = np.einsum("ij,ij->i", X @ W, X)
        num = np.rint(quad).astype(np.int64) - np.rint(X.sum(axis=1)).astype(np.int64) ** 2
        mag = np.abs(num)
        i = int(np.argmax(mag))
        if mag[i] > best:
            best, best_row = int(mag[i]), X[i].astype(bool)
        done += b
    witness = ResidueSet.from_mask(M, best_row)
    rep = polynomial_average(witness, witness, P)
    if abs(rep.deviation) != Fraction(best, N * N):
        raise ArithmeticError("sampled scan lost exactness")
    return DeviationResult(witness, Fraction(best, N * N), rep.deviation, "sampled", samples)


# ---------------------------------------------------------------------------
# conditional expectations on Z/p^kZ


@dataclass(frozen=True)
class ConditionalTerm:
    """<E(1_A | B_m), 1_A> where B_m is the algebra of T^{p^m}-invariant sets."""

    m: int
    inner: Fraction


def _check_prime_power(A: ResidueSet, p: int, k: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if k < 1:
        raise DomainError("k must be at least 1")
    if A.N != p ** k:
        raise DomainError(f"set lives in Z/{A.N}Z, expected modulus {p}^{k} = {p ** k}")


def conditional_inner(
    A: ResidueSet, p: int, k: int, m: int, profile: Optional[CorrelationProfile] = None
) -> ConditionalTerm:
    _check_prime_power(A, p, k)
    if not 0 <= m <= k:
        raise DomainError(f"level m={m} outside [0, {k}]")
    if profile is None:
        profile = correlation_profile(A, A)
    step = p ** m
    count = p ** (k - m)
    total = int(profile.counts[::step].sum())
    return ConditionalTerm(m, Fraction(total, count * A.N))


@dataclass(frozen=True)
class PkGoalReport:
    lhs: Fraction
    rhs: Fraction
    equal: bool
    asserted: bool
    terms: Tuple[ConditionalTerm, ...]


def pkgoal_check(A: ResidueSet, p: int, k: int, permissive: bool = False) -> PkGoalReport:
    """Compare the n^2 average on Z/p^kZ with its expansion in conditional terms.

    rhs = mu^2 + C_k mu / p^{k/2} + sum_{m=1}^{k-1} (-1)^m p^{-ceil(m/2)} <E(1_A|B_m), 1_A>,
    C_k = 1 for even k and 0 for odd k. The identity is only claimed for p = 3 mod 4;
    with permissive=True other primes are evaluated but not asserted.
    """
    _check_prime_power(A, p, k)
    if k < 2:
        raise DomainError("k must exceed 1")
    asserted = p % 4 == 3
    if not asserted and not permissive:
        raise DomainError(f"p = {p} is not 3 mod 4; the expansion is not claimed there")
    prof = correlation_profile(A, A)
    lhs = polynomial_average(A, A, _SQUARE, prof).average
    mu = A.measure
    rhs = mu * mu
    if k % 2 == 0:
        rhs += mu / p ** (k // 2)
    terms = []
    for m in range(1, k):
        t = conditional_inner(A, p, k, m, prof)
        terms.append(t)
        rhs += Fraction((-1) ** m, p ** ((m + 1) // 2)) * t.inner
    return PkGoalReport(lhs, rhs, lhs == rhs, asserted, tuple(terms))


_SQUARE = parse_and_validate("n^2")
