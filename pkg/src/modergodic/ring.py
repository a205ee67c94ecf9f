"""Arithmetic in Z/NZ: factorization, units, quadratic characters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

__all__ = [
    "DomainError",
    "NotAUnit",
    "Modulus",
    "Residue",
    "is_prime",
    "factorize",
    "mod_inverse",
    "legendre_symbol",
    "MAX_MODULUS",
]

# Cofactors left after trial division up to this bound go to Pollard rho.
TRIAL_DIVISION_LIMIT = 1 << 16
# Deterministic Miller-Rabin with these bases is exact below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MAX_MODULUS = 3_317_044_064_679_887_385_961_981


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class NotAUnit(DomainError):
    def __init__(self, value: int, modulus: int, gcd: int):
        self.value = value
        self.modulus = modulus
        self.gcd = gcd
        super().__init__(f"{value} is not a unit mod {modulus} (gcd={gcd})")


def _miller_rabin(n: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact for n < MAX_MODULUS."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    if n < 43 * 43:
        return True
    if n >= MAX_MODULUS:
        raise DomainError(f"primality of {n} is not certified above {MAX_MODULUS}")
    return _miller_rabin(n)


def _pollard_rho(n: int) -> int:
    """Return a nontrivial factor of the odd composite n (Brent's variant)."""
    for c in range(1, 200):
        y, r, q = 2, 1, 1
        g = 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise RuntimeError(f"pollard rho failed on {n}")


def _split(n: int, out: dict) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _split(d, out)
    _split(n // d, out)


@dataclass(frozen=True)
class Modulus:
    """A ring size N > 1 together with its factorization."""

    N: int
    factorization: Tuple[Tuple[int, int], ...] = field(compare=False)
    lpf: int = field(compare=False)
    omega: int = field(compare=False)
    totient: int = field(compare=False)

    def __int__(self) -> int:
        return self.N

    def __index__(self) -> int:
        return self.N

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factorization)

    def is_unit(self, c: int) -> bool:
        return math.gcd(c, self.N) == 1

    def residue(self, value: int) -> "Residue":
        return Residue(value % self.N, self)

    def __str__(self) -> str:
        return " * ".join(f"{p}^{a}" if a > 1 else str(p) for p, a in self.factorization)


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: Modulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.N:
            object.__setattr__(self, "value", self.value % self.modulus.N)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, Residue):
            return self.value == other.value and self.modulus == other.modulus
        if isinstance(other, int):
            return self.value == other % self.modulus.N
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.modulus.N))

    def __repr__(self) -> str:
        return f"Residue({self.value} mod {self.modulus.N})"


@lru_cache(maxsize=4096)
def factorize(N: int) -> Modulus:
    """Factor N > 1 by trial division, finishing large cofactors with Pollard rho.

    >>> factorize(225).factorization
    ((3, 2), (5, 2))
    """
    N = int(N)
    if N <= 1:
        raise DomainError(f"modulus must be > 1, got {N}")
    if N >= MAX_MODULUS:
        raise DomainError(f"modulus {N} exceeds the certified bound {MAX_MODULUS}")
    found: dict = {}
    n = N
    p = 2
    while p * p <= n and p < TRIAL_DIVISION_LIMIT:
        if n % p == 0:
            while n % p == 0:
                found[p] = found.get(p, 0) + 1
                n //= p
            if is_prime(n):
                break
        p += 1 if p == 2 else 2
    if n > 1:
        _split(n, found)
    fac = tuple(sorted(found.items()))
    totient = N
    for q, _ in fac:
        totient = totient // q * (q - 1)
    return Modulus(N, fac, fac[0][0], len(fac), totient)


def _as_modulus(N) -> Modulus:
    return N if isinstance(N, Modulus) else factorize(int(N))


def mod_inverse(c: int, N) -> Residue:
    N = _as_modulus(N)
    c = int(c) % N.N
    g = math.gcd(c, N.N)
    if g != 1:
        raise NotAUnit(c, N.N, g)
    return Residue(pow(c, -1, N.N), N)


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1
