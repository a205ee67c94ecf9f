"""Integer-valued polynomials in one variable n.

A polynomial is kept in two bases at once: monomial coefficients as exact
fractions, and integer coefficients in the binomial basis C(n, i). The second
basis is what certifies that P maps Z into Z.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .ring import DomainError, Modulus, Residue, factorize

__all__ = [
    "PolyParseError",
    "NotIntegerValued",
    "IntValuedPoly",
    "DifferenceData",
    "parse_poly",
    "parse_and_validate",
    "from_coeffs",
    "eval_mod",
    "values_mod",
    "image_histogram",
    "image_set",
    "histogram_vector",
    "is_permutation",
    "format_poly",
    "iterated_difference",
    "closed_form_top_difference",
]


class PolyParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")


class NotIntegerValued(DomainError):
    def __init__(self, witness: int, value: Fraction):
        self.witness = witness
        self.value = value
        super().__init__(f"polynomial is not integer-valued: P({witness}) = {value}")


# ---------------------------------------------------------------------------
# coefficient-list helpers (index i holds the coefficient of n^i)


def _trim(c: List[Fraction]) -> List[Fraction]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _add(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _scale(a, s):
    return _trim([x * s for x in a])


def _pow(a, e):
    out = [Fraction(1)]
    for _ in range(e):
        out = _mul(out, a)
    return out


def _taylor_shift(c: Sequence[Fraction], h) -> List[Fraction]:
    """Coefficients of P(n + h) given those of P(n)."""
    out = [Fraction(0)] * len(c)
    for i, ci in enumerate(c):
        if not ci:
            continue
        for j in range(i + 1):
            out[j] += ci * math.comb(i, j) * Fraction(h) ** (i - j)
    return _trim(out)


def _eval_exact(c: Sequence[Fraction], x) -> Fraction:
    acc = Fraction(0)
    for ci in reversed(c):
        acc = acc * x + ci
    return acc


def _binom(n: int, i: int) -> int:
    """Generalized binomial coefficient C(n, i) for any integer n."""
    if n >= 0:
        return math.comb(n, i)
    return (-1) ** i * math.comb(i - n - 1, i)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|(n)|(\*\*|[-+*/^()]))")


class _Parser:
    """Recursive descent over  expr := term (('+'|'-') term)*
    term := unary (('*' unary) | ('/' INT))*
    unary := '-' unary | power ;  power := atom ('^' INT)? ;  atom := INT | n | '(' expr ')'
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m:
                bad = pos + len(stripped[pos:]) - len(stripped[pos:].lstrip())
                raise PolyParseError(f"unexpected character {stripped[bad]!r}", text, bad)
            start = m.start(m.lastindex)
            if m.group(1):
                self.tokens.append(("int", m.group(1), start))
            elif m.group(2):
                self.tokens.append(("var", "n", start))
            else:
                op = m.group(3)
                self.tokens.append(("op", "^" if op == "**" else op, start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_int(self, what: str) -> int:
        kind, val, pos = self.take()
        if kind != "int":
            raise PolyParseError(f"expected an integer literal {what}", self.text, pos)
        return int(val)

    def parse(self) -> List[Fraction]:
        if not self.tokens:
            raise PolyParseError("empty polynomial expression", self.text, 0)
        out = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolyParseError(f"unexpected token {val!r}", self.text, pos)
        return out

    def expr(self):
        acc = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            _, op, _ = self.take()
            rhs = self.term()
            acc = _add(acc, rhs if op == "+" else _scale(rhs, -1))
        return acc

    def term(self):
        acc = self.unary()
        while True:
            kind, op, pos = self.peek()
            if (kind, op) == ("op", "*"):
                self.take()
                acc = _mul(acc, self.unary())
            elif (kind, op) == ("op", "/"):
                self.take()
                d = self.expect_int("after '/'")
                if d == 0:
                    raise PolyParseError("division by zero", self.text, pos)
                acc = _scale(acc, Fraction(1, d))
            else:
                return acc

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return _scale(self.unary(), -1)
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return _pow(base, self.expect_int("as exponent"))
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            return _trim([Fraction(int(val))])
        if kind == "var":
            return [Fraction(0), Fraction(1)]
        if (kind, val) == ("op", "("):
            inner = self.expr()
            k2, v2, p2 = self.take()
            if (k2, v2) != ("op", ")"):
                raise PolyParseError("expected ')'", self.text, p2)
            return inner
        if kind == "end":
            raise PolyParseError("unexpected end of expression", self.text, pos)
        raise PolyParseError(f"unexpected token {val!r}", self.text, pos)


def parse_poly(text: str) -> List[Fraction]:
    """Parse to monomial coefficients without checking integer-valuedness."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntValuedPoly:
    monomial_coeffs: Tuple[Fraction, ...]
    binomial_coeffs: Tuple[int, ...]
    c_prime: int
    source: str = ""

    @property
    def degree(self) -> int:
        """Degree; -1 stands in for the zero polynomial."""
        return len(self.monomial_coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.monomial_coeffs

    @property
    def leading(self) -> Fraction:
        return self.monomial_coeffs[-1] if self.monomial_coeffs else Fraction(0)

    @property
    def integer_coeffs(self) -> Tuple[int, ...]:
        """Coefficients of c' * P."""
        return tuple(int(c * self.c_prime) for c in self.monomial_coeffs)

    @property
    def has_integer_coeffs(self) -> bool:
        return self.c_prime == 1

    @property
    def C_P(self) -> int:
        lead = abs(int(self.leading * self.c_prime)) if self.monomial_coeffs else 0
        big = max((p for p, _ in factorize(lead).factorization), default=1) if lead > 1 else 1
        return max(self.c_prime, self.degree, big)

    def __call__(self, n) -> int:
        if isinstance(n, (int, np.integer)):
            n = int(n)
            return sum(b * _binom(n, i) for i, b in enumerate(self.binomial_coeffs))
        return _eval_exact(self.monomial_coeffs, n)

    def scaled(self, c: int) -> "IntValuedPoly":
        return from_coeffs([x * c for x in self.monomial_coeffs])

    def compose_linear(self, a: int, b: int = 0) -> "IntValuedPoly":
        """P(a*n + b)."""
        out: List[Fraction] = []
        lin = [Fraction(b), Fraction(a)]
        for ci in reversed(self.monomial_coeffs):
            out = _add(_mul(out, lin), [ci])
        return from_coeffs(out)

    def negated(self) -> "IntValuedPoly":
        return from_coeffs([-x for x in self.monomial_coeffs])

    def __str__(self) -> str:
        if self.source:
            return self.source
        return format_poly(self.monomial_coeffs)


def format_poly(coeffs: Sequence[Fraction]) -> str:
    if not coeffs:
        return "0"
    den = math.lcm(*(Fraction(c).denominator for c in coeffs))
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[i] * den)
        if not c:
            continue
        mono = "" if i == 0 else ("n" if i == 1 else f"n^{i}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text if den == 1 else f"({text})/{den}"


def _binomial_basis(coeffs: Sequence[Fraction]) -> List[Fraction]:
    """Forward differences at 0: P(n) = sum_i b_i C(n, i)."""
    k = len(coeffs) - 1
    if k < 0:
        return []
    vals = [_eval_exact(coeffs, x) for x in range(k + 1)]
    out = []
    for _ in range(k + 1):
        out.append(vals[0])
        vals = [vals[j + 1] - vals[j] for j in range(len(vals) - 1)]
    return out


def from_coeffs(coeffs: Sequence, source: str = "") -> IntValuedPoly:
    """Validate monomial coefficients and build an IntValuedPoly."""
    coeffs = _trim([Fraction(c) for c in coeffs])
    basis = _binomial_basis(coeffs)
    for i, b in enumerate(basis):
        if b.denominator != 1:
            # the first non-integral forward difference sits at n = i
            raise NotIntegerValued(i, _eval_exact(coeffs, i))
    c_prime = math.lcm(1, *(c.denominator for c in coeffs))
    return IntValuedPoly(tuple(coeffs), tuple(int(b) for b in basis), c_prime, source)


def parse_and_validate(expr: str) -> IntValuedPoly:
    return from_coeffs(parse_poly(expr), source=expr.strip())


# ---------------------------------------------------------------------------
# evaluation mod N


def _mod_of(N) -> int:
    return N.N if isinstance(N, Modulus) else int(N)


def eval_mod(P: IntValuedPoly, n: int, N) -> Residue:
    M = N if isinstance(N, Modulus) else factorize(int(N))
    return Residue(P(int(n)) % M.N, M)


def values_mod(P: IntValuedPoly, ns, N) -> np.ndarray:
    """P(n) mod N for an integer array of n, exact.

    Works on c'P modulo c'N and divides by c' at the end, which is exact
    because c'P(n) is divisible by c' for every integer n.
    """
    N = _mod_of(N)
    ns = np.asarray(ns, dtype=object if N > 1 << 30 else np.int64)
    cp = P.c_prime
    M = cp * N
    ints = P.integer_coeffs
    if M < 1 << 31 and ns.dtype != object and max(map(abs, ints), default=0) < 1 << 31:
        x = ns % M
        acc = np.zeros_like(x)
        for c in reversed(ints):
            acc = (acc * x + c) % M
    else:
        x = np.array([int(v) % M for v in ns.ravel()], dtype=object).reshape(ns.shape)
        acc = np.zeros(x.shape, dtype=object)
        for c in reversed(ints):
            acc = (acc * x + c) % M
    out = acc // cp
    return out.astype(np.int64) if N < 1 << 62 else out


def image_histogram(P: IntValuedPoly, N) -> Dict[int, int]:
    """c_h = #{n in [1, N] : P(n) = h mod N}, for h in the image only."""
    counts = histogram_vector(P, N)
    return {int(h): int(counts[h]) for h in np.flatnonzero(counts)}


def histogram_vector(P: IntValuedPoly, N) -> np.ndarray:
    """Dense length-N version of image_histogram."""
    N = _mod_of(N)
    vals = values_mod(P, np.arange(1, N + 1, dtype=np.int64), N)
    return np.bincount(vals, minlength=N).astype(np.int64)


def image_set(P: IntValuedPoly, N) -> np.ndarray:
    return histogram_vector(P, N) > 0


def is_permutation(P: IntValuedPoly, N) -> bool:
    return bool((histogram_vector(P, N) == 1).all())


# ---------------------------------------------------------------------------
# differencing


@dataclass(frozen=True)
class DifferenceData:
    shifts: Tuple[int, ...]
    result: IntValuedPoly


def iterated_difference(P: IntValuedPoly, shifts: Sequence[int]) -> DifferenceData:
    """Difference P by h_1, then the result by h_2, and so on."""
    if len(shifts) < 1:
        raise DomainError("at least one shift is required")
    c = list(P.monomial_coeffs)
    for h in shifts:
        c = _add(_taylor_shift(c, h), _scale(c, -1))
    return DifferenceData(tuple(int(h) for h in shifts), from_coeffs(c))


def closed_form_top_difference(P: IntValuedPoly, shifts: Sequence[int]) -> List[Fraction]:
    """Linear polynomial left after differencing a degree-k P by k-1 shifts.

    (prod h) * (k! c_k n + c_{k-1} (k-1)! + (k!/2) c_k sum h)
    """
    k = P.degree
    if len(shifts) != k - 1 or k < 2:
        raise DomainError("closed form needs exactly deg(P) - 1 shifts and deg(P) >= 2")
    ck = P.monomial_coeffs[k]
    ck1 = P.monomial_coeffs[k - 1]
    prod = math.prod(shifts)
    slope = prod * math.factorial(k) * ck
    const = prod * (ck1 * math.factorial(k - 1) + Fraction(math.factorial(k), 2) * ck * sum(shifts))
    return _trim([const, slope])
