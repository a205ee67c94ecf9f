"""Subsets of Z/NZ and the small language used to describe them on the command line.

Grammar (all values reduced mod N)::

    set   := '{' [int (',' int)*] '}'
           | 'ap(' int ',' int ',' int ')'        start, step, count
           | 'image(' poly ')' | 'squares'       squares = image(n^2)
           | 'res(' int ',' int ')'              residue class a mod p
           | 'interval(' int ')'                 {0, ..., len-1}
           | 'complement(' set ')' | 'union(' set ',' set ')'
           | 'empty' | 'full'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List

import numpy as np

from .polynomials import PolyParseError, image_set, parse_and_validate
from .ring import DomainError, Modulus, factorize

__all__ = ["ResidueSet", "ModulusMismatch", "SetParseError", "parse_set", "same_modulus"]


class ModulusMismatch(DomainError):
    def __init__(self, *moduli: int):
        super().__init__("sets live in different rings: " + ", ".join(f"Z/{m}Z" for m in moduli))


class SetParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {self.line}, column {self.column}")


@dataclass(frozen=True, eq=False)
class ResidueSet:
    """A ⊆ Z/NZ stored as a read-only boolean membership vector."""

    modulus: Modulus
    membership: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.membership, dtype=bool)
        if m.shape != (self.modulus.N,):
            raise ValueError(f"membership vector must have length {self.modulus.N}")
        if m.flags.writeable:
            m = m.copy()
            m.flags.writeable = False
        object.__setattr__(self, "membership", m)

    @classmethod
    def from_elements(cls, N, elements: Iterable[int]) -> "ResidueSet":
        M = N if isinstance(N, Modulus) else factorize(int(N))
        mask = np.zeros(M.N, dtype=bool)
        idx = np.fromiter((int(e) % M.N for e in elements), dtype=np.int64)
        mask[idx] = True
        return cls(M, mask)

    @classmethod
    def from_mask(cls, N, mask) -> "ResidueSet":
        M = N if isinstance(N, Modulus) else factorize(int(N))
        return cls(M, np.asarray(mask, dtype=bool))

    @classmethod
    def from_bits(cls, N, bits: int) -> "ResidueSet":
        M = N if isinstance(N, Modulus) else factorize(int(N))
        return cls(M, np.array([(bits >> i) & 1 for i in range(M.N)], dtype=bool))

    @classmethod
    def empty(cls, N) -> "ResidueSet":
        return cls.from_elements(N, ())

    @classmethod
    def full(cls, N) -> "ResidueSet":
        M = N if isinstance(N, Modulus) else factorize(int(N))
        return cls(M, np.ones(M.N, dtype=bool))

    @property
    def N(self) -> int:
        return self.modulus.N

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.membership))

    def __len__(self) -> int:
        return self.size

    @property
    def measure(self) -> Fraction:
        return Fraction(self.size, self.N)

    @property
    def elements(self) -> List[int]:
        return [int(x) for x in np.flatnonzero(self.membership)]

    @property
    def bits(self) -> int:
        """Membership as a Python int, bit x set iff x is in the set."""
        packed = np.packbits(self.membership, bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    def indicator(self) -> np.ndarray:
        return self.membership.astype(np.int64)

    def __contains__(self, x: int) -> bool:
        return bool(self.membership[int(x) % self.N])

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResidueSet):
            return NotImplemented
        return self.N == other.N and bool(np.array_equal(self.membership, other.membership))

    def __hash__(self) -> int:
        return hash((self.N, self.bits))

    def shift(self, h: int) -> "ResidueSet":
        """A + h, i.e. the image of A under T^h."""
        return ResidueSet(self.modulus, np.roll(self.membership, int(h) % self.N))

    def negate(self) -> "ResidueSet":
        return ResidueSet(self.modulus, np.roll(self.membership[::-1], 1))

    def complement(self) -> "ResidueSet":
        return ResidueSet(self.modulus, ~self.membership)

    def __and__(self, other: "ResidueSet") -> "ResidueSet":
        same_modulus(self, other)
        return ResidueSet(self.modulus, self.membership & other.membership)

    def __or__(self, other: "ResidueSet") -> "ResidueSet":
        same_modulus(self, other)
        return ResidueSet(self.modulus, self.membership | other.membership)

    def __repr__(self) -> str:
        els = self.elements
        body = ", ".join(map(str, els[:12])) + (", ..." if len(els) > 12 else "")
        return f"ResidueSet(N={self.N}, {{{body}}})"

    def to_text(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"


def same_modulus(*sets: ResidueSet) -> Modulus:
    Ns = {s.N for s in sets}
    if len(Ns) != 1:
        raise ModulusMismatch(*sorted(Ns))
    return sets[0].modulus


# ---------------------------------------------------------------------------
# set expressions

_INT = re.compile(r"\s*(-?\d+)")
_NAME = re.compile(r"\s*([a-z]+)")


class _SetParser:
    def __init__(self, text: str, modulus: Modulus):
        self.text = text
        self.M = modulus
        self.pos = 0

    def fail(self, msg: str, pos=None):
        raise SetParseError(msg, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eat(self, ch: str):
        self.skip()
        if not self.text.startswith(ch, self.pos):
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def integer(self) -> int:
        m = _INT.match(self.text, self.pos)
        if not m:
            self.skip()
            self.fail("expected an integer")
        self.pos = m.end()
        return int(m.group(1))

    def parse(self) -> ResidueSet:
        out = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.fail("trailing input")
        return out

    def expr(self) -> ResidueSet:
        if self.peek() == "{":
            self.eat("{")
            items: List[int] = []
            if self.peek() != "}":
                items.append(self.integer())
                while self.peek() == ",":
                    self.eat(",")
                    items.append(self.integer())
            self.eat("}")
            return ResidueSet.from_elements(self.M, items)
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.skip()
            self.fail("expected a set expression")
        name, start = m.group(1), m.start(1)
        self.pos = m.end()
        N = self.M.N
        if name == "squares":
            return ResidueSet(self.M, image_set(parse_and_validate("n^2"), N))
        if name == "empty":
            return ResidueSet.empty(self.M)
        if name == "full":
            return ResidueSet.full(self.M)
        if name == "image":
            self.eat("(")
            depth, begin = 1, self.pos
            while self.pos < len(self.text) and depth:
                depth += {"(": 1, ")": -1}.get(self.text[self.pos], 0)
                self.pos += 1
            if depth:
                self.fail("unbalanced parentheses in image(...)", begin)
            inner = self.text[begin : self.pos - 1]
            try:
                P = parse_and_validate(inner)
            except PolyParseError as exc:
                self.fail(f"in polynomial: {exc.args[0].split(' at line')[0]}", begin + exc.pos)
            return ResidueSet(self.M, image_set(P, N))
        if name in ("complement", "union"):
            self.eat("(")
            first = self.expr()
            if name == "complement":
                self.eat(")")
                return first.complement()
            self.eat(",")
            second = self.expr()
            self.eat(")")
            return first | second
        arity = {"ap": 3, "res": 2, "interval": 1}.get(name)
        if arity is None:
            self.fail(f"unknown set constructor {name!r}", start)
        self.eat("(")
        args = [self.integer()]
        for _ in range(arity - 1):
            self.eat(",")
            args.append(self.integer())
        self.eat(")")
        if name == "ap":
            a, step, count = args
            if count < 0:
                self.fail("ap count must be nonnegative", start)
            return ResidueSet.from_elements(self.M, (a + i * step for i in range(count)))
        if name == "res":
            a, p = args
            if p <= 0:
                self.fail("res modulus must be positive", start)
            return ResidueSet.from_mask(self.M, np.arange(N) % p == a % p)
        (length,) = args
        if length < 0:
            self.fail("interval length must be nonnegative", start)
        return ResidueSet.from_elements(self.M, range(min(length, N)))


def parse_set(text: str, N) -> ResidueSet:
    M = N if isinstance(N, Modulus) else factorize(int(N))
    return _SetParser(text, M).parse()
