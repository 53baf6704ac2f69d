"""Ordinals below omega^omega in Cantor normal form.

An ordinal is a finite tuple of ``(exponent, coefficient)`` terms with
strictly decreasing natural exponents and positive coefficients.  The empty
tuple is zero.  Only the operations the tree and sequence constructions need
are provided: comparison, addition, left subtraction, classification and
fundamental sequences.
"""

from __future__ import annotations

import re
from functools import total_ordering
from typing import Iterable, Tuple, Union

Term = Tuple[int, int]

ZERO_KIND = "zero"
SUCCESSOR = "successor"
LIMIT = "limit"


class OrdinalError(ArithmeticError):
    pass


class LeftOperandExceeds(OrdinalError):
    pass


class NotLimit(OrdinalError):
    pass


class NotationError(ValueError):
    pass


@total_ordering
class Ordinal:
    """Immutable ordinal ``sum(w^e * c for e, c in terms)``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[Term] = ()):
        terms = tuple((int(e), int(c)) for e, c in terms)
        for i, (e, c) in enumerate(terms):
            if e < 0 or c < 1:
                raise ValueError(f"bad CNF term {(e, c)}")
            if i and terms[i - 1][0] <= e:
                raise ValueError("CNF exponents must strictly decrease")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", hash(terms))

    def __setattr__(self, name, value):
        raise AttributeError("Ordinal is immutable")

    @classmethod
    def of(cls, value: "OrdinalLike") -> "Ordinal":
        if isinstance(value, Ordinal):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not an ordinal")
        if isinstance(value, int):
            if value < 0:
                raise ValueError("negative natural")
            return cls(((0, value),)) if value else ZERO
        if isinstance(value, str):
            return parse(value)
        raise TypeError(f"cannot make an Ordinal from {value!r}")

    @classmethod
    def omega_power(cls, exponent: int, coefficient: int = 1) -> "Ordinal":
        return cls(((exponent, coefficient),)) if coefficient else ZERO

    # comparison: CNF term tuples compare lexicographically exactly like the
    # ordinals they denote
    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            other = Ordinal.of(other) if other >= 0 else None
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            if other < 0:
                return False
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms < other.terms

    def __hash__(self):
        return self._hash

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(Ordinal.of(other), self)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Ordinal({format_ordinal(self)!r})"

    def __str__(self):
        return format_ordinal(self)

    @property
    def is_finite(self) -> bool:
        return not self.terms or self.terms[0][0] == 0

    def __int__(self):
        if not self.is_finite:
            raise OrdinalError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def degree(self) -> int:
        """Leading exponent; -1 for zero."""
        return self.terms[0][0] if self.terms else -1

    def coefficient(self, exponent: int) -> int:
        for e, c in self.terms:
            if e == exponent:
                return c
        return 0

    def successor(self) -> "Ordinal":
        return add(self, ONE)

    def predecessor(self) -> "Ordinal":
        if classify(self) != SUCCESSOR:
            raise OrdinalError(f"{self} has no predecessor")
        *head, (_, c) = self.terms
        return Ordinal(head + ([(0, c - 1)] if c > 1 else []))

    def times(self, n: int) -> "Ordinal":
        """Right multiplication by a natural number (``self * n``)."""
        if n < 0:
            raise ValueError("negative multiplier")
        if n == 0 or not self.terms:
            return ZERO
        (e, c), rest = self.terms[0], self.terms[1:]
        return Ordinal(((e, c * n),) + rest)


OrdinalLike = Union[Ordinal, int, str]

ZERO = Ordinal()
ONE = Ordinal(((0, 1),))
OMEGA = Ordinal(((1, 1),))


def compare(a: OrdinalLike, b: OrdinalLike) -> int:
    a, b = Ordinal.of(a), Ordinal.of(b)
    return (a.terms > b.terms) - (a.terms < b.terms)


def add(a: OrdinalLike, b: OrdinalLike) -> Ordinal:
    a, b = Ordinal.of(a), Ordinal.of(b)
    if not b.terms:
        return a
    lead_e, lead_c = b.terms[0]
    kept = [t for t in a.terms if t[0] > lead_e]
    merged = lead_c + a.coefficient(lead_e)
    return Ordinal(kept + [(lead_e, merged)] + list(b.terms[1:]))


def subtract_left(a: OrdinalLike, b: OrdinalLike) -> Ordinal:
    """The unique ``d`` with ``a + d == b``."""
    a, b = Ordinal.of(a), Ordinal.of(b)
    if a > b:
        raise LeftOperandExceeds(f"{a} > {b}")
    i = 0
    while i < len(a.terms) and a.terms[i] == b.terms[i]:
        i += 1
    if i == len(a.terms):
        return Ordinal(b.terms[i:])
    (ea, ca), (eb, cb) = a.terms[i], b.terms[i]
    if eb > ea:
        return Ordinal(b.terms[i:])
    # same exponent, larger coefficient on the right
    return Ordinal(((eb, cb - ca),) + b.terms[i + 1:])


def classify(a: OrdinalLike) -> str:
    a = Ordinal.of(a)
    if not a.terms:
        return ZERO_KIND
    return SUCCESSOR if a.terms[-1][0] == 0 else LIMIT


def fundamental_seq(a: OrdinalLike, n: int) -> Ordinal:
    """n-th entry of the standard cofinal sequence of a limit ordinal.

    Writing ``a = g + w^e`` (one unit peeled off the last term),
    ``a[n] = g + w^(e-1) * n``.
    """
    a = Ordinal.of(a)
    if classify(a) != LIMIT:
        raise NotLimit(f"{a} is not a limit ordinal")
    if n < 0:
        raise ValueError("negative index")
    *head, (e, c) = a.terms
    gamma = Ordinal(head + ([(e, c - 1)] if c > 1 else []))
    return add(gamma, Ordinal.omega_power(e - 1, n))


def format_ordinal(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if e == 0:
            parts.append(str(c))
            continue
        base = "w" if e == 1 else f"w^{e}"
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


_TERM = re.compile(r"^(?:(\d+)|w(?:\^(\d+))?(?:\*(\d+))?)$")


def parse(text: str) -> Ordinal:
    """Parse the ``w^2*3+w*1+5`` notation (``ω`` is accepted for ``w``)."""
    s = text.replace("ω", "w").replace(" ", "")
    if not s:
        raise NotationError("empty ordinal notation")
    total = ZERO
    for piece in s.split("+"):
        m = _TERM.match(piece)
        if not m:
            raise NotationError(f"bad ordinal term {piece!r} in {text!r}")
        if m.group(1) is not None:
            term = Ordinal.of(int(m.group(1)))
        else:
            e = int(m.group(2)) if m.group(2) is not None else 1
            c = int(m.group(3)) if m.group(3) is not None else 1
            term = Ordinal.omega_power(e, c)
        total = add(total, term)
    return total


def parse_list(text: str) -> list:
    """Comma separated ordinals, e.g. ``0,1,2,w,w+1,w*2``."""
    return [parse(p) for p in text.split(",") if p.strip()]
