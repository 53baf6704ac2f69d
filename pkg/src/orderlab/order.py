"""Exact rationals, enumerated countable linear orders and their checkers.

A countable order is presented intensionally: an enumeration ``i -> a_i``
of its elements plus a comparison rule.  Everything here only ever inspects
finite prefixes of the enumeration.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

Rat = Fraction


class OrderError(Exception):
    pass


class BudgetExhausted(OrderError):
    """A witness search ran out of budget; this is not a proof of absence."""

    def __init__(self, message, requirement=None, budget=None):
        super().__init__(message)
        self.requirement = requirement
        self.budget = budget


class EmptyInterval(OrderError):
    pass


def parse_rat(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def format_rat(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def midpoint(a: Fraction, b: Fraction) -> Fraction:
    return (Fraction(a) + Fraction(b)) / 2


def _natural_cmp(x, y) -> int:
    if type(x) is Fraction and type(y) is Fraction:
        # cross-multiplying skips Fraction's generic comparison machinery
        a, b = x.numerator * y.denominator, y.numerator * x.denominator
        return (a > b) - (a < b)
    return (x > y) - (x < y)


class EnumeratedOrder:
    """A countable linear order given by an enumeration and a comparison.

    ``element(i)`` yields ``a_i``; ``compare_values`` is a three-way
    comparison on element values.  ``contains`` optionally decides
    membership of an arbitrary value, which lets interval checks use the
    midpoint rule instead of searching the enumeration.
    """

    def __init__(
        self,
        name: str,
        element: Callable[[int], Any],
        size: Optional[int] = None,
        compare_values: Callable[[Any, Any], int] = _natural_cmp,
        contains: Optional[Callable[[Any], bool]] = None,
        rational: bool = False,
    ):
        self.name = name
        self._element = element
        self.size = size
        self.compare_values = compare_values
        self.contains = contains
        self.rational = rational
        self._cache: List[Any] = []
        self._parts: List[Tuple[int, int]] = []

    def __repr__(self):
        return f"EnumeratedOrder({self.name!r}, size={self.size})"

    def element(self, i: int):
        if i < 0 or (self.size is not None and i >= self.size):
            raise IndexError(f"index {i} outside {self.name}")
        cache = self._cache
        while len(cache) <= i:
            cache.append(self._element(len(cache)))
        return cache[i]

    def compare(self, i: int, j: int) -> int:
        return self.compare_values(self.element(i), self.element(j))

    def fraction_parts(self, n: int) -> List[Tuple[int, int]]:
        """(numerator, denominator) of the first n elements of a rational order."""
        parts = self._parts
        for i in range(len(parts), self.bound(n)):
            q = self.element(i)
            parts.append((q.numerator, q.denominator))
        return parts

    def bound(self, n: int) -> int:
        return n if self.size is None else min(n, self.size)

    def prefix(self, n: int) -> list:
        return [self.element(i) for i in range(self.bound(n))]

    def sort_key(self):
        return cmp_to_key(self.compare_values)


# -- built-in presentations ------------------------------------------------


def calkin_wilf(n: int) -> Fraction:
    """n-th positive rational in Calkin-Wilf order, n >= 1 (1, 1/2, 2, 1/3, ...)."""
    a, b = 0, 1  # fusc(n), fusc(n+1) via the binary digits of n
    for bit in bin(n)[2:]:
        if bit == "1":
            a = a + b
        else:
            b = a + b
    # a = fusc(n), b = fusc(n + 1)
    return Fraction(a, b)


def _q_element(i: int) -> Fraction:
    if i == 0:
        return Fraction(0)
    q = calkin_wilf((i + 1) // 2)
    return q if i % 2 else -q


def _qnonzero_element(i: int) -> Fraction:
    return _q_element(i + 1)


def _qpos_element(i: int) -> Fraction:
    return calkin_wilf(i + 1)


def _dyadic_positives() -> Iterator[Fraction]:
    # stage s lists dyadics k/2^s in (0, s) not seen at an earlier stage
    seen = set()
    for s in itertools.count(1):
        den = 2 ** s
        for k in range(1, s * den):
            q = Fraction(k, den)
            if q not in seen:
                seen.add(q)
                yield q


def _dyadic_stream() -> Iterator[Fraction]:
    yield Fraction(0)
    for q in _dyadic_positives():
        yield q
        yield -q


def _unit_stream() -> Iterator[Fraction]:
    for den in itertools.count(2):
        for num in range(1, den):
            q = Fraction(num, den)
            if q.denominator == den:
                yield q


def _from_stream(factory: Callable[[], Iterator[Any]]) -> Callable[[int], Any]:
    it = factory()
    seen: List[Any] = []

    def element(i):
        while len(seen) <= i:
            seen.append(next(it))
        return seen[i]

    return element


def _is_dyadic(v) -> bool:
    d = Fraction(v).denominator
    return d & (d - 1) == 0


def _is_rational(v) -> bool:
    return isinstance(v, (int, Fraction))


def rationals() -> EnumeratedOrder:
    return EnumeratedOrder("q", _q_element, contains=_is_rational, rational=True)


def dyadics() -> EnumeratedOrder:
    return EnumeratedOrder(
        "dyadic",
        _from_stream(_dyadic_stream),
        contains=lambda v: _is_rational(v) and _is_dyadic(v),
        rational=True,
    )


def unit_rationals() -> EnumeratedOrder:
    return EnumeratedOrder(
        "unit-q",
        _from_stream(_unit_stream),
        contains=lambda v: _is_rational(v) and 0 < v < 1,
        rational=True,
    )


def nonzero_rationals() -> EnumeratedOrder:
    return EnumeratedOrder(
        "q-nonzero", _qnonzero_element,
        contains=lambda v: _is_rational(v) and v != 0, rational=True,
    )


def positive_rationals() -> EnumeratedOrder:
    return EnumeratedOrder(
        "q-pos", _qpos_element,
        contains=lambda v: _is_rational(v) and v > 0, rational=True,
    )


def omega() -> EnumeratedOrder:
    return EnumeratedOrder(
        "omega", lambda i: i,
        contains=lambda v: isinstance(v, int) and v >= 0,
    )


def omega_two() -> EnumeratedOrder:
    """omega*2 with its two copies interleaved: (0,0), (1,0), (0,1), (1,1), ..."""
    return EnumeratedOrder("omega2", lambda i: (i % 2, i // 2))


def finite_order(values: Sequence[Any], name: str = "finite",
                 compare_values: Callable[[Any, Any], int] = _natural_cmp) -> EnumeratedOrder:
    values = list(values)
    return EnumeratedOrder(name, values.__getitem__, size=len(values),
                           compare_values=compare_values)


def random_finite_order(n: int, rng: random.Random) -> EnumeratedOrder:
    """A random enumeration of an n-element chain (values are ranks)."""
    ranks = list(range(n))
    rng.shuffle(ranks)
    return finite_order(ranks, name=f"random-{n}")


def relation_order(names: Sequence[str], pairs: Iterable[Sequence]) -> EnumeratedOrder:
    """Finite order defined by an explicit table of ``[i, j, "<"|">"]`` facts.

    Pairs missing from the table compare as ``0`` (equal), which the axiom
    checker reports as a totality failure for distinct indices.
    """
    table: Dict[tuple, int] = {}
    for i, j, rel in pairs:
        if rel not in ("<", ">"):
            raise ValueError(f"bad relation {rel!r}")
        s = -1 if rel == "<" else 1
        table[(i, j)] = s
        table.setdefault((j, i), -s)

    def cmp(i, j):
        if i == j:
            return 0
        return table.get((i, j), 0)

    order = EnumeratedOrder("relation", lambda i: i, size=len(names), compare_values=cmp)
    order.names = list(names)
    return order


def load_finite_order(path) -> EnumeratedOrder:
    with open(path) as fh:
        data = json.load(fh)
    return relation_order(data["elements"], data["pairs"])


def dump_finite_order(order: EnumeratedOrder, names: Optional[Sequence[str]] = None) -> dict:
    n = order.size
    if n is None:
        raise OrderError("only finite orders can be serialized")
    names = list(names or getattr(order, "names", None) or [str(i) for i in range(n)])
    pairs = [[i, j, "<"] for i in range(n) for j in range(n) if i != j and order.compare(i, j) < 0]
    return {"elements": names, "pairs": pairs}


BUILTIN = {
    "q": rationals,
    "dyadic": dyadics,
    "unit-q": unit_rationals,
    "q-nonzero": nonzero_rationals,
    "q-pos": positive_rationals,
    "omega": omega,
    "omega2": omega_two,
}

DLO_NAMES = ("q", "dyadic", "unit-q", "q-nonzero", "q-pos")


def builtin(name: str) -> EnumeratedOrder:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise KeyError(f"unknown order {name!r}; choose from {sorted(BUILTIN)}") from None


# -- reports and checkers ---------------------------------------------------


@dataclass
class Report:
    ok: bool
    check: str
    witness: Optional[tuple] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"check": self.check, "ok": self.ok,
                "witness": _jsonable(self.witness), "detail": _jsonable(self.detail)}


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rat(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def check_axioms(P: EnumeratedOrder, n: int) -> Report:
    """Totality, irreflexivity and transitivity on the first n elements."""
    n = P.bound(n)
    cmp = [[P.compare(i, j) for j in range(n)] for i in range(n)]
    for i in range(n):
        if cmp[i][i] != 0:
            return Report(False, "irreflexivity", (i,))
    for i in range(n):
        for j in range(i + 1, n):
            if cmp[i][j] == 0:
                return Report(False, "totality", (i, j), {"reason": "distinct indices compare equal"})
            if cmp[i][j] != -cmp[j][i]:
                return Report(False, "antisymmetry", (i, j))
    # a tournament is transitive iff its out-degrees are pairwise distinct;
    # the cubic scan below only runs to produce a witness
    if len({sum(1 for c in row if c < 0) for row in cmp}) == n:
        return Report(True, "axioms", detail={"n": n})
    for i in range(n):
        for j in range(n):
            if cmp[i][j] >= 0:
                continue
            for k in range(n):
                if cmp[j][k] < 0 and cmp[i][k] >= 0:
                    return Report(False, "transitivity", (i, j, k))
    return Report(True, "axioms", detail={"n": n})


def _search_between(P: EnumeratedOrder, lo, hi, budget: int) -> Optional[int]:
    cv = P.compare_values
    for k in range(P.bound(budget)):
        v = P.element(k)
        if (lo is None or cv(lo, v) < 0) and (hi is None or cv(v, hi) < 0):
            return k
    return None


def check_dense_unbounded(P: EnumeratedOrder, n: int, search_budget: int) -> Report:
    """Witness density for every pair and unboundedness for every element of a prefix.

    Raises BudgetExhausted naming the first requirement with no witness
    among the first ``search_budget`` elements.
    """
    n = P.bound(n)
    witnesses = {}
    for i in range(n):
        for j in range(i + 1, n):
            a, b = (i, j) if P.compare(i, j) < 0 else (j, i)
            k = _search_between(P, P.element(a), P.element(b), search_budget)
            if k is None:
                raise BudgetExhausted(
                    f"no element found between a_{a} and a_{b} within {search_budget}",
                    requirement=("dense", a, b), budget=search_budget)
            witnesses[("dense", a, b)] = k
    for i in range(n):
        v = P.element(i)
        below = _search_between(P, None, v, search_budget)
        if below is None:
            raise BudgetExhausted(f"no element below a_{i} within {search_budget}",
                                  requirement=("below", i), budget=search_budget)
        above = _search_between(P, v, None, search_budget)
        if above is None:
            raise BudgetExhausted(f"no element above a_{i} within {search_budget}",
                                  requirement=("above", i), budget=search_budget)
        witnesses[("below", i)] = below
        witnesses[("above", i)] = above
    return Report(True, "dense-unbounded", detail={"n": n, "witnesses": len(witnesses)})


@dataclass(frozen=True)
class Interval:
    """Interval with endpoints given as element values; ``None`` is -inf/+inf."""

    lower: Any = None
    upper: Any = None
    closed: bool = False

    def contains(self, P: EnumeratedOrder, v) -> bool:
        cv = P.compare_values
        if self.closed:
            return (self.lower is None or cv(self.lower, v) <= 0) and \
                (self.upper is None or cv(v, self.upper) <= 0)
        return (self.lower is None or cv(self.lower, v) < 0) and \
            (self.upper is None or cv(v, self.upper) < 0)


def _max_lower(P, a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if P.compare_values(a, b) >= 0 else b


def _min_upper(P, a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if P.compare_values(a, b) <= 0 else b


def interval_witness(P: EnumeratedOrder, lo, hi, budget: int):
    """A deterministic element strictly between lo and hi, or None if provably empty.

    Rational presentations use the midpoint when it is a member; otherwise
    the enumeration is searched.  Raises BudgetExhausted when an infinite
    enumeration yields nothing within budget.
    """
    cv = P.compare_values
    if lo is not None and hi is not None and cv(lo, hi) >= 0:
        return None
    if P.rational and P.contains is not None and lo is not None and hi is not None:
        m = midpoint(lo, hi)
        if P.contains(m):
            return m
    k = _search_between(P, lo, hi, budget)
    if k is not None:
        return P.element(k)
    if P.size is not None and P.size <= budget:
        return None
    raise BudgetExhausted(f"no element of {P.name} found in ({lo}, {hi}) within {budget}",
                          requirement=("interval", lo, hi), budget=budget)


def _nonempty_witness(P: EnumeratedOrder, iv: Interval, budget: int):
    if iv.closed and iv.lower is not None:
        if iv.upper is None or P.compare_values(iv.lower, iv.upper) <= 0:
            return iv.lower
        return None
    return interval_witness(P, iv.lower, iv.upper, budget)


def _overlap_witness(P: EnumeratedOrder, a: Interval, b: Interval, budget: int):
    lo = _max_lower(P, a.lower, b.lower)
    hi = _min_upper(P, a.upper, b.upper)
    w = interval_witness(P, lo, hi, budget)
    if w is None:
        # closed intervals may still share an endpoint
        for v in (lo, hi):
            if v is not None and a.contains(P, v) and b.contains(P, v):
                return lo, hi, v
    return lo, hi, w


def verify_disjoint_family(P: EnumeratedOrder, family: Iterable[Interval], budget: int = 10_000) -> Report:
    """Decide pairwise disjointness of nonempty intervals of P."""
    family = list(family)
    for iv in family:
        try:
            w = _nonempty_witness(P, iv, budget)
        except BudgetExhausted as exc:
            raise EmptyInterval(f"cannot witness nonemptiness of {iv}") from exc
        if w is None:
            raise EmptyInterval(f"{iv} has no elements")
    # canonical order makes the verdict and the witness independent of input order
    ordered = sorted(family, key=cmp_to_key(lambda x, y: _interval_cmp(P, x, y)))
    # sweep: if b meets any earlier interval it meets the one reaching furthest
    reach = None
    for b in ordered:
        if reach is not None:
            lo, hi, w = _overlap_witness(P, reach, b, budget)
            if w is not None:
                return Report(False, "disjoint-family", (reach, b, w), {"overlap": (lo, hi)})
        if reach is None or _endpoint_cmp(P, b.upper, reach.upper, "upper", b.closed, reach.closed) > 0:
            reach = b
    return Report(True, "disjoint-family", detail={"size": len(family)})


def _endpoint_cmp(P, x, y, side, x_closed=False, y_closed=False) -> int:
    if x is None and y is None:
        return 0
    if x is None:
        return -1 if side == "lower" else 1
    if y is None:
        return 1 if side == "lower" else -1
    c = P.compare_values(x, y)
    if c or x_closed == y_closed:
        return c
    # at a shared finite endpoint the closed side reaches further out
    further = 1 if x_closed else -1
    return -further if side == "lower" else further


def _interval_cmp(P, a: Interval, b: Interval) -> int:
    c = _endpoint_cmp(P, a.lower, b.lower, "lower", a.closed, b.closed)
    return c if c else _endpoint_cmp(P, a.upper, b.upper, "upper", a.closed, b.closed)


@dataclass(frozen=True)
class Cut:
    """A lower set of an order, given by a membership predicate on values."""

    contains: Callable[[Any], bool]
    label: str = ""

    def __call__(self, v) -> bool:
        return self.contains(v)


def point_cut(p, compare_values: Callable[[Any, Any], int] = _natural_cmp) -> Cut:
    """The cut {q : q <= p} of a point."""
    return Cut(lambda v: compare_values(v, p) <= 0, label=f"<= {_jsonable(p)}")


def below_cut(p, compare_values: Callable[[Any, Any], int] = _natural_cmp) -> Cut:
    return Cut(lambda v: compare_values(v, p) < 0, label=f"< {_jsonable(p)}")


def sqrt_cut(n: int = 2) -> Cut:
    """Rationals below sqrt(n)."""
    return Cut(lambda v: v < 0 or v * v < n, label=f"< sqrt({n})")
