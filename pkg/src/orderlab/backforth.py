"""Back-and-forth isomorphisms, embeddings into Q, and extension to completions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from .order import BudgetExhausted, Cut, EnumeratedOrder, OrderError, _natural_cmp, midpoint

FORWARD = "forward"
BACKWARD = "backward"


class ExtensionStuck(OrderError):
    def __init__(self, message, round_no=None, direction=None, index=None, budget=None):
        super().__init__(message)
        self.round_no = round_no
        self.direction = direction
        self.index = index
        self.budget = budget


@dataclass(frozen=True)
class Step:
    round: int
    dir: str
    source_index: int
    target_index: int

    def to_json(self) -> dict:
        return {"round": self.round, "dir": self.dir,
                "source_index": self.source_index, "target_index": self.target_index}


@dataclass
class PartialIso:
    """Finite order-preserving injection between two enumerated orders."""

    forward: Dict[int, int] = field(default_factory=dict)
    transcript: List[Step] = field(default_factory=list)

    @property
    def backward(self) -> Dict[int, int]:
        return {b: a for a, b in self.forward.items()}

    def __len__(self):
        return len(self.forward)

    def transcript_json(self) -> list:
        return [s.to_json() for s in self.transcript]

    @classmethod
    def replay(cls, transcript) -> "PartialIso":
        iso = cls()
        for s in transcript:
            if isinstance(s, dict):
                s = Step(**s)
            if s.dir == FORWARD:
                iso.forward[s.source_index] = s.target_index
            else:
                iso.forward[s.target_index] = s.source_index
            iso.transcript.append(s)
        return iso


def _gap(src: EnumeratedOrder, dst: EnumeratedOrder, pairs, v):
    """Tightest bounds in dst imposed on the image of source value v."""
    lo = hi = None
    cs, cd = src.compare_values, dst.compare_values
    for s_val, d_val in pairs:
        c = cs(s_val, v)
        if c < 0:
            if lo is None or cd(d_val, lo) > 0:
                lo = d_val
        elif c > 0:
            if hi is None or cd(d_val, hi) < 0:
                hi = d_val
        else:
            return None  # v already has a partner value
    return lo, hi


def _least_index_in(dst: EnumeratedOrder, lo, hi, used, budget: int) -> Optional[int]:
    if dst.rational and dst.compare_values is _natural_cmp:
        return _least_rational_index(dst, lo, hi, used, dst.bound(budget))
    cd = dst.compare_values
    for m in range(dst.bound(budget)):
        if m in used:
            continue
        w = dst.element(m)
        if (lo is None or cd(lo, w) < 0) and (hi is None or cd(w, hi) < 0):
            return m
    return None


def _least_rational_index(dst: EnumeratedOrder, lo, hi, used, n: int) -> Optional[int]:
    # same scan on integer pairs; denominators are positive, so cross-multiply
    ln, ld = (lo.numerator, lo.denominator) if lo is not None else (0, 0)
    hn, hd = (hi.numerator, hi.denominator) if hi is not None else (0, 0)
    m, chunk = 0, 256
    while m < n:
        parts = dst.fraction_parts(min(n, m + chunk))
        for k in range(m, len(parts)):
            wn, wd = parts[k]
            if (lo is None or ln * wd < wn * ld) and (hi is None or wn * hd < hn * wd) and k not in used:
                return k
        m, chunk = len(parts), chunk * 2
    return None


def _least_unassigned(order: EnumeratedOrder, assigned) -> int:
    i = 0
    while i in assigned:
        i += 1
    if order.size is not None and i >= order.size:
        return -1
    return i


def back_and_forth(A: EnumeratedOrder, B: EnumeratedOrder, rounds: int, budget: int = 100_000) -> PartialIso:
    """Run ``rounds`` steps of Cantor's alternation.

    Even rounds send the least unassigned A-index to the least B-index that
    keeps the map order-preserving; odd rounds pull back the least
    unassigned B-index the same way.
    """
    iso = PartialIso()
    fwd = iso.forward
    bwd: Dict[int, int] = {}
    for r in range(rounds):
        if r % 2 == 0:
            src, dst, mine, theirs, direction = A, B, fwd, bwd, FORWARD
        else:
            src, dst, mine, theirs, direction = B, A, bwd, fwd, BACKWARD
        i = _least_unassigned(src, mine)
        if i < 0:
            continue  # finite side exhausted: nothing left to define
        pairs = [(src.element(s), dst.element(t)) for s, t in mine.items()]
        lo, hi = _gap(src, dst, pairs, src.element(i))
        m = _least_index_in(dst, lo, hi, theirs, budget)
        if m is None:
            raise ExtensionStuck(
                f"round {r}: no {dst.name} index below {budget} extends the map at {src.name}[{i}]",
                round_no=r, direction=direction, index=i, budget=budget)
        mine[i] = m
        theirs[m] = i
        iso.transcript.append(Step(r, direction, i, m))
    return iso


def is_order_preserving(A: EnumeratedOrder, B: EnumeratedOrder, iso: PartialIso) -> Optional[Tuple[int, int]]:
    """First domain pair whose order is not preserved, or None (exhaustive)."""
    items = sorted(iso.forward.items())
    if len(set(iso.forward.values())) != len(items):
        seen = {}
        for a, b in items:
            if b in seen:
                return (seen[b], a)
            seen[b] = a
    for x in range(len(items)):
        i, fi = items[x]
        for y in range(x + 1, len(items)):
            j, fj = items[y]
            if A.compare(i, j) != B.compare(fi, fj):
                return (i, j)
    return None


def embed_into_rationals(A: EnumeratedOrder, n: int) -> Dict[int, Fraction]:
    """Forward-only embedding of the first n elements into Q.

    The first element goes to 0; later ones go one above the current max,
    one below the current min, or to the midpoint of their gap.
    """
    n = A.bound(n)
    image: Dict[int, Fraction] = {}
    chain: List[int] = []  # placed indices in A-order, so neighbours give max f(X), min f(Y)
    for k in range(n):
        lo, hi = 0, len(chain)
        while lo < hi:
            mid = (lo + hi) // 2
            c = A.compare(chain[mid], k)
            if c == 0:
                raise OrderError(f"a_{chain[mid]} and a_{k} compare equal")
            if c < 0:
                lo = mid + 1
            else:
                hi = mid
        below = image[chain[lo - 1]] if lo > 0 else None
        above = image[chain[lo]] if lo < len(chain) else None
        if not image:
            q = Fraction(0)
        elif above is None:
            q = below + 1
        elif below is None:
            q = above - 1
        else:
            q = midpoint(below, above)
        image[k] = q
        chain.insert(lo, k)
    return image


@dataclass(frozen=True)
class OrderIso:
    """An order isomorphism between dense sets, given as a total rule.

    ``inverse`` is optional; with it, membership in an extended cut is decided
    exactly rather than by bounded search.
    """

    forward: Callable[[Any], Any]
    inverse: Optional[Callable[[Any], Any]] = None
    source: Optional[EnumeratedOrder] = None
    target: Optional[EnumeratedOrder] = None
    name: str = ""

    def __call__(self, p):
        return self.forward(p)


def extend_to_completion(I: OrderIso, x: Cut, budget: int = 10_000) -> Cut:
    """I*(x) = sup{I(p) : p in x}, represented by its lower set in the target.

    p' is in I*(x) iff some p in x has I(p) >= p'.  The search enumerates
    the source order; when ``I`` has an inverse the candidate I^-1(p') is
    tried first, which settles every query by downward closure.
    """
    if I.source is None:
        raise ValueError("extend_to_completion needs the source order of I")
    P = I.source
    cmp_t = I.target.compare_values if I.target is not None else (lambda a, b: (a > b) - (a < b))

    def member(v) -> bool:
        if I.inverse is not None:
            return bool(x(I.inverse(v)))
        for k in range(P.bound(budget)):
            p = P.element(k)
            if x(p) and cmp_t(I(p), v) >= 0:
                return True
        raise BudgetExhausted(f"membership of {v} in I*({x.label}) unsettled within {budget}",
                              requirement=("cut", v), budget=budget)

    return Cut(member, label=f"{I.name or 'I'}*({x.label})")


def as_order_iso(iso: PartialIso, A: EnumeratedOrder, B: EnumeratedOrder) -> OrderIso:
    """The computed part of a back-and-forth map as a rule on values.

    Both directions are exact on the domain and range reached so far;
    anything outside raises BudgetExhausted.
    """
    fwd = {A.element(i): B.element(j) for i, j in iso.forward.items()}
    bwd = {v: k for k, v in fwd.items()}

    def lookup(table, side):
        def f(v):
            try:
                return table[v]
            except (KeyError, TypeError):
                raise BudgetExhausted(f"{v} is outside the computed {side}",
                                      requirement=(side, v), budget=len(table)) from None
        return f

    domain = sorted(iso.forward)
    src = EnumeratedOrder(f"{A.name}|domain", lambda k: A.element(domain[k]), size=len(domain),
                          compare_values=A.compare_values)
    return OrderIso(lookup(fwd, "domain"), lookup(bwd, "range"), src, B, name=f"{A.name}->{B.name}")


def write_transcript(iso: PartialIso, path) -> None:
    with open(path, "w") as fh:
        json.dump(iso.transcript_json(), fh, indent=1)
