"""Symbolic bounded strictly increasing transfinite sequences of rationals.

A sequence is a finite list of segments.  An ``Atom`` is one entry.  A
``Fill`` of length ``w^e`` over an open interval ``(lo, hi)`` stands for the
canonical increasing ``w^e``-sequence inside that interval:

* ``e == 1``: entry ``k`` is ``u(k+1)`` where ``u(n) = lo + (hi-lo)(1 - 2^-n)``;
* ``e >= 2``: the interval is cut into blocks ``(u(n), u(n+1))`` and block
  ``n`` carries the canonical ``w^(e-1)``-sequence.

Indices are ordinals below ``w^w``; nothing is ever materialized beyond the
segment list.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple, Union

from . import ordinal as O
from .order import format_rat, midpoint, parse_rat
from .ordinal import Ordinal


class RatSeqError(Exception):
    pass


class IndexOutOfRange(RatSeqError):
    pass


class NotAboveSup(RatSeqError):
    pass


class EmptyInterval(RatSeqError):
    pass


class _NegInf:
    """The sup of the empty sequence; below every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __repr__(self):
        return "NEG_INF"


NEG_INF = _NegInf()


def _u(lo: Fraction, hi: Fraction, n: int) -> Fraction:
    return lo + (hi - lo) * (1 - Fraction(1, 2 ** n))


@dataclass(frozen=True)
class Atom:
    value: Fraction

    @property
    def length(self) -> Ordinal:
        return O.ONE

    @property
    def sup(self) -> Fraction:
        return self.value

    @property
    def first(self) -> Fraction:
        return self.value


@dataclass(frozen=True)
class Fill:
    exponent: int
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.exponent < 1:
            raise ValueError("Fill exponent must be >= 1")
        if not self.lo < self.hi:
            raise EmptyInterval(f"({self.lo}, {self.hi}) is empty")

    @property
    def length(self) -> Ordinal:
        return Ordinal.omega_power(self.exponent)

    @property
    def sup(self) -> Fraction:
        return self.hi

    def block(self, n: int) -> Tuple[Fraction, Fraction]:
        return _u(self.lo, self.hi, n), _u(self.lo, self.hi, n + 1)

    def at(self, index: Ordinal) -> Fraction:
        lo, hi, e = self.lo, self.hi, self.exponent
        while True:
            if e == 1:
                return _u(lo, hi, int(index) + 1)
            n = index.coefficient(e - 1)
            lo, hi = _u(lo, hi, n), _u(lo, hi, n + 1)
            index = Ordinal(t for t in index.terms if t[0] < e - 1)
            e -= 1

    @property
    def first(self) -> Fraction:
        return self.at(O.ZERO)

    def split(self) -> List["Segment"]:
        """Rewrite as (first component, remainder) with the same entries."""
        mid = _u(self.lo, self.hi, 1)
        head = Atom(mid) if self.exponent == 1 else Fill(self.exponent - 1, self.lo, mid)
        return [head, Fill(self.exponent, mid, self.hi)]

    def prefix(self, length: Ordinal) -> List["Segment"]:
        """Segments for the first ``length`` entries, ``length < w^e``."""
        if self.exponent == 1:
            return [Atom(_u(self.lo, self.hi, k + 1)) for k in range(int(length))]
        e = self.exponent
        n = length.coefficient(e - 1)
        out: List[Segment] = [Fill(e - 1, *self.block(j)) for j in range(n)]
        rest = Ordinal(t for t in length.terms if t[0] < e - 1)
        if rest:
            out.extend(Fill(e - 1, *self.block(n)).prefix(rest))
        return out


Segment = Union[Atom, Fill]


class RatSeq:
    """Immutable strictly increasing sequence of rationals with ordinal length."""

    __slots__ = ("segments", "length", "sup", "_key", "_offsets")

    def __init__(self, segments: Iterable[Segment] = ()):
        segs = tuple(segments)
        length = O.ZERO
        sup = NEG_INF
        attained = True
        offsets = []
        for s in segs:
            if isinstance(s, Atom):
                # an unattained sup (after a Fill) may itself be the next entry
                if not (sup < s.value or (not attained and sup == s.value)):
                    raise NotAboveSup(f"atom {s.value} is not above {sup}")
            elif isinstance(s, Fill):
                if sup is not NEG_INF and s.lo < sup:
                    raise NotAboveSup(f"fill ({s.lo}, {s.hi}) starts below {sup}")
            else:
                raise TypeError(f"not a segment: {s!r}")
            offsets.append(length)
            length = O.add(length, s.length)
            sup = s.sup
            attained = isinstance(s, Atom)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "sup", sup)
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_offsets", tuple(offsets))

    def __setattr__(self, name, value):
        raise AttributeError("RatSeq is immutable")

    def __repr__(self):
        return f"RatSeq({to_json(self)['segments']})"

    def __len__(self):
        raise TypeError("use .length (an Ordinal)")

    def __eq__(self, other):
        if not isinstance(other, RatSeq):
            return NotImplemented
        return equal(self, other)

    def key(self) -> tuple:
        """Representation-independent hash key (length, sup, leading entries)."""
        if self._key is None:
            probes = []
            if self.length:
                probes.append(at(self, O.ZERO))
                probes.append(at(self, O.ONE) if O.ONE < self.length else None)
            k = (self.length, self.sup if self.sup is not NEG_INF else None, tuple(probes))
            object.__setattr__(self, "_key", k)
        return self._key

    def __hash__(self):
        return hash(self.key())

    @property
    def is_empty(self) -> bool:
        return not self.segments


EMPTY = RatSeq()


def canonical(alpha, a, b) -> RatSeq:
    """The canonical increasing ``alpha``-sequence inside ``(a, b)``.

    ``alpha`` is expanded into unit runs ``w^e`` (one per CNF coefficient
    unit); the interval is split into that many equal parts; a run with
    ``e == 0`` becomes the midpoint of its part, otherwise a Fill.
    """
    alpha = Ordinal.of(alpha)
    a, b = parse_rat(a), parse_rat(b)
    if not a < b:
        raise EmptyInterval(f"({a}, {b}) is empty")
    runs = [e for e, c in alpha.terms for _ in range(c)]
    if not runs:
        return EMPTY
    width = (b - a) / len(runs)
    segs: List[Segment] = []
    for j, e in enumerate(runs):
        lo, hi = a + width * j, a + width * (j + 1)
        segs.append(Atom(midpoint(lo, hi)) if e == 0 else Fill(e, lo, hi))
    return RatSeq(segs)


def _locate(s: RatSeq, index: Ordinal):
    if not index < s.length:
        raise IndexOutOfRange(f"index {index} >= length {s.length}")
    pos = bisect_right(s._offsets, index) - 1
    offset = s._offsets[pos]
    return pos, s.segments[pos], O.subtract_left(offset, index)


def at(s: RatSeq, index) -> Fraction:
    index = Ordinal.of(index)
    if not index < s.length:
        raise IndexOutOfRange(f"index {index} >= length {s.length}")
    _, seg, local = _locate(s, index)
    return seg.value if isinstance(seg, Atom) else seg.at(local)


def restrict(s: RatSeq, beta) -> RatSeq:
    beta = Ordinal.of(beta)
    if beta > s.length:
        raise IndexOutOfRange(f"restriction to {beta} exceeds length {s.length}")
    if beta == s.length:
        return s
    pos, seg, local = _locate(s, beta)
    # a prefix of a valid sequence is valid: reuse its bookkeeping
    segs = s.segments[:pos]
    offsets = s._offsets[:pos]
    if isinstance(seg, Fill) and local:
        tail = seg.prefix(local)
        length = s._offsets[pos]
        extra = []
        for t in tail:
            extra.append(length)
            length = O.add(length, t.length)
        segs += tuple(tail)
        offsets += tuple(extra)
    return _trusted(segs, beta, segs[-1].sup if segs else NEG_INF, offsets)


def _trusted(segs, length, sup, offsets) -> RatSeq:
    out = object.__new__(RatSeq)
    object.__setattr__(out, "segments", segs)
    object.__setattr__(out, "length", length)
    object.__setattr__(out, "sup", sup)
    object.__setattr__(out, "_key", None)
    object.__setattr__(out, "_offsets", offsets)
    return out


def sup_attained(s: RatSeq) -> bool:
    return not s.segments or isinstance(s.segments[-1], Atom)


def extend(s: RatSeq, r) -> RatSeq:
    """Append r; r must exceed every entry (it may equal an unattained sup)."""
    r = parse_rat(r)
    if not (s.sup < r or (not sup_attained(s) and s.sup == r)):
        raise NotAboveSup(f"{r} is not above sup {s.sup}")
    # the prefix is already valid; only the new tail needs bookkeeping
    return _trusted(s.segments + (Atom(r),), s.length.successor(), r, s._offsets + (s.length,))


def concat(s: RatSeq, t: RatSeq) -> RatSeq:
    return RatSeq(s.segments + t.segments)


def equal(x: RatSeq, y: RatSeq) -> bool:
    """Entrywise equality, decided on the segment lists.

    Heads are compared after splitting the longer one until lengths agree.
    Two Fills of equal length denote the same entries iff their intervals
    coincide, because the canonical map from intervals is injective.
    """
    if x is y or x.segments == y.segments:
        return True
    if x.length != y.length:
        return False
    xs, ys = list(reversed(x.segments)), list(reversed(y.segments))
    while xs and ys:
        a, b = xs.pop(), ys.pop()
        if isinstance(a, Atom) and isinstance(b, Atom):
            if a.value != b.value:
                return False
            continue
        la, lb = a.length, b.length
        if la == lb:
            if (a.lo, a.hi) != (b.lo, b.hi):
                return False
            continue
        if la > lb:
            xs.extend(reversed(a.split()))
            ys.append(b)
        else:
            ys.extend(reversed(b.split()))
            xs.append(a)
    return not xs and not ys


def is_initial_segment(x: RatSeq, y: RatSeq) -> bool:
    return x.length <= y.length and equal(x, restrict(y, x.length))


def segment_json(seg: Segment) -> dict:
    if isinstance(seg, Atom):
        return {"atom": format_rat(seg.value)}
    return {"fill": {"len": str(seg.length), "lo": format_rat(seg.lo), "hi": format_rat(seg.hi)}}


def to_json(s: RatSeq) -> dict:
    return {"segments": [segment_json(g) for g in s.segments]}


def from_json(data: dict) -> RatSeq:
    segs: List[Segment] = []
    for g in data["segments"]:
        if "atom" in g:
            segs.append(Atom(parse_rat(g["atom"])))
            continue
        f = g["fill"]
        length = O.parse(f["len"])
        if len(length.terms) != 1 or length.terms[0][0] < 1:
            raise RatSeqError(f"fill length must be a power w^e with e >= 1, got {f['len']}")
        (e, c), = length.terms
        lo, hi = parse_rat(f["lo"]), parse_rat(f["hi"])
        if c == 1:
            segs.append(Fill(e, lo, hi))
        else:
            # w^e*c over (lo, hi): c equal runs, the same way canonical lays them out
            segs.extend(canonical(length, lo, hi).segments)
    return RatSeq(segs)
