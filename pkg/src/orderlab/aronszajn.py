"""Finite fragments of the special Aronszajn tree of increasing rational sequences.

Levels ``U_alpha`` are built at the ordinals of a finite support set.  Each
node is a ``RatSeq`` of length exactly its level, and ``x <= y`` iff ``y``
extends ``x``.  Target bounds ``q`` range over a finite rational grid, which
replaces "every rational q" in the extension condition:

    for every beta < alpha in the support, every x in U_beta and every grid
    q > sup x, some y in U_alpha extends x with sup y <= q.

The map ``node -> sup(node)`` is strictly increasing along the tree order,
so each of its fibers is an antichain.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import ordinal as O
from . import ratseq as R
from .order import Report, format_rat, midpoint, parse_rat
from .ordinal import Ordinal
from .tree import LeveledTree, Node, is_antichain


class AronszajnError(Exception):
    pass


class SupportGap(AronszajnError):
    pass


class GridTooCoarse(AronszajnError):
    pass


class UnknownNode(AronszajnError, KeyError):
    pass


FULL = "full"
LEAN = "lean"


@dataclass
class AronszajnBuild:
    support: Tuple[Ordinal, ...]
    grid: Tuple[Fraction, ...]
    branching: str = FULL
    seqs: Dict[int, R.RatSeq] = field(default_factory=dict)
    levels: Dict[Ordinal, List[int]] = field(default_factory=dict)
    provenance: Dict[int, dict] = field(default_factory=dict)
    parents: Dict[int, Optional[int]] = field(default_factory=dict)
    _buckets: Dict[tuple, List[int]] = field(default_factory=lambda: defaultdict(list), repr=False)

    # -- node bookkeeping ------------------------------------------------

    def find(self, seq: R.RatSeq) -> Optional[int]:
        for nid in self._buckets.get(seq.key(), ()):
            if R.equal(self.seqs[nid], seq):
                return nid
        return None

    def add(self, seq: R.RatSeq, provenance: dict, parent: Optional[int] = None) -> Tuple[int, bool]:
        """Insert ``seq`` at its level unless an entrywise-equal node exists.

        ``parent`` is the claimed restriction to the previous support level;
        check_downward_closure verifies it.
        """
        found = self.find(seq)
        if found is not None:
            return found, False
        nid = len(self.seqs)
        self.seqs[nid] = seq
        self.levels.setdefault(seq.length, []).append(nid)
        self.provenance[nid] = provenance
        self.parents[nid] = parent
        self._buckets[seq.key()].append(nid)
        return nid, True

    def remove(self, nid: int) -> "AronszajnBuild":
        """A copy without node ``nid`` (descendants kept); for negative tests."""
        out = AronszajnBuild(self.support, self.grid, self.branching)
        for i in sorted(self.seqs):
            if i != nid:
                out.seqs[i] = self.seqs[i]
                out.levels.setdefault(self.seqs[i].length, []).append(i)
                out.provenance[i] = self.provenance[i]
                out.parents[i] = self.parents.get(i)
                out._buckets[self.seqs[i].key()].append(i)
        return out

    def level(self, alpha) -> List[int]:
        return list(self.levels.get(Ordinal.of(alpha), []))

    def node_ids(self) -> List[int]:
        return sorted(self.seqs)

    def seq(self, nid: int) -> R.RatSeq:
        try:
            return self.seqs[nid]
        except KeyError:
            raise UnknownNode(nid) from None

    def __len__(self):
        return len(self.seqs)

    @property
    def floor(self) -> Fraction:
        """Stand-in for sup of the empty sequence: one below the least grid point."""
        return self.grid[0] - 1

    def sup_value(self, nid: int) -> Fraction:
        s = self.seq(nid)
        return self.floor if s.is_empty else s.sup

    def previous_level(self, alpha: Ordinal) -> Optional[Ordinal]:
        below = [s for s in self.support if s < alpha]
        return below[-1] if below else None

    def parent(self, nid: int) -> Optional[int]:
        if nid in self.parents:
            return self.parents[nid]
        return self.compute_parent(nid)

    def compute_parent(self, nid: int) -> Optional[int]:
        s = self.seq(nid)
        prev = self.previous_level(s.length)
        if prev is None:
            return None
        return self.find(R.restrict(s, prev))

    def to_tree(self) -> LeveledTree:
        nodes = []
        for nid in self.node_ids():
            s = self.seqs[nid]
            p = self.parent(nid)
            if p is None and s.length != O.ZERO:
                raise AronszajnError(f"node {nid} has no restriction at the level below")
            nodes.append(Node(nid, p, s.length, payload=s))
        return LeveledTree(nodes, self.support, pre_normal=True)


def _validate(support: Sequence[Ordinal], grid: Sequence[Fraction]):
    if O.ZERO not in support:
        raise SupportGap("support must contain 0")
    present = set(support)
    for a in support:
        if O.classify(a) == O.SUCCESSOR and a.predecessor() not in present:
            raise SupportGap(f"successor level {a} needs {a.predecessor()} in the support")
    if len(grid) < 2:
        raise GridTooCoarse("the grid needs at least two points")


def _targets(b: AronszajnBuild, nid: int) -> List[Fraction]:
    s = b.sup_value(nid)
    qs = [q for q in b.grid if q > s]
    if b.branching == LEAN and not b.seqs[nid].is_empty:
        qs = qs[:1]
    return qs


def build(support: Iterable, grid: Iterable, branching: str = FULL) -> AronszajnBuild:
    """Build the levels at every support ordinal, in ascending order.

    Successor level a+1: every x in U_a and every grid target q > sup x give
    ``x + [midpoint(sup x, q)]``.  With ``branching="lean"`` only the root
    fans out over all targets; other nodes continue toward the least grid
    point above their sup.

    Limit level a: lower nodes are visited by level then id, targets in
    grid order; when no node of U_a yet extends x with sup below q, the
    node ``x + canonical(a - o(x), (m, q'))`` is added, with m the midpoint
    of (sup x, q) and q' the midpoint of (m, q).  Its restrictions to the
    support levels strictly between o(x) and a are added too.
    """
    support = tuple(sorted({Ordinal.of(s) for s in support}))
    grid = tuple(sorted({parse_rat(q) for q in grid}))
    if branching not in (FULL, LEAN):
        raise ValueError(f"unknown branching policy {branching!r}")
    _validate(support, grid)
    b = AronszajnBuild(support, grid, branching)
    b.add(R.EMPTY, {"kind": "root"})
    for alpha in support[1:]:
        if O.classify(alpha) == O.SUCCESSOR:
            _successor_level(b, alpha)
        else:
            _limit_level(b, alpha)
        if not b.levels.get(alpha):
            raise GridTooCoarse(f"no node below level {alpha} has a grid point above its sup")
    return b


def _successor_level(b: AronszajnBuild, alpha: Ordinal):
    pred = alpha.predecessor()
    for x in sorted(b.level(pred)):
        s = b.sup_value(x)
        for q in _targets(b, x):
            y = R.extend(b.seqs[x], midpoint(s, q))
            b.add(y, {"kind": "successor", "from": x, "q": q}, parent=x)


def _limit_level(b: AronszajnBuild, alpha: Ordinal):
    lower = [s for s in b.support if s < alpha]
    todo = [x for beta in lower for x in sorted(b.level(beta))]
    # least sup among nodes of U_alpha extending each lower node
    best: Dict[int, Fraction] = {}
    for x in todo:
        sx = b.sup_value(x)
        xs = b.seqs[x]
        for q in b.grid:
            if q <= sx:
                continue
            if x in best and best[x] < q:
                continue
            m = midpoint(sx, q)
            tail = R.canonical(O.subtract_left(xs.length, alpha), m, midpoint(m, q))
            y = R.concat(xs, tail)
            prev, chain = x, [x]
            for gamma in lower:
                if gamma <= xs.length:
                    continue
                prev, _ = b.add(R.restrict(y, gamma), {"kind": "backfill", "from": x, "q": q}, parent=prev)
                chain.append(prev)
            b.add(y, {"kind": "limit", "from": x, "q": q}, parent=prev)
            chain.extend(_ancestor_ids(b, x))
            for a in chain:
                if a not in best or y.sup < best[a]:
                    best[a] = y.sup


def _ancestor_ids(b: AronszajnBuild, nid: int) -> List[int]:
    out = []
    p = b.parent(nid)
    while p is not None:
        out.append(p)
        p = b.parent(p)
    return out


# -- checks ---------------------------------------------------------------


def _parents(b: AronszajnBuild) -> Dict[int, Optional[int]]:
    out = {}
    for nid in b.node_ids():
        p = b.parent(nid)
        out[nid] = p if p in b.seqs else None
    return out


def _chains(b: AronszajnBuild, parents) -> Dict[int, List[int]]:
    chains: Dict[int, List[int]] = {}
    for nid in sorted(b.node_ids(), key=lambda i: b.seqs[i].length):
        p = parents[nid]
        chains[nid] = [] if p is None else chains[p] + [p]
    return chains


def check_lengths(b: AronszajnBuild) -> Report:
    for alpha, ids in b.levels.items():
        if alpha not in b.support:
            return Report(False, "lengths", (str(alpha),), {"reason": "level outside support"})
        for nid in ids:
            if b.seqs[nid].length != alpha:
                return Report(False, "lengths", (nid,))
    buckets = defaultdict(list)
    for nid in b.node_ids():
        buckets[b.seqs[nid].key()].append(nid)
    for ids in buckets.values():
        for k, i in enumerate(ids):
            for j in ids[k + 1:]:
                if R.equal(b.seqs[i], b.seqs[j]):
                    return Report(False, "lengths", (i, j), {"reason": "duplicate"})
    return Report(True, "lengths", detail={"levels": len(b.levels)})


def check_downward_closure(b: AronszajnBuild) -> Report:
    """Every node restricts to a node at the previous support level.

    Restriction is transitive, so by induction on levels this gives the
    restriction to every lower support level.
    """
    if len(b.level(O.ZERO)) != 1:
        return Report(False, "downward-closure", ("0",), {"reason": "need exactly one root"})
    for nid in b.node_ids():
        s = b.seqs[nid]
        prev = b.previous_level(s.length)
        if prev is None:
            continue
        p = b.parent(nid)
        if p not in b.seqs or b.seqs[p].length != prev or not R.is_initial_segment(b.seqs[p], s):
            p = b.compute_parent(nid)
            if p is None:
                return Report(False, "downward-closure", (nid, str(prev)))
    return Report(True, "downward-closure", detail={"nodes": len(b)})


def check_condition1(b: AronszajnBuild) -> Report:
    """Grid-relative extension condition, exhaustive over materialized levels."""
    parents = _parents(b)
    chains = _chains(b, parents)
    best: Dict[Tuple[int, Ordinal], Fraction] = {}
    for nid in b.node_ids():
        alpha = b.seqs[nid].length
        v = b.sup_value(nid)
        for a in chains[nid]:
            key = (a, alpha)
            if key not in best or v < best[key]:
                best[key] = v
    checked = 0
    for i, alpha in enumerate(b.support):
        for beta in b.support[:i]:
            for x in sorted(b.level(beta)):
                sx = b.sup_value(x)
                k = bisect_right(b.grid, sx)
                if k == len(b.grid):
                    continue
                # the least admissible q is the binding one
                checked += len(b.grid) - k
                low = best.get((x, alpha))
                if low is None or low > b.grid[k]:
                    return Report(False, "condition1", (str(beta), x, b.grid[k], str(alpha)))
    return Report(True, "condition1", detail={"pairs": checked})


def specializing_map(b: AronszajnBuild, nid: int) -> Fraction:
    """sup of the node; the empty root maps one below the least grid point."""
    return b.sup_value(nid)


def check_specializing(b: AronszajnBuild) -> Report:
    parents = _parents(b)
    chains = _chains(b, parents)
    pairs = 0
    for nid in b.node_ids():
        v = specializing_map(b, nid)
        for a in chains[nid]:
            pairs += 1
            if not specializing_map(b, a) < v:
                return Report(False, "specializing", (a, nid))
    return Report(True, "specializing", detail={"ancestor_pairs": pairs})


def fiber_antichain(b: AronszajnBuild, q) -> List[int]:
    q = parse_rat(q)
    return [nid for nid in b.node_ids() if specializing_map(b, nid) == q]


def fibers(b: AronszajnBuild) -> Dict[Fraction, List[int]]:
    out: Dict[Fraction, List[int]] = defaultdict(list)
    for nid in b.node_ids():
        out[specializing_map(b, nid)].append(nid)
    return dict(out)


def check_fibers(b: AronszajnBuild) -> Report:
    tree = b.to_tree()
    fs = fibers(b)
    covered = sum(len(v) for v in fs.values())
    if covered != len(b):
        return Report(False, "fibers", detail={"covered": covered, "nodes": len(b)})
    for q, ids in sorted(fs.items()):
        ok, w = is_antichain(tree, ids)
        if not ok:
            return Report(False, "fibers", (q, w))
    largest = max(len(v) for v in fs.values())
    bound = math.ceil(len(b) / len(fs))
    return Report(largest >= bound, "fibers", detail={
        "values": len(fs), "largest_fiber": largest, "pigeonhole_bound": bound})


def check_bounds(b: AronszajnBuild) -> Report:
    top, gmax = b.support[-1], b.grid[-1]
    for nid in b.node_ids():
        s = b.seqs[nid]
        if s.length > top:
            return Report(False, "bounds", (nid, "length"))
        if not s.is_empty and s.sup > gmax:
            return Report(False, "bounds", (nid, "sup"))
    return Report(True, "bounds", detail={"max_level": str(top), "max_grid": gmax})


def level_stats(b: AronszajnBuild) -> Dict[str, dict]:
    stats = {}
    for alpha in b.support:
        kinds = defaultdict(int)
        for nid in b.level(alpha):
            kinds[b.provenance[nid]["kind"]] += 1
        stats[str(alpha)] = {"size": len(b.level(alpha)), **kinds}
    return stats


def check_level_sizes(b: AronszajnBuild) -> Report:
    """Each level holds at most the generated plus backfilled nodes, all finite."""
    for alpha in b.support:
        ids = b.level(alpha)
        if alpha == O.ZERO:
            ok = len(ids) == 1
        elif O.classify(alpha) == O.SUCCESSOR:
            pairs = sum(len(_targets(b, x)) for x in b.level(alpha.predecessor()))
            backfilled = sum(1 for i in ids if b.provenance[i]["kind"] == "backfill")
            ok = len(ids) <= pairs + backfilled
        else:
            lower = [x for x in b.node_ids() if b.seqs[x].length < alpha]
            pairs = sum(len(b.grid) - bisect_right(b.grid, b.sup_value(x)) for x in lower)
            ok = len(ids) <= pairs
        if not ok:
            return Report(False, "level-sizes", (str(alpha), len(ids)))
    return Report(True, "level-sizes", detail=level_stats(b))


def check_all(b: AronszajnBuild) -> List[Report]:
    return [check_lengths(b), check_downward_closure(b), check_condition1(b),
            check_specializing(b), check_fibers(b), check_bounds(b), check_level_sizes(b)]


# -- persistence ----------------------------------------------------------


def to_json(b: AronszajnBuild) -> dict:
    nodes = []
    for nid in b.node_ids():
        prov = {k: (format_rat(v) if isinstance(v, Fraction) else v)
                for k, v in b.provenance[nid].items()}
        nodes.append({"id": nid, "parent": b.parent(nid), "level": str(b.seqs[nid].length),
                      "seq": R.to_json(b.seqs[nid]), "provenance": prov})
    return {"support": [str(s) for s in b.support], "grid": [format_rat(q) for q in b.grid],
            "branching": b.branching, "nodes": nodes}


def from_json(data: dict) -> AronszajnBuild:
    """Rebuild from a file.

    Parent links are read back as claims; a claim that is not the
    restriction to the previous support level is replaced by the node that
    is (or None, which check_downward_closure then reports).
    """
    support = tuple(O.parse(s) for s in data["support"])
    grid = tuple(parse_rat(q) for q in data["grid"])
    b = AronszajnBuild(support, grid, data.get("branching", FULL))
    for d in sorted(data["nodes"], key=lambda d: d["id"]):
        s = R.from_json(d["seq"])
        if str(s.length) != str(O.parse(d["level"])):
            raise AronszajnError(f"node {d['id']}: sequence length {s.length} != level {d['level']}")
        nid = d["id"]
        prov = dict(d.get("provenance", {}))
        if "q" in prov:
            prov["q"] = parse_rat(prov["q"])
        b.seqs[nid] = s
        b.levels.setdefault(s.length, []).append(nid)
        b.provenance[nid] = prov
        b.parents[nid] = d.get("parent")
        b._buckets[s.key()].append(nid)
    for nid in b.node_ids():
        s, p = b.seqs[nid], b.parents[nid]
        prev = b.previous_level(s.length)
        if prev is None:
            b.parents[nid] = None
        elif p not in b.seqs or b.seqs[p].length != prev or not R.is_initial_segment(b.seqs[p], s):
            b.parents[nid] = b.compute_parent(nid)
    return b


def dump(b: AronszajnBuild, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json(b), fh, indent=1)


def load(path) -> AronszajnBuild:
    with open(path) as fh:
        return from_json(json.load(fh))
