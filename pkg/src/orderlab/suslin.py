"""Trees to lines and lines to trees.

A labeled tree gives the line of its branches, ordered lexicographically by
the sibling labels at the first point of divergence.  Branches through a
node form an interval of that line, and incomparable nodes give disjoint
intervals, so antichains become disjoint interval families.

In the other direction a line plus a gap oracle yields a tree of closed
intervals under reverse inclusion: each stage asks the oracle for an
interval missing every endpoint chosen so far.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from . import ordinal as O
from .order import (EnumeratedOrder, Interval, Report, finite_order, format_rat,
                    interval_witness, verify_disjoint_family)
from .tree import LeveledTree, Node, TreeError, is_antichain
from . import tree as T


class SuslinError(Exception):
    pass


class MissingLabels(SuslinError):
    pass


class UnknownBranch(SuslinError, KeyError):
    pass


class OracleUnsound(SuslinError):
    pass


class NoWitness(SuslinError):
    pass


Branch = Tuple[Any, ...]


class BranchLine:
    """The branches of a labeled tree under the lexicographic order."""

    def __init__(self, tree: LeveledTree):
        _check_labels(tree)
        self.tree = tree
        self._members = set(tree.branches())
        self.elements: List[Branch] = sorted(self._members, key=cmp_to_key(self._cmp))
        self.position = {b: i for i, b in enumerate(self.elements)}
        # the sorted positions stand in for the lexicographic rule once it has sorted them
        self.order: EnumeratedOrder = finite_order(self.elements, name="branch-line",
                                                   compare_values=self._pos_cmp)

    def __len__(self):
        return len(self.elements)

    def _cmp(self, b1: Branch, b2: Branch) -> int:
        for u, v in zip(b1, b2):
            if u != v:
                lu, lv = self.tree.nodes[u].label, self.tree.nodes[v].label
                return -1 if lu < lv else 1
        # one is a prefix of the other: the shorter goes first
        return (len(b1) > len(b2)) - (len(b1) < len(b2))

    def _pos_cmp(self, b1, b2) -> int:
        i, j = self.position[b1], self.position[b2]
        return (i > j) - (i < j)

    def compare(self, b1, b2) -> int:
        b1, b2 = tuple(b1), tuple(b2)
        for b in (b1, b2):
            if b not in self._members:
                raise UnknownBranch(b)
        return self._cmp(b1, b2)


def _check_labels(t: LeveledTree):
    groups: Dict[Any, List[Any]] = {None: list(t.roots)}
    for pid, ch in t.children.items():
        groups[pid] = ch
    for pid, ids in groups.items():
        if len(ids) < 2:
            continue
        labels = [t.nodes[i].label for i in ids]
        if any(lab is None for lab in labels):
            raise MissingLabels(f"children of {pid!r} need sibling labels")
        if len(set(labels)) != len(labels):
            raise MissingLabels(f"children of {pid!r} repeat a label")


def tree_to_line(t: LeveledTree) -> BranchLine:
    return BranchLine(t)


def compare_branches(L: BranchLine, b1, b2) -> int:
    return L.compare(b1, b2)


@dataclass(frozen=True)
class NodeInterval:
    node: Any
    branches: Tuple[Branch, ...]
    open: Interval  # (predecessor, successor) in the line; holds exactly the branches

    @property
    def first(self) -> Branch:
        return self.branches[0]

    @property
    def last(self) -> Branch:
        return self.branches[-1]


def interval_of_node(L: BranchLine, x) -> NodeInterval:
    """Branches through x, checked to be contiguous in the line."""
    L.tree.node(x)
    pos = sorted(L.position[b] for b in L.elements if x in b)
    if pos and pos[-1] - pos[0] + 1 != len(pos):
        raise SuslinError(f"branches through {x!r} are not contiguous")
    lo = L.elements[pos[0] - 1] if pos[0] > 0 else None
    hi = L.elements[pos[-1] + 1] if pos[-1] + 1 < len(L) else None
    return NodeInterval(x, tuple(L.elements[i] for i in pos), Interval(lo, hi))


def check_total_order(L: BranchLine) -> Report:
    """Exhaustive: antisymmetric, total on distinct pairs, and consistent with
    one linear arrangement (which gives transitivity)."""
    els = L.elements
    for i, a in enumerate(els):
        if L.compare(a, a) != 0:
            return Report(False, "total-order", (a, a), {"reason": "irreflexive"})
        for b in els[i + 1:]:
            c, d = L.compare(a, b), L.compare(b, a)
            if c != -d:
                return Report(False, "total-order", (a, b), {"reason": "antisymmetry"})
            if c >= 0:
                return Report(False, "total-order", (a, b), {"reason": "arrangement"})
    return Report(True, "total-order", detail={"branches": len(els)})


def _masks(L: BranchLine) -> Dict[Any, int]:
    masks = {nid: 0 for nid in L.tree.nodes}
    for k, b in enumerate(L.elements):
        for nid in b:
            masks[nid] |= 1 << k
    return masks


def check_disjointness(L: BranchLine) -> Report:
    """I_x and I_y are disjoint iff x and y are incomparable, over all pairs."""
    masks = _masks(L)
    ids = sorted(L.tree.nodes, key=T._id_key)
    anc = {x: set(L.tree.ancestors(x)) for x in ids}
    for i, x in enumerate(ids):
        for y in ids[i + 1:]:
            disjoint = not (masks[x] & masks[y])
            if disjoint == (x in anc[y] or y in anc[x]):
                return Report(False, "disjointness", (x, y), {"disjoint": disjoint})
    return Report(True, "disjointness", detail={"pairs": len(ids) * (len(ids) - 1) // 2})


def check_intervals(L: BranchLine) -> Report:
    for nid in sorted(L.tree.nodes, key=T._id_key):
        try:
            interval_of_node(L, nid)
        except SuslinError:
            return Report(False, "intervals", (nid,))
    return Report(True, "intervals", detail={"nodes": len(L.tree)})


def antichain_family(L: BranchLine, nodes) -> List[Interval]:
    return [interval_of_node(L, x).open for x in nodes]


def check_ccc_transfer(L: BranchLine, antichain) -> Report:
    ok, w = is_antichain(L.tree, antichain)
    if not ok:
        return Report(False, "ccc-transfer", w, {"reason": "not an antichain"})
    return verify_disjoint_family(L.order, antichain_family(L, antichain), budget=len(L) + 1)


# -- lines to trees ----------------------------------------------------------


@dataclass(frozen=True)
class DenseReport:
    stage: int
    detail: dict = field(default_factory=dict)


class GapOracle:
    """Maps the finite set C of chosen endpoints to a closed interval missing C."""

    budget: int = 0

    def __call__(self, C) -> Union[Interval, DenseReport]:
        raise NotImplementedError


class HonestRationalOracle(GapOracle):
    """Gap oracle for a separable order such as Q.

    It only looks at the first ``budget`` enumerated elements.  It takes the
    gap of C with the most unused visible points (the leftmost on ties) and
    returns the points at its first and third quartile.  Every stage uses up
    two visible points, so the window fills and the oracle reports density
    within budget/2 stages.
    """

    def __init__(self, P: EnumeratedOrder, budget: int = 64):
        self.P = P
        self.budget = budget
        self.stage = 0
        self.visible = sorted({P.element(i) for i in range(P.bound(budget))},
                              key=cmp_to_key(P.compare_values))

    def __call__(self, C):
        cv = self.P.compare_values
        cs = sorted(C, key=cmp_to_key(cv))
        stage, self.stage = self.stage, self.stage + 1
        bounds = [None] + cs + [None]
        best: List[Any] = []
        for lo, hi in zip(bounds, bounds[1:]):
            free = [v for v in self.visible
                    if (lo is None or cv(lo, v) < 0) and (hi is None or cv(v, hi) < 0)]
            if len(free) > len(best):
                best = free
        if len(best) < 2:
            return DenseReport(stage, {"visible": len(self.visible), "chosen": len(cs)})
        k = len(best)
        return Interval(best[k // 4], best[k - 1 - k // 4], closed=True)


class BranchLineOracle(GapOracle):
    """Computable oracle for a branch line: the branches through a node.

    Picks the shallowest (then least id) node x whose interval has at least
    two branches and avoids C, and returns [first, last] of that interval.
    """

    def __init__(self, L: BranchLine):
        self.L = L
        self.budget = len(L.tree)
        self.stage = 0
        self.chosen: List[Any] = []
        self._masks = _masks(L)
        self._ids = sorted(L.tree.nodes, key=lambda i: (L.tree.nodes[i].level, T._id_key(i)))

    def __call__(self, C):
        stage, self.stage = self.stage, self.stage + 1
        cmask = 0
        for b in C:
            cmask |= 1 << self.L.position[tuple(b)]
        for x in self._ids:
            m = self._masks[x]
            if m & cmask or bin(m).count("1") < 2:
                continue
            iv = interval_of_node(self.L, x)
            self.chosen.append(x)
            return Interval(iv.first, iv.last, closed=True)
        return DenseReport(stage, {"reason": "no node interval avoids C"})


@dataclass
class IntervalTree:
    tree: LeveledTree
    intervals: List[Interval]
    dense: Optional[DenseReport] = None


def _relation(P: EnumeratedOrder, a: Interval, b: Interval) -> str:
    cv = P.compare_values
    if cv(a.upper, b.lower) < 0 or cv(b.upper, a.lower) < 0:
        return "disjoint"
    if cv(a.lower, b.lower) <= 0 and cv(b.upper, a.upper) <= 0:
        return "contains"
    if cv(b.lower, a.lower) <= 0 and cv(a.upper, b.upper) <= 0:
        return "inside"
    return "overlap"


def line_to_tree(P, oracle: GapOracle, steps: int) -> IntervalTree:
    """Run ``steps`` stages; stage k queries the oracle with all earlier endpoints.

    The result is ordered by reverse inclusion: a node's parent is the
    innermost earlier interval containing it.  Stops early on a DenseReport.
    """
    if isinstance(P, BranchLine):
        P = P.order
    cv = P.compare_values
    intervals: List[Interval] = []
    C: List[Any] = []
    nodes: List[Node] = []
    dense = None
    for k in range(steps):
        res = oracle(list(C))
        if isinstance(res, DenseReport):
            dense = res
            break
        if cv(res.lower, res.upper) > 0:
            raise OracleUnsound(f"stage {k}: empty interval [{res.lower}, {res.upper}]")
        for c in C:
            if res.contains(P, c):
                raise OracleUnsound(f"stage {k}: interval meets chosen point {c}")
        parent, depth = None, 0
        for j, prev in enumerate(intervals):
            rel = _relation(P, prev, res)
            if rel == "overlap" or rel == "inside":
                raise OracleUnsound(f"stage {k}: interval neither nested in nor disjoint from stage {j}")
            if rel == "contains":
                parent, depth = j, depth + 1
        intervals.append(res)
        nodes.append(Node(k, parent, O.Ordinal.of(depth), payload=res))
        C.extend([res.lower, res.upper])
    t = LeveledTree(nodes, range(max((n.level for n in nodes), default=O.ZERO).__int__() + 1),
                    pre_normal=True)
    return IntervalTree(t, intervals, dense)


def check_nested_or_disjoint(P, result: IntervalTree) -> Report:
    if isinstance(P, BranchLine):
        P = P.order
    iv = result.intervals
    for i in range(len(iv)):
        for j in range(i + 1, len(iv)):
            rel = _relation(P, iv[i], iv[j])
            if rel not in ("contains", "disjoint"):
                return Report(False, "nested-or-disjoint", (i, j), {"relation": rel})
            if (rel == "contains") != result.tree.is_ancestor(i, j):
                return Report(False, "nested-or-disjoint", (i, j), {"reason": "tree order"})
    return Report(True, "nested-or-disjoint", detail={"stages": len(iv)})


def check_round_trip(L: BranchLine, result: IntervalTree, chosen: Sequence[Any]) -> Report:
    """Stage k came from node chosen[k]; comparability must carry over to the tree."""
    t = result.tree
    for i in range(len(chosen)):
        for j in range(i + 1, len(chosen)):
            if t.comparable(i, j) != L.tree.comparable(chosen[i], chosen[j]):
                return Report(False, "round-trip", (i, j))
    return Report(True, "round-trip", detail={"stages": len(chosen)})


def chain_gap_family(P, result: IntervalTree, chain: Sequence[int], budget: int = 10_000):
    """Open intervals between consecutive left endpoints along a chain.

    Returns (family, report).  Empty gaps (possible in finite lines) are
    left out of the family and counted in the report.
    """
    if isinstance(P, BranchLine):
        P = P.order
    t = result.tree
    chain = sorted(chain, key=lambda k: t.nodes[k].level)
    for a, b in zip(chain, chain[1:]):
        if not t.is_ancestor(a, b):
            raise TreeError(f"stages {a} and {b} are not a chain")
    lefts = [result.intervals[k].lower for k in chain]
    family, empty = [], 0
    for lo, hi in zip(lefts, lefts[1:]):
        if interval_witness(P, lo, hi, budget) is None:
            empty += 1
            continue
        family.append(Interval(lo, hi))
    rep = verify_disjoint_family(P, family, budget)
    rep.detail["empty_gaps"] = empty
    return family, rep


def non_separability_witness(L: BranchLine, C) -> Any:
    """Least-id node at the least level exceeding the length of every branch in C."""
    C = [tuple(b) for b in C]
    for b in C:
        if b not in L.position:
            raise UnknownBranch(b)
    lengths = [L.tree.nodes[b[-1]].level.successor() for b in C]
    for alpha in L.tree.support:
        if any(not alpha > n for n in lengths):
            continue
        ids = L.tree.level(alpha)
        if not ids:
            continue
        x = ids[0]
        if any(x in b for b in C):
            raise SuslinError(f"node {x!r} lies on a branch of C")
        return x
    raise NoWitness("no materialized level exceeds every branch length in C")


# -- generation and persistence ----------------------------------------------


def random_labeled_tree(rng: random.Random, max_branches: int = 200, max_depth: int = 6,
                        max_children: int = 4) -> LeveledTree:
    """Random finite tree with distinct rational sibling labels; the root always splits."""
    nodes = [Node(0, None, O.ZERO)]
    frontier = [(0, 0)]
    leaves = 1
    nid = 1
    while frontier:
        pid, depth = frontier.pop(0)
        if depth >= max_depth:
            continue
        k = rng.randint(2, max_children) if pid == 0 else rng.choice([0, 1, 2, 2, 3, max_children])
        if k == 0 or leaves + k - 1 > max_branches:
            continue
        den = rng.randint(1, 4)
        for lab in rng.sample(range(-20, 21), k):
            nodes.append(Node(nid, pid, O.Ordinal.of(depth + 1), Fraction(lab, den)))
            frontier.append((nid, depth + 1))
            nid += 1
        leaves += k - 1
    depth = max(n.level for n in nodes)
    return LeveledTree(nodes, range(int(depth) + 1))


def line_to_json(L: BranchLine) -> dict:
    out = []
    for b in L.elements:
        labels = [L.tree.nodes[i].label for i in b]
        out.append({"nodes": list(b),
                    "labels": [None if x is None else format_rat(x) for x in labels]})
    return {"branches": out, "tree": T.to_json(L.tree)}


def line_from_json(data: dict) -> BranchLine:
    L = BranchLine(T.from_json(data["tree"]))
    listed = [tuple(b["nodes"]) for b in data["branches"]]
    if listed != L.elements:
        raise SuslinError("listed branch order disagrees with the tree")
    return L


def interval_tree_json(result: IntervalTree) -> dict:
    def enc(v):
        if isinstance(v, Fraction):
            return format_rat(v)
        if isinstance(v, tuple):
            return list(v)
        return v

    return {"stages": [{"stage": n.id, "parent": n.parent, "level": str(n.level),
                        "interval": [enc(result.intervals[n.id].lower),
                                     enc(result.intervals[n.id].upper)]}
                       for n in sorted(result.tree.nodes.values(), key=lambda n: n.id)],
            "dense": None if result.dense is None else {"stage": result.dense.stage,
                                                        **result.dense.detail}}
