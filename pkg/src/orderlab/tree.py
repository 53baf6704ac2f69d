"""Finite trees whose nodes sit at ordinal levels of a materialized support.

Trees are stored parent-pointer style, so comparability is ancestry and
every predecessor set is automatically well-ordered.  Levels are ordinal
labels drawn from a finite sorted support set; the levels between two
support points are simply not materialized.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from . import ordinal as O
from .order import format_rat, parse_rat
from .ordinal import Ordinal


class TreeError(Exception):
    pass


class UnknownId(TreeError, KeyError):
    pass


class Degenerate(TreeError):
    def __init__(self, message, stage=None, log=None):
        super().__init__(message)
        self.stage = stage
        self.log = log or []


@dataclass(frozen=True)
class Node:
    id: Any
    parent: Any
    level: Ordinal
    label: Optional[Fraction] = None
    payload: Any = None


class LeveledTree:
    """Immutable finite tree (or, when ``pre_normal``, forest) with ordinal levels."""

    def __init__(self, nodes: Iterable[Node], support: Iterable = None,
                 declared_height=None, pre_normal: bool = False):
        nodes = list(nodes)
        self.nodes: Dict[Any, Node] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise TreeError(f"duplicate node id {n.id!r}")
            self.nodes[n.id] = n
        if support is None:
            support = {n.level for n in nodes}
        self.support: Tuple[Ordinal, ...] = tuple(sorted({O.Ordinal.of(s) for s in support}))
        self.pre_normal = pre_normal
        self.children: Dict[Any, List[Any]] = {i: [] for i in self.nodes}
        self.roots: List[Any] = []
        for n in nodes:
            if n.level not in self.support:
                raise TreeError(f"node {n.id!r} level {n.level} not in support")
            if n.parent is None:
                self.roots.append(n.id)
                continue
            if n.parent not in self.nodes:
                raise TreeError(f"node {n.id!r} has unknown parent {n.parent!r}")
            if not self.nodes[n.parent].level < n.level:
                raise TreeError(f"node {n.id!r} is not above its parent")
            self.children[n.parent].append(n.id)
        if len(self.roots) > 1 and not pre_normal:
            raise TreeError(f"several roots {self.roots} in a tree not flagged pre-normal")
        self.declared_height = O.Ordinal.of(declared_height) if declared_height is not None else height(self)

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node_id):
        return node_id in self.nodes

    def __iter__(self):
        return iter(self.nodes.values())

    def __repr__(self):
        return f"LeveledTree({len(self.nodes)} nodes, support={[str(s) for s in self.support]})"

    def node(self, node_id) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownId(node_id) from None

    def level_of(self, node_id) -> Ordinal:
        return self.node(node_id).level

    def ancestors(self, node_id) -> List[Any]:
        """Strict ancestors, root first."""
        out = []
        p = self.node(node_id).parent
        while p is not None:
            out.append(p)
            p = self.nodes[p].parent
        out.reverse()
        return out

    def is_ancestor(self, a, b) -> bool:
        """a < b in the tree order."""
        p = self.node(b).parent
        while p is not None:
            if p == a:
                return True
            p = self.nodes[p].parent
        return False

    def comparable(self, a, b) -> bool:
        return a == b or self.is_ancestor(a, b) or self.is_ancestor(b, a)

    def cone(self, node_id) -> List[Any]:
        """node_id and all its descendants."""
        out, stack = [], [node_id]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return out

    def level(self, alpha) -> List[Any]:
        alpha = O.Ordinal.of(alpha)
        return sorted((n.id for n in self.nodes.values() if n.level == alpha), key=_id_key)

    def leaves(self) -> List[Any]:
        return sorted((i for i, ch in self.children.items() if not ch), key=_id_key)

    def branches(self) -> List[Tuple[Any, ...]]:
        """Maximal chains, each as node ids from the root upward."""
        return [tuple(self.ancestors(leaf)) + (leaf,) for leaf in self.leaves()]

    def signature(self) -> frozenset:
        return frozenset((n.id, n.parent, n.level) for n in self.nodes.values())

    def with_nodes(self, nodes: Iterable[Node], support=None, pre_normal=None) -> "LeveledTree":
        nodes = list(nodes)
        return LeveledTree(nodes, self.support if support is None else support,
                           declared_height=None,
                           pre_normal=self.pre_normal if pre_normal is None else pre_normal)


def _id_key(i):
    return (0, i, "") if isinstance(i, int) else (1, 0, str(i))


def height(t: LeveledTree) -> Ordinal:
    """Least ordinal above every node level (0 for the empty tree)."""
    if not t.nodes:
        return O.ZERO
    return max(n.level for n in t.nodes.values()).successor()


def is_antichain(t: LeveledTree, ids: Iterable) -> Tuple[bool, Optional[Tuple[Any, Any]]]:
    ids = sorted(set(ids), key=_id_key)
    for i in ids:
        t.node(i)
    members = set(ids)
    for b in ids:
        for a in t.ancestors(b):
            if a in members:
                return False, (a, b)
    return True, None


def max_antichain(t: LeveledTree) -> List[Any]:
    """The childless nodes: a maximum antichain of a parent-pointer tree.

    Every chain from a node to a leaf meets the leaf set, so an antichain
    can be mapped injectively to leaves below its members.
    """
    return t.leaves()


# -- normality --------------------------------------------------------------

PROPERTIES = ("1", "2", "3", "4", "5", "6")


@dataclass
class NormalReport:
    results: Dict[str, bool]
    witnesses: Dict[str, Any] = field(default_factory=dict)
    detail: Dict[str, Any] = field(default_factory=dict)

    def ok(self, props: Iterable[str] = PROPERTIES) -> bool:
        return all(self.results[p] for p in props)

    def to_json(self) -> dict:
        return {"results": self.results,
                "witnesses": {k: _plain(v) for k, v in self.witnesses.items()},
                "detail": {k: _plain(v) for k, v in self.detail.items()}}


def _plain(v):
    if isinstance(v, Ordinal):
        return str(v)
    if isinstance(v, Fraction):
        return format_rat(v)
    if isinstance(v, dict):
        return {str(_plain(k)): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        return [_plain(x) for x in v]
    return v


def _cone_levels(t: LeveledTree) -> Dict[Any, set]:
    levels: Dict[Any, set] = {}
    for n in sorted(t.nodes.values(), key=lambda n: n.level, reverse=True):
        s = {n.level}
        for c in t.children[n.id]:
            s |= levels[c]
        levels[n.id] = s
    return levels


def _prop5_witness(t: LeveledTree):
    cone_levels = _cone_levels(t)
    for nid in sorted(t.nodes, key=_id_key):
        lvl = t.nodes[nid].level
        for s in t.support:
            if lvl < s and s not in cone_levels[nid]:
                return (nid, s)
    return None


def _prop6_witness(t: LeveledTree):
    for lam in t.support:
        if O.classify(lam) != O.LIMIT:
            continue
        by_parent: Dict[Any, List[Any]] = {}
        for nid in t.level(lam):
            by_parent.setdefault(t.nodes[nid].parent, []).append(nid)
        for parent, group in sorted(by_parent.items(), key=lambda kv: _id_key(kv[0]) if kv[0] is not None else (-1,)):
            if len(group) > 1:
                return (lam, parent, tuple(group))
    return None


def _prop4_witness(t: LeveledTree, succ_width: int):
    support = set(t.support)
    for nid in sorted(t.nodes, key=_id_key):
        n = t.nodes[nid]
        if not t.children[nid]:
            continue
        nxt = n.level.successor()
        if nxt not in support:
            continue
        width = sum(1 for c in t.children[nid] if t.nodes[c].level == nxt)
        if width < succ_width:
            return (nid, width)
    return None


def check_normal(t: LeveledTree, succ_width: int = 2) -> NormalReport:
    """Finitized normal-tree properties (1)-(6).

    (1) height equals the declared height; (2) unique root; (3) level sizes
    (always finite, reported); (4) a non-maximal node whose ordinal
    successor level is materialized has at least ``succ_width`` children
    there; (5) every node has a descendant at every materialized level above
    it; (6) no two nodes at a materialized
    limit level share their predecessor set.
    """
    res: Dict[str, bool] = {}
    wit: Dict[str, Any] = {}
    h = height(t)
    res["1"] = h == t.declared_height
    if not res["1"]:
        wit["1"] = (h, t.declared_height)
    res["2"] = len(t.roots) == 1
    if not res["2"]:
        wit["2"] = tuple(sorted(t.roots, key=_id_key))
    sizes = {s: len(t.level(s)) for s in t.support}
    res["3"] = True
    w4 = _prop4_witness(t, succ_width)
    res["4"] = w4 is None
    if w4:
        wit["4"] = w4
    w5 = _prop5_witness(t)
    res["5"] = w5 is None
    if w5:
        wit["5"] = w5
    w6 = _prop6_witness(t)
    res["6"] = w6 is None
    if w6:
        wit["6"] = w6
    return NormalReport(res, wit, {"level_sizes": sizes, "height": h})


# -- normalization ------------------------------------------------------------


@dataclass
class StageEntry:
    stage: str
    removed: List[Any] = field(default_factory=list)
    added: List[Any] = field(default_factory=list)
    note: str = ""

    @property
    def changed(self) -> bool:
        return bool(self.removed or self.added or self.note)

    def to_json(self) -> dict:
        return {"stage": self.stage, "removed": _plain(self.removed),
                "added": _plain(self.added), "note": self.note}


def _reparent(t: LeveledTree, keep: set) -> List[Node]:
    """Restrict to ``keep``, attaching each kept node to its nearest kept ancestor."""
    out = []
    for nid in sorted(keep, key=_id_key):
        n = t.nodes[nid]
        p = n.parent
        while p is not None and p not in keep:
            p = t.nodes[p].parent
        out.append(replace(n, parent=p))
    return out


def glue_id(chain: Sequence[Any], level: Ordinal) -> str:
    digest = hashlib.sha256(repr((tuple(chain), str(level))).encode()).hexdigest()[:12]
    return f"g{digest}"


def _stage_prune(t: LeveledTree) -> Tuple[LeveledTree, StageEntry]:
    """T1: drop nodes whose cone misses a materialized level above them."""
    entry = StageEntry("T1")
    cur = t
    while True:
        reach = _cone_levels(cur)
        drop = {nid for nid, n in cur.nodes.items()
                if any(s > n.level and s not in reach[nid] for s in cur.support)}
        if not drop:
            return cur, entry
        entry.removed.extend(sorted(drop, key=_id_key))
        keep = set(cur.nodes) - drop
        cur = cur.with_nodes(_reparent(cur, keep), pre_normal=True)


def _stage_glue(t: LeveledTree) -> Tuple[LeveledTree, StageEntry]:
    """T2: one node per chain at each limit level.

    Nodes at a limit level that share their predecessor chain are replaced
    by a single glue node ``a_C`` which inherits all of their children.
    """
    entry = StageEntry("T2")
    nodes = dict(t.nodes)
    children = {k: list(v) for k, v in t.children.items()}
    for lam in t.support:
        if O.classify(lam) != O.LIMIT:
            continue
        groups: Dict[Any, List[Any]] = {}
        for nid in sorted((i for i, n in nodes.items() if n.level == lam), key=_id_key):
            groups.setdefault(nodes[nid].parent, []).append(nid)
        for parent, group in groups.items():
            if len(group) < 2:
                continue
            chain = []
            p = parent
            while p is not None:
                chain.append(p)
                p = nodes[p].parent
            chain.reverse()
            gid = glue_id(chain, lam)
            nodes[gid] = Node(gid, parent, lam)
            children[gid] = []
            for m in group:
                for c in children.pop(m):
                    nodes[c] = replace(nodes[c], parent=gid)
                    children[gid].append(c)
                del nodes[m]
            entry.removed.extend(group)
            entry.added.append(gid)
    if not entry.changed:
        return t, entry
    return t.with_nodes(nodes.values(), pre_normal=True), entry


def _stage_branching(t: LeveledTree) -> Tuple[LeveledTree, StageEntry]:
    """T3: keep branching points (two or more children) and maximal nodes."""
    keep = {i for i, ch in t.children.items() if len(ch) != 1}
    entry = StageEntry("T3", removed=sorted(set(t.nodes) - keep, key=_id_key))
    if not entry.removed:
        return t, entry
    return t.with_nodes(_reparent(t, keep), pre_normal=True), entry


def _stage_limit_levels(t: LeveledTree) -> Tuple[LeveledTree, StageEntry]:
    """T4: keep limit levels, plus level 0 so a root survives."""
    support = [s for s in t.support if O.classify(s) == O.LIMIT or s == O.ZERO]
    keep = {i for i, n in t.nodes.items() if n.level in support}
    entry = StageEntry("T4", removed=sorted(set(t.nodes) - keep, key=_id_key))
    if len(support) != len(t.support):
        entry.note = "support reduced to " + ",".join(str(s) for s in support)
    if not entry.changed:
        return t, entry
    return LeveledTree(_reparent(t, keep), support, pre_normal=True), entry


def _stage_root(t: LeveledTree) -> Tuple[LeveledTree, StageEntry]:
    """T5: the cone above the least-id node at the least occupied level."""
    entry = StageEntry("T5")
    if len(t.roots) <= 1:
        return t, entry
    low = min(t.nodes[r].level for r in t.roots)
    root = sorted((r for r in t.roots if t.nodes[r].level == low), key=_id_key)[0]
    keep = set(t.cone(root))
    entry.removed = sorted(set(t.nodes) - keep, key=_id_key)
    return t.with_nodes(_reparent(t, keep)), entry


def normalize(t: LeveledTree, succ_width: int = 2, max_passes: int = 64):
    """Finitized normalization pipeline T1..T5.

    Each stage runs only when the property it establishes fails: T1 for
    (5), T2 for (6), T3+T4 for (4), T5 for (2).  Passes repeat until no
    stage fires, so the result passes (2), (4), (5) and (6) and is a fixed
    point.  Returns ``(tree, log)``; raises Degenerate if a stage empties
    the tree.
    """
    log: List[StageEntry] = []
    cur = t
    for _ in range(max_passes):
        fired = False
        steps = (
            ("T1", lambda x: _prop5_witness(x) is not None, _stage_prune),
            ("T2", lambda x: _prop6_witness(x) is not None, _stage_glue),
            ("T3", lambda x: _prop4_witness(x, succ_width) is not None, _stage_branching),
            ("T4", None, _stage_limit_levels),
            ("T5", lambda x: len(x.roots) > 1, _stage_root),
        )
        run_t4 = False
        for name, needed, stage in steps:
            if name == "T4":
                if not run_t4:
                    continue
            elif not needed(cur):
                continue
            cur, entry = stage(cur)
            if name == "T3":
                run_t4 = True
            if entry.changed:
                fired = True
                log.append(entry)
            if not cur.nodes:
                raise Degenerate(f"stage {name} emptied the tree", stage=name, log=log)
        if not fired:
            out = LeveledTree(cur.nodes.values(), cur.support, pre_normal=False)
            return out, log
    raise TreeError("normalization did not settle")


# -- serialization --------------------------------------------------------


def to_json(t: LeveledTree) -> dict:
    from . import ratseq

    nodes = []
    for nid in sorted(t.nodes, key=_id_key):
        n = t.nodes[nid]
        d = {"id": n.id, "parent": n.parent, "level": str(n.level)}
        if n.label is not None:
            d["label"] = format_rat(n.label)
        if isinstance(n.payload, ratseq.RatSeq):
            d["seq"] = ratseq.to_json(n.payload)
        elif n.payload is not None:
            d["payload"] = _plain(n.payload)
        nodes.append(d)
    return {"support": [str(s) for s in t.support], "nodes": nodes,
            "declared_height": str(t.declared_height), "pre_normal": t.pre_normal}


def from_json(data: dict) -> LeveledTree:
    from . import ratseq

    nodes = []
    for d in data["nodes"]:
        payload = d.get("payload")
        if "seq" in d:
            payload = ratseq.from_json(d["seq"])
        label = parse_rat(d["label"]) if d.get("label") is not None else None
        nodes.append(Node(d["id"], d.get("parent"), O.parse(str(d["level"])), label, payload))
    pre = data.get("pre_normal", False)
    roots = sum(1 for n in nodes if n.parent is None)
    return LeveledTree(nodes, [O.parse(str(s)) for s in data["support"]],
                       declared_height=data.get("declared_height"),
                       pre_normal=pre or roots > 1)


def load(path) -> LeveledTree:
    with open(path) as fh:
        return from_json(json.load(fh))


def dump(t: LeveledTree, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json(t), fh, indent=1)


def to_dot(t: LeveledTree, name: str = "tree") -> str:
    """Graphviz text with one rank per materialized level."""
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for s in t.support:
        ids = t.level(s)
        if ids:
            members = " ".join(f'"{i}";' for i in ids)
            lines.append(f'  {{ rank=same; "L{s}" [shape=plaintext, label="{s}"]; {members} }}')
    for s, nxt in zip(t.support, t.support[1:]):
        lines.append(f'  "L{s}" -> "L{nxt}" [style=invis];')
    for nid in sorted(t.nodes, key=_id_key):
        n = t.nodes[nid]
        label = f"{nid}" if n.label is None else f"{nid}\\n{format_rat(n.label)}"
        lines.append(f'  "{nid}" [label="{label}"];')
        if n.parent is not None:
            lines.append(f'  "{n.parent}" -> "{nid}" [dir=back];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- small constructors used by tests and the CLI -------------------------


def from_parents(parents: Dict[Any, Any], levels: Dict[Any, Any], support=None,
                 labels: Optional[Dict[Any, Any]] = None, declared_height=None) -> LeveledTree:
    labels = labels or {}
    nodes = [Node(i, parents[i], O.Ordinal.of(levels[i]),
                  parse_rat(labels[i]) if i in labels else None) for i in parents]
    roots = sum(1 for i in parents if parents[i] is None)
    return LeveledTree(nodes, support, declared_height=declared_height, pre_normal=roots > 1)


def complete_tree(branching: int, depth: int, labels: bool = True) -> LeveledTree:
    """Complete ``branching``-ary tree with levels 0..depth, sibling labels 0..b-1."""
    nodes = [Node(0, None, O.ZERO)]
    frontier = [0]
    nid = 1
    for d in range(1, depth + 1):
        nxt = []
        for p in frontier:
            for k in range(branching):
                nodes.append(Node(nid, p, O.Ordinal.of(d), Fraction(k) if labels else None))
                nxt.append(nid)
                nid += 1
        frontier = nxt
    return LeveledTree(nodes, range(depth + 1))


def path_tree(length: int) -> LeveledTree:
    return LeveledTree([Node(i, i - 1 if i else None, O.Ordinal.of(i)) for i in range(length)],
                       range(length))


def random_tree(rng, support=("0", "1", "2", "w", "w+1", "w+2", "w*2"), size: int = 24,
                extra_root_p: float = 0.1) -> LeveledTree:
    """Random finite forest over ``support``; parents are drawn from lower levels."""
    support = sorted({O.Ordinal.of(s) for s in support})
    nodes = [Node(0, None, support[0])]
    for nid in range(1, size):
        level = support[rng.randrange(1, len(support))]
        below = [n for n in nodes if n.level < level]
        if rng.random() < extra_root_p:
            nodes.append(Node(nid, None, level))
        else:
            nodes.append(Node(nid, rng.choice(below).id, level))
    return LeveledTree(nodes, support, pre_normal=True)
