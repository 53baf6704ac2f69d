import json
from fractions import Fraction as F

import pytest

from orderlab import aronszajn as A
from orderlab import ratseq as R
from orderlab.ordinal import OMEGA, ZERO, parse
from orderlab.tree import is_antichain

SMALL = ["0", "1", "2", "w", "w+1", "w*2"]
GRID4 = [0, 1, 2, 3]


@pytest.fixture(scope="module")
def small():
    return A.build(SMALL, GRID4, A.FULL)


def brute_condition1(b):
    """Every (x at beta, grid q > sup x) has some y at alpha > beta extending x with sup y <= q."""
    for i, alpha in enumerate(b.support):
        ys = [b.seq(y) for y in b.level(alpha)]
        for beta in b.support[:i]:
            for x in b.level(beta):
                sx = b.seq(x)
                for q in b.grid:
                    if q <= b.sup_value(x):
                        continue
                    if not any(y.sup <= q and R.is_initial_segment(sx, y) for y in ys):
                        return (beta, x, q, alpha)
    return None


def brute_downward_closure(b):
    for y in b.node_ids():
        s = b.seq(y)
        for beta in b.support:
            if beta < s.length and b.find(R.restrict(s, beta)) is None:
                return (y, beta)
    return None


def test_only_root_level():
    b = A.build(["0"], GRID4)
    assert b.levels == {ZERO: [0]} and b.seq(0).is_empty
    assert A.check_condition1(b).ok


def test_first_level_values():
    b = A.build(["0", "1"], GRID4)
    assert sorted(b.seq(n).sup for n in b.level(1)) == [F(-1, 2), 0, F(1, 2), 1]


def test_limit_level_invariants():
    b = A.build(["0", "1", "w"], GRID4)
    level1 = [b.seq(n) for n in b.level(1)]
    for n in b.level(OMEGA):
        y = b.seq(n)
        assert y.length == OMEGA
        assert any(y.sup <= q for q in b.grid)
        assert any(R.equal(R.restrict(y, 1), x) for x in level1)


def test_small_build_passes_every_check(small):
    for rep in A.check_all(small):
        assert rep.ok, rep
    assert brute_condition1(small) is None
    assert brute_downward_closure(small) is None


def test_lean_build_matches_brute_force():
    b = A.build(["0", "1", "2", "3", "w", "w+1", "w+2", "w*2"], range(6), A.LEAN)
    assert all(r.ok for r in A.check_all(b))
    assert brute_condition1(b) is None
    assert brute_downward_closure(b) is None


def test_deleting_a_node_breaks_condition1(small):
    top = small.level(parse("w*2"))
    broken = small.remove(top[0])
    rep = A.check_condition1(broken)
    assert not rep.ok
    beta, x, q, alpha = rep.witness
    assert alpha == "w*2"
    assert brute_condition1(broken) is not None


def test_deleting_an_inner_node_breaks_downward_closure(small):
    mid = small.level(OMEGA)[0]
    broken = small.remove(mid)
    assert not A.check_downward_closure(broken).ok
    assert brute_downward_closure(broken) is not None


def test_specializing_map(small):
    assert A.specializing_map(small, 0) == -1
    n = small.find(R.extend(R.EMPTY, F(1, 2)))
    assert A.specializing_map(small, n) == F(1, 2)
    with pytest.raises(A.UnknownNode):
        A.specializing_map(small, 10 ** 9)
    tree = small.to_tree()
    for nid in small.node_ids():
        for anc in tree.ancestors(nid):
            assert A.specializing_map(small, anc) < A.specializing_map(small, nid)


def test_fibers_are_antichains(small):
    assert A.fiber_antichain(small, F(7, 3)) == []
    lvl1 = [A.specializing_map(small, n) for n in small.level(1)]
    assert len(set(lvl1)) == len(lvl1)
    tree = small.to_tree()
    fs = A.fibers(small)
    assert sum(len(v) for v in fs.values()) == len(small)
    assert all(is_antichain(tree, ids)[0] for ids in fs.values())
    assert any(len(v) > 1 for v in fs.values())


def test_bounds_hold(small):
    top = small.support[-1]
    for n in small.node_ids():
        s = small.seq(n)
        assert s.length <= top
        assert s.is_empty or s.sup <= small.grid[-1]


def test_bad_inputs():
    with pytest.raises(A.SupportGap):
        A.build(["1"], GRID4)
    with pytest.raises(A.SupportGap):
        A.build(["0", "2"], GRID4)
    with pytest.raises(A.GridTooCoarse):
        A.build(["0", "1"], [0])
    with pytest.raises(ValueError):
        A.build(["0"], GRID4, "bushy")


def test_every_node_keeps_a_grid_point_above_it():
    # values stay strictly below their target, so levels never run dry
    b = A.build([str(k) for k in range(40)] + ["w", "w+1"], [0, 1], A.LEAN)
    assert all(b.sup_value(n) < b.grid[-1] for n in b.node_ids())
    assert A.check_condition1(b).ok


def test_json_round_trip(small, tmp_path):
    path = tmp_path / "a.json"
    A.dump(small, path)
    back = A.load(path)
    assert back.node_ids() == small.node_ids()
    assert all(R.equal(back.seq(n), small.seq(n)) for n in small.node_ids())
    assert all(r.ok for r in A.check_all(back))


def test_tampered_parent_is_recomputed(small, tmp_path):
    data = A.to_json(small)
    victim = next(d for d in data["nodes"] if d["level"] == "2")
    true_parent = victim["parent"]
    victim["parent"] = next(d["id"] for d in data["nodes"] if d["level"] == "1" and d["id"] != true_parent)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    back = A.load(path)
    assert back.parent(victim["id"]) == true_parent
    assert all(r.ok for r in A.check_all(back))


def test_missing_restriction_in_file_is_reported(small, tmp_path):
    data = A.to_json(small)
    gone = next(d for d in data["nodes"] if d["level"] == "w")
    data["nodes"] = [d for d in data["nodes"] if d["id"] != gone["id"]]
    path = tmp_path / "gap.json"
    path.write_text(json.dumps(data))
    assert not A.check_downward_closure(A.load(path)).ok
