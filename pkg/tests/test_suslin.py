import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from orderlab import suslin as S
from orderlab import tree as T
from orderlab.order import Interval, check_axioms, rationals
from orderlab.tree import LeveledTree, Node, complete_tree, from_parents, is_antichain, path_tree


def label_key(t, branch):
    return tuple(t.nodes[i].label or 0 for i in branch)


def test_compare_examples():
    L = S.tree_to_line(complete_tree(2, 1))
    a, b = (0, 1), (0, 2)
    assert S.compare_branches(L, a, a) == 0
    assert S.compare_branches(L, a, b) < 0 and S.compare_branches(L, b, a) > 0
    with pytest.raises(S.UnknownBranch):
        S.compare_branches(L, (0,), a)


def test_tree_to_line_examples():
    assert len(S.tree_to_line(LeveledTree([Node(0, None, T.O.ZERO)]))) == 1
    L = S.tree_to_line(complete_tree(2, 2))
    assert L.elements == [(0, 1, 3), (0, 1, 4), (0, 2, 5), (0, 2, 6)]
    assert len(S.tree_to_line(path_tree(4))) == 1


def test_labels_are_required():
    with pytest.raises(S.MissingLabels):
        S.tree_to_line(complete_tree(2, 1, labels=False))
    dup = from_parents({0: None, 1: 0, 2: 0}, {0: 0, 1: 1, 2: 1}, labels={1: 1, 2: 1})
    with pytest.raises(S.MissingLabels):
        S.tree_to_line(dup)


def test_labels_order_rather_than_ids():
    t = from_parents({0: None, 1: 0, 2: 0}, {0: 0, 1: 1, 2: 1}, labels={1: "5/2", 2: "-3"})
    assert S.tree_to_line(t).elements == [(0, 2), (0, 1)]


def test_prefix_branch_goes_first():
    # a shorter maximal branch that shares a prefix cannot occur, so use the raw rule
    L = S.tree_to_line(complete_tree(2, 1))
    assert L._cmp((0, 1), (0, 1, 9)) < 0


def test_interval_examples():
    t = complete_tree(2, 2)
    L = S.tree_to_line(t)
    assert S.interval_of_node(L, 0).branches == tuple(L.elements)
    i1, i2 = S.interval_of_node(L, 1), S.interval_of_node(L, 2)
    assert not set(i1.branches) & set(i2.branches)
    i3 = S.interval_of_node(L, 3)
    assert set(i3.branches) <= set(i1.branches)
    assert i1.open == Interval(None, (0, 2, 5))
    with pytest.raises(T.UnknownId):
        S.interval_of_node(L, 99)


def _mixed_tree():
    # root splits into a leaf-bearing side (branches of length 2) and a deep side
    parents = {0: None, 1: 0, 2: 0, 3: 0, 4: 3, 5: 4, 6: 4}
    levels = {0: 0, 1: 1, 2: 1, 3: 1, 4: 2, 5: 3, 6: 3}
    labels = {1: 0, 2: 1, 3: 2, 5: 0, 6: 1}
    return from_parents(parents, levels, labels=labels)


def test_non_separability_examples():
    L = S.tree_to_line(complete_tree(2, 2))
    assert S.non_separability_witness(L, []) == 0
    with pytest.raises(S.NoWitness):
        S.non_separability_witness(L, L.elements)
    M = S.tree_to_line(_mixed_tree())
    C = [(0, 1), (0, 2)]
    x = S.non_separability_witness(M, C)
    assert M.tree.nodes[x].level == 3
    assert not set(S.interval_of_node(M, x).branches) & set(C)


def test_line_to_tree_examples():
    assert len(S.line_to_tree(rationals(), S.HonestRationalOracle(rationals()), 0).intervals) == 0
    t = complete_tree(3, 3)
    L = S.tree_to_line(t)
    oracle = S.BranchLineOracle(L)
    res = S.line_to_tree(L, oracle, 4)
    assert len(res.intervals) == 4
    assert S.check_nested_or_disjoint(L, res).ok
    assert S.check_round_trip(L, res, oracle.chosen).ok


def test_honest_oracle_on_rationals_reports_density():
    Q = rationals()
    res = S.line_to_tree(Q, S.HonestRationalOracle(Q, 64), 10_000)
    assert res.dense is not None
    assert res.dense.stage == len(res.intervals)
    assert S.check_nested_or_disjoint(Q, res).ok
    # the reported stage depends on the window; a wider one lasts longer
    wide = S.line_to_tree(Q, S.HonestRationalOracle(Q, 256), 10_000)
    assert wide.dense.stage > res.dense.stage


def test_unsound_oracle_is_rejected():
    class Liar(S.GapOracle):
        def __call__(self, C):
            return Interval(F(0), F(1), closed=True)

    with pytest.raises(S.OracleUnsound):
        S.line_to_tree(rationals(), Liar(), 2)


def test_chain_gap_family_is_disjoint():
    Q = rationals()
    res = S.line_to_tree(Q, S.HonestRationalOracle(Q, 64), 10_000)
    deepest = max(res.tree.nodes, key=lambda k: res.tree.nodes[k].level)
    chain = res.tree.ancestors(deepest) + [deepest]
    family, rep = S.chain_gap_family(Q, res, chain)
    assert rep.ok and len(family) == len(chain) - 1


@pytest.mark.parametrize("seed", range(8))
def test_random_trees_exhaustive(seed):
    t = S.random_labeled_tree(random.Random(seed))
    L = S.tree_to_line(t)
    assert 2 <= len(L) <= 200
    # lexicographic order against tuple order on label paths
    assert L.elements == sorted(L.elements, key=lambda b: label_key(t, b))
    assert check_axioms(L.order, len(L)).ok
    assert S.check_total_order(L).ok
    # disjointness of branch sets against incomparability, all node pairs
    sets = {x: set(S.interval_of_node(L, x).branches) for x in t.nodes}
    for x, y in combinations(t.nodes, 2):
        assert (not sets[x] & sets[y]) == (not t.comparable(x, y))
    assert S.check_disjointness(L).ok and S.check_intervals(L).ok
    leaves = t.leaves()
    assert S.check_ccc_transfer(L, leaves).ok


def test_ccc_transfer_rejects_comparable_nodes():
    L = S.tree_to_line(complete_tree(2, 2))
    assert not is_antichain(L.tree, [1, 3])[0]
    assert not S.check_ccc_transfer(L, [1, 3]).ok


def test_line_json_round_trip():
    L = S.tree_to_line(complete_tree(2, 2))
    data = S.line_to_json(L)
    assert data["branches"][0] == {"nodes": [0, 1, 3], "labels": [None, "0", "0"]}
    assert S.line_from_json(data).elements == L.elements
    data["branches"].reverse()
    with pytest.raises(S.SuslinError):
        S.line_from_json(data)
