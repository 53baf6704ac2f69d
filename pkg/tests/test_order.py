import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from orderlab.order import (BUILTIN, BudgetExhausted, EmptyInterval, Interval, builtin, calkin_wilf,
                            check_axioms, check_dense_unbounded, dump_finite_order, finite_order,
                            load_finite_order, point_cut, random_finite_order, rationals,
                            relation_order, sqrt_cut, verify_disjoint_family)


def test_rationals_pass_axioms():
    assert check_axioms(rationals(), 50).ok


def test_three_cycle_gives_witness():
    cyc = relation_order(["a0", "a1", "a2"], [[0, 1, "<"], [1, 2, "<"], [2, 0, "<"]])
    rep = check_axioms(cyc, 3)
    assert not rep.ok and rep.check == "transitivity"
    assert sorted(rep.witness) == [0, 1, 2]


def test_empty_prefix_passes():
    assert check_axioms(rationals(), 0).ok


def test_missing_relation_is_a_totality_failure():
    rep = check_axioms(relation_order(["a", "b"], []), 2)
    assert not rep.ok and rep.check == "totality"


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtin_presentations_are_linear(name):
    assert check_axioms(builtin(name), 200).ok


def test_random_finite_orders_are_linear():
    rng = random.Random(1)
    for _ in range(5):
        assert check_axioms(random_finite_order(200, rng), 200).ok


def test_calkin_wilf_enumerates_distinct_positive_rationals():
    seen = [calkin_wilf(n) for n in range(1, 500)]
    assert len(set(seen)) == len(seen)
    assert all(q > 0 for q in seen)
    # every reduced fraction with small parts shows up early
    assert {F(a, b) for a in range(1, 6) for b in range(1, 6)} <= set(seen)


def test_q_enumeration_starts_as_documented():
    Q = rationals()
    assert Q.prefix(3) == [0, 1, -1]


def test_density_on_q():
    assert check_dense_unbounded(rationals(), 20, 10_000).ok


def test_omega_is_not_witnessed_dense():
    with pytest.raises(BudgetExhausted) as exc:
        check_dense_unbounded(builtin("omega"), 5, 10_000)
    assert exc.value.requirement == ("dense", 0, 1)


def test_single_element_checks_only_unboundedness():
    assert check_dense_unbounded(rationals(), 1, 100).ok
    # omega has nothing below 0
    with pytest.raises(BudgetExhausted) as exc:
        check_dense_unbounded(builtin("omega"), 1, 100)
    assert exc.value.requirement == ("below", 0)


@pytest.mark.parametrize("name", ["q", "dyadic", "unit-q", "q-nonzero", "q-pos"])
def test_density_report_monotone_in_budget(name):
    P = builtin(name)
    n = 6
    budgets = [4, 8, 16, 64, 256, 1024]
    passed = []
    for b in budgets:
        try:
            passed.append(check_dense_unbounded(P, n, b).ok)
        except BudgetExhausted:
            passed.append(False)
    first = passed.index(True)
    assert all(passed[first:])


def test_disjoint_family_examples():
    Q = rationals()
    fam = [Interval(F(0), F(1)), Interval(F(1), F(2)), Interval(F(2), F(3))]
    assert verify_disjoint_family(Q, fam).ok
    rep = verify_disjoint_family(Q, [Interval(F(0), F(2)), Interval(F(1), F(3))])
    assert not rep.ok and rep.witness[2] == F(3, 2)
    assert verify_disjoint_family(Q, []).ok


def test_disjoint_family_rejects_empty_interval():
    with pytest.raises(EmptyInterval):
        verify_disjoint_family(rationals(), [Interval(F(1), F(1))])


def test_closed_intervals_touching_at_an_endpoint_overlap():
    Q = rationals()
    rep = verify_disjoint_family(Q, [Interval(F(0), F(1), True), Interval(F(1), F(2), True)])
    assert not rep.ok and rep.witness[2] == 1
    rep = verify_disjoint_family(Q, [Interval(F(0), F(1), True), Interval(F(1), F(2))])
    assert rep.ok


endpoint = st.integers(0, 6)


@st.composite
def intervals(draw):
    a = draw(endpoint)
    b = draw(st.integers(a + 1, 7))
    lo = draw(st.one_of(st.none(), st.just(a)))
    hi = draw(st.one_of(st.none(), st.just(b)))
    closed = draw(st.booleans()) and lo is not None and hi is not None
    return Interval(None if lo is None else F(lo), None if hi is None else F(hi), closed)


def _brute_overlap(Q, fam):
    # open overlaps between integer endpoints always contain a quarter point
    grid = [F(k, 4) for k in range(-8, 40)]
    for i, a in enumerate(fam):
        for b in fam[i + 1:]:
            if any(a.contains(Q, v) and b.contains(Q, v) for v in grid):
                return True
    return False


@given(st.lists(intervals(), max_size=6), st.randoms(use_true_random=False))
def test_disjoint_family_matches_brute_force_and_ignores_order(fam, rnd):
    Q = rationals()
    rep = verify_disjoint_family(Q, fam)
    assert rep.ok == (not _brute_overlap(Q, fam))
    if not rep.ok:
        a, b, w = rep.witness
        assert a.contains(Q, w) and b.contains(Q, w)
    shuffled = list(fam)
    rnd.shuffle(shuffled)
    rep2 = verify_disjoint_family(Q, shuffled)
    assert rep2.ok == rep.ok and rep2.witness == rep.witness


def test_finite_order_fixture_round_trip(tmp_path):
    P = finite_order([3, 1, 2])
    data = dump_finite_order(P, ["a", "b", "c"])
    path = tmp_path / "order.json"
    path.write_text(json.dumps(data))
    R = load_finite_order(path)
    assert R.names == ["a", "b", "c"]
    assert all(R.compare(i, j) == P.compare(i, j) for i in range(3) for j in range(3))


def test_cuts_are_downward_closed_on_samples():
    rng = random.Random(0)
    Q = rationals()
    vals = Q.prefix(300)
    for cut in (sqrt_cut(2), point_cut(F(1, 3))):
        for _ in range(500):
            x, y = rng.sample(vals, 2)
            if x < y and cut(y):
                assert cut(x)
