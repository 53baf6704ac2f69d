import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from orderlab.backforth import (BACKWARD, FORWARD, ExtensionStuck, OrderIso, PartialIso, as_order_iso,
                                back_and_forth, embed_into_rationals, extend_to_completion,
                                is_order_preserving, write_transcript)
from orderlab.order import (DLO_NAMES, BudgetExhausted, below_cut, builtin, finite_order, omega,
                            point_cut, random_finite_order, rationals, sqrt_cut)


def test_zero_rounds_is_empty():
    iso = back_and_forth(rationals(), builtin("dyadic"), 0)
    assert iso.forward == {} and iso.transcript == []


def test_first_rounds_against_hand_replay():
    Q, D = rationals(), builtin("dyadic")
    assert Q.prefix(3) == [0, 1, -1]
    assert D.prefix(3) == [0, F(1, 2), F(-1, 2)]
    iso = back_and_forth(Q, D, 3)
    # round 0: f(a0) = b0; round 1 pulls back b1 = 1/2; round 2 defines f(1)
    assert iso.transcript[0].dir == FORWARD and iso.forward[0] == 0
    assert iso.transcript[1].dir == BACKWARD
    assert D.element(iso.forward[1]) == F(1, 2)


def _hand_back_and_forth(A, B, rounds, budget=100_000):
    """Straight transcription of the alternation, with exhaustive scans."""
    f = {}
    for r in range(rounds):
        fwd = r % 2 == 0
        src, dst = (A, B) if fwd else (B, A)
        mine = f if fwd else {v: k for k, v in f.items()}
        i = next(k for k in range(budget) if k not in mine)
        theirs = set(mine.values())
        for m in range(budget):
            if m in theirs:
                continue
            ok = all((src.compare(s, i) < 0) == (dst.compare(t, m) < 0) for s, t in mine.items())
            if ok:
                break
        if fwd:
            f[i] = m
        else:
            f[m] = i
    return f


@pytest.mark.parametrize("a,b", [("q", "dyadic"), ("unit-q", "q-pos"), ("q-nonzero", "q")])
def test_matches_naive_alternation(a, b):
    A, B = builtin(a), builtin(b)
    assert back_and_forth(A, B, 20).forward == _hand_back_and_forth(A, B, 20)


@pytest.mark.parametrize("a", DLO_NAMES)
@pytest.mark.parametrize("b", DLO_NAMES)
def test_coverage_and_preservation_every_round(a, b):
    A, B = builtin(a), builtin(b)
    for k in range(1, 9):
        iso = back_and_forth(A, B, 2 * k)
        assert set(range(k)) <= set(iso.forward)
        assert set(range(k)) <= set(iso.forward.values())
        assert is_order_preserving(A, B, iso) is None


def test_transcript_is_deterministic_and_replays(tmp_path):
    A, B = builtin("q"), builtin("unit-q")
    one, two = back_and_forth(A, B, 30), back_and_forth(A, B, 30)
    assert one.transcript == two.transcript
    path = tmp_path / "t.json"
    write_transcript(one, path)
    data = json.loads(path.read_text())
    assert set(data[0]) == {"round", "dir", "source_index", "target_index"}
    assert PartialIso.replay(data).forward == one.forward


def test_non_dense_input_gets_stuck():
    with pytest.raises(ExtensionStuck) as exc:
        back_and_forth(omega(), rationals(), 10, budget=500)
    assert exc.value.budget == 500


def test_order_preservation_detects_a_bad_map():
    Q = rationals()
    bad = PartialIso({0: 0, 1: 2})  # 0 < 1 but -1 < 0
    assert is_order_preserving(Q, Q, bad) == (0, 1)
    assert is_order_preserving(Q, Q, PartialIso({0: 1, 1: 1})) == (0, 1)


# -- embedding ----------------------------------------------------------------

def test_embedding_examples():
    c_a_b = finite_order(["a", "b", "c"], compare_values=lambda x, y: _rank(x) - _rank(y))
    assert embed_into_rationals(c_a_b, 3) == {0: 0, 1: 1, 2: -1}
    assert embed_into_rationals(finite_order(["x"]), 1) == {0: 0}
    assert embed_into_rationals(omega(), 3) == {0: 0, 1: 1, 2: 2}


def _rank(x):
    return {"c": 0, "a": 1, "b": 2}[x]


def test_embedding_midpoint_rule():
    # 0, 10, 5 -> 0, 1, 1/2 ; then 7 sits between 5 and 10
    emb = embed_into_rationals(finite_order([0, 10, 5, 7]), 4)
    assert emb == {0: 0, 1: 1, 2: F(1, 2), 3: F(3, 4)}


@settings(max_examples=60)
@given(st.lists(st.integers(-10**6, 10**6), unique=True, max_size=60))
def test_embedding_preserves_all_pairs(values):
    emb = embed_into_rationals(finite_order(values), len(values))
    for i in range(len(values)):
        for j in range(len(values)):
            assert (values[i] < values[j]) == (emb[i] < emb[j])


def test_embedding_of_omega_two_prefix():
    P = builtin("omega2")
    emb = embed_into_rationals(P, 200)
    for i in range(200):
        for j in range(i + 1, 200):
            assert (P.compare(i, j) < 0) == (emb[i] < emb[j])


# -- completion ---------------------------------------------------------------

SAMPLES = [F(k, 7) for k in range(-40, 41)] + [F(141, 100), F(142, 100), F(1414, 1000), F(1415, 1000)]


def test_identity_extension_keeps_sqrt2():
    Q = rationals()
    I = OrderIso(lambda p: p, lambda p: p, Q, Q, name="id")
    ext, cut = extend_to_completion(I, sqrt_cut(2)), sqrt_cut(2)
    assert all(ext(v) == cut(v) for v in SAMPLES)


def test_doubling_sends_cut_below_one_to_cut_below_two():
    Q = rationals()
    exact = extend_to_completion(OrderIso(lambda p: 2 * p, lambda p: p / 2, Q, Q), below_cut(F(1)))
    assert all(exact(v) == (v < 2) for v in SAMPLES)
    # without an inverse, membership can only be confirmed by searching the source
    lazy = extend_to_completion(OrderIso(lambda p: 2 * p, None, Q, Q), below_cut(F(1)), budget=100_000)
    assert all(lazy(v) for v in SAMPLES if v < 2)
    stingy = extend_to_completion(OrderIso(lambda p: 2 * p, None, Q, Q), below_cut(F(1)), budget=2000)
    for v in (F(2), F(5, 2)):
        with pytest.raises(BudgetExhausted):
            stingy(v)


def test_point_cut_agreement_for_back_and_forth_map():
    A, B = builtin("q"), builtin("dyadic")
    iso = back_and_forth(A, B, 40)
    I = as_order_iso(iso, A, B)
    rng_vals = [B.element(j) for j in iso.forward.values()]
    for i in iso.forward:
        p = A.element(i)
        ext = extend_to_completion(I, point_cut(p))
        assert all(ext(v) == (v <= I(p)) for v in rng_vals)


def test_as_order_iso_refuses_points_it_has_not_computed():
    A, B = builtin("q"), builtin("dyadic")
    I = as_order_iso(back_and_forth(A, B, 4), A, B)
    with pytest.raises(BudgetExhausted):
        I(F(12345, 7))


def test_monotone_on_nested_cuts():
    Q = rationals()
    I = OrderIso(lambda p: 3 * p + 1, lambda p: (p - 1) / 3, Q, Q)
    rng = random.Random(5)
    for _ in range(100):
        n1, n2 = sorted(rng.sample(range(1, 20), 2))
        x, y = extend_to_completion(I, sqrt_cut(n1)), extend_to_completion(I, sqrt_cut(n2))
        assert all(y(v) for v in SAMPLES if x(v))


def test_random_finite_orders_embed():
    rng = random.Random(11)
    for _ in range(20):
        P = random_finite_order(50, rng)
        emb = embed_into_rationals(P, 50)
        assert sorted(range(50), key=emb.__getitem__) == sorted(range(50), key=P.element)
