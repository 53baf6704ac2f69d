"""Seeded end-to-end verification suites, shared by the CLI and the test suite.

Each suite returns a list of ``Report``; a suite passes when all of them do.
Everything is exact and determined by the seed, so reports are reproducible
byte for byte.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Dict, List

from . import aronszajn as A
from . import ordinal as O
from . import ratseq as R
from . import suslin as S
from . import tree as T
from .backforth import (ExtensionStuck, as_order_iso, back_and_forth, embed_into_rationals,
                        extend_to_completion, is_order_preserving)
from .order import (DLO_NAMES, Report, below_cut, builtin, omega, omega_two, point_cut,
                    random_finite_order, rationals, sqrt_cut)

DLO_PAIRS = [(a, b) for i, a in enumerate(DLO_NAMES) for b in DLO_NAMES[i:]]

ARONSZAJN_SUPPORT = [str(k) for k in range(11)] + ["w"] + [f"w+{k}" for k in range(1, 6)] + ["w*2"]
ARONSZAJN_GRID = list(range(16))


# -- back-and-forth -----------------------------------------------------------


def back_and_forth_suite(seed: int = 0, rounds: int = 64, cover: int = 32, pairs=None) -> List[Report]:
    out = []
    for a, b in pairs or DLO_PAIRS:
        P, Q = builtin(a), builtin(b)
        try:
            iso = back_and_forth(P, Q, rounds)
        except ExtensionStuck as exc:
            out.append(Report(False, f"back-and-forth {a}/{b}", (exc.round_no, exc.index)))
            continue
        bad = is_order_preserving(P, Q, iso)
        dom, rng_ = set(iso.forward), set(iso.forward.values())
        covered = set(range(cover)) <= dom and set(range(cover)) <= rng_
        out.append(Report(bad is None and covered, f"back-and-forth {a}/{b}", bad,
                          {"domain": len(dom), "covers_prefix": covered}))
    return out


# -- embedding into Q ---------------------------------------------------------


def _embedding_report(P, n: int, name: str) -> Report:
    n = P.bound(n)
    img = embed_into_rationals(P, n)
    if len(set(img.values())) != n:
        return Report(False, name, None, {"reason": "not injective"})
    # ranks of the images turn each exact pair test into an int comparison
    rank = [0] * n
    for r, i in enumerate(sorted(range(n), key=img.__getitem__)):
        rank[i] = r
    vals = [P.element(i) for i in range(n)]
    cv = P.compare_values
    for i in range(n):
        vi, ri = vals[i], rank[i]
        for j in range(i + 1, n):
            if (cv(vi, vals[j]) < 0) != (ri < rank[j]):
                return Report(False, name, (i, j))
    return Report(True, name, detail={"n": n, "pairs": n * (n - 1) // 2})


def embedding_suite(seed: int = 0, orders: int = 200, max_size: int = 200) -> List[Report]:
    rng = random.Random(seed)
    reports = []
    for k in range(orders):
        n = rng.randint(1, max_size)
        reports.append(_embedding_report(random_finite_order(n, rng), n, f"embed random#{k}"))
    failed = [r for r in reports if not r.ok]
    out = [Report(not failed, "embed random orders", failed[0].witness if failed else None,
                  {"orders": orders, "pairs": sum(r.detail.get("pairs", 0) for r in reports)})]
    out.append(_embedding_report(omega(), 200, "embed omega"))
    out.append(_embedding_report(omega_two(), 200, "embed omega*2"))
    return out


# -- completion extension -----------------------------------------------------


def completion_suite(seed: int = 0, rounds: int = 64, samples: int = 100, targets: int = 24) -> List[Report]:
    rng = random.Random(seed)
    out = []
    for a, b in DLO_PAIRS:
        P, Q = builtin(a), builtin(b)
        iso = back_and_forth(P, Q, rounds)
        I = as_order_iso(iso, P, Q)
        dom = [P.element(i) for i in sorted(iso.forward)]
        rng_vals = [Q.element(j) for j in sorted(iso.forward.values())]
        cp, cq = P.compare_values, Q.compare_values
        failure = None
        # I*(cut of p) agrees with the cut of I(p)
        for p in (rng.choice(dom) for _ in range(samples)):
            ext = extend_to_completion(I, point_cut(p, cp))
            ip = I(p)
            for v in rng.sample(rng_vals, min(targets, len(rng_vals))):
                if ext(v) != (cq(v, ip) <= 0):
                    failure = ("agreement", p, v)
                    break
            if failure:
                break
        # x <= y as lower sets gives I*(x) <= I*(y)
        checked = 0
        for _ in range(samples if failure is None else 0):
            kind = rng.choice(["points", "strict", "sqrt"])
            if kind == "points":
                p1, p2 = sorted((rng.choice(dom), rng.choice(dom)))
                x, y = point_cut(p1, cp), point_cut(p2, cp)
            elif kind == "strict":
                p = rng.choice(dom)
                x, y = below_cut(p, cp), point_cut(p, cp)
            else:
                n1, n2 = sorted((rng.randint(1, 9), rng.randint(1, 9)))
                x, y = sqrt_cut(n1), sqrt_cut(n2)
            if any(x(p) and not y(p) for p in dom):
                failure = ("sample not nested", x.label, y.label)
                break
            ex, ey = extend_to_completion(I, x), extend_to_completion(I, y)
            for v in rng.sample(rng_vals, min(targets, len(rng_vals))):
                checked += 1
                if ex(v) and not ey(v):
                    failure = ("monotonicity", x.label, y.label, v)
                    break
            if failure:
                break
        out.append(Report(failure is None, f"completion {a}/{b}", failure,
                          {"points": samples, "cut_pairs": samples, "memberships": checked}))
    return out


# -- transfinite rational sequences ---------------------------------------------


def random_ordinal(rng: random.Random, degree: int, coeff: int = 3) -> O.Ordinal:
    """Random ordinal below w^(degree+1)."""
    return O.Ordinal((e, c) for e in range(degree, -1, -1) if (c := rng.randint(0, coeff)))


def _random_below(rng, s: R.RatSeq) -> O.Ordinal:
    offsets, off = [], O.ZERO
    for seg in s.segments:
        offsets.append(off)
        off = O.add(off, seg.length)
    k = rng.randrange(len(s.segments))
    seg = s.segments[k]
    if isinstance(seg, R.Atom):
        return offsets[k]
    local = O.ZERO
    while True:
        local = random_ordinal(rng, seg.exponent - 1)
        if local < seg.length:
            break
    return O.add(offsets[k], local)


def random_ratseq(rng: random.Random, pieces: int = 4) -> R.RatSeq:
    segs: list = []
    sup, attained = Fraction(rng.randint(-8, 8)), True
    for _ in range(rng.randint(1, pieces)):
        if rng.random() < 0.4:
            r = sup if (not attained and rng.random() < 0.3) else sup + Fraction(rng.randint(1, 5), rng.randint(1, 4))
            segs.append(R.Atom(r))
            sup, attained = r, True
        else:
            alpha = random_ordinal(rng, 2)
            if not alpha:
                continue
            a = sup + Fraction(rng.randint(0, 3), 2)
            b = a + Fraction(rng.randint(1, 6), rng.randint(1, 3))
            segs.extend(R.canonical(alpha, a, b).segments)
            sup, attained = b, alpha.terms[-1][0] == 0
    if not segs:
        return random_ratseq(rng, pieces)
    return R.RatSeq(segs)


def ratseq_suite(seed: int = 0, checks: int = 1000, canon: int = 200) -> List[Report]:
    rng = random.Random(seed)
    mono = coh = None
    for _ in range(checks):
        s = random_ratseq(rng)
        i, j = _random_below(rng, s), _random_below(rng, s)
        if i > j:
            i, j = j, i
        vi, vj = R.at(s, i), R.at(s, j)
        if (i == j and vi != vj) or (i < j and not vi < vj):
            mono = mono or (R.to_json(s), str(i), str(j))
        beta = rng.choice([_random_below(rng, s), s.length])
        r = R.restrict(s, beta)
        if r.length != beta or not R.is_initial_segment(r, s):
            coh = coh or (R.to_json(s), str(beta))
        elif beta:
            k = _random_below(rng, r)
            if R.at(r, k) != R.at(s, k):
                coh = coh or (R.to_json(s), str(beta), str(k))
    bad = None
    for _ in range(canon):
        alpha = random_ordinal(rng, 2)
        a = Fraction(rng.randint(-20, 20), rng.randint(1, 5))
        b = a + Fraction(rng.randint(1, 20), rng.randint(1, 5))
        c = R.canonical(alpha, a, b)
        ok = c.length == alpha and (c.is_empty or (c.sup <= b and R.at(c, O.ZERO) > a))
        if not ok:
            bad = bad or (str(alpha), a, b)
    return [Report(mono is None, "ratseq monotone", mono, {"checks": checks}),
            Report(coh is None, "ratseq restrict/at", coh, {"checks": checks}),
            Report(bad is None, "ratseq canonical", bad, {"checks": canon})]


# -- Aronszajn build --------------------------------------------------------------


def aronszajn_suite(seed: int = 0, support=None, grid=None, branching: str = A.LEAN) -> List[Report]:
    b = A.build(support or ARONSZAJN_SUPPORT, grid or ARONSZAJN_GRID, branching=branching)
    return A.check_all(b)


# -- normalization --------------------------------------------------------------


def normalization_suite(seed: int = 0, trees: int = 50) -> List[Report]:
    rng = random.Random(seed)
    done = skipped = 0
    props = idem = None
    while done < trees:
        t = T.random_tree(rng, size=rng.randint(6, 40))
        try:
            out, _ = T.normalize(t)
        except T.Degenerate:
            skipped += 1
            continue
        done += 1
        rep = T.check_normal(out)
        if not rep.ok(("2", "5", "6")) and props is None:
            props = (done, rep.to_json()["results"])
        again, log = T.normalize(out)
        if (log or again.signature() != out.signature()) and idem is None:
            idem = (done, [e.stage for e in log])
    normal = [T.complete_tree(b, d) for b in (2, 3) for d in (1, 2, 3)]
    noisy = None
    for k, t in enumerate(normal):
        if not T.check_normal(t).ok() and noisy is None:
            noisy = (k, "input not normal")
        _, log = T.normalize(t)
        if log and noisy is None:
            noisy = (k, [e.stage for e in log])
    return [Report(props is None, "normalize properties 2,5,6", props, {"trees": trees, "degenerate_skipped": skipped}),
            Report(idem is None, "normalize idempotent", idem, {"trees": trees}),
            Report(noisy is None, "normal input untouched", noisy, {"trees": len(normal)})]


# -- trees and lines ----------------------------------------------------------------


def _random_antichain(rng, t: T.LeveledTree) -> list:
    ids = sorted(t.nodes, key=T._id_key)
    rng.shuffle(ids)
    chosen, blocked = [], set()
    for x in ids:
        if x not in blocked:
            chosen.append(x)
            blocked.update(t.ancestors(x))
            blocked.update(t.cone(x))
    return chosen


def line_tree_suite(seed: int = 0, trees: int = 20, antichains: int = 10, steps: int = 16) -> List[Report]:
    rng = random.Random(seed)
    fails: Dict[str, object] = {}
    counts = {"branches": 0, "antichains": 0, "stages": 0, "witness_queries": 0}

    def note(name, ok, witness):
        if not ok and name not in fails:
            fails[name] = witness

    for k in range(trees):
        t = S.random_labeled_tree(rng)
        L = S.tree_to_line(t)
        counts["branches"] += len(L)
        note("total order", S.check_total_order(L).ok, k)
        note("disjointness", S.check_disjointness(L).ok, k)
        note("intervals", S.check_intervals(L).ok, k)
        families = [t.level(s) for s in t.support] + [t.leaves()]
        families += [_random_antichain(rng, t) for _ in range(antichains)]
        for fam in families:
            counts["antichains"] += 1
            note("ccc transfer", S.check_ccc_transfer(L, fam).ok, (k, fam[:4]))
        oracle = S.BranchLineOracle(L)
        res = S.line_to_tree(L, oracle, steps)
        counts["stages"] += len(res.intervals)
        note("nested or disjoint", S.check_nested_or_disjoint(L, res).ok, k)
        note("round trip", S.check_round_trip(L, res, oracle.chosen).ok, k)
        for _ in range(5):
            C = rng.sample(L.elements, rng.randint(0, min(3, len(L))))
            counts["witness_queries"] += 1
            lengths = [t.nodes[b[-1]].level.successor() for b in C]
            expect = any(t.level(s) and all(s > n for n in lengths) for s in t.support)
            try:
                x = S.non_separability_witness(L, C)
            except S.NoWitness:
                note("non-separability witness", not expect, (k, C))
                continue
            masks = S._masks(L)
            hit = any(masks[x] >> L.position[b] & 1 for b in C)
            level_ok = all(t.nodes[x].level > n for n in lengths)
            note("non-separability witness", expect and not hit and level_ok, (k, C, x))
    names = ["total order", "disjointness", "intervals", "ccc transfer", "nested or disjoint",
             "round trip", "non-separability witness"]
    return [Report(n not in fails, f"line/tree {n}", fails.get(n), counts if n == names[0] else {})
            for n in names]


def honest_oracle_suite(seed: int = 0, budget: int = 64, steps: int = 10_000) -> List[Report]:
    Q = rationals()
    res = S.line_to_tree(Q, S.HonestRationalOracle(Q, budget), steps)
    nested = S.check_nested_or_disjoint(Q, res)
    dense = res.dense
    return [Report(dense is not None and nested.ok, "honest oracle on Q reports density", None,
                   {"stage": None if dense is None else dense.stage, "intervals": len(res.intervals)})]


SUITES: Dict[str, List[Callable[..., List[Report]]]] = {
    "thm3.3": [back_and_forth_suite],
    "thm3.7": [completion_suite],
    "thm4.4": [embedding_suite],
    "ratseq": [ratseq_suite],
    "lem4.7": [normalization_suite],
    "lem4.8": [line_tree_suite, honest_oracle_suite],
    "thm4.10": [aronszajn_suite],
}


def run(name: str, seed: int = 0) -> List[Report]:
    names = sorted(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        for fn in SUITES[n]:
            out.extend(fn(seed=seed))
    return out
