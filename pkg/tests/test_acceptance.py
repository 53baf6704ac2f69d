"""Acceptance gate: the eight criteria at their stated tolerances and time limits.

Run with pytest (a summary section lists one PASS/FAIL line per criterion)
or directly with ``python tests/test_acceptance.py``.
"""

import sys
import time

from orderlab import suites
from orderlab.order import builtin
from orderlab.backforth import back_and_forth


def _run(label, limit, fn):
    t0 = time.perf_counter()
    reports = fn()
    elapsed = time.perf_counter() - t0
    failed = [r for r in reports if not r.ok]
    ok = not failed and elapsed < limit
    why = ""
    if failed:
        why = f" first failure: {failed[0].name} witness={failed[0].witness}"
    elif not ok:
        why = " over time limit"
    line = f"{'PASS' if ok else 'FAIL'} {label}: {len(reports)} reports, {elapsed:.2f}s (limit {limit}s){why}"
    return ok, line


def _criterion(log, label, limit, fn):
    ok, line = _run(label, limit, fn)
    log.append(line)
    print(line)
    assert ok, line


def _per_pair_bf():
    reports, slow = [], []
    for pair in suites.DLO_PAIRS:
        t0 = time.perf_counter()
        reports += suites.back_and_forth_suite(pairs=[pair])
        if time.perf_counter() - t0 >= 1.0:
            slow.append(pair)
    if slow:
        from orderlab.order import Report
        reports.append(Report(False, "back-and-forth time per pair", slow))
    return reports


def test_c1_back_and_forth(acceptance_log):
    _criterion(acceptance_log, "C1 back-and-forth, 15 pairs x 64 rounds", 15.0, _per_pair_bf)


def test_c2_embedding(acceptance_log):
    _criterion(acceptance_log, "C2 embedding into Q, 200 orders + omega, omega*2", 2.0, suites.embedding_suite)


def test_c3_completion(acceptance_log):
    _criterion(acceptance_log, "C3 completion extension agreement + monotonicity", 2.0, suites.completion_suite)


def test_c4_ratseq(acceptance_log):
    _criterion(acceptance_log, "C4 RatSeq coherence + canonical", 2.0, suites.ratseq_suite)


def test_c5_aronszajn(acceptance_log):
    _criterion(acceptance_log, "C5 Aronszajn build, support 0..10,w..w+5,w*2, 16-point grid", 10.0,
               suites.aronszajn_suite)


def test_c6_normalization(acceptance_log):
    _criterion(acceptance_log, "C6 normalization, 50 trees", 5.0, suites.normalization_suite)


def test_c7_line_tree(acceptance_log):
    _criterion(acceptance_log, "C7 line/tree correspondence, 20 trees", 10.0, suites.line_tree_suite)


def test_c8_honest_oracle(acceptance_log):
    _criterion(acceptance_log, "C8 honest oracle on Q ends in density", 1.0, suites.honest_oracle_suite)


def test_c1_reports_cover_every_pair():
    # sanity on the harness itself: 15 unordered pairs of five presentations
    assert len(suites.DLO_PAIRS) == 15
    iso = back_and_forth(builtin("q"), builtin("dyadic"), 64)
    assert len(iso.transcript) == 64 and len(iso) == 64


if __name__ == "__main__":
    log = []
    status = 0
    criteria = [test_c1_back_and_forth, test_c2_embedding, test_c3_completion, test_c4_ratseq,
                test_c5_aronszajn, test_c6_normalization, test_c7_line_tree, test_c8_honest_oracle]
    for fn in criteria:
        try:
            fn(log)
        except AssertionError:
            status = 1
    sys.exit(status)
