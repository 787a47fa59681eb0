"""Acceptance criteria 1-10, full grids, each with its runtime bound.

Every test records a PASS/FAIL line; conftest prints them at the end of the
run.  `python3 tests/test_acceptance.py` prints the same lines directly.
"""

import sys
import time

import pytest

from sbo.suites import (
    appendix_suite, classification_suite, closed_form_block_suite, fsystem_suite, gegenbauer_kernel_suite,
    n1_family_suite, order_suite, r_l_equivalence_suite, recurrence_suite, symbol_operator_suite,
)

pytestmark = pytest.mark.acceptance

CRITERIA = {
    1: ("appendix identities", appendix_suite, 10),
    2: ("Gegenbauer kernel", gegenbauer_kernel_suite, 10),
    3: ("F-system zero residual", fsystem_suite, 60),
    4: ("classification at |m| = N", classification_suite, 180),
    5: ("three-phase solver agreement", recurrence_suite, 120),
    6: ("N = 1 operator family", n1_family_suite, 5),
    7: ("closed block formula", closed_form_block_suite, 30),
    8: ("R/L system equivalence", r_l_equivalence_suite, 10),
    9: ("symbol/operator consistency", symbol_operator_suite, 30),
    10: ("operator order", order_suite, 5),
}

LINES: list[str] = []


def run_criterion(n: int):
    title, suite, bound = CRITERIA[n]
    start = time.perf_counter()
    res = suite()
    elapsed = time.perf_counter() - start
    ok = res.passed and elapsed < bound
    line = (f"{'PASS' if ok else 'FAIL'} criterion {n:>2} {title}: {res.checks} checks, "
            f"{len(res.failures)} failed, {elapsed:.2f}s (bound {bound}s)")
    LINES.append(line)
    return res, elapsed, bound


def _assert_ok(n: int):
    res, elapsed, bound = run_criterion(n)
    assert res.passed, res.failures[:10]
    assert elapsed < bound, f"{elapsed:.1f}s exceeds {bound}s"


@pytest.mark.xfail(strict=True, reason="the Euler identity fails as printed; it holds with a factor 2")
def test_criterion_01_appendix_identities():
    _assert_ok(1)


def test_criterion_01_failures_are_exactly_the_printed_euler_identity():
    res = appendix_suite()
    assert res.checks > 0 and res.failures
    assert all(f.startswith("euler") for f in res.failures)
    corrected = appendix_suite(euler_factor=2)
    assert corrected.passed and corrected.checks == res.checks


@pytest.mark.parametrize("n", range(2, 11))
def test_criterion(n):
    _assert_ok(n)


if __name__ == "__main__":
    for n in CRITERIA:
        run_criterion(n)
        print(LINES[-1], flush=True)
    sys.exit(0 if all(line.startswith("PASS") for line in LINES) else 1)
