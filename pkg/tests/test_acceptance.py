"""The twelve acceptance criteria, each at its stated tolerance and time budget."""

import pytest

from modergodic import reproduce


def _run(check, acceptance_log, **kw):
    result = check(**kw)
    acceptance_log(result)
    return result


def test_01_worked_example(acceptance_log):
    assert _run(reproduce.check_worked_example, acceptance_log).passed


def test_02_linear_witness(acceptance_log):
    assert _run(reproduce.check_linear_witness, acceptance_log).passed


def test_03_p3mod4_exhaustive(acceptance_log):
    assert _run(reproduce.check_p3mod4_exhaustive, acceptance_log).passed


def test_04_pkgoal(acceptance_log):
    assert _run(reproduce.check_pkgoal, acceptance_log).passed


def test_05_expsums(acceptance_log):
    assert _run(reproduce.check_expsums, acceptance_log).passed


def test_06_norm_bound(acceptance_log):
    assert _run(reproduce.check_norm_bound, acceptance_log).passed


def test_07_pair_count(acceptance_log):
    assert _run(reproduce.check_pair_count, acceptance_log).passed


def test_08_coverage_counterexample(acceptance_log):
    assert _run(reproduce.check_coverage_counterexample, acceptance_log).passed


def test_09_under_over(acceptance_log):
    assert _run(reproduce.check_under_over, acceptance_log).passed


# 11, 23 and 199 are primes = 3 mod 4; every n^2 deviation there is exactly 0,
# so "strictly smaller" cannot hold. Run as stated; strict xfail flags any change.
@pytest.mark.xfail(strict=True, reason="max deviations at 11, 23, 199 are all exactly 0")
def test_10_trend(acceptance_log):
    assert _run(reproduce.check_trend, acceptance_log).passed


def test_11_interval(acceptance_log):
    assert _run(reproduce.check_interval, acceptance_log).passed


def test_12_kernels(acceptance_log):
    assert _run(reproduce.check_kernels, acceptance_log).passed
