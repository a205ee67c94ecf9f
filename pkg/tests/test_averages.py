from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from modergodic.averages import (
    RefuseExhaustive,
    brute_force_average,
    conditional_inner,
    correlation_profile,
    max_deviation_exhaustive,
    max_deviation_sampled,
    pkgoal_check,
    polynomial_average,
)
from modergodic.polynomials import from_coeffs, parse_and_validate
from modergodic.ring import DomainError
from modergodic.sets import ModulusMismatch, ResidueSet

SQ = parse_and_validate("n^2")


def random_set(rng, N, density=0.5):
    return ResidueSet.from_mask(N, rng.random(N) < density)


def test_profile_examples():
    A = ResidueSet.from_elements(15, [0, 7])
    counts = correlation_profile(A, A).counts
    assert {h: int(c) for h, c in enumerate(counts) if c} == {0: 2, 7: 1, 8: 1}
    assert not correlation_profile(ResidueSet.empty(9), ResidueSet.full(9)).counts.any()
    assert (correlation_profile(ResidueSet.full(9), ResidueSet.full(9)).counts == 9).all()


@pytest.mark.parametrize("N", [2, 15, 64, 257, 1000, 4099])
def test_backends_agree_and_match_definition(N, rng):
    A, B = random_set(rng, N), random_set(rng, N, 0.3)
    x = correlation_profile(A, B, backend="bitset").counts
    y = correlation_profile(A, B, backend="transform").counts
    assert np.array_equal(x, y)
    assert int(x.sum()) == A.size * B.size
    for h in rng.integers(0, N, 5):
        assert x[h] == sum(1 for a in A.elements if (a - h) % N in B)


def test_average_examples():
    A = ResidueSet.from_elements(15, [0, 7])
    rep = polynomial_average(A, A, SQ)
    assert (rep.average, rep.product, rep.deviation) == (Fraction(2, 225), Fraction(4, 225), Fraction(-2, 225))
    assert polynomial_average(ResidueSet.empty(7), ResidueSet.full(7), SQ).average == 0


def test_mismatch():
    with pytest.raises(ModulusMismatch):
        polynomial_average(ResidueSet.full(5), ResidueSet.full(6), SQ)


polys = st.lists(st.integers(-6, 6), min_size=1, max_size=5).map(from_coeffs)


@given(st.integers(2, 60), polys, st.data())
def test_average_matches_double_loop(N, P, data):
    a = data.draw(st.lists(st.booleans(), min_size=N, max_size=N))
    b = data.draw(st.lists(st.booleans(), min_size=N, max_size=N))
    A, B = ResidueSet.from_mask(N, a), ResidueSet.from_mask(N, b)
    rep = polynomial_average(A, B, P)
    assert rep.average == brute_force_average(A, B, P)
    assert 0 <= rep.average <= min(A.measure, B.measure)


@pytest.mark.parametrize("text", ["(n^3+2*n)/3", "(n^2+n)/2", "n^4-n^3+7", "3*n^2"])
def test_average_oracle_at_512(text, rng):
    P = parse_and_validate(text)
    A, B = random_set(rng, 512), random_set(rng, 512, 0.2)
    assert polynomial_average(A, B, P).average == brute_force_average(A, B, P)


@given(st.integers(2, 200), st.integers(-50, 50), st.integers(-50, 50), st.data())
def test_linear_permutation_gives_product(N, c1, c0, data):
    from math import gcd

    if gcd(c1, N) != 1:
        return
    a = data.draw(st.lists(st.booleans(), min_size=N, max_size=N))
    b = data.draw(st.lists(st.booleans(), min_size=N, max_size=N))
    A, B = ResidueSet.from_mask(N, a), ResidueSet.from_mask(N, b)
    rep = polynomial_average(A, B, from_coeffs([c0, c1]))
    assert rep.average == rep.product


@pytest.mark.parametrize("p", [3, 7, 11])
def test_p3mod4_every_set(p):
    for mask in range(1 << p):
        A = ResidueSet.from_bits(p, mask)
        assert polynomial_average(A, A, SQ).average == A.measure ** 2


def brute_max_deviation(N, P):
    best, arg = Fraction(-1), None
    for mask in range(1 << N):
        A = ResidueSet.from_bits(N, mask)
        d = abs(polynomial_average(A, A, P).deviation)
        if d > best:
            best, arg = d, A
    return best, arg


def test_exhaustive_examples():
    r = max_deviation_exhaustive(4, SQ)
    assert r.max_deviation == Fraction(1, 8) and r.witness.elements == [0, 1]
    assert max_deviation_exhaustive(2, SQ).max_deviation == 0
    r = max_deviation_exhaustive(15, from_coeffs([0, 5]))
    A = ResidueSet.from_elements(15, [0, 5, 10])
    assert polynomial_average(A, A, from_coeffs([0, 5])).deviation == Fraction(4, 25)
    assert r.max_deviation >= Fraction(4, 25)


@pytest.mark.parametrize("N, text", [(6, "n^2"), (8, "n^3"), (9, "(n^2+n)/2"), (10, "n^2+n"), (12, "n^2")])
def test_exhaustive_against_plain_enumeration(N, text):
    P = parse_and_validate(text)
    best, arg = brute_max_deviation(N, P)
    for sym in (True, False):
        r = max_deviation_exhaustive(N, P, symmetry=sym)
        assert r.max_deviation == best
        assert abs(r.signed_deviation) == best
    assert max_deviation_exhaustive(N, P, symmetry=True).witness == max_deviation_exhaustive(
        N, P, symmetry=False).witness


def test_exhaustive_worker_count_does_not_change_result():
    P = parse_and_validate("n^3")
    a = max_deviation_exhaustive(20, P, workers=1)
    b = max_deviation_exhaustive(20, P, workers=3)
    assert (a.max_deviation, a.witness, a.examined) == (b.max_deviation, b.witness, b.examined)


def test_refuse_exhaustive():
    with pytest.raises(RefuseExhaustive):
        max_deviation_exhaustive(25, SQ)
    with pytest.raises(RefuseExhaustive):
        max_deviation_exhaustive(10, SQ, max_exhaustive=8)


def test_sampled_is_deterministic_and_exact():
    P = parse_and_validate("n^2")
    a = max_deviation_sampled(40, P, samples=3000, seed=7)
    b = max_deviation_sampled(40, P, samples=3000, seed=7)
    assert a.witness == b.witness and a.max_deviation == b.max_deviation
    assert a.mode == "sampled"
    assert abs(polynomial_average(a.witness, a.witness, P).deviation) == a.max_deviation
    # never above the proven maximum
    assert max_deviation_sampled(12, P, samples=500).max_deviation <= max_deviation_exhaustive(12, P).max_deviation


def test_conditional_inner_examples():
    A = ResidueSet.from_elements(9, [0, 3, 6])
    assert conditional_inner(A, 3, 2, 0).inner == A.measure ** 2
    assert conditional_inner(A, 3, 2, 2).inner == A.measure
    assert conditional_inner(A, 3, 2, 1).inner == Fraction(1, 3)
    with pytest.raises(DomainError):
        conditional_inner(A, 3, 3, 1)


@pytest.mark.parametrize("p, k", [(3, 2), (3, 3), (7, 2), (2, 4)])
def test_conditional_inner_monotone(p, k, rng):
    for _ in range(30):
        A = random_set(rng, p ** k, rng.random())
        vals = [conditional_inner(A, p, k, m).inner for m in range(k + 1)]
        assert vals[0] == A.measure ** 2 and vals[-1] == A.measure
        assert all(x <= y for x, y in zip(vals, vals[1:]))


def test_pkgoal_examples():
    r = pkgoal_check(ResidueSet.from_elements(9, [0, 3, 6]), 3, 2)
    assert r.lhs == r.rhs == Fraction(1, 9) and r.equal
    assert pkgoal_check(ResidueSet.empty(27), 3, 3).lhs == 0
    r = pkgoal_check(ResidueSet.full(27), 3, 3)
    assert r.lhs == r.rhs == 1
    with pytest.raises(DomainError):
        pkgoal_check(ResidueSet.full(25), 5, 2)
    r = pkgoal_check(ResidueSet.from_elements(25, [0, 1]), 5, 2, permissive=True)
    assert not r.asserted


@pytest.mark.parametrize("p, k", [(3, 2), (3, 3), (3, 4), (7, 2), (7, 3), (11, 2), (19, 2)])
def test_pkgoal_random(p, k, rng):
    for _ in range(40):
        A = random_set(rng, p ** k, rng.random())
        assert pkgoal_check(A, p, k).equal


def test_pkgoal_deviation_shrinks_along_primes(rng):
    worst = []
    for p in (3, 7, 11, 19):
        w = Fraction(0)
        for _ in range(300):
            A = random_set(rng, p * p, rng.random())
            w = max(w, abs(pkgoal_check(A, p, 2).lhs - A.measure ** 2))
        worst.append(w)
    assert all(x > y for x, y in zip(worst, worst[1:]))


@pytest.mark.parametrize("m", [5, 50, 500])
def test_multiples_of_three_do_not_mix(m):
    N = 3 * m
    A = ResidueSet.from_mask(N, np.arange(N) % 3 == 0)
    assert polynomial_average(A, A, from_coeffs([0, 3])).deviation == Fraction(2, 9)
