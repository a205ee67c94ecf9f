import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from modergodic.averages import polynomial_average
from modergodic.combinatorics import (
    NotFound,
    brute_force_pair_count,
    construct_counterexample,
    coverage_check,
    pair_count,
    solution_count_three,
    sumset,
    trivial_disjoint_demo,
)
from modergodic.polynomials import parse_and_validate
from modergodic.ring import DomainError, is_prime
from modergodic.sets import ModulusMismatch, ResidueSet, parse_set

SQ = parse_and_validate("n^2")


def naive_sumset(A, B):
    return sorted({(a + b) % A.N for a in A.elements for b in B.elements})


def test_sumset_examples():
    assert sumset(ResidueSet.from_elements(5, [0, 1]), ResidueSet.from_elements(5, [0, 2])).elements == [0, 1, 2, 3]
    assert sumset(ResidueSet.full(7), ResidueSet.empty(7)).size == 0
    assert sumset(ResidueSet.full(9), ResidueSet.from_elements(9, [0])) == ResidueSet.full(9)
    with pytest.raises(ModulusMismatch):
        sumset(ResidueSet.full(4), ResidueSet.full(5))


@pytest.mark.parametrize("N", [3, 50, 300, 5000])
def test_sumset_paths(N, rng):
    for dens in (0.002, 0.05, 0.5):
        A = ResidueSet.from_mask(N, rng.random(N) < dens)
        B = ResidueSet.from_mask(N, rng.random(N) < 0.01)
        assert sumset(A, B).elements == naive_sumset(A, B)


def test_pair_count_examples():
    r = pair_count(ResidueSet.from_elements(15, [0, 7]), ResidueSet.from_elements(15, [0, 8]), SQ)
    assert (r.s, r.expected, r.epsilon_achieved) == (1, 4, Fraction(3, 4))
    full = ResidueSet.full(12)
    assert pair_count(full, full, parse_and_validate("n^3+1")).s == 144
    A, B = ResidueSet.from_elements(12, [1, 5, 6]), ResidueSet.from_elements(12, [0, 2])
    assert pair_count(A, B, parse_and_validate("n")).s == 6
    assert pair_count(A, B, parse_and_validate("n")).threshold_ok is None


@given(st.integers(2, 40), st.sampled_from(["n^2", "(n^2+n)/2", "n^3-n", "2*n^2+1"]), st.data())
def test_pair_count_matches_oracle(N, text, data):
    P = parse_and_validate(text)
    A = ResidueSet.from_mask(N, data.draw(st.lists(st.booleans(), min_size=N, max_size=N)))
    B = ResidueSet.from_mask(N, data.draw(st.lists(st.booleans(), min_size=N, max_size=N)))
    r = pair_count(A, B, P)
    assert r.s == brute_force_pair_count(A, B, P)
    assert 0 <= r.s <= N * B.size
    # reflected configuration: s / N^2 is the average of mu(B ∩ (A - P(m)))
    assert Fraction(r.s, N * N) == polynomial_average(A, B, P).average


def test_pair_count_oracle_512(rng):
    A = ResidueSet.from_mask(512, rng.random(512) < 0.5)
    B = ResidueSet.from_mask(512, rng.random(512) < 0.3)
    for text in ("n^2", "(n^3+2*n)/3"):
        P = parse_and_validate(text)
        assert pair_count(A, B, P).s == brute_force_pair_count(A, B, P)


@pytest.mark.parametrize("N", [p for p in range(3, 10_000, 997) if is_prime(p)] + [9973])
def test_dense_pairs_meet_the_image(N, rng):
    for _ in range(10):
        while True:
            A = ResidueSet.from_mask(N, rng.random(N) < rng.uniform(0.25, 1))
            B = ResidueSet.from_mask(N, rng.random(N) < rng.uniform(0.25, 1))
            if 4 * A.size * B.size >= N * N:
                break
        r = pair_count(A, B, SQ, Fraction(1))
        if r.threshold_ok:
            assert r.epsilon_achieved < 1


def test_coverage_examples():
    r = coverage_check(ResidueSet.from_elements(7, range(4)), ResidueSet.from_elements(7, range(4)), SQ)
    assert r.covered and not r.missing
    r = coverage_check(parse_set("squares", 9), parse_set("{0}", 9), SQ)
    assert not r.covered and 3 in r.missing
    sq7 = parse_set("squares", 7)
    assert coverage_check(sq7, sq7, SQ).covered


def test_coverage_witnesses_are_valid(rng):
    N = 101
    A = ResidueSet.from_mask(N, rng.random(N) < 0.05)
    B = ResidueSet.from_mask(N, rng.random(N) < 0.05)
    Q = parse_and_validate("n^3")
    r = coverage_check(A, B, Q, witnesses=10)
    image = {Q(n) % N for n in range(N)}
    expected_missing = set(range(N)) - {(a + b + s) % N for a in A for b in B for s in image}
    assert set(r.missing) == expected_missing
    assert r.covered == (not expected_missing)
    for x, a, b, s in r.witness_triples:
        assert a in A and b in B and s in image and (a + b + s) % N == x


@pytest.mark.parametrize("p", [p for p in range(3, 32) if is_prime(p) and p % 4 == 3])
def test_coverage_counterexample_family(p):
    N = p * p
    r = coverage_check(parse_set("squares", N), parse_set("{0}", N), SQ, witnesses=0)
    assert p in r.missing


def test_dense_progression_coverage():
    for N in range(100, 1001):
        if not is_prime(N):
            continue
        A = parse_set(f"ap(0,1,{math.ceil(N / 3)})", N)
        assert coverage_check(A, A, SQ, witnesses=0).covered


def brute_three(F, c, p):
    vals = [[Fi(x) % p for x in range(p)] for Fi in F]
    return sum(1 for a, b, d in itertools.product(*vals) if (a + b + d - c) % p == 0)


def test_weil_examples():
    x2 = parse_and_validate("n^2")
    r = solution_count_three(x2, x2, x2, 0, 7)
    assert r.count == 49 and r.holds and abs(r.weil_lower - 49 * (1 - 1 / math.sqrt(7))) < 1e-9
    r = solution_count_three(x2, x2, x2, 3, 7)
    assert r.count >= 30.5 and r.holds
    lin = parse_and_validate("n")
    for p in (2, 3, 11):
        for c in range(p):
            assert solution_count_three(lin, lin, lin, c, p).count == p * p


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17])
@pytest.mark.parametrize("texts", [("n^2", "n^3", "n^2+n"), ("n^4+1", "n^2", "3*n^3"), ("n^2", "n^2", "n^5")])
def test_weil_counts_against_enumeration(p, texts):
    F = [parse_and_validate(t) for t in texts]
    for c in range(p):
        r = solution_count_three(*F, c, p)
        assert r.count == brute_three(F, c, p)
        if r.holds is not None:
            assert r.holds


def test_weil_unasserted_and_errors():
    r = solution_count_three(parse_and_validate("n^5"), SQ, SQ, 1, 5)
    assert r.holds is None
    with pytest.raises(DomainError):
        solution_count_three(parse_and_validate("(n^2+n)/2"), SQ, SQ, 0, 7)
    with pytest.raises(DomainError):
        solution_count_three(SQ, SQ, SQ, 0, 9)


def test_under_over_examples():
    w = construct_counterexample("under", 5, 1)
    assert w.sets["A"].elements == [0, 2] and w.predicted == w.observed == Fraction(2, 25)
    w = construct_counterexample("over", 5, 1)
    assert w.sets["A"].elements == [0, 1] and w.predicted == w.observed == Fraction(6, 25)
    with pytest.raises(DomainError, match="nonresidue"):
        construct_counterexample("under", 7, 1)


@pytest.mark.parametrize("p", [p for p in range(5, 80) if is_prime(p) and p % 4 == 1])
@pytest.mark.parametrize("k", [1, 2, 4])
def test_under_over_family(p, k):
    for kind, factor in (("under", Fraction(1, 2)), ("over", Fraction(3, 2))):
        w = construct_counterexample(kind, p, k)
        A = w.sets["A"]
        assert A.measure == Fraction(2, p)
        assert w.observed == factor * A.measure ** 2 == w.predicted


def test_nonpermutation_example():
    w = construct_counterexample("nonpermutation")
    assert (w.params["p"], w.params["a"], w.params["m_a"]) == (3, 1, 2)
    assert w.observed == w.predicted == Fraction(1, 9)


@pytest.mark.parametrize("text", ["n^2", "n^3", "(n^2+n)/2", "(n^3+2*n)/3", "5*n^4+n", "n^6"])
def test_nonpermutation_family(text):
    P = parse_and_validate(text)
    w = construct_counterexample("nonpermutation", P=P)
    p = w.params["p"]
    assert (p - 1) % P.degree == 0 and p > P.c_prime
    assert w.observed == w.predicted >= Fraction(1, p * p)
    # the prediction is (m_a - 1) / p^2 with m_a counted directly
    Q = P.compose_linear(w.params["c"])
    m_a = sum(1 for n in range(p) if Q(n) % p == w.params["a"])
    assert w.predicted == Fraction(m_a - 1, p * p)


def test_nonpermutation_larger_modulus():
    for m in (5, 50):
        w = construct_counterexample("nonpermutation", p=3, N=3 * m)
        assert w.observed == Fraction(1, 9)
    with pytest.raises(DomainError):
        construct_counterexample("nonpermutation", p=3, N=10)
    with pytest.raises(NotFound):
        construct_counterexample("nonpermutation", P=parse_and_validate("n^2"), search_bound=2)


def test_interval_witness():
    for N in (100, 1000, 10000):
        w = construct_counterexample("interval", N=N)
        assert w.observed > Fraction(1, 100)
    N = 50
    A = ResidueSet.from_elements(N, range(N // 10 + 1))
    mu2 = A.measure ** 2
    direct = sum(abs(Fraction(len(set(A.elements) & {(x + n) % N for x in A}), N) - mu2) for n in range(1, N + 1)) / N
    assert construct_counterexample("interval", N=N).observed == direct


def test_trivial_disjoint():
    for p, N in ((3, 9), (5, 15), (2, 4), (7, 49)):
        assert trivial_disjoint_demo(p, N).average == 0
    with pytest.raises(DomainError):
        trivial_disjoint_demo(3, 10)
