import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckops import (
    IncompatibleCongruences,
    InfiniteValuation,
    PrecisionError,
    PrimeBudget,
    ProfiniteApprox,
    compatible_lift,
    crt_lift,
    gen_binomial,
    is_unit,
    vp,
    vp_factorial,
)
from ckops.arith import rational_reconstruct


def test_vp_examples():
    assert vp(12, 2) == 2
    assert vp(12, 5) == 0
    assert vp(4032, 7) == 1


def test_vp_zero_signals_infinite_valuation():
    with pytest.raises(InfiniteValuation):
        vp(0, 3)


def test_vp_factorial_examples():
    assert vp_factorial(0, 3) == 0
    assert vp_factorial(10, 2) == 8
    assert vp_factorial(6, 7) == 0


def test_vp_factorial_matches_exact_factorial():
    for n in range(21):
        for p in (2, 3, 5, 7, 11, 13):
            if n == 0:
                assert vp_factorial(n, p) == 0
            else:
                assert vp_factorial(n, p) == vp(math.factorial(n), p)


def test_crt_examples():
    assert crt_lift([(1, 2), (2, 3)])[0] == 5
    assert crt_lift([(0, 1)])[0] == 0
    assert crt_lift([(3, 4), (3, 9), (2, 5)])[0] == 147


def test_crt_non_coprime_names_pair():
    with pytest.raises(IncompatibleCongruences, match="4 and 6"):
        crt_lift([(1, 4), (3, 6)])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.permutations([5, 7, 8, 9, 11]))
def test_crt_reconstructs_hidden_integer(hidden, moduli):
    pairs = [(hidden % m, m) for m in moduli]
    x, M = crt_lift(pairs)
    for r, m in pairs:
        assert x % m == r


def test_compatible_lift_constant_family(budget):
    fam = {i: ProfiniteApprox.from_int(budget, 7) for i in range(1, 9)}
    b = compatible_lift(fam, 8)
    for i in range(1, 9):
        assert (b - 7) % i == 0


def test_compatible_lift_trivial_modulus(budget):
    fam = {1: ProfiniteApprox.from_int(budget, 12345)}
    assert compatible_lift(fam, 1) == 0


def test_compatible_lift_spec_family(budget):
    # b_1=0(1), b_2=1(2), b_3=2(3), b_4=1(4) -> 5 mod 12
    fam = {i: ProfiniteApprox.from_int(budget, v) for i, v in enumerate([0, 1, 2, 1], 1)}
    b = compatible_lift(fam, 4)
    assert b % 2 == 1 and b % 3 == 2 and b % 4 == 1
    assert b % 12 == 5


def test_compatible_lift_randomized_hidden():
    budget = PrimeBudget.uniform([2, 3, 5, 7], 8)
    rng = random.Random(3)
    for _ in range(20):
        hidden = rng.randrange(10**6)
        m = rng.randint(2, 10)  # primes <= 10 stay inside the budget
        # a valid family: each b_i agrees with the hidden integer mod i
        fam = {i: ProfiniteApprox.from_int(budget, hidden + i * rng.randrange(50))
               for i in range(1, m + 1)}
        b = compatible_lift(fam, m)
        for i in range(1, m + 1):
            assert (b - hidden) % i == 0


def test_compatible_lift_incompatible_raises(budget):
    fam = {i: ProfiniteApprox.from_int(budget, v) for i, v in enumerate([0, 1, 0, 0], 1)}
    with pytest.raises(IncompatibleCongruences):
        compatible_lift(fam, 4)


def test_gen_binomial_examples(budget):
    r5 = ProfiniteApprox.from_int(budget, 5)
    assert gen_binomial(r5, 2, 3, 2) == 10 % 9
    rm1 = ProfiniteApprox.from_int(budget, -1)
    assert gen_binomial(rm1, 3, 2, 3) == 7
    assert gen_binomial(r5, 0, 2, 4) == 1


def test_gen_binomial_matches_integer_binomial(budget):
    rng = random.Random(0)
    for _ in range(40):
        p = rng.choice([2, 3, 5])
        k = rng.randint(0, 6)
        e = rng.randint(1, 3)
        bound = p ** (e + vp_factorial(k, p))
        n = rng.randrange(bound)
        r = ProfiniteApprox.from_int(budget, n)
        assert gen_binomial(r, k, p, e) == math.comb(n, k) % p**e


def test_gen_binomial_pascal(budget):
    rng = random.Random(1)
    for _ in range(30):
        p = rng.choice([2, 3, 5])
        k = rng.randint(0, 5)
        e = rng.randint(1, 3)
        r = ProfiniteApprox.from_int(budget, rng.randrange(10**6))
        lhs = (gen_binomial(r, k, p, e) + gen_binomial(r, k + 1, p, e)) % p**e
        rhs = gen_binomial(r + 1, k + 1, p, e)
        assert lhs == rhs


def test_gen_binomial_insufficient_precision():
    budget = PrimeBudget.uniform([2], 3)
    r = ProfiniteApprox.from_int(budget, 5)
    with pytest.raises(PrecisionError):
        gen_binomial(r, 4, 2, 2)  # needs 2 + v_2(4!) = 5 digits


def test_is_unit(budget):
    assert is_unit(ProfiniteApprox.from_int(budget, 1))
    assert not is_unit(ProfiniteApprox.from_int(budget, 2))
    # divisible by 3 -> not a unit within budget
    assert not is_unit(ProfiniteApprox.from_int(budget, 3))
    assert is_unit(ProfiniteApprox.from_int(budget, 11))


def test_profinite_arithmetic_and_precision(budget):
    a = ProfiniteApprox.from_int(budget, 10)
    b = a.divide_exact(2)
    assert b.eq_within(5)
    assert b.prec[2] == budget.exponent(2) - 1  # one digit consumed at 2
    assert b.prec[3] == budget.exponent(3)
    with pytest.raises(PrecisionError):
        ProfiniteApprox.from_int(budget, 1).divide_exact(2)


def test_profinite_serialization(budget):
    a = ProfiniteApprox.from_int(budget, 12345).divide_exact(3)
    back = ProfiniteApprox.from_json(budget, a.to_json())
    assert back.eq_within(a)
    assert back.prec == a.prec


def test_symmetric_lift(budget):
    assert ProfiniteApprox.from_int(budget, -5).lift_symmetric() == -5
    assert ProfiniteApprox.from_int(budget, 17).lift_symmetric() == 17


def test_rational_reconstruct_round_trip():
    from fractions import Fraction

    from ckops.arith import modinv

    M = 3**12 * 7**6
    for q in [Fraction(1, 2), Fraction(-3, 5), Fraction(22, 5), Fraction(4)]:
        r = (q.numerator * modinv(q.denominator, M)) % M
        assert rational_reconstruct(r, M) == q
    # a wide random residue has no small-height explanation
    assert rational_reconstruct(12345678901, M) is None
