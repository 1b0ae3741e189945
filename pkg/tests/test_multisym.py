import random
from fractions import Fraction

import pytest

from ckops import (
    MultiSeries,
    NotIntegrable,
    PrimeBudget,
    ProfiniteApprox,
    ProfiniteRing,
    Q,
    SymSeries,
    TruncSeries,
    Z,
    aformula_check,
    adams_series,
    in_Opnm_phi,
    in_Qn,
    integrate_symmetric,
    is_double_symmetric,
    is_symmetric,
    iter_partial,
    lg_series,
    partial_derivative,
    phi,
    star_sum,
    valuation,
)
from ckops.multisym import integer_coefficients, partial0


def univ_in_var(ts, var, nvars):
    M = MultiSeries(ts.ring, nvars, ts.trunc)
    for i, c in enumerate(ts.coeffs):
        if not ts.ring.is_zero(c):
            key = [0] * nvars
            key[var] = i
            M.coeffs[tuple(key)] = c
    return M


def rand_series(rng, T, dens=(1, 2, 3)):
    return TruncSeries(
        Q, T, [Fraction(rng.randint(-5, 5), rng.choice(dens)) for _ in range(T + 1)]
    )


# -- star sums -----------------------------------------------------------------


def test_star_sum_single():
    s = star_sum([0], "mult", 2, 5)
    assert s.coeffs == {(1, 0): Fraction(1)}


def test_star_sum_pair_multiplicative():
    s = star_sum([0, 1], "mult", 2, 5)
    assert s.coeffs == {(1, 0): Fraction(1), (0, 1): Fraction(1), (1, 1): Fraction(-1)}


def test_star_sum_triple_additive():
    s = star_sum([0, 1, 2], "add", 3, 5)
    assert len(s.coeffs) == 3 and all(v == 1 for v in s.coeffs.values())


def test_star_sum_empty():
    assert star_sum([], "mult", 2, 5).is_zero()


# -- partial derivative ----------------------------------------------------------


def test_partial_of_x():
    D = partial_derivative(TruncSeries(Q, 6, [0, 1]))
    assert D.coeffs == {(1, 1): Fraction(-1)}


def test_partial_kills_lg1():
    assert partial_derivative(lg_series(1, 9)).is_zero()


def test_partial0_convention():
    G0 = partial0(TruncSeries(Q, 4, [5, 1, 2]))
    assert G0.coeffs == {(1,): Fraction(1), (2,): Fraction(2)}


# -- iterated partials -------------------------------------------------------------


def test_iter_partial_equals_folded():
    rng = random.Random(0)
    for _ in range(4):
        G = rand_series(rng, 7)
        for m in (1, 2, 3):
            it = iter_partial(G, m)
            fold = partial_derivative(G)
            for _ in range(m - 1):
                fold = partial_derivative(fold)
            assert it == fold


def test_iter_partial_lg_product_formula():
    n = 3
    it = iter_partial(lg_series(n, 8), n - 1)
    lg1 = lg_series(1, 8)
    P = univ_in_var(lg1, 0, 3) * univ_in_var(lg1, 1, 3) * univ_in_var(lg1, 2, 3)
    assert it == P


def test_iter_partial_valuation_observation():
    for n in (1, 2, 3):
        for m in range(n, 7):
            xm = TruncSeries.monomial(Q, 8, m)
            assert iter_partial(xm, n - 1).total_valuation() == m


def test_iter_partial_constant_vanishes():
    for m in (1, 2, 3):
        assert iter_partial(TruncSeries.one(Q, 6), m).is_zero()


def test_first_block_symmetry_always():
    # partial^m G is symmetric in the first m+1 variables for every G,
    # symmetric or not; check on an asymmetric multivariate input
    G = MultiSeries(Q, 2, 6, {(2, 1): 1, (1, 3): 2})
    D = partial_derivative(G)
    for (a, b, c), v in D.coeffs.items():
        assert D.get((b, a, c)) == v


# -- double symmetry ------------------------------------------------------------


def test_double_symmetric_from_univariate():
    rng = random.Random(4)
    L = rand_series(rng, 8)
    assert is_double_symmetric(iter_partial(L, 2))


def test_double_symmetric_counterexample():
    ms = MultiSeries(Q, 2, 5, {(2, 1): 1, (1, 1): 1})
    assert not is_double_symmetric(ms)


def test_double_symmetric_univariate_vacuous():
    assert is_double_symmetric(TruncSeries(Q, 5, [0, 1, 2]))


def test_symmetry_checker_on_missing_orbit():
    M = MultiSeries(Q, 2, 5, {(2, 1): 1})
    assert not is_symmetric(M)
    M2 = MultiSeries(Q, 2, 5, {(2, 1): 1, (1, 2): 1})
    assert is_symmetric(M2)
    with pytest.raises(ValueError):
        SymSeries.from_multi(M)


# -- integration -----------------------------------------------------------------


def test_integration_round_trips():
    rng = random.Random(5)
    for trial in range(8):
        n = rng.randint(2, 4)
        T = rng.choice([8, 9, 10])
        L = TruncSeries(
            Q, T, [0] + [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(T)]
        )
        D = iter_partial(L, n - 1)
        L2 = integrate_symmetric(D, n)
        assert iter_partial(L2, n - 1) == D, (trial, n)


def test_integration_lg_product():
    P3 = iter_partial(lg_series(3, 8), 2)
    L = integrate_symmetric(P3, 3)
    assert iter_partial(L, 2) == P3
    # the normalized integral in additive coordinates is lg_3 itself
    assert L == lg_series(3, 8)


def test_integration_minus_x1x2():
    G = MultiSeries(Q, 2, 8, {(1, 1): Fraction(-1)})
    L = integrate_symmetric(G, 2)
    D = partial_derivative(L)
    assert D == G


def test_integration_rejects_asymmetric():
    bad = MultiSeries(Q, 2, 6, {(1, 2): 1, (1, 1): 1})
    with pytest.raises(NotIntegrable):
        integrate_symmetric(bad, 2)


def test_integration_requires_full_divisibility():
    bad = MultiSeries(Q, 2, 6, {(0, 2): 1, (2, 0): 1})
    with pytest.raises(NotIntegrable):
        integrate_symmetric(bad, 2)


# -- the derivative reduction formula ----------------------------------------------


def test_aformula_random():
    rng = random.Random(6)
    for n in (1, 2, 3):
        G = rand_series(rng, 8, dens=(1, 2, 3, 4))
        assert aformula_check(G, n)


def test_aformula_lg1_both_sides_zero():
    assert aformula_check(lg_series(1, 8), 2)


def test_aformula_x_squared_by_hand():
    assert aformula_check(TruncSeries(Q, 4, [0, 0, 1]), 1)


# -- integrality preservation -----------------------------------------------------


def test_partial_preserves_integer_coefficients():
    rng = random.Random(7)
    for _ in range(5):
        G = TruncSeries(Z, 7, [rng.randint(-9, 9) for _ in range(8)])
        D = partial_derivative(G)
        assert integer_coefficients(D)
        DD = iter_partial(G, 2)
        assert integer_coefficients(DD)


def test_partial_over_profinite(budget):
    ring = ProfiniteRing(budget)
    G = adams_series(3, 6).map_coeffs(lambda v: ProfiniteApprox.from_int(budget, 1) * v, ring)
    D = partial_derivative(G)
    assert integer_coefficients(D)


# -- the membership equivalences (Phi vs partial) -----------------------------------


def test_ifandonlyif_integrality_both_directions():
    from ckops.suites import random_membership_witness

    rng = random.Random(8)
    for trial in range(16):
        n = rng.randint(1, 3)
        G, expect = random_membership_witness(rng, 11, n)
        a = in_Qn(G, n)
        b = in_Opnm_phi(G, n, n)
        assert a == b, (trial, n)
        assert a == expect, (trial, n)


def test_ifandonlyif_valuation_shift():
    # v(partial^n G) >= m iff v(partial^(n-1) Phi G) >= m-1
    rng = random.Random(9)
    for trial in range(10):
        n = rng.randint(1, 3)
        G = TruncSeries(Q, 10, [0] + [rng.randint(-6, 6) for _ in range(10)])
        lhs = iter_partial(G, n)
        rhs = iter_partial(phi(G), n - 1)
        vl = lhs.total_valuation()
        vr = rhs.total_valuation()
        for m in range(1, 9):
            left = vl is None or vl >= m
            right = vr is None or vr >= m - 1
            assert left == right, (trial, n, m, vl, vr)
