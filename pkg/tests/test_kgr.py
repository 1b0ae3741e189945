import random
from fractions import Fraction

import pytest

from ckops import (
    NumericalPoly,
    PrecisionError,
    PrimeBudget,
    SeqWindow,
    TruncSeries,
    Z,
    adams_series,
    b_map,
    decompose_TZ,
    dn_tilde,
    fseq,
    interval_in_N,
    pair,
    reflect,
    shift,
    to_e_basis,
)
from ckops.kgr import _fn_cached, assemble_TZ
from ckops.linalg import ModMatrix, span_enumerate


# -- pairing -----------------------------------------------------------------------


def test_pair_defining_duality():
    e2 = NumericalPoly((0, 0, 1))
    assert pair(e2, TruncSeries(Z, 5, [0, 0, 1])) == 1
    assert pair(e2, TruncSeries(Z, 5, [0, 0, 0, 1])) == 0


def test_pair_evaluates_at_adams():
    rng = random.Random(0)
    for _ in range(30):
        deg = rng.randint(0, 8)
        f = NumericalPoly(tuple(rng.randint(-5, 5) for _ in range(deg + 1)))
        m = rng.randint(-10, 10)
        assert pair(f, adams_series(m, 10)) == f(m)


def test_pair_power_multiplicativity():
    # <s^n, (1-x)^(km)> = <s^n, (1-x)^k> <s^n, (1-x)^m>
    for n in range(5):
        sn = to_e_basis([0] * n + [1])
        for k in (2, 3):
            for m in (2, 5):
                lhs = pair(sn, adams_series(k * m, 12))
                rhs = pair(sn, adams_series(k, 12)) * pair(sn, adams_series(m, 12))
                assert lhs == rhs


def test_pair_support_exceeds_truncation():
    f = NumericalPoly((0, 0, 0, 0, 1))
    with pytest.raises(ValueError):
        pair(f, TruncSeries(Z, 3, [1, 1, 1, 1]))


def test_pair_is_b_map_dual():
    rng = random.Random(1)
    for _ in range(10):
        G = TruncSeries(Z, 10, [rng.randint(-9, 9) for _ in range(11)])
        w = b_map(G, 8)
        for n in range(9):
            sn = to_e_basis([0] * n + [1])
            assert pair(sn, G) == w[n]


# -- numerical polynomials ------------------------------------------------------------


def test_to_e_basis_s():
    f = to_e_basis([0, 1])
    assert f is not None and f.e_coeffs == (0, -1)


def test_to_e_basis_binom_s2():
    f = to_e_basis([0, Fraction(-1, 2), Fraction(1, 2)])
    assert f is not None and f.e_coeffs == (0, 0, 1)


def test_to_e_basis_rejects_half_s():
    assert to_e_basis([0, Fraction(1, 2)]) is None


# -- windows ----------------------------------------------------------------------------


def test_shift_and_reflect():
    a = SeqWindow(-2, (5, 6, 7, 8, 9))
    s = shift(a, 1)
    assert s.start == -3 and s[0] == a[1] and s[-3] == a[-2]
    assert reflect(reflect(a)) == a
    assert reflect(a)[2] == a[-2]


def test_shift_swaps_parity_pattern(kgr_budget):
    f1 = fseq(1, -2, 4, 16, kgr_budget)
    s = shift(f1, 1)
    assert [s[i] for i in range(-2, 2)] == [2, 0, 2, 0]


def test_reflect_preserves_lattice_membership(kgr_budget):
    # reflected windows of a generated member still have intervals in N_n
    bud = PrimeBudget.uniform([2, 3], 5)
    f1 = fseq(1, -3, 4, 16, kgr_budget)
    r = reflect(f1)
    vals = list(r.values)
    for k in range(len(vals) - 2):
        assert interval_in_N(vals[k : k + 3], bud)


# -- interval lattices ---------------------------------------------------------------------


def test_interval_generator_row():
    bud = PrimeBudget.uniform([2, 3], 6)
    assert interval_in_N([1, 5, 25], bud)
    assert interval_in_N([1, 7, 49], bud)


def test_interval_dtilde_thresholds():
    bud = PrimeBudget.uniform([2, 3], 6)
    for n in (1, 2, 3):
        dt = dn_tilde(n)
        assert interval_in_N([0] * n + [dt], bud), n
        if dt > 1:
            assert not interval_in_N([0] * n + [dt // 2], bud), n


def test_interval_matches_enumeration_small():
    rng = random.Random(2)
    for _ in range(15):
        p, e = rng.choice([(2, 3), (3, 2)])
        n = rng.randint(1, 3)
        bud = PrimeBudget.uniform([p], e)
        q = p**e
        units = [r for r in range(1, q) if r % p]
        rows = [[pow(r, j, q) for j in range(n)] for r in units]
        S = span_enumerate(ModMatrix(q, rows, cols=n))
        v = [rng.randrange(q) for _ in range(n)]
        assert interval_in_N(v, bud) == (tuple(v) in S)


# -- the canonical sequences -----------------------------------------------------------------


def test_fseq_pinned_windows(kgr_budget):
    assert list(fseq(0, -3, 4, 16, kgr_budget).values) == [1] * 7
    assert list(fseq(1, -2, 3, 16, kgr_budget).values) == [0, 2, 0, 2, 0]


def test_fseq_leading_interval(kgr_budget):
    for n in (2, 3, 4):
        fn = fseq(n, -2, n + 2, 16, kgr_budget)
        assert all(fn[i] == 0 for i in range(n)), n
        assert fn[n] == dn_tilde(n), n


def test_fseq_matches_b_map_on_positive_side(kgr_budget):
    for n in (2, 3):
        F = _fn_cached(n, 16, kgr_budget)
        fn = fseq(n, 0, 9, 16, kgr_budget)
        w = b_map(TruncSeries(Z, 16, list(F.int_coeffs)), 8)
        for i in range(9):
            assert (fn[i] - (-1) ** n * w[i]) % kgr_budget.modulus == 0


def test_fseq_intervals_in_lattice(kgr_budget):
    # every n-interval of a T_R member lies in the unit-power lattice
    bud = PrimeBudget.uniform([2, 3], 4)
    f2 = fseq(2, -2, 6, 16, kgr_budget)
    vals = list(f2.values)
    for ln in (1, 2, 3):
        for k in range(len(vals) - ln + 1):
            assert interval_in_N(vals[k : k + ln], bud), (ln, k)


def test_fseq_needs_truncation(kgr_budget):
    with pytest.raises(PrecisionError):
        fseq(2, 0, 40, 16, kgr_budget)


# -- window decomposition -----------------------------------------------------------------


def test_decompose_TZ_unit_vector(kgr_budget):
    win = assemble_TZ([1, 0], 0, 1, 16, kgr_budget)
    assert decompose_TZ(win, 0, 16, kgr_budget) == [1, 0]


def test_decompose_TZ_constructed(kgr_budget):
    bs = [0, 0, 2, 3, 0, 0]
    win = assemble_TZ(bs, -2, 3, 16, kgr_budget)
    assert decompose_TZ(win, 2, 16, kgr_budget) == bs


def test_decompose_TZ_round_trips(kgr_budget):
    rng = random.Random(3)
    for m in range(4):
        for _ in range(3):
            bs = [rng.randint(-4, 4) for _ in range(2 * m + 2)]
            win = assemble_TZ(bs, -m, m + 1, 16, kgr_budget)
            assert decompose_TZ(win, m, 16, kgr_budget) == bs, (m, bs)


def test_decompose_TZ_rejects_outside_lattice(kgr_budget):
    # after peeling b_0 = 1 the endpoint entry 2 - 1 = 1 is not divisible
    # by dtilde_1 = 2, so the window is not in the span
    win = SeqWindow(0, (1, 2))
    with pytest.raises(ValueError, match="not divisible"):
        decompose_TZ(win, 0, 16, kgr_budget)
