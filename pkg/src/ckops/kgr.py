"""Graded K-theory stable operations as two-sided integer sequences: the
numerical-polynomial pairing, shift and reflection, unit-power interval
lattices, the canonical basis windows f^(n), and the window decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from functools import lru_cache

from .arith import PrecisionError, PrimeBudget, crt_lift
from .linalg import ModMatrix, howell_form, in_row_span
from .series import SeqWindow, TruncSeries
from .stable import construct_Fn, dn_tilde


@lru_cache(maxsize=None)
def _fn_cached(n: int, T: int, budget: PrimeBudget):
    return construct_Fn(n, T, budget)

# a BiSeqWindow is a SeqWindow whose start may be negative; same type
BiSeqWindow = SeqWindow


@dataclass(frozen=True)
class NumericalPoly:
    """Integer-valued polynomial in the basis e_n = (-1)^n C(s, n); the
    integrality of the basis coefficients *is* the numerical property."""

    e_coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "e_coeffs", tuple(int(c) for c in self.e_coeffs))

    @property
    def degree(self) -> int:
        d = -1
        for i, c in enumerate(self.e_coeffs):
            if c:
                d = i
        return d

    def __call__(self, m: int) -> int:
        return sum(
            c * (-1) ** n * _gbinom_int(m, n) for n, c in enumerate(self.e_coeffs)
        )


def _gbinom_int(m: int, n: int) -> int:
    if m >= 0:
        return math.comb(m, n)
    return (-1) ** n * math.comb(n - m - 1, n)


def to_e_basis(mono_coeffs) -> NumericalPoly | None:
    """e-basis coefficients of a rational polynomial (monomial coefficients
    in s), by finite differences; None when some coefficient is not an
    integer, i.e. the polynomial is not numerical."""
    cs = [Fraction(c) for c in mono_coeffs]

    def f(x: int) -> Fraction:
        acc = Fraction(0)
        for j, c in enumerate(cs):
            acc += c * x**j
        return acc

    deg = len(cs) - 1
    out = []
    for n in range(deg + 1):
        delta = sum((-1) ** (n - k) * math.comb(n, k) * f(k) for k in range(n + 1))
        e_n = (-1) ** n * delta
        if e_n.denominator != 1:
            return None
        out.append(int(e_n))
    return NumericalPoly(tuple(out))


def pair(f: NumericalPoly, G: TruncSeries):
    """<f, G> = sum_n f_n c_n under <e_n, x^m> = delta_{n,m}."""
    if f.degree > G.trunc:
        raise ValueError(
            f"polynomial support {f.degree} exceeds truncation {G.trunc}"
        )
    acc = G.ring.zero()
    for n, c in enumerate(f.e_coeffs):
        if c and n <= G.trunc:
            acc = acc + G.coeffs[n] * c
    return acc


def shift(a: SeqWindow, k: int) -> SeqWindow:
    """Left shift by k: (shift(a, k))_i = a_(i+k)."""
    return SeqWindow(a.start - k, a.values)


def reflect(a: SeqWindow) -> SeqWindow:
    """(reflect a)_i = a_(-i)."""
    return SeqWindow(-(a.stop - 1), tuple(reversed(a.values)))


def interval_in_N(v, budget: PrimeBudget, unit_count: int | None = None) -> bool:
    """Membership of the tuple v in the lattice generated by the unit power
    rows (1, r, ..., r^(len-1)), per budget prime.

    With unit_count None the generating set grows until the Howell form
    stabilizes, so the answer is the full unit lattice's.
    """
    n = len(v)
    for p in budget.primes:
        e = budget.exponent(p)
        q = p**e
        target = [x % q for x in v]
        count = unit_count or max(2 * n, 8)
        H = None
        while True:
            units = _units(p, count)
            rows = [[pow(r, j, q) for j in range(n)] for r in units]
            newH = howell_form(ModMatrix(q, rows, cols=n))
            if unit_count is not None or (H is not None and newH == H):
                H = newH
                break
            H = newH
            count *= 2
            if count > 4 * q:
                break
        ok, _ = in_row_span(H, target)
        if not ok:
            return False
    return True


def _units(p: int, count: int) -> list[int]:
    out = []
    k = 1
    while len(out) < count:
        if k % p:
            out.append(k)
        k += 1
    return out


# ---------------------------------------------------------------------------
# the canonical two-sided windows f^(n)


def fseq(
    n: int,
    start: int,
    stop: int,
    T: int,
    budget: PrimeBudget,
) -> BiSeqWindow:
    """Window [start, stop) of the canonical basis sequence f^(n), the
    two-sided b-image of (-1)^n F_n.

    F_n is by construction a combination of Adams series at unit nodes,
    and b(A_r)_i = r^i extends to negative i through the modular inverse
    of the node; each value is the symmetric CRT lift of its per-prime
    residues, exact at full budget precision (f^(0) = (1,1,1,...) and
    f^(1) = (0,2,0,2,...) come out of the same formula).
    """
    if stop <= start:
        raise ValueError("empty window")
    if n == 0:
        return SeqWindow(start, [1] * (stop - start))
    if n == 1:
        return SeqWindow(start, [0 if i % 2 == 0 else 2 for i in range(start, stop)])
    if T < stop + 1:
        raise PrecisionError(f"fseq needs truncation >= {stop + 1}")
    F = _fn_cached(n, T, budget)
    sign = (-1) ** n
    vals = []
    for i in range(start, stop):
        pairs = []
        for p in budget.primes:
            q = p ** budget.exponent(p)
            acc = 0
            for cof, node in F.combination:
                base = node % q if i >= 0 else pow(node % q, -1, q)
                acc = (acc + cof.residue_mod(p, budget.exponent(p)) * pow(base, abs(i), q)) % q
            pairs.append((sign * acc % q, q))
        x, M = crt_lift(pairs)
        vals.append(x - M if 2 * x > M else x)
    return SeqWindow(start, vals)


def decompose_TZ(a: BiSeqWindow, m: int, T: int, budget: PrimeBudget) -> list[int]:
    """Coordinates b_0..b_(2m+1) of an integer window against the basis
    shift^(-i) reflect f^(2i), shift^(i) f^(2i+1): peel the two endpoint
    entries of the interval [-i, i+1] per pair, then verify reassembly.

    A nonintegral quotient or a nonzero residual raises: the window is not
    in the lattice the basis spans.
    """
    if a.start > -m or a.stop < m + 2:
        raise ValueError(f"window must cover [{-m}, {m + 1}]")
    lo, hi = -m, m + 1
    residual = {i: a[i] for i in range(lo, hi + 1)}
    gens = []
    for i in range(m + 1):
        f2i = fseq(2 * i, i - hi, i - lo + 1, T, budget)
        g_even = {j: f2i[i - j] for j in range(lo, hi + 1)}
        f2i1 = fseq(2 * i + 1, lo + i, hi + i + 1, T, budget)
        g_odd = {j: f2i1[j + i] for j in range(lo, hi + 1)}
        gens.append((g_even, g_odd))
    out = []
    for i in range(m + 1):
        g_even, g_odd = gens[i]
        d_even = dn_tilde(2 * i)
        if residual[-i] % d_even:
            raise ValueError(
                f"entry at {-i} = {residual[-i]} not divisible by {d_even}"
            )
        b_even = residual[-i] // d_even
        for j in residual:
            residual[j] -= b_even * g_even[j]
        d_odd = dn_tilde(2 * i + 1)
        if residual[i + 1] % d_odd:
            raise ValueError(
                f"entry at {i + 1} = {residual[i + 1]} not divisible by {d_odd}"
            )
        b_odd = residual[i + 1] // d_odd
        for j in residual:
            residual[j] -= b_odd * g_odd[j]
        out.extend([b_even, b_odd])
    bad = [j for j in range(lo, hi + 1) if residual[j]]
    if bad:
        raise ValueError(f"nonzero residual at indices {bad}: not in the span")
    return out


def assemble_TZ(bs: list[int], lo: int, hi: int, T: int, budget: PrimeBudget) -> BiSeqWindow:
    """Window [lo, hi] of sum_i b_2i shift^(-i) reflect f^(2i) +
    b_(2i+1) shift^i f^(2i+1)."""
    vals = {j: 0 for j in range(lo, hi + 1)}
    for i in range(len(bs) // 2):
        b_even, b_odd = bs[2 * i], bs[2 * i + 1]
        if b_even:
            f2i = fseq(2 * i, i - hi, i - lo + 1, T, budget)
            for j in vals:
                vals[j] += b_even * f2i[i - j]
        if b_odd:
            f2i1 = fseq(2 * i + 1, lo + i, hi + i + 1, T, budget)
            for j in vals:
                vals[j] += b_odd * f2i1[j + i]
    return SeqWindow(lo, [vals[j] for j in range(lo, hi + 1)])
