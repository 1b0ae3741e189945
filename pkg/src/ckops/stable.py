"""The stable-operation set: the divisibility criterion, the image-lattice
oracle, the integers d_n, the basis series G_n / F_n, decomposition against
the basis, desuspension-tower membership, and the multiplicative layer.

Two independent membership routes are kept deliberately: s_criterion tests
the explicit binomial-sum congruences, s_oracle tests membership in the
iterated Phi-image lattices over quotient rings; their agreement is the
module's central check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import (
    PrecisionError,
    PrimeBudget,
    ProfiniteApprox,
    crt_lift,
    gen_binomial,
    is_unit,
    modinv,
    set_primes_upto,
    vp,
    vp_factorial,
)
from .linalg import ModMatrix, howell_form, in_row_span, solve_vandermonde
from .series import (
    ProfiniteRing,
    TruncSeries,
    adams_series,
    phi,
)


@dataclass(frozen=True)
class DnRecord:
    """The leading-coefficient invariant at index n with its factorization."""

    n: int
    value: int
    per_prime: dict

    def factorization(self) -> str:
        if not self.per_prime:
            return "1"
        return "*".join(
            f"{p}^{e}" if e > 1 else str(p) for p, e in sorted(self.per_prime.items())
        )


def dn(n: int) -> DnRecord:
    """d_n, via v_p(d_n) = k + v_p(k!) - v_p(n!) with k = floor(n/(p-1));
    v_p vanishes once p - 1 > n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    per = {}
    for p in set_primes_upto(n + 1):
        k = n // (p - 1)
        v = k + vp_factorial(k, p) - vp_factorial(n, p)
        if v:
            per[p] = v
    value = 1
    for p, e in per.items():
        value *= p**e
    return DnRecord(n, value, per)


def dn_tilde(n: int) -> int:
    """n! * d_n, the interval invariant of the sequence model."""
    return math.factorial(n) * dn(n).value


def a_min(p: int, n: int) -> list[int]:
    """First n positive integers coprime to p, ascending."""
    out = []
    k = 1
    while len(out) < n:
        if k % p:
            out.append(k)
        k += 1
    return out


def vdm_value(nodes) -> int:
    """Determinant of the binomial-column matrix (C(a_i, k))_{k,i}:
    prod_{s>t} (a_s - a_t) / prod_{k<n} k!.  Always an integer."""
    nodes = list(nodes)
    if len(set(nodes)) != len(nodes):
        raise ValueError("repeated entries")
    n = len(nodes)
    num = 1
    for s in range(n):
        for t in range(s):
            num *= nodes[s] - nodes[t]
    den = 1
    for k in range(1, n):
        den *= math.factorial(k)
    q = Fraction(num, den)
    if q.denominator != 1:
        raise AssertionError("binomial Vandermonde determinant must be integral")
    return int(q)


# ---------------------------------------------------------------------------
# membership: criterion route and lattice-oracle route


@dataclass
class CriterionReport:
    ok: bool
    witness: tuple | None = None  # (p, n, m, j)
    skipped: list = field(default_factory=list)  # (p, n, m) beyond precision

    def __bool__(self):
        return self.ok


def _coeff_residue(c, p: int, k: int) -> int:
    if isinstance(c, ProfiniteApprox):
        return c.residue_mod(p, k)
    return int(c) % p**k


def s_criterion(G: TruncSeries, primes=None) -> CriterionReport:
    """Finite check of the stable-membership congruences: for every prime p,
    every n with p^n <= m, every multiple m of p^n with m <= T+1, and every
    j < m divisible by p (j = 0 included),
        sum_{i=j}^{m-1} C(i,j) a_i = 0  (mod p^n).

    Instances whose modulus exceeds a profinite coefficient's precision are
    reported in ``skipped``, never silently passed.
    """
    T = G.trunc
    if primes is None:
        if isinstance(G.ring, ProfiniteRing):
            primes = list(G.ring.budget.primes)
        else:
            primes = set_primes_upto(T + 1)
    skipped = []
    for p in sorted(primes):
        nmax = 0
        q = 1
        while q * p <= T + 1:
            q *= p
            nmax += 1
        for n in range(1, nmax + 1):
            q = p**n
            for m in range(q, T + 2, q):
                for j in range(0, m, p):
                    try:
                        s = 0
                        for i in range(j, m):
                            s += math.comb(i, j) * _coeff_residue(G.coeffs[i], p, n)
                        if s % q:
                            return CriterionReport(False, (p, n, m, j), skipped)
                    except PrecisionError:
                        skipped.append((p, n, m))
                        break
    return CriterionReport(True, None, skipped)


def _phi_matrix_rows(m: int, modulus: int, r: int) -> list[list[int]]:
    """Rows Phi^r(x^k) mod (modulus, degree < m) for k = 0..m-1; exact
    because Phi preserves polynomial degree."""
    rows = []
    for k in range(m):
        vec = [0] * m
        vec[k] = 1
        for _ in range(r):
            vec = [
                (j * vec[j] - ((j + 1) * vec[j + 1] if j + 1 < m else 0)) % modulus
                for j in range(m)
            ]
        rows.append(vec)
    return rows


def s_oracle(
    G: TruncSeries, p: int, e: int, T: int | None = None, r_max: int | None = None
) -> bool:
    """Membership in every iterated Phi-image lattice, per quotient window.

    For each n <= e with p^n <= T+1 the ideal (p^n, x^m) with m the largest
    multiple of p^n at most T+1 is Phi-stable, so Phi induces an operator
    on Z/p^n[x]/(x^m); G must lie in the row span (Howell form) of the
    matrix of Phi^r for every r, detected by stabilization of the
    decreasing lattice chain before r_max.
    """
    if T is None:
        T = G.trunc
    if T > G.trunc:
        raise PrecisionError("oracle window exceeds the stored truncation")
    if r_max is None:
        r_max = e * (p - 1) + T
    for n in range(1, e + 1):
        q = p**n
        if q > T + 1:
            break
        m = (T + 1) // q * q
        vec = [_coeff_residue(G.coeffs[i], p, n) for i in range(m)]
        rows = [[1 if i == k else 0 for i in range(m)] for k in range(m)]
        prev_h = None
        stab = None
        for r in range(1, r_max + 1):
            rows = [
                [
                    (j * row[j] - ((j + 1) * row[j + 1] if j + 1 < m else 0)) % q
                    for j in range(m)
                ]
                for row in rows
            ]
            h = howell_form(ModMatrix(q, rows, cols=m))
            if prev_h is not None and h == prev_h:
                stab = h
                break
            prev_h = h
        if stab is None:
            raise ArithmeticError(
                f"image lattices did not stabilize by r_max={r_max}; increase r_max"
            )
        member, _ = in_row_span(stab, vec)
        if not member:
            return False
    return True


def _phi_image_rows(D: int, r: int, q: int) -> list[list[int]]:
    """Truncations to degree < D of Phi^r(x^k), k = 1..D+r-1, mod q: these
    span the full image of Phi^r on series, reduced mod (q, x^D)."""
    rows = []
    for k in range(1, D + r):
        vec = [0] * (k + 1)
        vec[k] = 1
        for _ in range(r):
            vec = [
                (j * vec[j] - ((j + 1) * vec[j + 1] if j + 1 < len(vec) else 0)) % q
                for j in range(len(vec))
            ]
        rows.append((vec + [0] * D)[:D])
    return rows


def tower_member(
    G: TruncSeries, n: int, budget: PrimeBudget | None = None
) -> bool:
    """Does G desuspend from level k+n for every k, within the budget and
    G's truncation window?

    The tower maps compose to Phi-powers, so this is membership of G's
    coefficient window in each image lattice of Phi^r for r >= n; the
    decreasing chain of lattices mod p^e is constant once r >= e, so only
    finitely many r matter.  Scaled monomials d x^j (stored at truncation
    j) pass level j+1 exactly when d_j divides d.
    """
    if n < 1:
        return True
    if budget is None:
        if not isinstance(G.ring, ProfiniteRing):
            raise ValueError("a budget is required for non-profinite input")
        budget = G.ring.budget
    D = G.trunc + 1
    for p in budget.primes:
        e = budget.exponent(p)
        if isinstance(G.ring, ProfiniteRing):
            e = min(e, min(c.prec[p] for c in G.coeffs))
        if e < 1:
            raise PrecisionError(f"no digits left at p={p}")
        q = p**e
        target = [_coeff_residue(G.coeffs[i], p, e) for i in range(D)]
        # the p-divisible part of the generators dies once r >= e
        for r in range(n, max(n, e) + 2):
            member, _ = in_row_span(
                ModMatrix(q, _phi_image_rows(D, r, q), cols=D), target
            )
            if not member:
                return False
    return True


# ---------------------------------------------------------------------------
# basis construction


@dataclass
class BasisSeries:
    """A basis element: G_n (profinite combination of unit Adams series) or
    F_n (additionally integer-consistent, with its canonical integer
    coefficient vector)."""

    kind: str  # "G" or "F"
    n: int
    series: TruncSeries
    int_coeffs: list[int] | None = None
    combination: list | None = None  # [(coefficient, integer node), ...]

    def to_json(self):
        out = {"kind": self.kind, "n": self.n, "series": self.series.to_json()}
        if self.int_coeffs is not None:
            out["int_coeffs"] = list(self.int_coeffs)
        return out


def _glued_nodes(budget: PrimeBudget, count: int) -> list[int]:
    """Integer lifts of the per-prime minimal unit sequences, glued by CRT
    over the budget modulus (least nonnegative).  A_node then has exact
    integer coefficients while matching the prescribed unit at every
    budget prime."""
    per_p = {p: a_min(p, count) for p in budget.primes}
    nodes = []
    for i in range(count):
        pairs = [
            (per_p[p][i] % p ** budget.exponent(p), p ** budget.exponent(p))
            for p in budget.primes
        ]
        nodes.append(crt_lift(pairs)[0])
    if len(set(nodes)) != count:
        raise PrecisionError("budget too small to separate the Adams nodes")
    return nodes


def construct_Gn(n: int, T: int, budget: PrimeBudget) -> BasisSeries:
    """Profinite combination of n+1 unit Adams series with leading term
    d_n x^n: solve the binomial Vandermonde system at the glued integer
    nodes once over Q, then reduce the coefficients at each budget prime
    (denominators are units there by the minimal-sequence divisibility)."""
    d = dn(n).value
    nodes = _glued_nodes(budget, n + 1)
    target = [0] * n + [(-1) ** n * d]
    xs = solve_vandermonde(nodes, target)
    ring = ProfiniteRing(budget)
    coeffs = []
    for x in xs:
        coeffs.append(ProfiniteApprox.from_rational(budget, x))
    G = TruncSeries.zero(ring, T)
    for cof, node in zip(coeffs, nodes):
        G = G + adams_series(node, T).map_coeffs(lambda v: cof * v, ring)
    return BasisSeries("G", n, G, combination=list(zip(coeffs, nodes)))


def construct_Fn(n: int, T: int, budget: PrimeBudget) -> BasisSeries:
    """Integer-consistent basis element with leading term d_n x^n.

    F_0 and F_1 are the canonical closed forms A_1 and A_(-1) - A_1 (these
    pin the sequence model's windows).  For n >= 2 the G_n-descent runs
    with integer correction multipliers: b_i is lifted by CRT to an
    integer, so an integer multiple of G_i subtracts with no precision
    loss and F_n keeps the full budget precision.
    """
    ring = ProfiniteRing(budget)
    one = ProfiniteApprox.from_int(budget, 1)
    if n == 0:
        ints = [1, -1] + [0] * (T - 1)
        return BasisSeries(
            "F", 0, _int_series_to_profinite(ints, ring, T), ints[: T + 1],
            combination=[(one, 1)],
        )
    if n == 1:
        ints = [0, 2] + [1] * (T - 1)
        return BasisSeries(
            "F", 1, _int_series_to_profinite(ints, ring, T), ints[: T + 1],
            combination=[(one, -1), (-one, 1)],
        )
    Gn = construct_Gn(n, T, budget)
    F = Gn.series
    comb = {node: cof for cof, node in Gn.combination}
    ints = [0] * n + [dn(n).value] + [0] * (T - n)
    for i in range(n + 1, T + 1):
        di = dn(i)
        a = F.coeffs[i]
        # least-nonnegative representative modulo the *visible* part of d_i:
        # corrections beyond the budget exponent are invisible mod p^e_p,
        # so capping at e_p keeps the result integer-consistent at full
        # precision (the uncapped precondition would be unattainable here)
        caps = {p: min(di.per_prime.get(p, 0), budget.exponent(p)) for p in budget.primes}
        pairs = [(a.residue_mod(p, caps[p]), p ** caps[p]) for p in budget.primes if caps[p]]
        a_rep = crt_lift(pairs)[0] if pairs else 0
        ints[i] = a_rep
        # integer lift of (a - a_rep)/d_i across the budget, skipping primes
        # where d_i already swallows the whole budget precision
        bpairs = []
        for p in budget.primes:
            v = di.per_prime.get(p, 0)
            k = budget.exponent(p) - v
            if k <= 0:
                continue
            unit = di.value // p**v
            diff = (a - a_rep).residue_mod(p, budget.exponent(p))
            if v and diff % p**v:
                raise AssertionError("descent invariant broke")
            res = (diff // p**v) * modinv(unit, p**k) % p**k
            bpairs.append((res, p**k))
        b_int = crt_lift(bpairs)[0] if bpairs else 0
        if b_int:
            Gi = construct_Gn(i, T, budget)
            F = F - Gi.series.scale(b_int)
            for cof, node in Gi.combination:
                cur = comb.get(node)
                delta = cof * (-b_int)
                comb[node] = delta if cur is None else cur + delta
    return BasisSeries(
        "F", n, F, ints, combination=[(c, node) for node, c in sorted(comb.items())]
    )


def _int_series_to_profinite(ints, ring: ProfiniteRing, T: int) -> TruncSeries:
    return TruncSeries(ring, T, [ring.coerce(c) for c in ints[: T + 1]])


def basis_family(T: int, budget: PrimeBudget, upto: int | None = None):
    """F_0..F_upto at truncation T (upto defaults to T)."""
    if upto is None:
        upto = T
    return [construct_Fn(n, T, budget) for n in range(upto + 1)]


def decompose_S0(G: TruncSeries, budget: PrimeBudget, family=None) -> list[int]:
    """Integer coordinates of G against F_0..F_T by triangular peel-off of
    the leading terms d_n x^n; a nonintegral quotient means G is not an
    integer combination within precision and raises with the degree."""
    T = G.trunc
    if family is None:
        family = basis_family(T, budget)
    if isinstance(G.ring, ProfiniteRing):
        coeffs = [c.lift_symmetric() for c in G.coeffs]
    else:
        coeffs = [int(c) for c in G.coeffs]
    cur = list(coeffs)
    out = []
    for i in range(T + 1):
        d = dn(i).value
        if cur[i] % d:
            raise ValueError(
                f"not in the integer span within precision: degree {i} "
                f"coefficient {cur[i]} is not divisible by d_{i} = {d}"
            )
        q = cur[i] // d
        out.append(q)
        if q:
            fi = family[i].int_coeffs
            for j in range(i, T + 1):
                cur[j] -= q * fi[j]
    return out


# ---------------------------------------------------------------------------
# multiplicative layer


@dataclass
class TwistedAdams:
    """Coefficient data of a twisted Adams operation at t = 1."""

    series: TruncSeries | None
    integral: bool
    witness: tuple | None  # (p, n) with the non-integral coefficient
    rule_integral: bool  # per-prime rule: b_p = 0 or c_p a unit


def twisted_adams(b: ProfiniteApprox, c: ProfiniteApprox, T: int) -> TwistedAdams:
    """Coefficients a_n = (-1)^(n-1) b C(bc-1, n-1) / n of the twisted
    operation's characteristic series, with the integrality verdict.

    The series route computes each coefficient per prime with honest
    precision (division by n consumes v_p(n) digits after the binomial's
    v_p((n-1)!) inflation); the closed per-prime rule is reported alongside
    so the two can be compared.
    """
    budget = b.budget
    if c.budget != budget:
        raise ValueError("mixed budgets")
    rule = True
    for p in budget.primes:
        bz = b.residue_mod(p, budget.exponent(p)) == 0
        cu = c.residue_mod(p, 1) != 0
        if not (bz or cu):
            rule = False
    r = b * c - 1
    ring = ProfiniteRing(budget)
    coeffs = [ring.zero()]
    for n in range(1, T + 1):
        res, prec = {}, {}
        for p in budget.primes:
            infl = vp_factorial(n - 1, p)
            vn = vp(n, p)
            e = r.prec[p] - infl - vn
            if e < 1:
                raise PrecisionError(
                    f"coefficient {n} needs precision > {infl + vn} at p={p}"
                )
            bin_res = gen_binomial(r, n - 1, p, e + vn)
            val = (
                (-1) ** (n - 1) * b.residue_mod(p, e + vn) * bin_res
            ) % p ** (e + vn)
            if vn and val % p**vn:
                return TwistedAdams(None, False, (p, n), rule)
            unit = n // p**vn
            res[p] = (val // p**vn) * modinv(unit, p**e) % p**e
            prec[p] = e
        coeffs.append(ProfiniteApprox(budget, res, prec))
    return TwistedAdams(TruncSeries(ring, T, coeffs), True, None, rule)


def stable_mult_check(c: ProfiniteApprox, T: int) -> bool:
    """True iff c is a unit within budget, its Adams series passes the
    stability criterion, and Phi acts on it as multiplication by c."""
    if not is_unit(c):
        return False
    A = adams_series(c, T)
    if not s_criterion(A).ok:
        return False
    lhs = phi(A)
    rhs = A.truncate(T - 1).map_coeffs(lambda v: v * c)
    return lhs == rhs
