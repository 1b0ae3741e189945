"""Membership and decomposition for the integrality-filtered series groups:
the partial-derivative route, the Phi route, the profinite-component
decomposition, and the integer-sequence machinery that realizes profinite
components inside rational series.

Series over Q are handled exactly (integrality means denominator 1);
profinite series carry their own budget.  "Profinite-rational" inputs are
supported as the union of those two pure forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    IncompatibleCongruences,
    PrecisionError,
    PrimeBudget,
    ProfiniteApprox,
    compatible_lift,
    crt_lift,
    rational_mod,
    rational_reconstruct,
    set_primes_upto,
    vp,
    vp_fraction,
)
from .multisym import integer_coefficients, iter_partial
from .series import (
    ProfiniteRing,
    RationalRing,
    TruncSeries,
    lg_series,
    phi,
    valuation,
    weighted_lg,
)


class NotInGroup(ValueError):
    """The series fails a stated membership precondition."""


def _is_integral_coeff(ring, c) -> bool:
    if isinstance(ring, RationalRing):
        return Fraction(c).denominator == 1
    return True  # Z exact; profinite residues are integral by construction


def in_Qn(G: TruncSeries, n: int) -> bool:
    """True iff partial^(n-1) G has integral coefficients up to the
    truncation's total degree.  For n >= 1 the input must lie in x K[[x]]."""
    if n < 1:
        return all(_is_integral_coeff(G.ring, c) for c in G.coeffs)
    if not G.ring.is_zero(G.coeffs[0]):
        raise NotInGroup("membership for n >= 1 needs a zero constant term")
    D = iter_partial(G, n - 1)
    return integer_coefficients(D)


def in_Qnm(G: TruncSeries, n: int, m: int) -> bool:
    """Membership plus the valuation condition v(partial^(n-1) G) >= m."""
    if n < 1:
        v = valuation(G)
        return in_Qn(G, n) and (v is None or v >= max(0, m))
    if not in_Qn(G, n):
        return False
    D = iter_partial(G, n - 1)
    v = D.total_valuation()
    return v is None or v >= m


def in_Opnm_phi(G: TruncSeries, n: int, m: int) -> bool:
    """The Phi-route test: Phi^n(G) integral with valuation >= m - n.

    Agrees with in_Qnm on the same inputs (the two routes are the module's
    dual-route equivalence and are cross-checked in the tests)."""
    if n < 1:
        raise ValueError("the Phi route applies to n >= 1")
    if G.trunc < n:
        raise PrecisionError(f"need truncation >= {n}, have {G.trunc}")
    H = G
    for _ in range(n):
        H = phi(H)
    if not all(_is_integral_coeff(H.ring, c) for c in H.coeffs):
        return False
    v = valuation(H)
    return v is None or v >= m - n


@dataclass
class Component:
    """One profinite component of a decomposition, known only modulo an
    explicit determination modulus (a divisor of lcm(1..T) per prime)."""

    index: int
    residues: dict  # prime -> (exponent, residue)
    modulus: int
    candidate: Fraction  # representative used for the subtraction

    def to_json(self):
        return {
            "index": self.index,
            "residues": {str(p): [k, r] for p, (k, r) in sorted(self.residues.items())},
            "modulus": self.modulus,
            "candidate": str(self.candidate),
        }


def _component_window(T: int, r: int) -> int:
    """Degrees available for extracting component r (Phi^(r-1) costs r-1)."""
    return T - (r - 1)


def _extract_b_family(H: TruncSeries, budget: PrimeBudget, window: int):
    """Family {i: -b_i} with b_i = i * [x^i]H, as ProfiniteApprox."""
    ring = ProfiniteRing(budget)
    return {i: ring.coerce(-(H.coeffs[i] * i)) for i in range(1, window + 1)}


def _component_from_family(fam, budget: PrimeBudget, window: int, r: int):
    """Residues of the component modulo the maximal prime powers <= window."""
    # validates congruence compatibility; lifts over the budget primes only
    t = compatible_lift(fam, window, primes=budget.primes)
    residues = {}
    modulus = 1
    for p in set_primes_upto(window):
        if p not in budget.primes:
            continue
        k = 0
        q = 1
        while q * p <= window:
            q *= p
            k += 1
        k = min(k, budget.exponent(p))
        residues[p] = (k, t % p**k)
        modulus *= p**k
    return residues, modulus, t % modulus if modulus > 1 else 0


def decompose_Qn_hat(G: TruncSeries, n: int, budget: PrimeBudget | None = None):
    """Split G into profinite lg-components c_1..c_(n-1) and a remainder
    with budget-integral coefficients: G = sum c_r lg_r + remainder.

    Components are extracted top-down: apply Phi^(r-1), read the lg_1
    component through the congruences c = -i a_i (mod i), subtract the
    integer representative, recurse.  Each component carries the modulus
    it is determined to; the remainder reassembles G exactly.
    """
    if isinstance(G.ring, ProfiniteRing):
        budget = G.ring.budget
    if budget is None:
        raise ValueError("a prime budget is required for rational input")
    if n < 1:
        raise ValueError("n must be >= 1")
    rational = isinstance(G.ring, RationalRing)
    cur = G
    components = []
    for r in range(n - 1, 0, -1):
        window = _component_window(G.trunc, r)
        if window < 1:
            raise PrecisionError(f"truncation {G.trunc} too small for component {r}")
        H = cur
        for _ in range(r - 1):
            H = phi(H)
        try:
            fam = _extract_b_family(H, budget, window)
            residues, modulus, t = _component_from_family(fam, budget, window, r)
        except (IncompatibleCongruences, ValueError) as exc:
            raise NotInGroup(f"component {r}: {exc}") from None
        cand = Fraction(t)
        components.append(Component(r, residues, modulus, cand))
        lg = lg_series(r, G.trunc)
        if rational:
            cur = cur - lg.scale(cand)
        else:
            cur = _sub_rational_profinite(cur, lg.scale(cand))
    components.reverse()
    _check_remainder_integral(cur, budget)
    return components, cur


def _sub_rational_profinite(cur: TruncSeries, rat: TruncSeries) -> TruncSeries:
    """cur - rat for profinite cur and rational rat whose denominators are
    absorbed by matching divisibility in cur (degreewise exact division)."""
    ring = cur.ring
    out = []
    for i, (a, q) in enumerate(zip(cur.coeffs, rat.coeffs)):
        q = Fraction(q)
        if q == 0:
            out.append(a)
            continue
        den = q.denominator
        num = (a * den) - q.numerator
        out.append(num.divide_exact(den))
    return TruncSeries(ring, cur.trunc, out)


def _check_remainder_integral(rem: TruncSeries, budget: PrimeBudget):
    if isinstance(rem.ring, RationalRing):
        for i, c in enumerate(rem.coeffs):
            c = Fraction(c)
            for p in budget.primes:
                if c != 0 and vp(c.denominator, p) > 0:
                    raise NotInGroup(
                        f"remainder coefficient {i} = {c} is not integral at p={p}"
                    )


@dataclass
class ComponentClass:
    """A component of rho_n reduced modulo Q: either the zero class (some
    small-height rational explains every residue) or a nonzero class with
    a (prime, exponent, residue) witness."""

    index: int
    is_zero: bool
    value: Fraction | None
    witness: tuple | None
    residues: dict

    def to_json(self):
        return {
            "index": self.index,
            "zero": self.is_zero,
            "value": None if self.value is None else str(self.value),
            "witness": self.witness,
        }


def rho_n(G: TruncSeries, n: int, budget: PrimeBudget) -> list[ComponentClass]:
    """Classes of the lg-components of a rational series modulo Q.

    Finite truncation can never prove a residue family has no rational
    explanation, so the class test is: reconstruct the unique small-height
    rational matching the component residues and verify it against every
    congruence in the window; failure yields the witnessing residue.
    """
    if not isinstance(G.ring, RationalRing):
        raise TypeError("rho_n classifies rational series")
    out = []
    cur = G
    for r in range(n - 1, 0, -1):
        window = _component_window(G.trunc, r)
        H = cur
        for _ in range(r - 1):
            H = phi(H)
        bvals = {i: -(H.coeffs[i] * i) for i in range(1, window + 1)}
        # residues where the rational b allows them; obstructions elsewhere
        residues = {}
        obstructions = {}
        pairs = []
        for p in budget.primes:
            k, q = 0, 1
            while q * p <= window:
                q *= p
                k += 1
            if k == 0:
                continue
            val = bvals[q]
            if val == 0 or vp_fraction(val, p) >= 0:
                rres = rational_mod(val, p**k) if val != 0 else 0
                residues[p] = (k, rres)
                pairs.append((rres, p**k))
            else:
                obstructions[p] = vp_fraction(val, p)
        cand = None
        if pairs:
            x, M = crt_lift(pairs)
            cand = rational_reconstruct(x, M)
        elif not obstructions:
            cand = Fraction(0)
        if cand is not None and obstructions:
            # the reconstruction must also explain every denominator seen
            for p, v in obstructions.items():
                if cand == 0 or vp_fraction(cand, p) != v:
                    cand = None
                    break
        witness = None
        if cand is not None:
            # verify the full congruence family: cand = -b_i (mod i)
            ok = True
            for i in range(2, window + 1):
                delta = cand - bvals[i]
                for p in budget.primes:
                    v = vp(i, p)
                    if v and delta != 0 and vp_fraction(delta, p) < v:
                        ok = False
                        witness = (p, v, str(bvals[i]))
                        break
                if not ok:
                    break
            if ok:
                out.append(ComponentClass(r, True, cand, None, residues))
                cur = cur - lg_series(r, G.trunc).scale(cand)
                continue
            cand = None
        if witness is None:
            if residues:
                p0 = next(iter(residues))
                witness = (p0, *residues[p0])
            else:
                p0 = budget.primes[0]
                witness = (p0, obstructions.get(p0), None)
        out.append(ComponentClass(r, False, None, witness, residues))
        # subtract an integer representative so deeper components stay readable
        t = crt_lift(pairs)[0] if pairs else 0
        cur = cur - lg_series(r, G.trunc).scale(Fraction(t))
    out.reverse()
    return out


def N33_sequence(c: ProfiniteApprox, r: int, T: int) -> list[int]:
    """Integer sequence c_1..c_T with c_i = c (mod i) such that the weighted
    series (c - c~) lg_k is integral for k = 1..r.

    Built by the inductive repair: c_1 = c (mod r!), then degree by degree
    add multiples of (n+1)(n+2)...(n+k) to c_(n+1) to clear each division.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    budget = c.budget
    rfact = math.factorial(r)
    c1 = _residue_of(c, rfact)
    cs = [c1]
    for n in range(1, T):
        cs.append(_residue_of(c, n + 1))
        for k in range(1, r):
            m = n + k
            if m + 1 > T:  # coefficient beyond truncation: unconstrained
                break
            A = _gk_coeff(c, cs, k + 1, m)
            B = _gk_coeff(c, cs, k, m)
            num = A * m - B
            # shifting c_(n+1) by sign*t*(n+1)...(n+k) moves num by -t
            t = _residue_of(num, m + 1)
            if t:
                prod = 1
                for j in range(n + 1, n + k + 1):
                    prod *= j
                cs[n] += (-1) ** (k + 1) * t * prod
    # final self-check: every weighted series divides out exactly
    seq = [c - ci for ci in cs]
    for k in range(1, r + 1):
        weighted_lg(seq, k, T)  # raises PrecisionError if non-integral
    return cs


def classical_approx(G: TruncSeries, n: int, d: int) -> TruncSeries:
    """Integer polynomial G' of degree <= d with
    G - G' in sum_r Q lg_r + x^(d+1) Q[[x]].

    Construction: extract each component's congruence data at every prime
    p <= d straight from the rational coefficients (no budget needed over
    Q), pick the integer representative modulo the lg_r-denominator lcm,
    subtract, truncate.  Inputs must be rational with components integral
    at the primes <= d (the integer-sequence generators of the group);
    anything else raises with the blocking coefficient.
    """
    if not isinstance(G.ring, RationalRing):
        raise TypeError("classical_approx expects an exact rational series")
    if d >= G.trunc:
        raise ValueError("need d < truncation")
    cur = G
    for r in range(n - 1, 0, -1):
        window = _component_window(G.trunc, r)
        H = cur
        for _ in range(r - 1):
            H = phi(H)
        bvals = {i: -(H.coeffs[i] * i) for i in range(1, window + 1)}
        lg = lg_series(r, G.trunc)
        # representative must match the component modulo every denominator
        # appearing in lg_r's coefficients up to degree d
        pairs = []
        for p in set_primes_upto(d):
            need = max(
                (-vp_fraction(lg.coeffs[i], p) for i in range(1, d + 1) if lg.coeffs[i] != 0),
                default=0,
            )
            if need <= 0:
                continue
            q = p**need
            kmax_avail = 0
            qa = 1
            while qa * p <= window:
                qa *= p
                kmax_avail += 1
            if need > kmax_avail:
                raise PrecisionError(
                    f"component {r} needs c mod {p}^{need}, window {window} "
                    f"only determines {p}^{kmax_avail}"
                )
            val = bvals[p**need]
            if val != 0 and vp_fraction(val, p) < 0:
                raise NotInGroup(
                    f"component {r} has a rational obstruction at p={p}"
                )
            pairs.append((rational_mod(val, q) if val != 0 else 0, q))
        t = crt_lift(pairs)[0] if pairs else 0
        cur = cur - lg.scale(Fraction(t))
    out = []
    for i in range(d + 1):
        ci = Fraction(cur.coeffs[i])
        if ci.denominator != 1:
            raise NotInGroup(
                f"truncation coefficient {i} = {ci} is not integral; the "
                "input is outside the supported generator structure"
            )
        out.append(int(ci))
    from .series import Z

    return TruncSeries(Z, d, out)


def _residue_of(x: ProfiniteApprox, m: int) -> int:
    """x mod m for a profinite x, m factoring inside the budget."""
    pairs = []
    for p in set_primes_upto(m):
        v = vp(m, p)
        if v == 0:
            continue
        if p not in x.budget.primes:
            raise PrecisionError(f"prime {p} of modulus {m} is outside the budget")
        pairs.append((x.residue_mod(p, v), p**v))
    return crt_lift(pairs)[0] if pairs else 0


def _gk_coeff(c: ProfiniteApprox, cs: list[int], k: int, m: int) -> ProfiniteApprox:
    """[x^m] of G_k = (c - c~) lg_k up to the sign convention of the
    weighted series, assembled from the chain weights with a single exact
    division per coefficient (minimal precision loss).  Only c_1..c_(m-k+1)
    enter, which the construction has already fixed."""
    from .series import chain_weights

    w = chain_weights(k, m)[m]
    den = 1
    for i in range(1, m + 1):
        if w[i] != 0:
            den = den * w[i].denominator // math.gcd(den, w[i].denominator)
    acc = ProfiniteApprox.from_int(c.budget, 0)
    for i in range(1, m - k + 2):
        if w[i] == 0:
            continue
        acc = acc + (c - ProfiniteApprox.from_int(c.budget, cs[i - 1])) * int(w[i] * den)
    return acc.divide_exact(den) * ((-1) ** k)
