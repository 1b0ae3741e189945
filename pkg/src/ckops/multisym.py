"""Multivariate truncated series, the formal-group-law partial derivative
and its iterates, double-symmetry detection, and symmetric integration.

The derivative here is the second difference with respect to a formal
group law (additive x+y or multiplicative x+y-xy), not a calculus
derivative.  Total-degree truncation throughout.

Storage discipline: symmetric series may be held in SymSeries (sorted
exponent keys); anything whose symmetry is *being tested* travels as a
plain MultiSeries so the data structure cannot assume the answer.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from .series import Q, RationalRing, TruncSeries

MULT = "mult"
ADD = "add"


class NotIntegrable(ArithmeticError):
    """The input was not double-symmetric within truncation."""


def multinomial(total: int, parts) -> int:
    out = math.factorial(total)
    for p in parts:
        out //= math.factorial(p)
    return out


class MultiSeries:
    """Plain (unsorted-key) container: dict from exponent tuple to value,
    truncated by total degree; zero coefficients are not stored."""

    __slots__ = ("ring", "nvars", "trunc", "coeffs")

    def __init__(self, ring, nvars: int, trunc: int, coeffs=None):
        self.ring = ring
        self.nvars = nvars
        self.trunc = trunc
        self.coeffs = {}
        if coeffs:
            for key, val in coeffs.items():
                if len(key) != nvars:
                    raise ValueError(f"key {key} has arity {len(key)} != {nvars}")
                if sum(key) > trunc:
                    continue
                v = ring.coerce(val)
                if not ring.is_zero(v):
                    self.coeffs[tuple(key)] = v

    @classmethod
    def zero(cls, ring, nvars, trunc):
        return cls(ring, nvars, trunc, {})

    def get(self, key):
        return self.coeffs.get(tuple(key), self.ring.zero())

    def is_zero(self):
        return not self.coeffs

    def _binop(self, other, fn):
        if (
            not isinstance(other, MultiSeries)
            or other.nvars != self.nvars
            or self.ring != other.ring
        ):
            raise ValueError("incompatible operands")
        T = min(self.trunc, other.trunc)
        out = {}
        for key in set(self.coeffs) | set(other.coeffs):
            if sum(key) > T:
                continue
            v = fn(self.get(key), other.get(key))
            if not self.ring.is_zero(v):
                out[key] = v
        res = MultiSeries(self.ring, self.nvars, T)
        res.coeffs = out
        return res

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        out = MultiSeries(self.ring, self.nvars, self.trunc)
        if isinstance(c, int) and c == 0:
            return out
        for key, val in self.coeffs.items():
            v = val * c
            if not self.ring.is_zero(v):
                out.coeffs[key] = v
        return out

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            return self.scale(other)
        T = min(self.trunc, other.trunc)
        out = MultiSeries(self.ring, self.nvars, T)
        acc = out.coeffs
        for k1, v1 in self.coeffs.items():
            d1 = sum(k1)
            if d1 > T:
                continue
            for k2, v2 in other.coeffs.items():
                if d1 + sum(k2) > T:
                    continue
                key = tuple(a + b for a, b in zip(k1, k2))
                cur = acc.get(key)
                prod = v1 * v2
                acc[key] = cur + prod if cur is not None else prod
        for key in [k for k, v in acc.items() if self.ring.is_zero(v)]:
            del acc[key]
        return out

    def pow(self, n: int):
        out = MultiSeries(self.ring, self.nvars, self.trunc, {(0,) * self.nvars: 1})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        diff = self - other
        return diff.is_zero()

    def __repr__(self):
        items = sorted(self.coeffs.items())[:6]
        body = ", ".join(f"{k}: {v}" for k, v in items)
        more = ", ..." if len(self.coeffs) > 6 else ""
        return f"MultiSeries({self.nvars} vars, T={self.trunc}, {{{body}{more}}})"

    def total_valuation(self) -> int | None:
        """Smallest total degree of a nonzero monomial; None beyond trunc."""
        if not self.coeffs:
            return None
        return min(sum(k) for k in self.coeffs)


def is_symmetric(M: MultiSeries) -> bool:
    """Coefficientwise symmetry under all variable permutations."""
    groups: dict[tuple, list] = {}
    for key, val in M.coeffs.items():
        groups.setdefault(tuple(sorted(key)), []).append((key, val))
    for skey, items in groups.items():
        counts = {}
        for e in skey:
            counts[e] = counts.get(e, 0) + 1
        nperms = multinomial(M.nvars, counts.values())
        if len(items) != nperms:
            return False
        v0 = items[0][1]
        if any(not M.ring.is_zero(v - v0) for _, v in items[1:]):
            return False
    return True


class SymSeries:
    """Symmetric series stored by sorted exponent key.

    Construction from a plain container verifies symmetry first; the
    symmetric storage is never allowed to *assume* what a test needs.
    """

    __slots__ = ("ring", "nvars", "trunc", "coeffs", "fgl")

    def __init__(self, ring, nvars, trunc, coeffs=None, fgl=MULT):
        if fgl not in (MULT, ADD):
            raise ValueError("fgl must be 'mult' or 'add'")
        self.ring = ring
        self.nvars = nvars
        self.trunc = trunc
        self.fgl = fgl
        self.coeffs = {}
        if coeffs:
            for key, val in coeffs.items():
                key = tuple(key)
                if list(key) != sorted(key):
                    raise ValueError(f"key {key} is not sorted")
                if sum(key) > trunc:
                    continue
                v = ring.coerce(val)
                if not ring.is_zero(v):
                    self.coeffs[key] = v

    @classmethod
    def from_multi(cls, M: MultiSeries, fgl=MULT) -> "SymSeries":
        if not is_symmetric(M):
            raise ValueError("series is not symmetric")
        coeffs = {}
        for key, val in M.coeffs.items():
            coeffs[tuple(sorted(key))] = val
        return cls(M.ring, M.nvars, M.trunc, coeffs, fgl)

    def to_multi(self) -> MultiSeries:
        out = MultiSeries(self.ring, self.nvars, self.trunc)
        for key, val in self.coeffs.items():
            seen = set()
            for perm in _permutations_of(key):
                if perm not in seen:
                    seen.add(perm)
                    out.coeffs[perm] = val
        return out

    def __eq__(self, other):
        if isinstance(other, SymSeries):
            return self.to_multi() == other.to_multi()
        return NotImplemented

    def __repr__(self):
        return f"SymSeries({self.nvars} vars, T={self.trunc}, {self.fgl}, {len(self.coeffs)} keys)"

    def to_json(self):
        return {
            "nvars": self.nvars,
            "trunc": self.trunc,
            "fgl": self.fgl,
            "coeffs": [[list(k), self.ring.coeff_to_json(v)] for k, v in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, data, ring=Q) -> "SymSeries":
        coeffs = {tuple(k): ring.coeff_from_json(v) for k, v in data["coeffs"]}
        return cls(ring, data["nvars"], data["trunc"], coeffs, data["fgl"])


def _permutations_of(key):
    from itertools import permutations

    return permutations(key)


def _as_multi(G, fgl=MULT) -> tuple[MultiSeries, str]:
    if isinstance(G, TruncSeries):
        M = MultiSeries(G.ring, 1, G.trunc)
        for i, c in enumerate(G.coeffs):
            if not G.ring.is_zero(c):
                M.coeffs[(i,)] = c
        return M, fgl
    if isinstance(G, SymSeries):
        return G.to_multi(), G.fgl
    if isinstance(G, MultiSeries):
        return G, fgl
    raise TypeError(f"cannot interpret {type(G).__name__} as a multivariate series")


# ---------------------------------------------------------------------------
# star sums and substitution


def star_sum(positions, fgl: str, nvars: int, trunc: int, ring=Q) -> MultiSeries:
    """Formal-group sum of the chosen variable positions (0-based) inside an
    nvars-variable series; the empty set gives 0.

    Multiplicative law: x * y = x + y - xy, so the iterated sum over I is
    1 - prod_{i in I} (1 - x_i); additive law: plain sum.
    """
    positions = sorted(positions)
    out = MultiSeries(ring, nvars, trunc)
    if not positions:
        return out
    if fgl == ADD:
        for i in positions:
            key = [0] * nvars
            key[i] = 1
            out.coeffs[tuple(key)] = ring.one()
        return out
    for r in range(1, len(positions) + 1):
        sign = (-1) ** (r + 1)
        for sub in combinations(positions, r):
            key = [0] * nvars
            for i in sub:
                key[i] = 1
            if r <= trunc:
                out.coeffs[tuple(key)] = ring.coerce(sign)
    return out


def subst_first(
    G: MultiSeries, P: MultiSeries, out_nvars: int, tail_positions
) -> MultiSeries:
    """G with its first variable replaced by the series P (same output
    arity) and variables 2..n of G mapped to ``tail_positions``."""
    T = min(G.trunc, P.trunc)
    ring = G.ring
    slices: dict[int, MultiSeries] = {}
    for key, val in G.coeffs.items():
        k = key[0]
        sl = slices.get(k)
        if sl is None:
            sl = MultiSeries(ring, out_nvars, T)
            slices[k] = sl
        out_key = [0] * out_nvars
        for e, pos in zip(key[1:], tail_positions):
            out_key[pos] = e
        if sum(out_key) <= T:
            cur = sl.coeffs.get(tuple(out_key))
            sl.coeffs[tuple(out_key)] = val if cur is None else cur + val
    out = MultiSeries(ring, out_nvars, T)
    if not slices:
        return out
    kmax = max(slices)
    power = MultiSeries(ring, out_nvars, T, {(0,) * out_nvars: 1})
    for k in range(kmax + 1):
        if k > 0:
            power = power * P
            if power.is_zero():
                break
        if k in slices:
            out = out + power * slices[k]
    return out


def partial_derivative(G, fgl: str | None = None) -> MultiSeries:
    """The formal-group-law partial derivative in the first variable:
    G(x1*x2, x3, ...) - G(x1, x3, ...) - G(x2, x3, ...) + G(0, x3, ...).

    Returns a plain container; wrap with SymSeries.from_multi after an
    explicit symmetry check if symmetric storage is wanted.
    """
    M, law = _as_multi(G, fgl or MULT)
    if fgl is not None:
        law = fgl
    n = M.nvars
    out_n = n + 1
    T = M.trunc
    tail = list(range(2, out_n))
    star12 = star_sum([0, 1], law, out_n, T, M.ring)
    x0 = star_sum([0], law, out_n, T, M.ring)
    x1 = star_sum([1], law, out_n, T, M.ring)
    zero = MultiSeries(M.ring, out_n, T)
    return (
        subst_first(M, star12, out_n, tail)
        - subst_first(M, x0, out_n, tail)
        - subst_first(M, x1, out_n, tail)
        + subst_first(M, zero, out_n, tail)
    )


def partial0(G, fgl: str | None = None) -> MultiSeries:
    """partial^0: G - G(0, x_2, ..., x_n), same arity."""
    M, law = _as_multi(G, fgl or MULT)
    n = M.nvars
    tail = list(range(1, n))
    zero = MultiSeries(M.ring, n, M.trunc)
    return M - subst_first(M, zero, n, tail)


def iter_partial(G, m: int, fgl: str | None = None) -> MultiSeries:
    """m-th iterated partial derivative by the subset-sum formula
    (partial^m G)(x_1..x_{m+n}) =
        sum_{I in [1, m+1]} (-1)^(m+1-|I|) G(x_I, x_{m+2}, ...).

    For m = 0 this is the projection partial^0.  Must agree with m-fold
    application of partial_derivative (cross-checked in the tests).
    """
    M, law = _as_multi(G, fgl or MULT)
    if fgl is not None:
        law = fgl
    if m == 0:
        return partial0(M, law)
    n = M.nvars
    out_n = n + m
    T = M.trunc
    tail = list(range(m + 1, out_n))
    out = MultiSeries(M.ring, out_n, T)
    head = list(range(m + 1))
    for r in range(len(head) + 1):
        sign = (-1) ** (m + 1 - r)
        for sub in combinations(head, r):
            star = star_sum(list(sub), law, out_n, T, M.ring)
            out = out + subst_first(M, star, out_n, tail).scale(sign)
    return out


def is_double_symmetric(G, fgl: str | None = None) -> bool:
    """True iff G and its partial derivative are both symmetric."""
    M, law = _as_multi(G, fgl or MULT)
    if fgl is not None:
        law = fgl
    if M.nvars == 1:
        return True
    if not is_symmetric(M):
        return False
    return is_symmetric(partial_derivative(M, law))


# ---------------------------------------------------------------------------
# symmetric integration (over Q, multiplicative law)


def _exp_minus_coeffs(T: int) -> list[Fraction]:
    """Series 1 - e^y = -(y + y^2/2! + ...), used for x = 1 - e^y."""
    return [Fraction(0)] + [Fraction(-1, math.factorial(k)) for k in range(1, T + 1)]


def _subst_var_univariate(M: MultiSeries, var: int, u: list[Fraction]) -> MultiSeries:
    """Substitute variable ``var`` by the univariate series u (u_0 = 0)."""
    T = M.trunc
    ring = M.ring
    slices: dict[int, MultiSeries] = {}
    for key, val in M.coeffs.items():
        k = key[var]
        rest = list(key)
        rest[var] = 0
        sl = slices.setdefault(k, MultiSeries(ring, M.nvars, T))
        cur = sl.coeffs.get(tuple(rest))
        sl.coeffs[tuple(rest)] = val if cur is None else cur + val
    useries = MultiSeries(ring, M.nvars, T)
    for i, c in enumerate(u[: T + 1]):
        if c:
            key = [0] * M.nvars
            key[var] = i
            useries.coeffs[tuple(key)] = ring.coerce(c)
    out = MultiSeries(ring, M.nvars, T)
    if not slices:
        return out
    power = MultiSeries(ring, M.nvars, T, {(0,) * M.nvars: 1})
    for k in range(max(slices) + 1):
        if k > 0:
            power = power * useries
            if power.is_zero():
                break
        if k in slices:
            out = out + power * slices[k]
    return out


def _additive_iter_partial_univ(coeffs: dict[int, Fraction], n: int, T: int) -> MultiSeries:
    """partial_add^(n-1) of sum_m c_m y^m: every monomial with all parts
    positive summing to m appears with its multinomial coefficient."""
    out = MultiSeries(Q, n, T)
    for m, c in coeffs.items():
        if c == 0 or m > T:
            continue
        for key in _compositions(m, n):
            out.coeffs[key] = out.coeffs.get(key, Fraction(0)) + c * multinomial(m, key)
    out.coeffs = {k: v for k, v in out.coeffs.items() if v != 0}
    return out


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def integrate_symmetric(G, n: int | None = None) -> TruncSeries:
    """Univariate L with partial^(n-1) L = G (multiplicative law, over Q).

    Strategy: move to additive coordinates y_i = log(1 - x_i), where the
    derivative acts on y^m with an explicitly invertible diagonal action,
    read the coefficients off degree by degree, and transform back.  The
    kernel ambiguity (span of lg_0..lg_{n-1}) is resolved by returning the
    unique L whose additive-coordinate valuation is >= n.

    Raises NotIntegrable when the coefficients are inconsistent, i.e. the
    input was not double-symmetric within truncation.
    """
    M, law = _as_multi(G)
    if law != MULT:
        raise ValueError("integration is implemented for the multiplicative law")
    if not isinstance(M.ring, RationalRing):
        raise TypeError("symmetric integration needs rational coefficients")
    if n is None:
        n = M.nvars
    if n != M.nvars:
        raise ValueError("n must match the variable count")
    T = M.trunc
    if any(0 in key for key in M.coeffs):
        raise NotIntegrable("input is not divisible by x_1 ... x_n")
    # to additive coordinates
    u = _exp_minus_coeffs(T)
    Gy = M
    for v in range(n):
        Gy = _subst_var_univariate(Gy, v, u)
    # read off L~ degree by degree at the witness monomial (m-n+1, 1, ..., 1)
    c: dict[int, Fraction] = {}
    for m in range(n, T + 1):
        key = (m - n + 1,) + (1,) * (n - 1)
        c[m] = Fraction(Gy.get(key)) / multinomial(m, key)
    # full consistency check: the diagonal action must reproduce G~ exactly
    if _additive_iter_partial_univ(c, n, T) != Gy:
        raise NotIntegrable("coefficients inconsistent: not double-symmetric within truncation")
    Ly = TruncSeries(Q, T, [c.get(m, Fraction(0)) for m in range(T + 1)])
    lg1 = TruncSeries(Q, T, [Fraction(0)] + [Fraction(-1, i) for i in range(1, T + 1)])
    return Ly.substitute(lg1)


def aformula_check(G: TruncSeries, n: int, T: int | None = None) -> bool:
    """Verify the derivative-reduction formula
    (partial^n G)(x_1..x_{n+1}) = sum_{k>=1} (1/k!)
        partial^(n-1)((1-x)^k d^k G/dx^k)(x_1..x_n) * x_{n+1}^k
    up to total degree T (multiplicative law, over Q)."""
    if T is None:
        T = G.trunc
    G = G.truncate(T)
    lhs = iter_partial(G, n)
    rhs = MultiSeries(G.ring, n + 1, T)
    dk = G
    one_minus_x = TruncSeries(G.ring, T, [1, -1])
    base = one_minus_x
    for k in range(1, T + 1):
        dk = TruncSeries(
            dk.ring, dk.trunc, [(i + 1) * dk.coeffs[i + 1] for i in range(dk.trunc)] + [dk.ring.zero()]
        )
        Hk = base * dk
        inner = iter_partial(Hk, n - 1)
        scale = Fraction(1, math.factorial(k))
        for key, val in inner.coeffs.items():
            out_key = key + (k,)
            if sum(out_key) <= T:
                rhs.coeffs[out_key] = rhs.coeffs.get(out_key, Fraction(0)) + val * scale
        base = base * one_minus_x
    rhs.coeffs = {k: v for k, v in rhs.coeffs.items() if v != 0}
    return lhs == rhs


def integer_coefficients(M: MultiSeries) -> bool:
    """All coefficients integral: exact denominators over Q, trivially true
    over Z; profinite residues are integer-consistent by CRT construction,
    so the profinite answer is True (documented finite-precision surrogate)."""
    if isinstance(M.ring, RationalRing):
        return all(Fraction(v).denominator == 1 for v in M.coeffs.values())
    return True
