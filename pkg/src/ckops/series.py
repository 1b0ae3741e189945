"""Univariate truncated power series over Q, Z, and profinite coefficients,
with the operator Phi, Adams and logarithm series, the composition product,
and the sequence-side b map.

A series stores exactly trunc+1 coefficients; identities hold modulo
x^(trunc+1).  Phi and desuspension each cost one truncation degree and the
result records it; operations never return silently degraded answers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .arith import (
    PrecisionError,
    PrimeBudget,
    ProfiniteApprox,
    gbinom,
    gen_binomial,
    rational_from_str,
    rational_to_str,
    vp_factorial,
)


class TruncationExhausted(ArithmeticError):
    """An operation needs more truncation degrees than the series stores."""


# ---------------------------------------------------------------------------
# coefficient rings


class RationalRing:
    name = "Q"

    @staticmethod
    def coerce(x):
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    zero = staticmethod(lambda: Fraction(0))
    one = staticmethod(lambda: Fraction(1))

    @staticmethod
    def is_zero(x):
        return x == 0

    @staticmethod
    def coeff_to_json(x):
        return rational_to_str(x)

    @staticmethod
    def coeff_from_json(s):
        return rational_from_str(s) if isinstance(s, str) else Fraction(s)

    def to_json(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class IntegerRing:
    name = "Z"

    @staticmethod
    def coerce(x):
        if isinstance(x, int):
            return x
        if isinstance(x, Fraction) and x.denominator == 1:
            return int(x)
        raise TypeError(f"cannot coerce {x!r} into Z")

    zero = staticmethod(lambda: 0)
    one = staticmethod(lambda: 1)

    @staticmethod
    def is_zero(x):
        return x == 0

    @staticmethod
    def coeff_to_json(x):
        return x

    @staticmethod
    def coeff_from_json(s):
        return int(s)

    def to_json(self):
        return "Z"

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("Z")

    def __repr__(self):
        return "Z"


class ProfiniteRing:
    name = "profinite"

    def __init__(self, budget: PrimeBudget):
        self.budget = budget

    def coerce(self, x):
        if isinstance(x, ProfiniteApprox):
            if x.budget != self.budget:
                raise ValueError("mixed prime budgets")
            return x
        if isinstance(x, int):
            return ProfiniteApprox.from_int(self.budget, x)
        if isinstance(x, Fraction):
            return ProfiniteApprox.from_rational(self.budget, x)
        raise TypeError(f"cannot coerce {x!r} into Zhat")

    def zero(self):
        return ProfiniteApprox.from_int(self.budget, 0)

    def one(self):
        return ProfiniteApprox.from_int(self.budget, 1)

    @staticmethod
    def is_zero(x):
        return x.is_zero()

    @staticmethod
    def coeff_to_json(x):
        return x.to_json()

    def coeff_from_json(self, s):
        return ProfiniteApprox.from_json(self.budget, s)

    def to_json(self):
        return {"profinite": self.budget.to_json()}

    def __eq__(self, other):
        return isinstance(other, ProfiniteRing) and other.budget == self.budget

    def __hash__(self):
        return hash(("profinite", self.budget))

    def __repr__(self):
        return f"Zhat{list(self.budget.primes)}"


Q = RationalRing()
Z = IntegerRing()


def ring_from_json(data) -> RationalRing | IntegerRing | ProfiniteRing:
    if data == "Q":
        return Q
    if data == "Z":
        return Z
    if isinstance(data, dict) and "profinite" in data:
        return ProfiniteRing(PrimeBudget.from_json(data["profinite"]))
    raise ValueError(f"unknown ring tag {data!r}")


# ---------------------------------------------------------------------------
# truncated series


class TruncSeries:
    __slots__ = ("ring", "trunc", "coeffs")

    def __init__(self, ring, trunc: int, coeffs: Iterable):
        if trunc < 0:
            raise ValueError("truncation must be >= 0")
        self.ring = ring
        self.trunc = trunc
        cs = [ring.coerce(c) for c in coeffs]
        if len(cs) > trunc + 1:
            raise ValueError(f"{len(cs)} coefficients for truncation {trunc}")
        while len(cs) < trunc + 1:
            cs.append(ring.zero())
        self.coeffs = tuple(cs)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, ring, T: int) -> "TruncSeries":
        return cls(ring, T, [])

    @classmethod
    def one(cls, ring, T: int) -> "TruncSeries":
        return cls(ring, T, [ring.one()])

    @classmethod
    def monomial(cls, ring, T: int, k: int, c=1) -> "TruncSeries":
        if not 0 <= k <= T:
            raise ValueError("monomial degree outside truncation")
        coeffs = [ring.zero()] * (T + 1)
        coeffs[k] = ring.coerce(c)
        return cls(ring, T, coeffs)

    # -- basics ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if self.ring != other.ring or self.trunc != other.trunc:
            return False
        return all(
            self.ring.is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs)
        )

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if self.trunc > 5 else ""
        return f"TruncSeries({self.ring!r}; T={self.trunc}; [{head}{tail}])"

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.coeffs)

    def _align(self, other) -> int:
        if not isinstance(other, TruncSeries):
            raise TypeError("expected a TruncSeries")
        if self.ring != other.ring:
            raise ValueError(f"mixed rings {self.ring!r} and {other.ring!r}")
        return min(self.trunc, other.trunc)

    def __add__(self, other):
        T = self._align(other)
        return TruncSeries(
            self.ring, T, [a + b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __sub__(self, other):
        T = self._align(other)
        return TruncSeries(
            self.ring, T, [a - b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __neg__(self):
        return TruncSeries(self.ring, self.trunc, [-c for c in self.coeffs])

    def scale(self, c) -> "TruncSeries":
        c = self.ring.coerce(c)
        return TruncSeries(self.ring, self.trunc, [c * a for a in self.coeffs])

    def __mul__(self, other):
        T = self._align(other)
        out = [self.ring.zero() for _ in range(T + 1)]
        for i, a in enumerate(self.coeffs[: T + 1]):
            if self.ring.is_zero(a):
                continue
            for j in range(T + 1 - i):
                b = other.coeffs[j]
                out[i + j] = out[i + j] + a * b
        return TruncSeries(self.ring, T, out)

    def pow(self, n: int) -> "TruncSeries":
        out = TruncSeries.one(self.ring, self.trunc)
        for _ in range(n):
            out = out * self
        return out

    def truncate(self, T: int) -> "TruncSeries":
        if T > self.trunc:
            raise TruncationExhausted(f"cannot extend T={self.trunc} to {T}")
        return TruncSeries(self.ring, T, self.coeffs[: T + 1])

    def substitute(self, u: "TruncSeries") -> "TruncSeries":
        """Classical substitution self(u(x)) for u with zero constant term."""
        if not self.ring.is_zero(u.coeffs[0]):
            raise ValueError("substitution needs a series with zero constant term")
        T = min(self.trunc, u.trunc)
        res = TruncSeries(self.ring, T, [self.coeffs[T]])
        for k in range(T - 1, -1, -1):
            res = res * u
            res = TruncSeries(
                self.ring, T, [self.coeffs[k] + res.coeffs[0]] + list(res.coeffs[1:])
            )
        return res

    def map_coeffs(self, fn, ring=None) -> "TruncSeries":
        return TruncSeries(ring or self.ring, self.trunc, [fn(c) for c in self.coeffs])

    # -- serialization ----------------------------------------------------

    def to_json(self):
        return {
            "ring": self.ring.to_json(),
            "trunc": self.trunc,
            "coeffs": [self.ring.coeff_to_json(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data) -> "TruncSeries":
        ring = ring_from_json(data["ring"])
        coeffs = [ring.coeff_from_json(c) for c in data["coeffs"]]
        return cls(ring, data["trunc"], coeffs)


@dataclass(frozen=True)
class SeqWindow:
    """Contiguous window of a sequence; start may be negative."""

    start: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) < 1:
            raise ValueError("window must hold at least one value")

    @property
    def stop(self) -> int:
        return self.start + len(self.values)

    def __getitem__(self, i: int):
        if not self.start <= i < self.stop:
            raise IndexError(f"index {i} outside window [{self.start}, {self.stop})")
        return self.values[i - self.start]

    def indices(self) -> range:
        return range(self.start, self.stop)

    def to_json(self):
        return {"start": self.start, "values": list(self.values)}


# ---------------------------------------------------------------------------
# operations


def valuation(G: TruncSeries) -> int | None:
    """Smallest degree with a nonzero coefficient (within precision for
    profinite coefficients); None means "beyond truncation" (v = infinity
    as far as this window can tell)."""
    for i, c in enumerate(G.coeffs):
        if not G.ring.is_zero(c):
            return i
    return None


def phi(G: TruncSeries) -> TruncSeries:
    """(x-1) dG/dx, truncated one degree lower."""
    if G.trunc < 1:
        raise TruncationExhausted("phi needs truncation >= 1")
    T = G.trunc - 1
    out = [
        k * G.coeffs[k] - (k + 1) * G.coeffs[k + 1]
        for k in range(T + 1)
    ]
    return TruncSeries(G.ring, T, out)


def desuspend(G: TruncSeries, n: int) -> TruncSeries:
    """Series form of the desuspension from level n: Phi for n <= 1,
    Phi with the constant term projected away for n > 1."""
    H = phi(G)
    if n <= 1:
        return H
    return TruncSeries(H.ring, H.trunc, [H.ring.zero()] + list(H.coeffs[1:]))


def adams_series(r, T: int) -> TruncSeries:
    """(1-x)^r truncated at T; r may be an integer or a ProfiniteApprox."""
    if isinstance(r, int):
        return TruncSeries(Z, T, [(-1) ** k * gbinom(r, k) for k in range(T + 1)])
    if isinstance(r, ProfiniteApprox):
        ring = ProfiniteRing(r.budget)
        coeffs = []
        for k in range(T + 1):
            res, prec = {}, {}
            for p in r.budget.primes:
                e = r.prec[p] - vp_factorial(k, p)
                if e < 1:
                    raise PrecisionError(
                        f"A_r coefficient {k} needs r mod {p}^{vp_factorial(k, p) + 1}"
                    )
                res[p] = (-1) ** k * gen_binomial(r, k, p, e) % p**e
                prec[p] = e
            coeffs.append(ProfiniteApprox(r.budget, res, prec))
        return TruncSeries(ring, T, coeffs)
    raise TypeError("Adams exponent must be an integer or a ProfiniteApprox")


@lru_cache(maxsize=None)
def _lg_coeffs(r: int, T: int) -> tuple[Fraction, ...]:
    if r == 0:
        return tuple([Fraction(1)] + [Fraction(0)] * T)
    lg1 = TruncSeries(Q, T, [Fraction(0)] + [Fraction(-1, i) for i in range(1, T + 1)])
    out = lg1
    for _ in range(r - 1):
        out = out * lg1
    return tuple(c / math.factorial(r) for c in out.coeffs)


def lg_series(r: int, T: int) -> TruncSeries:
    """lg_r = (1/r!) log(1-x)^r over Q; lg_0 = 1."""
    if r < 0:
        raise ValueError("lg index must be >= 0")
    return TruncSeries(Q, T, list(_lg_coeffs(r, T)))


@lru_cache(maxsize=None)
def chain_weights(r: int, T: int) -> tuple:
    """w[m][i] = sum over chains i = i_1 < ... < i_r = m of 1/(i_1...i_r)."""
    w = [[Fraction(0)] * (T + 1) for _ in range(T + 1)]
    for m in range(1, T + 1):
        w[m][m] = Fraction(1, m)
    for _depth in range(r - 1):
        new = [[Fraction(0)] * (T + 1) for _ in range(T + 1)]
        for m in range(1, T + 1):
            # new[m][i] = (1/i) * sum_{i<j<=m} w[m][j]
            acc = Fraction(0)
            for i in range(m - 1, 0, -1):
                acc += w[m][i + 1]
                new[m][i] = acc / i
        w = new
    return tuple(tuple(row) for row in w)


def weighted_lg(a, r: int, T: int) -> TruncSeries:
    """Sequence-weighted logarithm series
    (-1)^r sum_{0<i_1<...<i_r<=T} a_{i_1} x^{i_r} / (i_1 ... i_r).

    Integer weights give an exact rational series.  Profinite weights give
    a profinite series: each coefficient is assembled as an exact integer
    combination and divided once by the common denominator, consuming
    precision only there (and raising PrecisionError when the claimed
    divisibility fails, which is precisely the non-integrality witness).
    """
    if r < 1:
        raise ValueError("weight depth r must be >= 1")
    vals = _window_values(a, 1, T)
    w = chain_weights(r, T)
    sign = (-1) ** r
    first = vals[0]
    if isinstance(first, ProfiniteApprox):
        ring = ProfiniteRing(first.budget)
        out = [ring.zero()]
        for m in range(1, T + 1):
            den = 1
            for i in range(1, m + 1):
                den = den * w[m][i].denominator // math.gcd(den, w[m][i].denominator)
            acc = ring.zero()
            for i in range(1, m + 1):
                if w[m][i] == 0:
                    continue
                acc = acc + vals[i - 1] * int(w[m][i] * den)
            out.append(acc.divide_exact(den) * sign)
        return TruncSeries(ring, T, out)
    out = [Fraction(0)]
    for m in range(1, T + 1):
        out.append(sign * sum((Fraction(vals[i - 1]) * w[m][i] for i in range(1, m + 1)), Fraction(0)))
    return TruncSeries(Q, T, out)


def _window_values(a, start: int, stop: int) -> list:
    """Values a_start..a_stop from a SeqWindow, mapping, or sequence."""
    if isinstance(a, SeqWindow):
        return [a[i] for i in range(start, stop + 1)]
    if isinstance(a, dict):
        return [a[i] for i in range(start, stop + 1)]
    seq = list(a)
    if len(seq) < stop - start + 1:
        raise ValueError("sequence too short for the requested window")
    return seq[: stop - start + 1]


def classical_adams_arg(j: int, ring, T: int) -> TruncSeries:
    """[j](x) = 1 - (1-x)^j, the j-fold multiplicative formal sum of x."""
    one = TruncSeries.one(ring, T)
    base = TruncSeries(ring, T, [1, -1])
    return one - base.pow(j)


class Composer:
    """Composition against a fixed left factor H.

    Defining formula: H o H' = a_0 H(0) + sum_{i>=1} (-1)^i a_i
    (partial^{i-1} H)(x, ..., x).  The diagonal of the subset-sum form of
    the iterated partial derivative collapses to the exact identity
    (partial^{i-1} H)(x,...,x) = sum_j (-1)^(i-j) C(i,j) H([j](x)),
    so the table U_i = sum_j (-1)^j C(i,j) H([j](x)) is precomputed once
    and H o H' = sum_i a_i U_i.  Division-free, hence valid over Z and
    profinite coefficients.
    """

    def __init__(self, H: TruncSeries):
        self.H = H
        self.ring = H.ring
        T = H.trunc
        W = [H.substitute(classical_adams_arg(j, self.ring, T)) for j in range(T + 1)]
        self.U = []
        for i in range(T + 1):
            U = TruncSeries.zero(self.ring, T)
            for j in range(i + 1):
                U = U + W[j].scale((-1) ** j * math.comb(i, j))
            self.U.append(U)

    def compose(self, H2: TruncSeries) -> TruncSeries:
        T = min(self.H.trunc, H2.trunc)
        out = TruncSeries.zero(self.ring, T)
        for i in range(T + 1):
            a = H2.coeffs[i]
            if self.ring.is_zero(a):
                continue
            out = out + self.U[i].truncate(T).scale(a)
        return out


def compose_op(H: TruncSeries, H2: TruncSeries) -> TruncSeries:
    """Composition product corresponding to composition of operations."""
    T = min(H.trunc, H2.trunc)
    return Composer(H.truncate(T)).compose(H2.truncate(T))


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k)."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def b_map(G: TruncSeries, N: int) -> SeqWindow:
    """Sequence image of G under the lg-basis isomorphism, computed by the
    division-free Stirling transform b(G)_n = sum_k (-1)^k k! S(n,k) c_k.

    Valid over every coefficient ring; over Q it agrees with lg_decompose
    (the two routes are cross-checked in the tests).  Entries beyond the
    truncation describe the truncated polynomial.
    """
    vals = []
    for n in range(N + 1):
        acc = G.ring.zero()
        for k in range(min(n, G.trunc) + 1):
            s = stirling2(n, k)
            if s == 0:
                continue
            acc = acc + G.coeffs[k] * ((-1) ** k * math.factorial(k) * s)
        vals.append(acc)
    return SeqWindow(0, vals)


def lg_decompose(G: TruncSeries, T: int | None = None) -> SeqWindow:
    """Coefficients a_0..a_T with G = sum a_i lg_i (mod x^(T+1)), by back
    substitution against the triangular lg basis.  Exact rationals only."""
    if not isinstance(G.ring, RationalRing):
        raise TypeError("lg_decompose needs exact rational coefficients")
    if T is None:
        T = G.trunc
    G = G.truncate(T)
    basis = [_lg_coeffs(r, T) for r in range(T + 1)]
    rem = list(G.coeffs)
    out = []
    for d in range(T + 1):
        lead = basis[d][d]  # (-1)^d / d!
        a = rem[d] / lead
        out.append(a)
        if a != 0:
            for j in range(d, T + 1):
                rem[j] -= a * basis[d][j]
    return SeqWindow(0, out)


def assemble_lg(coeffs: Sequence[Fraction | int], T: int) -> TruncSeries:
    """sum_i coeffs[i] * lg_i truncated at T."""
    out = TruncSeries.zero(Q, T)
    for i, c in enumerate(coeffs):
        if c:
            out = out + lg_series(i, T).scale(Fraction(c))
    return out
