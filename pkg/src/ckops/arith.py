"""Exact integer, rational, p-adic valuation, CRT, and finite-precision
profinite arithmetic.

Profinite integers are approximated over a declared finite set of primes
(a PrimeBudget); every element carries the precision it is actually known
to, and operations that consume precision (division by a non-unit) record
the loss in the result.  All values are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


class InfiniteValuation(ArithmeticError):
    """Raised when the p-adic valuation of 0 is requested."""


class PrecisionError(ArithmeticError):
    """A computation needs more per-prime precision than is stored."""


class IncompatibleCongruences(ValueError):
    """A congruence system has no solution; the message names the clash."""


def vp(n: int, p: int) -> int:
    """Largest k with p**k dividing n.  Raises InfiniteValuation for n = 0."""
    if n == 0:
        raise InfiniteValuation(f"v_{p}(0) is infinite")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_fraction(q: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if q == 0:
        raise InfiniteValuation(f"v_{p}(0) is infinite")
    return vp(q.numerator, p) - vp(q.denominator, p)


def vp_factorial(n: int, p: int) -> int:
    """v_p(n!) by Legendre's formula."""
    if n < 0:
        raise ValueError("factorial of a negative integer")
    total = 0
    q = p
    while q <= n:
        total += n // q
        q *= p
    return total


def gbinom(r: int, k: int) -> int:
    """Generalized binomial coefficient C(r, k) for any integer r, k >= 0.

    C(r, k) = r(r-1)...(r-k+1)/k! is an integer for every integer r,
    e.g. C(-1, k) = (-1)**k.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if r >= 0:
        return math.comb(r, k)
    # C(r, k) = (-1)^k C(k - r - 1, k) for r < 0
    return (-1) ** k * math.comb(k - r - 1, k)


def modinv(a: int, m: int) -> int:
    """Inverse of a modulo m (a must be a unit mod m)."""
    g, x, _ = _xgcd(a % m, m)
    if g != 1:
        raise ValueError(f"{a} is not invertible modulo {m}")
    return x % m


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def crt_lift(pairs: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Solve x = r_i (mod m_i) for pairwise coprime moduli.

    Returns (x, M) with M the product of the moduli and 0 <= x < M.
    Non-coprime moduli raise IncompatibleCongruences naming the pair.
    """
    pairs = list(pairs)
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            g = math.gcd(pairs[i][1], pairs[j][1])
            if g != 1:
                raise IncompatibleCongruences(
                    f"moduli {pairs[i][1]} and {pairs[j][1]} share factor {g}"
                )
    x, m = 0, 1
    for r, mod in pairs:
        if mod < 1:
            raise ValueError("moduli must be >= 1")
        # combine x mod m with r mod mod
        if mod == 1:
            continue
        t = ((r - x) * modinv(m, mod)) % mod
        x = x + m * t
        m = m * mod
    return x % m if m > 1 else 0, m


def rational_mod(q: Fraction | int, m: int) -> int:
    """Residue of a rational with denominator prime to m, in [0, m)."""
    q = Fraction(q)
    if math.gcd(q.denominator, m) != 1:
        raise ValueError(f"denominator {q.denominator} not invertible mod {m}")
    return (q.numerator * modinv(q.denominator, m)) % m


def rational_reconstruct(r: int, m: int) -> Fraction | None:
    """Small rational a/b with a/b = r (mod m), |a|, b <= sqrt(m/2).

    Standard Wang reconstruction by the extended Euclidean algorithm.
    Returns None when no such rational exists.
    """
    bound = math.isqrt(m // 2)
    if bound == 0:
        return None
    v0, v1 = (m, 0), (r % m, 1)
    while v1[0] > bound:
        q = v0[0] // v1[0]
        v0, v1 = v1, (v0[0] - q * v1[0], v0[1] - q * v1[1])
    a, b = v1[0], v1[1]
    if b == 0 or abs(b) > bound or math.gcd(a, b) != 1:
        return None
    if math.gcd(b, m) != 1:
        return None
    frac = Fraction(a, b)
    if (frac.numerator * modinv(frac.denominator, m) - r) % m != 0:
        return None
    return frac


@dataclass(frozen=True)
class PrimeBudget:
    """Finite approximation window for Zhat: distinct primes with exponents."""

    primes: tuple[int, ...]
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("budget primes must be distinct")
        if any(e < 1 for e in self.exponents):
            raise ValueError("budget exponents must be >= 1")
        if len(self.primes) != len(self.exponents):
            raise ValueError("primes and exponents must align")

    @classmethod
    def uniform(cls, primes: Iterable[int], prec: int) -> "PrimeBudget":
        ps = tuple(sorted(primes))
        return cls(ps, tuple(prec for _ in ps))

    def exponent(self, p: int) -> int:
        return self.exponents[self.primes.index(p)]

    @property
    def modulus(self) -> int:
        m = 1
        for p, e in zip(self.primes, self.exponents):
            m *= p**e
        return m

    def to_json(self):
        return [[p, e] for p, e in zip(self.primes, self.exponents)]

    @classmethod
    def from_json(cls, data) -> "PrimeBudget":
        return cls(tuple(p for p, _ in data), tuple(e for _, e in data))


class ProfiniteApprox:
    """Element of Zhat known modulo p**k_p for each budget prime p.

    ``prec[p]`` is the current precision k_p (<= budget exponent); residues
    are least nonnegative.  Arithmetic keeps the minimum precision of the
    operands; division by an integer consumes v_p of it per prime and
    requires the corresponding divisibility, failing loudly otherwise.
    """

    __slots__ = ("budget", "prec", "residue")

    def __init__(self, budget: PrimeBudget, residue: Mapping[int, int],
                 prec: Mapping[int, int] | None = None):
        self.budget = budget
        if prec is None:
            prec = {p: budget.exponent(p) for p in budget.primes}
        self.prec = {p: int(prec[p]) for p in budget.primes}
        self.residue = {}
        for p in budget.primes:
            k = self.prec[p]
            if k < 0:
                raise PrecisionError(f"negative precision at p={p}")
            if k > budget.exponent(p):
                raise ValueError("precision exceeds budget")
            self.residue[p] = residue[p] % p**k if k > 0 else 0

    @classmethod
    def from_int(cls, budget: PrimeBudget, n: int) -> "ProfiniteApprox":
        return cls(budget, {p: n % p**budget.exponent(p) for p in budget.primes})

    @classmethod
    def from_rational(cls, budget: PrimeBudget, q: Fraction) -> "ProfiniteApprox":
        """Embed a rational whose denominator is a unit at every budget prime."""
        q = Fraction(q)
        res = {}
        for p in budget.primes:
            pe = p ** budget.exponent(p)
            res[p] = rational_mod(q, pe)
        return cls(budget, res)

    def residue_mod(self, p: int, k: int) -> int:
        """Value mod p**k; raises PrecisionError if k digits are not stored."""
        if k == 0:
            return 0
        if self.prec[p] < k:
            raise PrecisionError(
                f"need {self.residue!r} mod {p}^{k}, stored precision {self.prec[p]}"
            )
        return self.residue[p] % p**k

    def lift(self) -> int:
        """Least nonnegative integer matching every stored residue."""
        pairs = [(self.residue[p], p ** self.prec[p]) for p in self.budget.primes]
        return crt_lift(pairs)[0]

    def lift_symmetric(self) -> int:
        """Integer of least absolute value matching every stored residue."""
        x, m = crt_lift(
            [(self.residue[p], p ** self.prec[p]) for p in self.budget.primes]
        )
        return x - m if 2 * x > m else x

    def min_prec(self) -> int:
        return min(self.prec.values())

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ProfiniteApprox):
            if other.budget != self.budget:
                raise ValueError("mixed prime budgets")
            return other
        if isinstance(other, int):
            return ProfiniteApprox.from_int(self.budget, other)
        if isinstance(other, Fraction):
            return ProfiniteApprox.from_rational(self.budget, other)
        return NotImplemented

    def _zip(self, other, fn):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = {p: min(self.prec[p], other.prec[p]) for p in self.budget.primes}
        res = {
            p: fn(self.residue[p], other.residue[p]) % (p ** prec[p]) if prec[p] else 0
            for p in self.budget.primes
        }
        return ProfiniteApprox(self.budget, res, prec)

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._zip(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._zip(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return self._zip(0, lambda a, b: -a)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers: use unit_inverse")
        out = ProfiniteApprox.from_int(self.budget, 1)
        for _ in range(n):
            out = out * self
        return out

    def divide_exact(self, n: int) -> "ProfiniteApprox":
        """Divide by a nonzero integer, consuming v_p(n) precision per prime.

        Requires the stored residue to be divisible by the p-part of n at
        each prime (raises PrecisionError naming the prime otherwise).
        """
        if n == 0:
            raise ZeroDivisionError("division of a profinite value by zero")
        sign = -1 if n < 0 else 1
        n = abs(n)
        prec, res = {}, {}
        for p in self.budget.primes:
            v = vp(n, p)
            unit = n // p**v
            k = self.prec[p] - v
            if k < 0:
                raise PrecisionError(
                    f"division by {n} exhausts precision at p={p}"
                )
            r = self.residue[p]
            if v and r % p**v != 0:
                raise PrecisionError(
                    f"residue {r} not divisible by {p}^{v} (division by {n})"
                )
            res[p] = ((r // p**v) * modinv(unit, p**k) * sign) % p**k if k else 0
            prec[p] = k
        return ProfiniteApprox(self.budget, res, prec)

    def unit_inverse(self) -> "ProfiniteApprox":
        """Inverse of a unit-within-budget element."""
        res = {}
        for p in self.budget.primes:
            k = self.prec[p]
            if k == 0:
                raise PrecisionError(f"no digits at p={p}")
            if self.residue[p] % p == 0:
                raise ZeroDivisionError(f"not a unit at p={p}")
            res[p] = modinv(self.residue[p], p**k)
        return ProfiniteApprox(self.budget, res, dict(self.prec))

    # -- predicates -----------------------------------------------------

    def is_zero(self) -> bool:
        """Zero within the stored precision."""
        return all(self.residue[p] == 0 for p in self.budget.primes)

    def eq_within(self, other) -> bool:
        diff = self - self._coerce(other)
        return diff.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ProfiniteApprox)):
            try:
                return self.eq_within(other)
            except (ValueError, PrecisionError):
                return NotImplemented
        return NotImplemented

    def __hash__(self):
        raise TypeError("ProfiniteApprox equality is budget-relative; not hashable")

    def __repr__(self):
        parts = ", ".join(
            f"{self.residue[p]} mod {p}^{self.prec[p]}" for p in self.budget.primes
        )
        return f"ProfiniteApprox({parts})"

    def to_json(self):
        return {
            "primes": [[p, self.prec[p], self.residue[p]] for p in self.budget.primes]
        }

    @classmethod
    def from_json(cls, budget: PrimeBudget, data) -> "ProfiniteApprox":
        res = {p: r for p, _, r in data["primes"]}
        prec = {p: k for p, k, _ in data["primes"]}
        return cls(budget, res, prec)


def is_unit(r: ProfiniteApprox) -> bool:
    """True iff r is a unit at every budget prime (unit *within budget*:
    a finite budget cannot see primes outside it)."""
    for p in r.budget.primes:
        if r.prec[p] < 1:
            raise PrecisionError(f"no digits at p={p}")
        if r.residue[p] % p == 0:
            return False
    return True


def gen_binomial(r: ProfiniteApprox, k: int, p: int, e: int) -> int:
    """C(r, k) mod p**e for a profinite exponent r.

    Needs r mod p**(e + v_p(k!)): the integer binomial of any lift that
    precise reduces to the same class mod p**e, because division by k! is
    absorbed by the precision inflation rather than performed modularly.
    """
    if k == 0:
        return 1 % p**e
    need = e + vp_factorial(k, p)
    x = r.residue_mod(p, need)  # PrecisionError names the missing exponent
    return math.comb(x, k) % p**e


def compatible_lift(
    b: Mapping[int, ProfiniteApprox], m: int | None = None, primes=None
) -> int:
    """Integer b with b = b_i (mod i) for i = 1..m, by CRT over the maximal
    prime powers q_k <= m.

    Checks the compatibility b_i = b_j (mod j) for j | i within the budget
    first, and raises IncompatibleCongruences naming a violated congruence.
    With ``primes`` given, only those primes' congruences are lifted (the
    others are outside the caller's budget); by default every prime <= m
    must lie inside the budget or a PrecisionError is raised.
    """
    if m is None:
        m = max(b) if b else 1
    if m < 1:
        raise ValueError("m must be >= 1")
    for i in range(1, m + 1):
        if i not in b:
            raise ValueError(f"missing b_{i}")
    budget = b[1].budget
    # compatibility within budget
    for i in range(2, m + 1):
        for j in range(2, i):
            if i % j == 0:
                diff = b[i] - b[j]
                for p in budget.primes:
                    v = vp(j, p)
                    if v == 0:
                        continue
                    k = min(v, diff.prec[p])
                    if k and diff.residue[p] % p**k != 0:
                        raise IncompatibleCongruences(
                            f"b_{i} != b_{j} (mod {j}) at p={p}"
                        )
    pairs = []
    for p in set_primes_upto(m):
        if primes is not None and p not in primes:
            continue
        if p not in budget.primes:
            raise PrecisionError(f"prime {p} <= {m} is outside the budget")
        q, r = p, 1
        while q * p <= m and r < b[1].budget.exponent(p):
            q *= p
            r += 1
        pairs.append((b[q].residue_mod(p, r), q))
    return crt_lift(pairs)[0] if pairs else 0


def set_primes_upto(n: int) -> list[int]:
    """Primes <= n by a small sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = b"\x00" * len(range(i * i, n + 1, i))
    return [i for i in range(2, n + 1) if sieve[i]]


def rational_to_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))
