# Stable operations: the membership criterion, the image-lattice oracle,
# the integers d_n, and the topological basis F_n.

from ckops import (
    PrimeBudget,
    TruncSeries,
    Z,
    adams_series,
    construct_Fn,
    decompose_S0,
    dn,
    s_criterion,
    s_oracle,
    tower_member,
)
from ckops.series import ProfiniteRing

budget = PrimeBudget.uniform([2, 3, 5, 7], 8)
T = 16

# The integers d_n govern which leading terms d x^n occur among stable
# operations; their p-valuations follow an explicit floor formula.
print("n, d_n, factorization")
for n in range(8):
    rec = dn(n)
    print(f"{n:2d} {rec.value:6d}  {rec.factorization()}")

# Membership in the stable set has two independent finite tests: explicit
# binomial-sum congruences, and Howell-form membership in the iterated
# Phi-image lattices.  A_r passes exactly when r is a unit.
A11 = adams_series(11, 12)
x = TruncSeries(Z, 12, [0, 1])
print("A_11 passes criterion:", s_criterion(A11, primes=budget.primes).ok)
rep = s_criterion(x)
print("x fails with witness (p, n, m, j) =", rep.witness)
print("oracle agrees on x at (p=2, e=2):", s_oracle(x, 2, 2, 12) is False)

# The basis series F_n: integer-consistent, leading term d_n x^n, stable.
family = [construct_Fn(n, T, budget) for n in range(T + 1)]
print("F_2 integer coefficients:", family[2].int_coeffs[:8], "...")
print("F_2 passes criterion:", s_criterion(family[2].series).ok)

# Integer combinations of the F_n decompose back exactly.
G = TruncSeries(Z, T, [0] * (T + 1))
for k, a in [(0, 3), (1, -1), (3, 2)]:
    G = G + TruncSeries(Z, T, list(family[k].int_coeffs)).scale(a)
print("decompose_S0 recovers (3, -1, 0, 2):", decompose_S0(G, budget, family=family)[:4])

# Scaled monomials d x^n desuspend through level n+1 exactly when d_n | d.
ring = ProfiniteRing(budget)
for n in (1, 2, 4):
    d = dn(n).value
    good = TruncSeries(ring, n, [ring.zero()] * n + [ring.coerce(d)])
    bad = TruncSeries(ring, n, [ring.zero()] * n + [ring.coerce(d // 2)])
    print(f"{d}x^{n} passes level {n+1}:", tower_member(good, n + 1, budget),
          f"  {d//2}x^{n}:", tower_member(bad, n + 1, budget))
