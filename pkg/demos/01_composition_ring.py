# The composition ring on truncated power series.
#
# Series here represent operations: (1-x)^m stands for the m-th Adams
# operation, and the composition product on series mirrors composition of
# operations.  Everything is exact (integers and fractions, no floats).

from fractions import Fraction

from ckops import Q, TruncSeries, Z, adams_series, b_map, compose_op, lg_decompose, lg_series, phi

T = 10

# Adams series compose multiplicatively: A_k o A_m = A_{km}.
A2, A3 = adams_series(2, T), adams_series(3, T)
print("A_2 o A_3 == A_6:", compose_op(A2, A3) == adams_series(6, T))

# 1 - x is the two-sided identity of the product.
one_minus_x = TruncSeries(Z, T, [1, -1])
H = TruncSeries(Z, T, [3, 1, 4, 1, 5, 9, 2, 6])
print("(1-x) o H == H:", compose_op(one_minus_x, H) == H)

# Over Q the series lg_r = log(1-x)^r / r! are orthogonal idempotents that
# partition the identity; they diagonalize the whole ring.
print("lg_2 o lg_2 == lg_2:", compose_op(lg_series(2, T), lg_series(2, T)) == lg_series(2, T))
print("lg_2 o lg_3 == 0:   ", compose_op(lg_series(2, T), lg_series(3, T)).is_zero())
total = TruncSeries.zero(Q, T)
for r in range(T + 1):
    total = total + lg_series(r, T)
print("sum of lg_r == 1-x: ", total == TruncSeries(Q, T, [1, -1]))

# The b map reads coordinates in the lg basis.  It is division-free
# (Stirling numbers), so it works over Z as well, and it turns the
# composition product into pointwise multiplication of sequences.
print("b(A_3) =", list(b_map(A2, 6).values), "(powers of 2)")
G = TruncSeries(Q, T, [Fraction(1, 2), 3, Fraction(-2, 3), 1, 0, 2, 1, 1, 9, 0, 1])
print("b == lg-decomposition over Q:",
      list(b_map(G, T).values) == list(lg_decompose(G).values))

# Phi = (x-1) d/dx is the series form of desuspension; Adams series are
# its eigenvectors.
print("Phi(A_3) == 3 A_3:  ", phi(A3) == A3.truncate(T - 1).scale(3))
