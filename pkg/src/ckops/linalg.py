"""Linear algebra over Z/M: Howell normal form, row-span membership with
certificates, and exact Vandermonde-type solving.

Row spans over Z/p^e are not free modules, so reduced echelon forms do not
decide membership; the Howell form does (equal row spans iff equal Howell
forms), which is what the image-lattice oracles need.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .arith import gbinom, modinv, rational_mod


class ModMatrix:
    """Immutable matrix over Z/modulus with entries reduced into [0, modulus)."""

    __slots__ = ("modulus", "rows", "cols", "entries")

    def __init__(self, modulus: int, entries: Sequence[Sequence[int]], cols: int | None = None):
        if modulus < 2:
            raise ValueError("modulus must be >= 2")
        self.modulus = modulus
        ents = [tuple(x % modulus for x in row) for row in entries]
        if ents:
            cols = len(ents[0])
            if any(len(r) != cols for r in ents):
                raise ValueError("ragged rows")
        elif cols is None:
            raise ValueError("empty matrix needs an explicit column count")
        self.entries = tuple(ents)
        self.rows = len(ents)
        self.cols = cols

    def __eq__(self, other):
        return (
            isinstance(other, ModMatrix)
            and self.modulus == other.modulus
            and self.entries == other.entries
            and self.cols == other.cols
        )

    def __hash__(self):
        return hash((self.modulus, self.entries, self.cols))

    def __repr__(self):
        return f"ModMatrix(mod {self.modulus}, {list(map(list, self.entries))})"


def _gcdex(a: int, b: int, n: int) -> tuple[int, int, int, int, int]:
    """g, s, t, u, v with sa+tb = g = gcd(a,b), ua+vb = 0, sv-tu a unit mod n."""
    a %= n
    b %= n
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    g = old_r
    if g == 0:
        return 0, 1, 0, 0, 1
    u, v = -(b // g), a // g
    return g, old_s % n, old_t % n, u % n, v % n


def _unit_multiplier(a: int, n: int) -> int:
    """Unit w mod n with w*a = gcd(a, n) (mod n)."""
    a %= n
    if a == 0:
        return 1
    d = math.gcd(a, n)
    ap, nd = a // d, n // d
    w0 = modinv(ap % nd, nd) if nd > 1 else 1
    w = w0 % n
    step = nd if nd else n
    while math.gcd(w, n) != 1:
        w = (w + step) % n
    return w


def _howell_rows(
    modulus: int, rows: list[list[int]], track: list[list[int]] | None
) -> tuple[list[list[int]], list[list[int]] | None]:
    """Core Howell reduction; `track` carries combination coefficients."""
    n = modulus
    cols = len(rows[0]) if rows else 0
    work = [list(r) for r in rows]
    comp = [list(t) for t in track] if track is not None else None

    def addrow(vec, cvec):
        work.append(vec)
        if comp is not None:
            comp.append(cvec)

    pivots: list[tuple[int, int]] = []  # (column, row-index in result)
    result: list[list[int]] = []
    res_comp: list[list[int]] = []
    c = 0
    while c < cols:
        # eliminate column c across all remaining работy rows
        live = [i for i in range(len(work)) if work[i][c] % n != 0]
        while len(live) > 1:
            i, j = live[0], live[1]
            a, b = work[i][c], work[j][c]
            g, s, t, u, v = _gcdex(a, b, n)
            ri = [(s * x + t * y) % n for x, y in zip(work[i], work[j])]
            rj = [(u * x + v * y) % n for x, y in zip(work[i], work[j])]
            if comp is not None:
                ci = [(s * x + t * y) % n for x, y in zip(comp[i], comp[j])]
                cj = [(u * x + v * y) % n for x, y in zip(comp[i], comp[j])]
                comp[i], comp[j] = ci, cj
            work[i], work[j] = ri, rj
            live = [i for i in live if work[i][c] % n != 0]
        if live:
            i = live[0]
            row = work.pop(i)
            crow = comp.pop(i) if comp is not None else None
            w = _unit_multiplier(row[c], n)
            row = [(w * x) % n for x in row]
            if crow is not None:
                crow = [(w * x) % n for x in crow]
            g = row[c]  # now the canonical generator gcd(old, n)
            # Howell closure: the annihilator multiple spans deeper columns
            u = n // math.gcd(g, n)
            if u % n != 0:
                ann = [(u * x) % n for x in row]
                if any(ann):
                    addrow(ann, [(u * x) % n for x in crow] if crow is not None else None)
            result.append(row)
            if comp is not None:
                res_comp.append(crow)
            pivots.append((c, len(result) - 1))
        c += 1

    # reduce entries above each pivot modulo the pivot
    for c, idx in pivots:
        g = result[idx][c]
        for k in range(len(result)):
            if k == idx:
                continue
            q = result[k][c] // g
            if q:
                result[k] = [(x - q * y) % n for x, y in zip(result[k], result[idx])]
                if comp is not None:
                    res_comp[k] = [
                        (x - q * y) % n for x, y in zip(res_comp[k], res_comp[idx])
                    ]
    return result, (res_comp if comp is not None else None)


def howell_form(A: ModMatrix) -> ModMatrix:
    """Howell normal form of A; equal row spans iff equal Howell forms."""
    rows, _ = _howell_rows(A.modulus, [list(r) for r in A.entries], None)
    rows = [r for r in rows if any(r)]
    return ModMatrix(A.modulus, rows, cols=A.cols)


def howell_with_transform(A: ModMatrix) -> tuple[ModMatrix, list[list[int]]]:
    """Howell form plus, per result row, its coefficients over A's rows."""
    ident = [[1 if i == j else 0 for j in range(A.rows)] for i in range(A.rows)]
    rows, comp = _howell_rows(A.modulus, [list(r) for r in A.entries], ident)
    keep = [(r, c) for r, c in zip(rows, comp) if any(r)]
    if keep:
        rows, comp = [list(r) for r, _ in keep], [list(c) for _, c in keep]
    else:
        rows, comp = [], []
    return ModMatrix(A.modulus, rows, cols=A.cols), comp


def in_row_span(A: ModMatrix, v: Sequence[int]) -> tuple[bool, list[int] | None]:
    """Is v a Z/modulus-combination of A's rows?  On success the second
    component certifies it: coefficients c with sum c_i * A[i] = v."""
    if len(v) != A.cols:
        raise ValueError(f"vector length {len(v)} != {A.cols} columns")
    n = A.modulus
    H, comp = howell_with_transform(A)
    vec = [x % n for x in v]
    cert = [0] * A.rows
    for idx, row in enumerate(H.entries):
        c = next(i for i, x in enumerate(row) if x)
        if vec[c] == 0:
            continue
        g = row[c]  # canonical pivot, divides the modulus
        if vec[c] % g != 0:
            return False, None
        t = vec[c] // g
        vec = [(x - t * y) % n for x, y in zip(vec, row)]
        for k in range(A.rows):
            cert[k] = (cert[k] + t * comp[idx][k]) % n
        if vec[c] != 0:
            return False, None
    if any(vec):
        return False, None
    return True, cert


def solve_vandermonde(
    nodes: Sequence[int],
    target: Sequence[int | Fraction],
    modulus: tuple[int, int] | None = None,
):
    """Coefficients x with sum_i x_i * L_{a_i} = target, where L_a is the
    column (C(a,0), ..., C(a,n-1)).

    Solved exactly over Q (Gaussian elimination on Fractions).  With
    modulus=(p, e) the exact solution is reduced mod p**e; a denominator
    divisible by p raises ValueError (the p-adic valuation obstruction).
    """
    n = len(nodes)
    if len(set(nodes)) != n:
        raise ValueError("repeated nodes make the system singular")
    if len(target) != n:
        raise ValueError("target length must match node count")
    M = [[Fraction(gbinom(a, k)) for a in nodes] for k in range(n)]
    b = [Fraction(t) for t in target]
    # forward elimination with partial pivot by nonzero
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular Vandermonde system")
        M[col], M[piv] = M[piv], M[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        b[col] *= inv
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
                b[r] -= f * b[col]
    xs = list(b)
    if modulus is None:
        return xs
    p, e = modulus
    out = []
    for x in xs:
        try:
            out.append(rational_mod(x, p**e))
        except ValueError:
            raise ValueError(
                f"solution denominator {x.denominator} not a unit at p={p}"
            ) from None
    return out


def span_enumerate(A: ModMatrix) -> set[tuple[int, ...]]:
    """Brute-force row span; exponential, for small test oracles only."""
    n = A.modulus
    vecs = {tuple([0] * A.cols)}
    for row in A.entries:
        new = set()
        for c in range(n):
            scaled = tuple((c * x) % n for x in row)
            for v in vecs:
                new.add(tuple((a + b) % n for a, b in zip(v, scaled)))
        vecs = new
    return vecs
