"""Exact integer lattices: Smith and Hermite normal forms, kernels, quotients,
and ordered bases of exterior powers.

Vectors are plain tuples of Python ints and matrices are tuples of row
tuples.  Nothing here ever touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

Vector = tuple
Matrix = tuple


class LatticeError(ValueError):
    pass


class ZeroVector(LatticeError):
    pass


class TorsionQuotient(LatticeError):
    pass


class RankMismatch(LatticeError):
    pass


def vec(v: Iterable) -> Vector:
    return tuple(int(x) for x in v)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    if not A:
        return ()
    cols = len(B[0]) if B else 0
    return tuple(
        tuple(sum(a * B[k][j] for k, a in enumerate(row)) for j in range(cols))
        for row in A
    )


def transpose(A: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not A:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*A))


def dot(u: Sequence, v: Sequence) -> int:
    if len(u) != len(v):
        raise RankMismatch(f"rank {len(u)} vs rank {len(v)}")
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


def is_zero(v: Sequence) -> bool:
    return all(a == 0 for a in v)


def content(v: Sequence[int]) -> int:
    g = 0
    for a in v:
        g = gcd(g, a)
    return g


def primitive(v: Sequence[int]) -> Vector:
    """Divide out the gcd of the coordinates; signs are kept."""
    g = content(v)
    if g == 0:
        raise ZeroVector("the zero vector has no primitive generator")
    return tuple(a // g for a in v)


def is_primitive(v: Sequence[int]) -> bool:
    return content(v) == 1


def primitive_from_rational(v: Sequence[Fraction]) -> Vector:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    den = 1
    for a in v:
        a = Fraction(a)
        den = den * a.denominator // gcd(den, a.denominator)
    return primitive([int(Fraction(a) * den) for a in v])


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return ``(S, U, V)`` with ``U @ A @ V == S``.

    ``S`` is diagonal with nonnegative entries ``d1 | d2 | ...`` and ``U``,
    ``V`` are unimodular.
    """
    m = len(A)
    if m == 0:
        raise LatticeError("empty matrix")
    n = len(A[0])
    S = [list(map(int, row)) for row in A]
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row_dst += q * row_src
        if q:
            S[dst] = [a + q * b for a, b in zip(S[dst], S[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):
        if q:
            for M in (S, V):
                for row in M:
                    row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(t, i, -(S[i][t] // p))
                    dirty = dirty or S[i][t] != 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(t, j, -(S[t][j] // p))
                    dirty = dirty or S[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-a for a in U[t]]
    return (
        tuple(map(tuple, S)),
        tuple(map(tuple, U)),
        tuple(map(tuple, V)),
    )


def elementary_divisors(A: Sequence[Sequence[int]]) -> tuple:
    if not A or not A[0]:
        return ()
    S, _, _ = smith_normal_form(A)
    return tuple(S[i][i] for i in range(min(len(S), len(S[0]))) if S[i][i])


def hermite_rows(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Row-style Hermite normal form, zero rows dropped.

    Pivots are positive and entries above a pivot are reduced into
    ``[0, pivot)``, so the result depends only on the row lattice.
    """
    H = [list(map(int, r)) for r in rows if any(r)]
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(H)) if H[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[i0] = H[i0], H[r]
            done = True
            for i in range(r + 1, len(H)):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < len(H) and H[r][c]:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
            r += 1
            if r == len(H):
                break
    return tuple(tuple(row) for row in H[:r])


def integer_kernel(A: Sequence[Sequence[int]], n: int) -> Matrix:
    """Hermite basis of ``{x in Z^n : A x = 0}`` (rows of A act by dot product)."""
    rows = [r for r in A if any(r)]
    if not rows:
        return identity(n)
    S, _, V = smith_normal_form(rows)
    rk = sum(1 for i in range(min(len(S), n)) if S[i][i])
    basis = [tuple(V[i][j] for i in range(n)) for j in range(rk, n)]
    return hermite_rows(basis, n)


def saturation(gens: Sequence[Sequence[int]], n: int) -> Matrix:
    """Hermite basis of ``span_Q(gens) ∩ Z^n``."""
    gens = [g for g in gens if any(g)]
    if not gens:
        return ()
    return integer_kernel(integer_kernel(gens, n), n)


def rank_of(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0])


def quotient_lattice(n: int, gens: Sequence[Sequence[int]], saturate: bool = False):
    """Quotient of ``Z^n`` by the sublattice spanned by ``gens``.

    Returns ``(quotient_rank, projection, section)``: ``projection`` is a
    ``k x n`` matrix whose rows form a Hermite basis of the annihilator of
    the generators, and ``section`` is an ``n x k`` integer matrix with
    ``projection @ section == I``.  Raises TorsionQuotient when the
    generators do not span a saturated sublattice, unless ``saturate`` is
    set, in which case the quotient is taken by the saturation instead.
    """
    gens = [vec(g) for g in gens if any(g)]
    for g in gens:
        if len(g) != n:
            raise RankMismatch(f"generator {g} does not live in Z^{n}")
    if saturate:
        gens = list(saturation(gens, n))
    if gens and any(d != 1 for d in elementary_divisors(gens)):
        raise TorsionQuotient(f"sublattice spanned by {gens} is not saturated")
    P = integer_kernel(gens, n)
    k = len(P)
    if k == 0:
        return 0, (), tuple(() for _ in range(n))
    _, U, V = smith_normal_form(P)
    Vk = tuple(tuple(row[:k]) for row in V)
    section = matmul(Vk, U)
    return k, P, section


def apply(A: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    """Matrix times column vector."""
    return tuple(sum(a * b for a, b in zip(row, v)) for row in A)


def row_apply(v: Sequence, A: Sequence[Sequence]) -> Vector:
    """Row vector times matrix."""
    if not A:
        return ()
    return tuple(sum(v[i] * A[i][j] for i in range(len(A))) for j in range(len(A[0])))


# ---------------------------------------------------------------------------
# exact rational row reduction


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form over Q.  Returns ``(rows, pivots)``."""
    R = [[Fraction(a) for a in r] for r in rows]
    if ncols is None:
        ncols = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [a * inv for a in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return tuple(tuple(row) for row in R[:r]), tuple(pivots)


def nullspace(rows: Sequence[Sequence], ncols: int) -> tuple:
    """Basis of ``{x : row . x = 0 for all rows}`` over Q."""
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in zip(R, piv):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return tuple(basis)


def solve_row(x: Sequence, rows: Sequence[Sequence]):
    """Coefficients ``c`` with ``sum c_i rows_i == x``, or None."""
    if not rows:
        return () if all(a == 0 for a in x) else None
    n = len(rows)
    aug = [list(col) + [xj] for col, xj in zip(zip(*rows), x)]
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    sol = [Fraction(0)] * n
    for row, pc in zip(R, piv):
        sol[pc] = row[n]
    return tuple(sol)


def det(A: Sequence[Sequence]) -> int | Fraction:
    n = len(A)
    if n == 0:
        return 1
    M = [[Fraction(a) for a in r] for r in A]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] / M[c][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return int(d) if d.denominator == 1 else d


# ---------------------------------------------------------------------------
# exterior powers


@lru_cache(maxsize=None)
def wedge_basis(n: int, p: int) -> tuple:
    """p-element subsets of ``range(n)`` in lexicographic order."""
    return tuple(combinations(range(n), p))


@lru_cache(maxsize=None)
def wedge_index(n: int, p: int) -> dict:
    return {s: i for i, s in enumerate(wedge_basis(n, p))}


def wedge(vectors: Sequence[Sequence], n: int) -> Vector:
    """Coordinates of ``v1 ^ ... ^ vp`` in the basis ``wedge_basis(n, p)``."""
    p = len(vectors)
    return tuple(
        det([[v[j] for j in S] for v in vectors]) for S in wedge_basis(n, p)
    )


def wedge_mul(v: Sequence, omega: Sequence, n: int, p: int) -> Vector:
    """``v ^ omega`` for ``omega`` in the p-th exterior power."""
    out = [0] * len(wedge_basis(n, p + 1))
    idx = wedge_index(n, p + 1)
    for S, coef in zip(wedge_basis(n, p), omega):
        if not coef:
            continue
        for i in range(n):
            if v[i] == 0 or i in S:
                continue
            sign = -1 if sum(1 for s in S if s < i) % 2 else 1
            T = tuple(sorted(S + (i,)))
            out[idx[T]] += sign * v[i] * coef
    return tuple(out)


def contract(n_vec: Sequence, omega: Sequence, n: int, p: int) -> Vector:
    """Interior product: ``m1^...^mp -> sum (-1)^i <m_i, n> m1^..^mi-hat^..^mp``.

    Indices ``i`` count from 1, matching the residue component of the
    defining sequence of the Danilov sheaves.
    """
    if p == 0:
        return ()
    out = [0] * len(wedge_basis(n, p - 1))
    idx = wedge_index(n, p - 1)
    for S, coef in zip(wedge_basis(n, p), omega):
        if not coef:
            continue
        for pos, s in enumerate(S):
            if n_vec[s] == 0:
                continue
            sign = -1 if (pos + 1) % 2 else 1
            T = S[:pos] + S[pos + 1:]
            out[idx[T]] += sign * n_vec[s] * coef
    return tuple(out)


def wedge_power_matrix(B: Sequence[Sequence[int]], n: int, p: int) -> Matrix:
    """Rows are ``b_T = wedge(B[t] for t in T)`` for T in ``wedge_basis(len(B), p)``.

    If the rows of ``B`` form a basis of a saturated sublattice ``L`` of
    ``Z^n`` these rows form a basis of the p-th exterior power of ``L``
    inside that of ``Z^n``.
    """
    k = len(B)
    return tuple(wedge([B[t] for t in T], n) for T in wedge_basis(k, p))
