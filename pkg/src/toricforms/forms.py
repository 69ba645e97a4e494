"""Weight pieces of Danilov forms and of Kähler forms on affine toric charts.

Every space here is a subspace of ``∧^p M ⊗ Q`` tagged with a weight
``m``.  For a chart ``U_sigma`` the Danilov piece at ``m`` is
``∧^p(M ∩ sigma(m)^perp)`` (zero when ``m`` is not in the dual cone), and
the Kähler piece is represented by its image under
``chi^u0 dchi^u1 ^ ... ^ dchi^up -> u1 ^ ... ^ up``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from . import lattice as lt
from .cones import Cone, faces
from .fans import Fan, orbit_closure
from .monoids import AffineMonoid, NonPointedMonoid, iter_divisors


class FormsError(ValueError):
    pass


class WeightMismatch(FormsError):
    pass


class NotAFace(FormsError):
    pass


class NonSmoothCone(FormsError):
    pass


class DegreeTooLarge(FormsError):
    pass


class BudgetExceeded(FormsError):
    pass


@dataclass(frozen=True)
class GradedSubspace:
    """Row-reduced basis of a subspace of ``∧^p Q^rank`` at a weight."""

    weight: tuple
    degree: int
    rank: int
    basis: tuple = ()
    pivots: tuple = ()

    @classmethod
    def span(cls, weight, degree: int, rank: int, vectors) -> "GradedSubspace":
        vectors = [v for v in vectors if any(v)]
        if not vectors:
            return cls(tuple(weight), degree, rank)
        R, piv = lt.rref(vectors, len(lt.wedge_basis(rank, degree)))
        return cls(tuple(weight), degree, rank, R, piv)

    @classmethod
    def zero(cls, weight, degree: int, rank: int) -> "GradedSubspace":
        return cls(tuple(weight), degree, rank)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return len(lt.wedge_basis(self.rank, self.degree))

    def contains_vector(self, v) -> bool:
        if not any(v):
            return True
        return lt.rank_of(list(self.basis) + [v]) == self.dim

    def contains(self, other: "GradedSubspace") -> bool:
        return all(self.contains_vector(v) for v in other.basis)

    def same_space(self, other: "GradedSubspace") -> bool:
        """Equality of the underlying subspaces, weights ignored."""
        return self.degree == other.degree and self.basis == other.basis

    def coordinates(self, v) -> tuple:
        """Coordinates of ``v`` in the row-reduced basis (``v`` must lie in the span)."""
        c = tuple(Fraction(v[p]) for p in self.pivots)
        if any(
            sum(ci * row[j] for ci, row in zip(c, self.basis)) != v[j]
            for j in range(len(v))
        ):
            raise FormsError("vector is not in the subspace")
        return c

    def retag(self, weight) -> "GradedSubspace":
        return GradedSubspace(tuple(weight), self.degree, self.rank, self.basis, self.pivots)

    def __add__(self, other: "GradedSubspace") -> "GradedSubspace":
        return GradedSubspace.span(self.weight, self.degree, self.rank, self.basis + other.basis)

    def __le__(self, other: "GradedSubspace") -> bool:
        return other.contains(self)


# ---------------------------------------------------------------------------
# Danilov pieces


def perp_basis(c: Cone) -> tuple:
    """Hermite basis of ``M ∩ c^perp``."""
    return lt.integer_kernel(list(c.rays) + list(c.lineality), c.ambient_rank)


def tilde_omega_weight(sigma: Cone, m: Sequence[int], p: int) -> GradedSubspace:
    """``∧^p(M ∩ sigma(m)^perp)`` if ``m`` is in the dual cone, else 0."""
    if p < 0:
        raise ValueError("degree must be nonnegative")
    return _tilde(sigma, lt.vec(m), p)


@lru_cache(maxsize=1 << 16)
def _tilde(sigma: Cone, m: tuple, p: int) -> GradedSubspace:
    n = sigma.ambient_rank
    if not sigma.in_dual(m):
        return GradedSubspace.zero(m, p, n)
    face = sigma.face_of_weight(m)
    B = perp_basis(face)
    return GradedSubspace.span(m, p, n, lt.wedge_power_matrix(B, n, p))


def tilde_rank(sigma: Cone, m: Sequence[int]) -> int:
    """Rank of ``M ∩ sigma(m)^perp`` (``m`` in the dual cone)."""
    return len(perp_basis(sigma.face_of_weight(m)))


# ---------------------------------------------------------------------------
# Kähler pieces


class _ImageEngine:
    """Memoised spans of ``u1 ^ ... ^ up`` over ``u_i`` in A with ``m - sum u_i`` in A.

    Writing ``A = units ⊕ s(A')`` with ``A'`` pointed, the span at weight
    ``m`` in degree ``p`` is

        units ^ W_{p-1}(m)  +  sum over divisors a != 0 of m in A' of
        s(a) ^ W_{p-1}(m - s(a)),

    which only involves the finitely many divisors of the image of ``m``
    in ``A'``.  Each spanning vector carries a witness tuple
    ``(u0, u1, ..., up)`` of monoid elements summing to ``m``.
    """

    def __init__(self, sigma: Cone):
        self.sigma = sigma
        self.n = sigma.ambient_rank
        self.A = AffineMonoid.of_cone(sigma)
        self.split = self.A.split
        self.memo = {}

    def pointed_lifts(self, m):
        sp = self.split
        A1 = sp.pointed
        if A1.rank == 0:
            return
        mbar = sp.project(m)
        for a in iter_divisors(A1, mbar):
            if any(a):
                yield sp.lift(a)

    def span(self, m, p):
        """``(rows, witnesses)`` spanning the image piece; rows independent."""
        key = (m, p)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        n = self.n
        if not self.A.contains(m):
            res = ((), ())
        elif p == 0:
            res = (((Fraction(1),),), ((m,),))
        else:
            target = comb(tilde_rank(self.sigma, m), p)
            rows, wits = [], []

            def offer(u, sub_rows, sub_wits):
                for r, w in zip(sub_rows, sub_wits):
                    v = lt.wedge_mul(u, r, n, p - 1)
                    if not any(v):
                        continue
                    if lt.rank_of(rows + [v]) > len(rows):
                        rows.append(v)
                        # u0 absorbs the difference so the tuple still sums to m
                        wits.append((lt.sub(w[0], u), u) + w[1:])
                return len(rows) == target

            done = False
            base_rows, base_wits = self.span(m, p - 1)
            for e in self.split.unit_basis:
                if offer(e, base_rows, base_wits):
                    done = True
                    break
            if not done:
                for u in self.pointed_lifts(m):
                    sub_rows, sub_wits = self.span(lt.sub(m, u), p - 1)
                    # witnesses at m - u: shift u0 by u so they sum to m first
                    shifted = [(lt.add(w[0], u),) + w[1:] for w in sub_wits]
                    if offer(u, sub_rows, shifted):
                        break
            res = (tuple(tuple(Fraction(x) for x in r) for r in rows), tuple(wits))
        self.memo[key] = res
        return res


_ENGINES: dict = {}


def _engine(sigma: Cone) -> _ImageEngine:
    eng = _ENGINES.get(sigma)
    if eng is None:
        eng = _ENGINES.setdefault(sigma, _ImageEngine(sigma))
    return eng


def omega_image_weight(sigma: Cone, m: Sequence[int], p: int) -> GradedSubspace:
    """Span of ``u1 ^ ... ^ up`` over monoid tuples with ``m - sum u_i`` in the monoid."""
    if p < 0:
        raise ValueError("degree must be nonnegative")
    return _image(sigma, lt.vec(m), p)


@lru_cache(maxsize=1 << 16)
def _image(sigma: Cone, m: tuple, p: int) -> GradedSubspace:
    rows, _ = _engine(sigma).span(m, p)
    return GradedSubspace.span(m, p, sigma.ambient_rank, rows)


def omega_image_witnesses(sigma: Cone, m: Sequence[int], p: int) -> tuple:
    """Monoid tuples ``(u0, ..., up)`` whose wedges form a basis of the image piece."""
    return _engine(sigma).span(lt.vec(m), p)[1]


def coker_dimension(sigma: Cone, m: Sequence[int], p: int) -> int:
    return tilde_omega_weight(sigma, m, p).dim - omega_image_weight(sigma, m, p).dim


# ---------------------------------------------------------------------------
# maps


def derivative_image(m: Sequence[int], v: Sequence, p: int) -> tuple:
    """``m ^ v`` for ``v`` in the p-th exterior power."""
    return lt.wedge_mul(m, v, len(m), p)


def derivative_map(m: Sequence[int], p: int, domain: GradedSubspace) -> tuple:
    """Images of the basis of ``domain`` under ``v -> m ^ v``."""
    m = lt.vec(m)
    if tuple(domain.weight) != m or domain.degree != p:
        raise WeightMismatch(f"domain sits at {domain.weight} in degree {domain.degree}")
    return tuple(derivative_image(m, v, p) for v in domain.basis)


def restriction_map(sigma: Cone, face: Cone, m: Sequence[int], p: int, sheaf: str = "tilde") -> tuple:
    """Matrix of sections over ``U_sigma`` restricted to ``U_face``.

    Rows are the coordinates of the source basis in the target basis.
    """
    if face not in faces(sigma):
        raise NotAFace(f"{face} is not a face of {sigma}")
    fn = {"tilde": tilde_omega_weight, "omega_image": omega_image_weight, "image": omega_image_weight}[sheaf]
    src = fn(sigma, m, p)
    tgt = fn(face, m, p)
    return tuple(tgt.coordinates(v) for v in src.basis)


def residue_kernel(sigma: Cone, m: Sequence[int], p: int) -> GradedSubspace:
    """Kernel of the residue map out of ``(O ⊗ ∧^p M)_m`` on ``U_sigma``.

    The component at a ray ``rho`` is contraction with its primitive
    generator; it only survives at weights in ``rho^perp`` (elsewhere the
    weight piece of ``O_{V(rho)}`` is zero).
    """
    m = lt.vec(m)
    n = sigma.ambient_rank
    if not sigma.in_dual(m):
        return GradedSubspace.zero(m, p, n)
    dim = len(lt.wedge_basis(n, p))
    if p == 0:
        return GradedSubspace.span(m, 0, n, [(1,)])
    cols = []
    for r in sigma.rays:
        if lt.dot(m, r):
            continue
        for e in range(dim):
            basis_vec = tuple(int(i == e) for i in range(dim))
            cols.append(lt.contract(r, basis_vec, n, p))
    if not cols:
        return GradedSubspace.span(m, p, n, lt.identity(dim))
    # delta as a matrix: rows indexed by source basis, one block per ray
    nrays = len(cols) // dim
    rows = []
    for e in range(dim):
        rows.append(tuple(x for k in range(nrays) for x in cols[k * dim + e]))
    # kernel of v -> v @ rows
    ker = lt.nullspace(lt.transpose(rows), dim)
    return GradedSubspace.span(m, p, n, ker)


def residue_check(sigma: Cone, m: Sequence[int], p: int) -> bool:
    from .cones import classify

    if not classify(sigma)["smooth"]:
        raise NonSmoothCone(f"{sigma} is not smooth")
    return residue_kernel(sigma, m, p).same_space(tilde_omega_weight(sigma, m, p))


# ---------------------------------------------------------------------------
# Hochschild oracle


def sparse_rank(rows: list) -> int:
    """Exact rank over Q of a sparse matrix given as ``{col: value}`` dicts."""
    pivots = {}
    rank = 0
    for row in rows:
        r = {k: Fraction(v) for k, v in row.items() if v}
        while r:
            c = min(r)
            if c not in pivots:
                pivots[c] = r
                rank += 1
                break
            prow = pivots[c]
            f = r[c] / prow[c]
            for k, v in prow.items():
                nv = r.get(k, 0) - f * v
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return rank


def _normalized_tuples(A: AffineMonoid, m, length: int, budget: list) -> list:
    """Tuples ``(u0, ..., u_{length-1})`` summing to ``m`` with ``u_i != 0`` for ``i >= 1``."""
    zero = tuple(0 for _ in m)
    out = []

    def rec(prefix, rest, k):
        if k == 0:
            out.append((rest,) + prefix)
            budget[0] -= 1
            if budget[0] < 0:
                raise BudgetExceeded("decomposition budget exhausted")
            return
        for u in iter_divisors(A, rest):
            if u == zero:
                continue
            rec(prefix + (u,), lt.sub(rest, u), k - 1)

    rec((), m, length - 1)
    return out


def pointed_hochschild(A: AffineMonoid, m: Sequence[int], max_degree: int, budget: int = 10**6) -> list:
    """Dims of ``HH_q(k[A])_m`` for ``q <= max_degree``, ``A`` pointed.

    Uses the normalized Hochschild complex; in a pointed monoid products of
    nonzero elements are nonzero, so the boundary never creates degenerate
    terms.
    """
    if not A.is_pointed:
        raise NonPointedMonoid("oracle core needs a pointed monoid")
    m = lt.vec(m)
    if not A.contains(m):
        return [0] * (max_degree + 1)
    left = [budget]
    chains = [_normalized_tuples(A, m, q + 1, left) for q in range(max_degree + 2)]
    index = [{t: i for i, t in enumerate(ch)} for ch in chains]
    ranks = [0]
    for q in range(1, max_degree + 2):
        rows = []
        for t in chains[q]:
            row = {}
            for i in range(q):
                merged = t[:i] + (lt.add(t[i], t[i + 1]),) + t[i + 2:]
                j = index[q - 1][merged]
                row[j] = row.get(j, 0) + (-1) ** i
            last = (lt.add(t[q], t[0]),) + t[1:q]
            j = index[q - 1][last]
            row[j] = row.get(j, 0) + (-1) ** q
            rows.append(row)
        ranks.append(sparse_rank(rows))
    return [len(chains[q]) - ranks[q] - ranks[q + 1] for q in range(max_degree + 1)]


def hochschild_weight_oracle(sigma: Cone, m: Sequence[int], max_degree: int = 3, budget: int = 10**6) -> list:
    """Dims of ``HH_q(U_sigma)_m`` for ``q = 0..max_degree``.

    The units of the monoid split off as a Laurent polynomial factor whose
    Hochschild homology in every weight is the exterior algebra on the unit
    lattice; the pointed part is computed from its Hochschild complex.
    """
    if max_degree > 3:
        raise DegreeTooLarge("Hochschild oracle is capped at degree 3")
    m = lt.vec(m)
    A = AffineMonoid.of_cone(sigma)
    if not A.contains(m):
        return [0] * (max_degree + 1)
    sp = A.split
    u = len(sp.unit_basis)
    if sp.pointed.rank == 0:
        pointed = [1] + [0] * max_degree
    else:
        pointed = pointed_hochschild(sp.pointed, sp.project(m), max_degree, budget)
    return [sum(comb(u, i) * pointed[q - i] for i in range(0, q + 1)) for q in range(max_degree + 1)]


def face_reduction(sigma: Cone, m: Sequence[int]):
    """The chart of ``V(sigma(m))`` inside ``U_sigma`` and the image of ``m``.

    Returns ``(sigma_bar, m_bar, embedding)`` where ``sigma_bar`` lives in
    ``N / Z(sigma(m))``, ``m_bar`` are the coordinates of ``m`` in
    ``M ∩ sigma(m)^perp``, and ``embedding`` is the matrix whose rows embed
    that lattice back into ``M``.
    """
    face = sigma.face_of_weight(m)
    oc = orbit_closure(Fan.from_cones([sigma]), face)
    sbar = oc.fan_bar.maximal[0] if oc.quotient_rank else Cone.zero(0)
    for c in oc.fan_bar.maximal:
        if oc.lift_of.get(c) == sigma:
            sbar = c
    return sbar, oc.weight_coords(m), oc.projection


def embed_subspace(S: GradedSubspace, embedding, n: int, weight) -> GradedSubspace:
    """Push a subspace of ``∧^p Q^k`` into ``∧^p Q^n`` along lattice rows ``embedding``."""
    p = S.degree
    if not S.basis:
        return GradedSubspace.zero(weight, p, n)
    W = lt.wedge_power_matrix(embedding, n, p)
    rows = [tuple(sum(c * W[i][j] for i, c in enumerate(v)) for j in range(len(W[0]))) for v in S.basis]
    return GradedSubspace.span(weight, p, n, rows)
