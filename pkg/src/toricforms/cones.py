"""Rational polyhedral cones with both generator and inequality descriptions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from . import lattice as lt


class ConeError(ValueError):
    pass


class WeightNotInDual(ConeError):
    pass


class HasLineality(ConeError):
    pass


def _span_basis(gens):
    """Independent subset of ``gens`` spanning the same Q-space."""
    basis = []
    for g in gens:
        if lt.rank_of(basis + [g]) > len(basis):
            basis.append(g)
    return basis


def dual_generators(gens: Sequence[Sequence[int]], n: int):
    """Dual cone of ``cone(gens)``.

    Returns ``(rays, lineality)``: the extreme rays of the pointed part of
    the dual, taken inside ``span(gens)``, and a Hermite basis of its
    lineality space ``gens^perp``.  Candidates are the lines cut out of
    ``span(gens)`` by ``d-1`` independent generators; exact and adequate at
    small rank.
    """
    gens = [lt.vec(g) for g in gens if any(g)]
    lineality = lt.integer_kernel(gens, n)
    if not gens:
        return (), lineality
    basis = _span_basis(gens)
    d = len(basis)
    rays = set()
    for subset in combinations(range(len(gens)), d - 1):
        S = [gens[i] for i in subset]
        if lt.rank_of(S) != d - 1:
            continue
        # y = sum lam_j basis_j with <g, y> = 0 for g in S
        eqs = [[lt.dot(g, b) for b in basis] for g in S]
        ns = lt.nullspace(eqs, d)
        if len(ns) != 1:
            continue
        lam = ns[0]
        y = [sum(lam[j] * basis[j][i] for j in range(d)) for i in range(n)]
        vals = [sum(g[i] * y[i] for i in range(n)) for g in gens]
        if all(v >= 0 for v in vals):
            rays.add(lt.primitive_from_rational(y))
        elif all(v <= 0 for v in vals):
            rays.add(lt.primitive_from_rational([-a for a in y]))
    return tuple(sorted(rays)), lineality


@dataclass(frozen=True)
class Cone:
    """A rational cone in ``Z^ambient_rank`` in canonical form.

    ``rays`` are primitive extreme rays (chosen orthogonal to the lineality
    space when there is one) and ``lineality`` is a Hermite basis of the
    lattice points of the lineality space.  ``facets`` and ``equations``
    describe the same set as ``<f, x> >= 0`` and ``<e, x> == 0``.
    """

    ambient_rank: int
    rays: tuple
    lineality: tuple = ()
    facets: tuple = field(default=(), compare=False, repr=False)
    equations: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], n: int | None = None,
                        lineality: Iterable[Sequence[int]] = ()) -> "Cone":
        gens = [lt.vec(g) for g in gens]
        lineality = [lt.vec(v) for v in lineality]
        if n is None:
            if not gens and not lineality:
                raise ConeError("ambient rank needed for an empty generator list")
            n = len((gens or lineality)[0])
        for g in gens + lineality:
            if len(g) != n:
                raise lt.RankMismatch(f"{g} is not in Z^{n}")
        return _canonical(cls, tuple(sorted(set(gens))), n, tuple(sorted(set(lineality))))

    @classmethod
    def from_inequalities(cls, normals: Iterable[Sequence[int]], n: int) -> "Cone":
        """The cone ``{x : <h, x> >= 0 for all h}``."""
        rays, lin = dual_generators(list(normals), n)
        allgens = list(rays) + list(lin) + [lt.scale(-1, v) for v in lin]
        drays, dlin = dual_generators(allgens, n)
        return cls(n, rays, lin, drays, dlin)

    @classmethod
    def zero(cls, n: int) -> "Cone":
        return cls.from_generators([], n)

    # -- descriptions -----------------------------------------------------

    @property
    def normals(self) -> tuple:
        """Inequality description: ``<normal, x> >= 0`` for every normal."""
        return self.facets + self.equations + tuple(lt.scale(-1, e) for e in self.equations)

    @property
    def generators(self) -> tuple:
        return self.rays + self.lineality + tuple(lt.scale(-1, v) for v in self.lineality)

    @cached_property
    def dim(self) -> int:
        return lt.rank_of(list(self.rays) + list(self.lineality))

    @property
    def is_strongly_convex(self) -> bool:
        return not self.lineality

    @property
    def is_zero(self) -> bool:
        return not self.rays and not self.lineality

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient_rank:
            raise lt.RankMismatch(f"{tuple(v)} is not in Z^{self.ambient_rank}")
        return all(lt.dot(h, v) >= 0 for h in self.facets) and all(
            lt.dot(e, v) == 0 for e in self.equations
        )

    def in_dual(self, m: Sequence[int]) -> bool:
        """Whether the functional ``m`` is nonnegative on the cone."""
        return all(lt.dot(m, r) >= 0 for r in self.rays) and all(
            lt.dot(m, v) == 0 for v in self.lineality
        )

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def is_face_of(self, other: "Cone") -> bool:
        return self in other.faces()

    def dual(self) -> "Cone":
        return dual_cone(self)

    def intersect(self, other: "Cone") -> "Cone":
        return Cone.from_inequalities(self.normals + other.normals, self.ambient_rank)

    def face_of_weight(self, m: Sequence[int]) -> "Cone":
        return face_of_weight(self, m)

    def faces(self) -> tuple:
        return faces(self)

    def classify(self) -> dict:
        return classify(self)

    def ray_matrix(self) -> tuple:
        return self.rays

    def __str__(self) -> str:
        body = ", ".join(str(list(r)) for r in self.rays)
        if self.lineality:
            body += " | lin " + ", ".join(str(list(v)) for v in self.lineality)
        return f"cone{{{body}}}"


@lru_cache(maxsize=1 << 15)
def _canonical(cls, gens: tuple, n: int, lineality: tuple) -> Cone:
    allgens = list(gens) + list(lineality) + [lt.scale(-1, v) for v in lineality]
    drays, dlin = dual_generators(allgens, n)
    dual_all = list(drays) + list(dlin) + [lt.scale(-1, v) for v in dlin]
    rays, lin = dual_generators(dual_all, n)
    return cls(n, rays, lin, drays, dlin)


def cone(*rays: Sequence[int]) -> Cone:
    """Shorthand: ``cone((1, 0), (1, 2))``."""
    return Cone.from_generators(rays)


def dual_cone(c: Cone) -> Cone:
    return Cone(c.ambient_rank, c.facets, c.equations, c.rays, c.lineality)


def face_of_weight(c: Cone, m: Sequence[int]) -> Cone:
    """The face of ``c`` on which ``m`` vanishes."""
    if len(m) != c.ambient_rank:
        raise lt.RankMismatch(f"{tuple(m)} is not in Z^{c.ambient_rank}")
    if not c.in_dual(m):
        raise WeightNotInDual(f"{tuple(m)} is not in the dual of {c}")
    if all(lt.dot(m, r) == 0 for r in c.rays):
        return c
    return Cone.from_generators(
        [r for r in c.rays if lt.dot(m, r) == 0], c.ambient_rank, c.lineality
    )


def weight_of_face(c: Cone, face: Cone) -> tuple:
    """A dual weight ``m`` with ``face_of_weight(c, m) == face``.

    The sum of the facet normals vanishing on ``face`` works, since a face
    is cut out by the facets containing it.
    """
    if face not in faces(c):
        raise ConeError(f"{face} is not a face of {c}")
    tight = [f for f in c.facets if all(lt.dot(f, r) == 0 for r in face.rays)]
    return tuple(sum(f[i] for f in tight) for i in range(c.ambient_rank))


_FACE_CACHE: dict = {}


def faces(c: Cone) -> tuple:
    """All faces of a strongly convex cone, from ``{0}`` up, deduplicated."""
    if not c.is_strongly_convex:
        raise HasLineality(f"{c} contains a line")
    hit = _FACE_CACHE.get(c)
    if hit is not None:
        return hit
    seen = {frozenset(c.rays)}
    todo = [frozenset(c.rays)]
    while todo:
        R = todo.pop()
        for f in c.facets:
            sub = frozenset(r for r in R if lt.dot(f, r) == 0)
            if sub != R and sub not in seen:
                seen.add(sub)
                todo.append(sub)
    out = []
    for R in seen:
        if R == frozenset(c.rays):
            out.append(c)
        else:
            out.append(Cone.from_generators(sorted(R), c.ambient_rank))
    out.sort(key=cone_sort_key)
    res = tuple(out)
    _FACE_CACHE[c] = res
    return res


def cone_sort_key(c: Cone):
    return (c.dim, len(c.rays), c.rays, c.lineality)


def classify(c: Cone) -> dict:
    strongly_convex = c.is_strongly_convex
    simplicial = strongly_convex and len(c.rays) == c.dim
    smooth = simplicial and all(d == 1 for d in lt.elementary_divisors(c.rays)) if c.rays else simplicial
    return {
        "strongly_convex": strongly_convex,
        "simplicial": simplicial,
        "smooth": bool(smooth),
        "dim": c.dim,
    }


def multiplicity(c: Cone) -> int:
    """Index of the ray lattice in the lattice points of the span (simplicial cones)."""
    if not c.rays:
        return 1
    out = 1
    for d in lt.elementary_divisors(c.rays):
        out *= d
    return out


def contains(c: Cone, v: Sequence[int]) -> bool:
    return c.contains(v)


def interior_weight(c: Cone) -> tuple:
    """A lattice functional in the relative interior of the dual cone.

    It vanishes exactly on the lineality of the dual, i.e. it is strictly
    positive on every nonzero point of a strongly convex full-dimensional
    ``c``'s dual directions.  Used as a height function.
    """
    n = c.ambient_rank
    return tuple(sum(r[i] for r in c.facets) for i in range(n))


def fundamental_parallelepiped(rays: Sequence[Sequence[int]]) -> list:
    """Lattice points ``sum lam_i r_i`` with ``0 <= lam_i < 1``.

    ``rays`` must be linearly independent; points are taken in the
    saturated lattice ``span(rays) ∩ Z^n``.  Returns ``(point, lambdas)``
    pairs sorted by ``sum(lambdas)``, the origin first.
    """
    rays = [lt.vec(r) for r in rays]
    if not rays:
        return [((), ())]
    n = len(rays[0])
    d = len(rays)
    span_basis = lt.saturation(rays, n)
    R = [tuple(int(x) for x in lt.solve_row(r, span_basis)) for r in rays]
    D, _, V = lt.smith_normal_form(R)
    diag = [D[i][i] for i in range(d)]
    out = {}

    def rec(i, y):
        if i == d:
            # coset representative x with x V = y
            x = lt.solve_row(y, V)
            lam = lt.solve_row(x, R)
            frac = tuple(a - (a.numerator // a.denominator) for a in lam)
            pc = [sum(frac[j] * R[j][t] for j in range(d)) for t in range(d)]
            pt = tuple(int(sum(pc[t] * span_basis[t][s] for t in range(d))) for s in range(n))
            out[pt] = frac
            return
        for a in range(diag[i]):
            rec(i + 1, y + (a,))

    rec(0, ())
    return sorted(out.items(), key=lambda t: (sum(t[1]), t[0]))
