"""The affine monoid ``A = dual(sigma) ∩ M`` of a cone sigma."""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from . import lattice as lt
from .cones import Cone, dual_cone, fundamental_parallelepiped


class MonoidError(ValueError):
    pass


class NonPointedMonoid(MonoidError):
    pass


class WeightOutsideMonoid(MonoidError):
    pass


def triangulate(rays: Sequence[Sequence[int]]) -> list:
    """Pulling triangulation of a pointed cone into simplicial cones (ray lists)."""
    rays = [lt.vec(r) for r in rays]
    if not rays:
        return [[]]
    c = Cone.from_generators(rays)
    rays = list(c.rays)
    if len(rays) == c.dim:
        return [rays]
    r0 = rays[0]
    out = []
    for f in c.facets:
        F = [r for r in rays if lt.dot(f, r) == 0]
        if lt.dot(f, r0) == 0:
            continue
        for simplex in triangulate(F):
            out.append([r0] + simplex)
    return out


@dataclass(frozen=True)
class PointedSplit:
    unit_basis: tuple
    pointed: "AffineMonoid"
    projection: tuple  # k x n, M -> M/units
    section: tuple  # n x k

    def lift(self, x: Sequence[int]) -> tuple:
        return tuple(sum(a * b for a, b in zip(row, x)) for row in self.section)

    def project(self, m: Sequence[int]) -> tuple:
        return lt.apply(self.projection, m)


@dataclass(frozen=True)
class AffineMonoid:
    """Lattice points of a rational cone ``dual_cone`` in ``M``.

    Membership only ever consults the inequalities of ``dual_cone``; the
    Hilbert basis is computed lazily, once.
    """

    dual_cone: Cone
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False, hash=False)

    @classmethod
    def of_cone(cls, sigma: Cone) -> "AffineMonoid":
        return cls(dual_cone(sigma))

    @property
    def rank(self) -> int:
        return self.dual_cone.ambient_rank

    @cached_property
    def source_cone(self) -> Cone:
        return dual_cone(self.dual_cone)

    @property
    def unit_lattice_basis(self) -> tuple:
        return self.dual_cone.lineality

    @property
    def is_pointed(self) -> bool:
        return not self.dual_cone.lineality

    def contains(self, m: Sequence[int]) -> bool:
        return self.dual_cone.contains(m)

    __contains__ = contains

    @cached_property
    def height(self) -> tuple:
        """Integer functional, zero on units and positive on every non-unit."""
        return tuple(sum(r[i] for r in self.dual_cone.facets) for i in range(self.rank))

    def height_of(self, m: Sequence[int]) -> int:
        return lt.dot(self.height, m)

    @cached_property
    def split(self) -> PointedSplit:
        return pointed_split(self)

    @cached_property
    def _hilbert(self) -> tuple:
        with self._lock:
            return _hilbert_basis(self)

    def hilbert_basis(self) -> tuple:
        return self._hilbert

    @cached_property
    def pointed_hilbert_basis(self) -> tuple:
        """Hilbert basis of a pointed monoid (error otherwise)."""
        if not self.is_pointed:
            raise NonPointedMonoid("monoid has units")
        return self._hilbert

    def divisors(self, m: Sequence[int]) -> list:
        """All ``u`` in a pointed monoid with ``u`` and ``m - u`` in the monoid.

        Breadth-first over Hilbert basis steps: the divisor set is closed
        under passing to smaller elements, so every divisor is reached.
        Results come out ordered by height, then lexicographically.
        """
        return list(iter_divisors(self, m))


def iter_divisors(A: AffineMonoid, m: Sequence[int]):
    """Yield divisors of ``m`` in a pointed monoid in increasing height."""
    if not A.is_pointed:
        raise NonPointedMonoid("divisor enumeration needs a pointed monoid")
    m = lt.vec(m)
    if not A.contains(m):
        return
    hb = A.pointed_hilbert_basis
    zero = tuple(0 for _ in m)
    heap = [(0, zero)]
    seen = {zero}
    while heap:
        h, u = heapq.heappop(heap)
        yield u
        for b in hb:
            v = lt.add(u, b)
            if v in seen:
                continue
            if A.contains(lt.sub(m, v)):
                seen.add(v)
                heapq.heappush(heap, (A.height_of(v), v))


def pointed_split(A: AffineMonoid) -> PointedSplit:
    """``A = units ⊕ pointed part``, the pointed part living in ``M / units``."""
    n = A.rank
    units = A.dual_cone.lineality
    k, P, S = lt.quotient_lattice(n, units)
    if k == 0:
        pointed = AffineMonoid(Cone.zero(0))
    else:
        gens = [lt.apply(P, r) for r in A.dual_cone.rays]
        pointed = AffineMonoid(Cone.from_generators(gens, k))
    return PointedSplit(tuple(units), pointed, P, S)


def _pointed_hilbert(A: AffineMonoid) -> tuple:
    c = A.dual_cone
    if c.ambient_rank == 0 or not c.rays:
        return ()
    cands = set(c.rays)
    for simplex in triangulate(c.rays):
        for pt, _ in fundamental_parallelepiped(simplex):
            if any(pt):
                cands.add(pt)
    cands = sorted(cands, key=lambda v: (A.height_of(v), v))
    out = []
    for x in cands:
        hx = A.height_of(x)
        # a proper summand of x has strictly smaller height
        if not any(A.contains(lt.sub(x, y)) for y in cands if A.height_of(y) < hx):
            out.append(x)
    return tuple(sorted(out))


def _hilbert_basis(A: AffineMonoid) -> tuple:
    if A.is_pointed:
        return _pointed_hilbert(A)
    sp = A.split
    units = []
    for u in sp.unit_basis:
        units.append(tuple(u))
        units.append(lt.scale(-1, u))
    lifted = [sp.lift(x) for x in _pointed_hilbert(sp.pointed)]
    return tuple(units) + tuple(lifted)


def hilbert_basis(A: AffineMonoid) -> tuple:
    return A.hilbert_basis()


def decompositions(A: AffineMonoid, m: Sequence[int], parts: int) -> list:
    """Ordered ``parts``-tuples of monoid elements summing to ``m``."""
    if not A.is_pointed:
        raise NonPointedMonoid("decompositions are only finite for a pointed monoid")
    m = lt.vec(m)
    if not A.contains(m):
        raise WeightOutsideMonoid(f"{m} is not in the monoid")
    if parts < 1:
        raise ValueError("parts must be positive")
    memo = {}

    def rec(w, p):
        key = (w, p)
        if key in memo:
            return memo[key]
        if p == 1:
            res = [(w,)]
        else:
            res = [(u,) + rest for u in iter_divisors(A, w) for rest in rec(lt.sub(w, u), p - 1)]
        memo[key] = res
        return res

    return sorted(rec(m, parts))


def localization_check(A: AffineMonoid, m: Sequence[int], witnesses: dict | None = None) -> bool:
    """Whether inverting ``m`` turns ``A`` into all of ``M``.

    True iff ``<m, n> > 0`` on every nonzero ``n`` of the source cone.  In
    that case each ``±e_j`` is written as ``a - i*m`` with ``a`` in ``A``;
    the pairs ``(i, a)`` are stored in ``witnesses`` when a dict is passed.
    """
    m = lt.vec(m)
    if not A.contains(m):
        raise WeightOutsideMonoid(f"{m} is not in the monoid")
    src = A.source_cone
    if src.lineality or any(lt.dot(m, r) <= 0 for r in src.rays):
        return False
    n = A.rank
    for j in range(n):
        for sgn in (1, -1):
            t = tuple(sgn * int(i == j) for i in range(n))
            i = 0
            for r in src.rays:
                need = -lt.dot(t, r)
                if need > 0:
                    i = max(i, -(-need // lt.dot(m, r)))
            a = lt.add(t, lt.scale(i, m))
            if not A.contains(a):
                raise AssertionError("localization witness failed")
            if witnesses is not None:
                witnesses[t] = (i, a)
    return True
