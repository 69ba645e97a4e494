"""Fans, stars, orbit closures, star subdivision and the blow-up square."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import lattice as lt
from .cones import Cone, classify, cone_sort_key, faces, fundamental_parallelepiped


class FanError(ValueError):
    pass


class ConeNotInFan(FanError):
    pass


class RayOutsideSupport(FanError):
    pass


class NonPrimitiveRay(FanError):
    pass


class InvalidFan(FanError):
    pass


@dataclass(frozen=True)
class Fan:
    ambient_rank: int
    cones: tuple
    name: str = field(default="", compare=False)

    @classmethod
    def from_cones(cls, cones: Iterable[Cone], n: int | None = None, name: str = "") -> "Fan":
        """Face-close ``cones`` and store them canonically."""
        cones = list(cones)
        if n is None:
            if not cones:
                raise FanError("ambient rank needed for an empty fan")
            n = cones[0].ambient_rank
        allc = {Cone.zero(n)}
        for c in cones:
            if c.ambient_rank != n:
                raise lt.RankMismatch(f"{c} is not in rank {n}")
            if not c.is_strongly_convex:
                allc.add(c)
                continue
            allc.update(faces(c))
        return cls(n, tuple(sorted(allc, key=cone_sort_key)), name)

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence[int]], cones: Sequence[Sequence[int]],
                  n: int | None = None, name: str = "") -> "Fan":
        if n is None:
            n = len(rays[0])
        return cls.from_cones(
            [Cone.from_generators([rays[i] for i in idx], n) for idx in cones], n, name
        )

    @cached_property
    def maximal(self) -> tuple:
        """Inclusion-maximal cones, in canonical order."""
        return tuple(
            c for c in self.cones
            if not any(d != c and d.dim > c.dim and d.contains_cone(c) for d in self.cones)
        )

    @property
    def maximal_indices(self) -> tuple:
        mx = set(self.maximal)
        return tuple(i for i, c in enumerate(self.cones) if c in mx)

    @property
    def rays(self) -> tuple:
        return tuple(sorted({r for c in self.cones for r in c.rays}))

    @cached_property
    def cone_set(self) -> frozenset:
        return frozenset(self.cones)

    def __contains__(self, c: Cone) -> bool:
        return c in self.cone_set

    def index(self, c: Cone) -> int:
        try:
            return self.cones.index(c)
        except ValueError:
            raise ConeNotInFan(f"{c} is not a cone of the fan") from None

    def in_support(self, v: Sequence[int]) -> bool:
        return any(c.contains(v) for c in self.maximal)

    def is_smooth(self) -> bool:
        return all(classify(c)["smooth"] for c in self.cones)

    def is_complete(self) -> bool:
        """Support is all of ``N_R``: checked by the facet pairing of maximal cones."""
        mx = self.maximal
        if any(c.dim < self.ambient_rank for c in mx):
            return False
        # every facet of a maximal cone must be shared by exactly two maximal cones
        for c in mx:
            for f in c.faces():
                if f.dim == self.ambient_rank - 1:
                    if sum(1 for d in mx if f in d.faces()) != 2:
                        return False
        return True

    def __str__(self) -> str:
        return "fan{" + "; ".join(str(c) for c in self.maximal) + "}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violation: str = ""
    cones: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def validate(f: Fan) -> ValidationReport:
    """Check the fan axioms, reporting the first violation found."""
    cs = set(f.cones)
    for c in f.cones:
        if not c.is_strongly_convex:
            return ValidationReport(False, "cone is not strongly convex", (c,))
    for c in f.cones:
        for face in faces(c):
            if face not in cs:
                return ValidationReport(False, "face missing from fan", (c, face))
    mx = f.maximal
    for i, a in enumerate(mx):
        for b in mx[i + 1:]:
            inter = a.intersect(b)
            if inter not in faces(a) or inter not in faces(b):
                return ValidationReport(False, "intersection is not a common face", (a, b, inter))
    return ValidationReport(True)


def star(f: Fan, sigma: Cone) -> tuple:
    f.index(sigma)
    return tuple(c for c in f.cones if c.contains_cone(sigma) and sigma in faces(c))


# ---------------------------------------------------------------------------
# orbit closures


@dataclass(frozen=True)
class OrbitClosureData:
    """``V(sigma)``: the fan of ``Star(sigma)`` pushed to ``N / Z(sigma ∩ N)``.

    ``projection`` (k x n) maps N onto the quotient; its rows are also a
    basis of ``M ∩ sigma^perp``, so they double as the weight embedding.
    """

    sigma: Cone
    quotient_rank: int
    projection: tuple
    section: tuple
    fan_bar: Fan
    lift_of: dict = field(compare=False, hash=False, repr=False)

    @property
    def embedding_weight_lattice(self) -> tuple:
        return self.projection

    def weight_coords(self, m: Sequence[int]):
        """Coordinates of ``m`` in ``M ∩ sigma^perp``, or None if ``m`` is not there."""
        if any(lt.dot(m, r) for r in self.sigma.rays):
            return None
        return tuple(lt.dot(m, col) for col in lt.transpose(self.section, self.quotient_rank))

    def embed_weight(self, mbar: Sequence[int]) -> tuple:
        return lt.row_apply(mbar, self.projection) if self.projection else tuple(0 for _ in range(self.sigma.ambient_rank))


def project_cone(c: Cone, P: Sequence[Sequence[int]], k: int) -> Cone:
    if k == 0:
        return Cone.zero(0)
    return Cone.from_generators([lt.apply(P, r) for r in c.rays], k)


def orbit_closure(f: Fan, sigma: Cone) -> OrbitClosureData:
    f.index(sigma)
    n = f.ambient_rank
    k, P, S = lt.quotient_lattice(n, lt.saturation(sigma.rays, n))
    st = star(f, sigma)
    lift_of = {}
    bar = []
    for c in st:
        cb = project_cone(c, P, k)
        bar.append(cb)
        lift_of.setdefault(cb, c)
    fan_bar = Fan.from_cones(bar, k)
    return OrbitClosureData(sigma, k, P, S, fan_bar, lift_of)


# ---------------------------------------------------------------------------
# subdivision and resolution


def minimal_cone_containing(f: Fan, v: Sequence[int]) -> Cone:
    hits = [c for c in f.cones if c.contains(v)]
    if not hits:
        raise RayOutsideSupport(f"{tuple(v)} is not in the support of the fan")
    return min(hits, key=cone_sort_key)


def star_subdivision(f: Fan, v: Sequence[int]) -> Fan:
    v = lt.vec(v)
    if len(v) != f.ambient_rank:
        raise lt.RankMismatch(f"{v} is not in rank {f.ambient_rank}")
    if not any(v) or not lt.is_primitive(v):
        raise NonPrimitiveRay(f"{v} is not a primitive lattice vector")
    if not f.in_support(v):
        raise RayOutsideSupport(f"{v} is not in the support of the fan")
    if v in f.rays:
        return f
    n = f.ambient_rank
    out = set()
    for t in f.cones:
        if not t.contains(v):
            out.add(t)
            continue
        for nu in faces(t):
            if not nu.contains(v):
                out.add(Cone.from_generators(list(nu.rays) + [v], n))
    out.add(Cone.from_generators([v], n))
    return Fan.from_cones(out, n, f.name)


def _resolution_ray(c: Cone) -> tuple:
    info = classify(c)
    if not info["simplicial"]:
        return lt.primitive([sum(r[i] for r in c.rays) for i in range(c.ambient_rank)])
    pts = [p for p, lam in fundamental_parallelepiped(c.rays) if any(p)]
    return pts[0]


def resolve(f: Fan):
    """Star-subdivide until every cone is smooth.  Returns ``(fan, trail)``."""
    trail = []
    while True:
        bad = [c for c in f.cones if not classify(c)["smooth"]]
        if not bad:
            return f, tuple(trail)
        c = min(bad, key=cone_sort_key)
        v = _resolution_ray(c)
        trail.append(v)
        f = star_subdivision(f, v)


def replay(f: Fan, trail: Iterable[Sequence[int]]) -> Fan:
    for v in trail:
        f = star_subdivision(f, v)
    return f


@dataclass(frozen=True)
class BlowupSquare:
    base_fan: Fan
    subdivided_fan: Fan
    new_ray: Cone
    sigma: Cone
    V: OrbitClosureData
    V_prime: OrbitClosureData
    degenerate: bool

    def complement_condition(self) -> bool:
        left = set(self.subdivided_fan.cones) - set(star(self.subdivided_fan, self.new_ray))
        right = set(self.base_fan.cones) - set(star(self.base_fan, self.sigma))
        return left == right


class MalformedSquare(FanError):
    pass


def blowup_square(f: Fan, v: Sequence[int]) -> BlowupSquare:
    v = lt.vec(v)
    f2 = star_subdivision(f, v)
    n = f.ambient_rank
    rho = Cone.from_generators([v], n)
    sigma = minimal_cone_containing(f, v)
    sq = BlowupSquare(
        f, f2, rho, sigma, orbit_closure(f, sigma), orbit_closure(f2, rho),
        degenerate=(f2 == f),
    )
    if not sq.complement_condition():
        raise MalformedSquare("open complements of the square differ")
    return sq
