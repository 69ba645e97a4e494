"""Per-weight Čech cohomology over the cover of a fan by its maximal cones.

Every section space is a :class:`GradedSubspace` of ``∧^p M ⊗ Q``, so all
restriction and comparison maps are inclusions and become exact rational
matrices after reading coordinates in row-reduced bases.  Matrices act on
row vectors: a cochain ``x`` maps to ``x @ M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations
from typing import Callable, Sequence

from . import lattice as lt
from .cones import Cone
from .fans import BlowupSquare, Fan, InvalidFan, MalformedSquare, OrbitClosureData, validate
from .forms import (
    GradedSubspace,
    derivative_image,
    embed_subspace,
    omega_image_weight,
    tilde_omega_weight,
)


# ---------------------------------------------------------------------------
# exact linear maps


@dataclass(frozen=True)
class LinearMap:
    """``source -> target`` as a ``source x target`` matrix of Fractions."""

    source: int
    target: int
    rows: tuple

    @classmethod
    def zero(cls, source: int, target: int) -> "LinearMap":
        return cls(source, target, tuple((Fraction(0),) * target for _ in range(source)))

    @classmethod
    def from_rows(cls, source: int, target: int, rows) -> "LinearMap":
        rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        if len(rows) != source or any(len(r) != target for r in rows):
            raise ValueError("matrix shape does not match the declared dimensions")
        return cls(source, target, rows)

    def rank(self) -> int:
        return lt.rank_of(self.rows) if self.target else 0

    def kernel(self) -> tuple:
        """Basis of ``{x : x @ M = 0}``."""
        return lt.nullspace(lt.transpose(self.rows, self.target), self.source)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if self.target != other.source:
            raise ValueError("incompatible shapes")
        return LinearMap(self.source, other.target, tuple(self.apply(r, other) for r in self.rows))

    @staticmethod
    def apply(x, M: "LinearMap") -> tuple:
        out = [Fraction(0)] * M.target
        for xi, row in zip(x, M.rows):
            if xi:
                for j, a in enumerate(row):
                    if a:
                        out[j] += xi * a
        return tuple(out)

    def image_of(self, vectors) -> list:
        return [self.apply(v, self) for v in vectors]

    def is_zero(self) -> bool:
        return all(not any(r) for r in self.rows)

    def __neg__(self) -> "LinearMap":
        return LinearMap(self.source, self.target, tuple(tuple(-a for a in r) for r in self.rows))


def hstack(maps: Sequence[LinearMap]) -> LinearMap:
    """``x -> (x @ M1, x @ M2, ...)``."""
    src = maps[0].source
    return LinearMap(src, sum(M.target for M in maps),
                     tuple(sum((M.rows[i] for M in maps), ()) for i in range(src)))


def vstack(maps: Sequence[LinearMap]) -> LinearMap:
    """``(x1, x2, ...) -> x1 @ M1 + x2 @ M2 + ...``."""
    tgt = maps[0].target
    return LinearMap(sum(M.source for M in maps), tgt, sum((M.rows for M in maps), ()))


def _span_rank(vectors) -> int:
    vectors = [v for v in vectors if any(v)]
    return lt.rank_of(vectors) if vectors else 0


@dataclass(frozen=True)
class Complex:
    """Cochain complex of finite-dimensional Q-spaces, degrees ``0..len(dims)-1``."""

    dims: tuple
    d: tuple  # d[q]: degree q -> degree q + 1

    def map(self, q: int) -> LinearMap:
        src = self.dims[q] if 0 <= q < len(self.dims) else 0
        tgt = self.dims[q + 1] if 0 <= q + 1 < len(self.dims) else 0
        if 0 <= q < len(self.d):
            return self.d[q]
        return LinearMap.zero(src, tgt)

    def dim(self, q: int) -> int:
        return self.dims[q] if 0 <= q < len(self.dims) else 0

    def cycles(self, q: int) -> tuple:
        return self.map(q).kernel()

    def boundaries(self, q: int) -> tuple:
        return self.map(q - 1).rows

    def cohomology(self) -> tuple:
        ranks = [self.map(q).rank() for q in range(len(self.dims))]
        return tuple(
            self.dims[q] - ranks[q] - (ranks[q - 1] if q else 0) for q in range(len(self.dims))
        )

    def d_squared_zero(self) -> bool:
        return all((self.d[q] @ self.d[q + 1]).is_zero() for q in range(len(self.d) - 1))

    def padded(self, length: int) -> "Complex":
        if length <= len(self.dims):
            return self
        dims = self.dims + (0,) * (length - len(self.dims))
        d = list(self.d)
        while len(d) < length - 1:
            q = len(d)
            d.append(LinearMap.zero(dims[q], dims[q + 1]))
        return Complex(dims, tuple(d))


def induced_rank(h: Sequence[LinearMap], src: Complex, tgt: Complex, q: int) -> int:
    """Rank of the map induced on ``H^q`` by the chain map ``h``."""
    Z = src.cycles(q)
    B = [b for b in tgt.boundaries(q) if any(b)]
    moved = h[q].image_of(Z) if Z else []
    return _span_rank(moved + B) - _span_rank(B)


# ---------------------------------------------------------------------------
# sheaves and Čech complexes


SECTION_KINDS = ("tilde", "image")


def parse_sheaf(selector) -> tuple:
    """``"tilde:1"``, ``"image:2"`` or ``"structure"`` to ``(kind, p)``."""
    if isinstance(selector, tuple):
        kind, p = selector
    elif selector == "structure":
        kind, p = "tilde", 0
    else:
        try:
            kind, p = selector.split(":")
            p = int(p)
        except ValueError:
            raise ValueError(f"unrecognised sheaf {selector!r}") from None
    if kind == "omega_image":
        kind = "image"
    if kind not in SECTION_KINDS or p < 0:
        raise ValueError(f"unrecognised sheaf {selector!r}")
    return kind, p


def chart_sections(kind: str, c: Cone, m: tuple, p: int) -> GradedSubspace:
    fn = tilde_omega_weight if kind == "tilde" else omega_image_weight
    return fn(c, m, p)


@dataclass(frozen=True)
class CechComplex:
    """Alternating Čech cochains of one sheaf at one weight.

    ``tuples[q]`` lists the sorted ``(q+1)``-tuples of chart indices and
    ``blocks[q]`` the matching section spaces over the intersections.
    """

    weight: tuple
    degree: int
    label: str
    charts: tuple
    tuples: tuple
    blocks: tuple
    complex: Complex

    @property
    def dims(self) -> tuple:
        return self.complex.dims

    def offsets(self, q: int) -> tuple:
        out, acc = [], 0
        for S in self.blocks[q]:
            out.append(acc)
            acc += S.dim
        return tuple(out)

    def cohomology(self) -> tuple:
        return self.complex.cohomology()

    def d_squared_zero(self) -> bool:
        return self.complex.d_squared_zero()


def build_cech(charts: Sequence, section: Callable[[tuple], GradedSubspace], weight,
               degree: int, label: str = "") -> CechComplex:
    k = len(charts)
    tuples = tuple(tuple(combinations(range(k), q + 1)) for q in range(k))
    blocks = tuple(tuple(section(I) for I in T) for T in tuples)
    dims = tuple(sum(S.dim for S in B) for B in blocks)
    diffs = []
    for q in range(k - 1):
        offs = _offsets(blocks[q + 1])
        rows = []
        for I, S in zip(tuples[q], blocks[q]):
            Iset = set(I)
            hits = [
                (J, T, off, next(pos for pos, x in enumerate(J) if x not in Iset))
                for J, T, off in zip(tuples[q + 1], blocks[q + 1], offs)
                if Iset <= set(J)
            ]
            for v in S.basis:
                row = [Fraction(0)] * dims[q + 1]
                for J, T, off, pos in hits:
                    sign = -1 if pos % 2 else 1
                    for t, c in enumerate(T.coordinates(v)):
                        row[off + t] += sign * c
                rows.append(tuple(row))
        diffs.append(LinearMap(dims[q], dims[q + 1], tuple(rows)))
    return CechComplex(tuple(weight), degree, label, tuple(charts), tuples, blocks,
                       Complex(dims, tuple(diffs)))


def _offsets(blocks) -> list:
    out, acc = [], 0
    for S in blocks:
        out.append(acc)
        acc += S.dim
    return out


_VALID: dict = {}


def require_valid(f: Fan) -> None:
    ok = _VALID.get(f)
    if ok is None:
        rep = validate(f)
        ok = _VALID.setdefault(f, rep)
    if not ok:
        raise InvalidFan(f"{ok.violation}: " + ", ".join(str(c) for c in ok.cones))


@lru_cache(maxsize=4096)
def chart_intersection(f: Fan, charts: tuple, I: tuple) -> Cone:
    c = reduce(lambda a, b: a.intersect(b), (charts[i] for i in I))
    if c not in f:
        raise InvalidFan(f"intersection {c} is not a cone of the fan")
    return c


def cech_complex(f: Fan, sheaf, m: Sequence[int], order: Sequence[int] | None = None) -> CechComplex:
    """Čech complex of ``sheaf`` at weight ``m`` over the maximal cones of ``f``.

    ``order`` permutes the charts (used to test ordering independence).
    """
    require_valid(f)
    kind, p = parse_sheaf(sheaf)
    m = lt.vec(m)
    if len(m) != f.ambient_rank:
        raise lt.RankMismatch(f"{m} is not in rank {f.ambient_rank}")
    charts = f.maximal if order is None else tuple(f.maximal[i] for i in order)

    def section(I):
        return chart_sections(kind, chart_intersection(f, charts, I), m, p)

    return build_cech(charts, section, m, p, f"{kind}:{p}")


def cech_cohomology(f: Fan, sheaf, m: Sequence[int]) -> tuple:
    """Dims of ``H^q`` for ``q = 0 .. #maximal cones - 1``."""
    return cech_complex(f, sheaf, m).cohomology()


# ---------------------------------------------------------------------------
# bicomplexes


def _blockwise(src: CechComplex, tgt: CechComplex, q: int, fn) -> LinearMap:
    """Apply ``fn`` to every section of ``src`` in Čech degree ``q``, landing in ``tgt``."""
    rows = []
    toffs = tgt.offsets(q)
    for S, T, off in zip(src.blocks[q], tgt.blocks[q], toffs):
        for v in S.basis:
            row = [Fraction(0)] * tgt.dims[q]
            w = fn(v)
            if any(w):
                for t, c in enumerate(T.coordinates(w)):
                    row[off + t] = c
            rows.append(tuple(row))
    return LinearMap(src.dims[q], tgt.dims[q], tuple(rows))


@dataclass(frozen=True)
class HyperComplex:
    """Total complex of Čech columns joined by vertical maps.

    ``columns[j]`` is the Čech complex of the sheaf in form degree ``j``;
    ``vertical[j][q]`` maps column ``j`` to column ``j+1`` in Čech degree
    ``q``.  The total differential is ``čech + (-1)^q vertical``.
    """

    weight: tuple
    columns: tuple
    vertical: tuple
    total: Complex

    def cohomology(self) -> tuple:
        return self.total.cohomology()

    def d_squared_zero(self) -> bool:
        return self.total.d_squared_zero()

    def anticommutes(self) -> bool:
        for j, V in enumerate(self.vertical):
            a, b = self.columns[j], self.columns[j + 1]
            for q in range(len(a.dims) - 1):
                left = a.complex.map(q) @ V[q + 1]
                right = V[q] @ b.complex.map(q)
                if left.rows != right.rows:
                    return False
        return True


def total_complex(columns: Sequence[CechComplex], vertical: Sequence[Sequence[LinearMap]]) -> Complex:
    t = len(columns) - 1
    k = len(columns[0].dims)
    degrees = range(t + k)
    parts = [[(j, n - j) for j in range(t + 1) if 0 <= n - j < k] for n in degrees]
    dims = tuple(sum(columns[j].dims[q] for j, q in P) for P in parts)
    diffs = []
    for n in degrees[:-1]:
        tgt_parts = parts[n + 1]
        toff, acc = {}, 0
        for j, q in tgt_parts:
            toff[(j, q)] = acc
            acc += columns[j].dims[q]
        rows = []
        for j, q in parts[n]:
            blocks = []
            if (j, q + 1) in toff:
                blocks.append((toff[(j, q + 1)], columns[j].complex.map(q), 1))
            if (j + 1, q) in toff:
                blocks.append((toff[(j + 1, q)], vertical[j][q], -1 if q % 2 else 1))
            for i in range(columns[j].dims[q]):
                row = [Fraction(0)] * dims[n + 1]
                for off, M, sign in blocks:
                    for t_, a in enumerate(M.rows[i]):
                        if a:
                            row[off + t_] += sign * a
                rows.append(tuple(row))
        diffs.append(LinearMap(dims[n], dims[n + 1], tuple(rows)))
    return Complex(dims, tuple(diffs))


def hyper_complex(f: Fan, t: int, m: Sequence[int]) -> HyperComplex:
    """Čech model of the truncated complex ``Ω̃^0 -> ... -> Ω̃^t`` at weight ``m``."""
    if t < 0:
        raise ValueError("truncation must be nonnegative")
    m = lt.vec(m)
    cols = tuple(cech_complex(f, ("tilde", j), m) for j in range(t + 1))
    k = len(cols[0].dims)
    vert = tuple(
        tuple(_blockwise(cols[j], cols[j + 1], q, lambda v, j=j: derivative_image(m, v, j))
              for q in range(k))
        for j in range(t)
    )
    return HyperComplex(m, cols, vert, total_complex(cols, vert))


def hyper_cohomology_truncated(f: Fan, t: int, m: Sequence[int]) -> tuple:
    """Dims of ``H^n`` of the truncated Danilov-de Rham complex, ``n = 0 .. t + #charts - 1``."""
    return hyper_complex(f, t, m).cohomology()


def mapping_cone_complex(f: Fan, m: Sequence[int]) -> HyperComplex:
    """``[image of Kähler 1-forms -> Ω̃^1]`` with the image in degree 0."""
    m = lt.vec(m)
    lo = cech_complex(f, ("image", 1), m)
    hi = cech_complex(f, ("tilde", 1), m)
    vert = (tuple(_blockwise(lo, hi, q, lambda v: v) for q in range(len(lo.dims))),)
    return HyperComplex(m, (lo, hi), vert, total_complex((lo, hi), vert))


def mapping_cone_cohomology(f: Fan, m: Sequence[int]) -> tuple:
    return mapping_cone_complex(f, m).cohomology()


# ---------------------------------------------------------------------------
# the long exact sequence of a blow-up square


def orbit_sections(V: OrbitClosureData, charts: tuple, p: int, m: tuple):
    """Section function of Ω̃^p on ``V``, embedded in ``∧^p M``."""
    n = V.sigma.ambient_rank
    mbar = V.weight_coords(m)

    def section(I):
        if mbar is None:
            return GradedSubspace.zero(m, p, n)
        c = chart_intersection(V.fan_bar, charts, I)
        return embed_subspace(tilde_omega_weight(c, mbar, p), V.projection, n, m)

    return section


def orbit_cech(V: OrbitClosureData, p: int, m: tuple) -> CechComplex:
    charts = V.fan_bar.maximal
    return build_cech(charts, orbit_sections(V, charts, p, m), m, p, f"orbit:{p}")


def refinement_map(src: CechComplex, tgt: CechComplex, phi: Sequence[int]) -> tuple:
    """Cochain map along ``phi``: chart ``j`` of ``tgt`` lies in chart ``phi[j]`` of ``src``."""
    out = []
    for q in range(len(tgt.dims)):
        rows = [[Fraction(0)] * tgt.dims[q] for _ in range(src.dims[q] if q < len(src.dims) else 0)]
        if q < len(src.dims):
            soffs = dict(zip(src.tuples[q], zip(src.offsets(q), src.blocks[q])))
            for J, T, off in zip(tgt.tuples[q], tgt.blocks[q], tgt.offsets(q)):
                img = [phi[j] for j in J]
                # a zero target (orbit closure off its weight lattice) gets the zero map
                if len(set(img)) < len(img) or not T.dim:
                    continue
                order = sorted(range(len(img)), key=img.__getitem__)
                sign = _perm_sign(order)
                soff, S = soffs[tuple(img[i] for i in order)]
                for i, v in enumerate(S.basis):
                    for t, c in enumerate(T.coordinates(v)):
                        rows[soff + i][off + t] += sign * c
        out.append(LinearMap(len(rows), tgt.dims[q], tuple(tuple(r) for r in rows)))
    return tuple(out)


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _containing(big: Sequence[Cone], small: Sequence[Cone]) -> tuple:
    out = []
    for c in small:
        i = next((i for i, b in enumerate(big) if b.contains_cone(c)), None)
        if i is None:
            raise MalformedSquare(f"{c} lies in no chart of the coarser cover")
        out.append(i)
    return tuple(out)


def _lift_index(V: OrbitClosureData, X_charts: Sequence[Cone]) -> tuple:
    return tuple(X_charts.index(V.lift_of[c]) for c in V.fan_bar.maximal)


@dataclass(frozen=True)
class LesReport:
    """Ranks around ``H(X) -> H(X') ⊕ H(V) -> H(V') -> H(X)[1]`` at one weight.

    ``alpha[q]``, ``beta[q]``, ``gamma[q]`` are the ranks of the three maps
    leaving ``H^q(X)``, ``H^q(X') ⊕ H^q(V)`` and ``H^q(V')``.
    """

    weight: tuple
    degree: int
    h_X: tuple
    h_Xp: tuple
    h_V: tuple
    h_Vp: tuple
    alpha: tuple
    beta: tuple
    gamma: tuple
    composite_zero: bool
    quasi_isomorphic: bool
    nodes_exact: bool
    alternating_sum: int

    @property
    def exact(self) -> bool:
        return self.composite_zero and self.quasi_isomorphic and self.nodes_exact and self.alternating_sum == 0


def blowup_les_check(sq: BlowupSquare, p: int, m: Sequence[int]) -> LesReport:
    """Verify exactness of the long sequence of the square at weight ``m``.

    ``X -> X' ⊕ V -> V'`` is exact with connecting maps exactly when the
    comparison map from ``C(X)`` to the homotopy fibre of
    ``C(X') ⊕ C(V) -> C(V')`` is a quasi-isomorphism; ranks of the three
    induced maps are then checked node by node.
    """
    if not sq.complement_condition():
        raise MalformedSquare("open complements of the square differ")
    m = lt.vec(m)
    X, Xp = sq.base_fan, sq.subdivided_fan
    require_valid(X)
    require_valid(Xp)
    cX = cech_complex(X, ("tilde", p), m)
    cXp = cech_complex(Xp, ("tilde", p), m)
    cV = orbit_cech(sq.V, p, m)
    cVp = orbit_cech(sq.V_prime, p, m)

    a = refinement_map(cX, cXp, _containing(X.maximal, Xp.maximal))
    b = refinement_map(cX, cV, _lift_index(sq.V, X.maximal))
    c = refinement_map(cXp, cVp, _lift_index(sq.V_prime, Xp.maximal))
    Vp_in_X = _containing(X.maximal, [sq.V_prime.lift_of[cb] for cb in sq.V_prime.fan_bar.maximal])
    X_to_V = {x: j for j, x in enumerate(_lift_index(sq.V, X.maximal))}
    e = refinement_map(cV, cVp, tuple(X_to_V[i] for i in Vp_in_X))

    L = max(len(cX.dims), len(cXp.dims), len(cV.dims), len(cVp.dims)) + 1
    A = cX.complex.padded(L)
    Cx, Cv, C = cXp.complex.padded(L), cV.complex.padded(L), cVp.complex.padded(L)

    def at(h, q, s, t):
        return h[q] if q < len(h) and h[q].source == s else LinearMap.zero(s, t)

    Bd = []
    f, g = [], []
    for q in range(L):
        f.append(hstack([at(a, q, A.dim(q), Cx.dim(q)), at(b, q, A.dim(q), Cv.dim(q))]))
        g.append(vstack([at(c, q, Cx.dim(q), C.dim(q)), -at(e, q, Cv.dim(q), C.dim(q))]))
    for q in range(L - 1):
        Bd.append(vstack([
            hstack([Cx.map(q), LinearMap.zero(Cx.dim(q), Cv.dim(q + 1))]),
            hstack([LinearMap.zero(Cv.dim(q), Cx.dim(q + 1)), Cv.map(q)]),
        ]))
    B = Complex(tuple(Cx.dim(q) + Cv.dim(q) for q in range(L)), tuple(Bd))
    composite_zero = all((f[q] @ g[q]).is_zero() for q in range(L))

    # homotopy fibre F^q = B^q ⊕ C^{q-1}
    Fdims = tuple(B.dim(q) + C.dim(q - 1) for q in range(L))
    Fd = []
    for q in range(L - 1):
        Fd.append(vstack([
            hstack([B.map(q), g[q]]),
            hstack([LinearMap.zero(C.dim(q - 1), B.dim(q + 1)), -C.map(q - 1)]),
        ]))
    F = Complex(Fdims, tuple(Fd))
    kappa = [hstack([f[q], LinearMap.zero(A.dim(q), C.dim(q - 1))]) for q in range(L)]
    # c in C^{q-1} -> (0, c) in F^q, indexed by the source degree q-1
    iota = [
        hstack([LinearMap.zero(C.dim(q), B.dim(q + 1)),
                LinearMap.from_rows(C.dim(q), C.dim(q), lt.identity(C.dim(q)))])
        for q in range(L - 1)
    ]

    hA, hB, hC, hF = A.cohomology(), B.cohomology(), C.cohomology(), F.cohomology()
    quasi = all(hA[q] == hF[q] == induced_rank(kappa, A, F, q) for q in range(L))
    Cshift = C  # iota is a chain map up to sign, which does not affect ranks
    alpha = tuple(induced_rank(f, A, B, q) for q in range(L))
    beta = tuple(induced_rank(g, B, C, q) for q in range(L))
    gamma = tuple(
        _iota_rank(iota[q], Cshift, F, q) if q < L - 1 else 0 for q in range(L)
    )
    nodes = all(
        alpha[q] + (gamma[q - 1] if q else 0) == hA[q]
        and alpha[q] + beta[q] == hB[q]
        and beta[q] + gamma[q] == hC[q]
        for q in range(L)
    )
    hX, hXp, hV, hVp = A.cohomology(), Cx.cohomology(), Cv.cohomology(), C.cohomology()
    alt = sum((-1) ** q * (hX[q] - hXp[q] - hV[q] + hVp[q]) for q in range(L))
    trim = L - 1
    return LesReport(m, p, hX[:trim], hXp[:trim], hV[:trim], hVp[:trim],
                     alpha[:trim], beta[:trim], gamma[:trim],
                     composite_zero, quasi, nodes, alt)


def _iota_rank(iota_q: LinearMap, C: Complex, F: Complex, q: int) -> int:
    Z = C.cycles(q)
    Bf = [v for v in F.boundaries(q + 1) if any(v)]
    moved = iota_q.image_of(Z) if Z else []
    return _span_rank(moved + Bf) - _span_rank(Bf)
