from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricforms import lattice as lt
from toricforms.cones import Cone, cone
from toricforms.monoids import (
    AffineMonoid,
    NonPointedMonoid,
    WeightOutsideMonoid,
    decompositions,
    hilbert_basis,
    localization_check,
    pointed_split,
)

from .oracles import box, cones

TAU = cone((1, 0, 0), (1, 2, 0))
QUADRATIC = AffineMonoid(Cone.from_generators([(0, 1), (2, -1)]))
FREE = AffineMonoid.of_cone(cone((1, 0), (0, 1)))


def test_hilbert_basis_examples():
    assert set(hilbert_basis(AffineMonoid.of_cone(TAU))) == {
        (1, 0, 0), (0, 1, 0), (2, -1, 0), (0, 0, 1), (0, 0, -1)}
    assert set(hilbert_basis(FREE)) == {(1, 0), (0, 1)}
    assert set(hilbert_basis(QUADRATIC)) == {(0, 1), (1, 0), (2, -1)}


def test_pointed_split_examples():
    sp = pointed_split(AffineMonoid.of_cone(TAU))
    assert len(sp.unit_basis) == 1 and sp.unit_basis[0] == (0, 0, 1)
    assert set(sp.pointed.hilbert_basis()) == {(0, 1), (1, 0), (2, -1)}
    assert pointed_split(FREE).unit_basis == () and pointed_split(FREE).pointed.dual_cone == FREE.dual_cone
    torus = pointed_split(AffineMonoid.of_cone(Cone.zero(3)))
    assert len(torus.unit_basis) == 3 and torus.pointed.rank == 0


def test_decompositions_examples():
    assert decompositions(QUADRATIC, (1, 0), 2) == [((0, 0), (1, 0)), ((1, 0), (0, 0))]
    assert decompositions(QUADRATIC, (0, 0), 2) == [((0, 0), (0, 0))]
    assert len(decompositions(FREE, (1, 1), 2)) == 4


def test_decomposition_errors():
    with pytest.raises(NonPointedMonoid):
        decompositions(AffineMonoid.of_cone(TAU), (1, 0, 0), 2)
    with pytest.raises(WeightOutsideMonoid):
        decompositions(FREE, (-1, 0), 2)


def test_localization_examples():
    A = AffineMonoid.of_cone(TAU)
    wit = {}
    assert localization_check(A, (1, 1, 0), wit)
    assert all(i <= 10 and A.contains(a) for i, a in wit.values())
    assert not localization_check(A, (0, 0, 1))
    assert localization_check(FREE, (1, 1))


def _decomposes(A, hb, x, memo):
    if not any(x):
        return True
    if x in memo:
        return memo[x]
    memo[x] = any(A.contains(lt.sub(x, h)) and _decomposes(A, hb, lt.sub(x, h), memo) for h in hb)
    return memo[x]


pointed_cones = cones(max_rank=3, max_rays=4, full=True)


@given(pointed_cones)
def test_hilbert_basis_generates_box(sigma):
    A = AffineMonoid.of_cone(sigma)
    hb = A.hilbert_basis()
    assert all(A.contains(h) for h in hb)
    memo = {}
    radius = 4 if sigma.ambient_rank <= 2 else 2
    for x in box(sigma.ambient_rank, radius):
        if A.contains(x):
            assert _decomposes(A, hb, x, memo)


@given(pointed_cones)
def test_hilbert_basis_elements_are_irreducible(sigma):
    A = AffineMonoid.of_cone(sigma)
    for h in A.hilbert_basis():
        r = max(abs(a) for a in h)
        for y in box(sigma.ambient_rank, r + 1):
            if any(y) and y != h:
                assert not (A.contains(y) and A.contains(lt.sub(h, y)))


@given(pointed_cones, st.integers(2, 3), st.data())
def test_decompositions_closed_under_permutation(sigma, parts, data):
    A = AffineMonoid.of_cone(sigma)
    hb = A.hilbert_basis()
    picks = data.draw(st.lists(st.sampled_from(hb), min_size=1, max_size=2))
    m = tuple(sum(h[i] for h in picks) for i in range(sigma.ambient_rank))
    ds = decompositions(A, m, parts)
    S = set(ds)
    assert all(tuple(sum(t[i] for t in d) for i in range(len(m))) == m for d in ds)
    assert all(set(permutations(d)) <= S for d in ds)


@given(pointed_cones)
def test_localization_reaches_every_box_point(sigma):
    A = AffineMonoid.of_cone(sigma)
    m = tuple(sum(h[i] for h in A.hilbert_basis()) for i in range(sigma.ambient_rank))
    assert localization_check(A, m)
    for t in box(sigma.ambient_rank, 2):
        assert any(A.contains(lt.add(t, lt.scale(i, m))) for i in range(0, 20))


@given(cones(max_rank=3, max_rays=3))
def test_split_round_trip(sigma):
    A = AffineMonoid.of_cone(sigma)
    sp = A.split
    for u in sp.unit_basis:
        assert A.contains(u) and A.contains(lt.scale(-1, u))
    for x in sp.pointed.hilbert_basis():
        assert sp.project(sp.lift(x)) == x
        assert A.contains(sp.lift(x))
