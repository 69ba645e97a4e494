from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricforms.cech import (
    cech_cohomology,
    cech_complex,
    hyper_cohomology_truncated,
    hyper_complex,
    mapping_cone_cohomology,
    mapping_cone_complex,
    parse_sheaf,
    blowup_les_check,
)
from toricforms.cones import Cone, cone
from toricforms.fans import Fan, InvalidFan, blowup_square, star_subdivision
from toricforms.forms import tilde_omega_weight
from toricforms.paperlab import huge_fan, tau_fan

from .oracles import box, cones

P1 = Fan.from_rays([(1,), (-1,)], [[0], [1]])
P2 = Fan.from_rays([(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [0, 2]])
A1 = Fan.from_rays([(1, 0), (1, 2)], [[0, 1]])
HIRZ = Fan.from_rays([(1, 0), (0, 1), (-1, 2), (0, -1)], [[0, 1], [1, 2], [2, 3], [3, 0]])
SHEAVES = ["structure", "tilde:0", "tilde:1", "tilde:2", "image:1", "image:2"]


def test_p1_structure_sheaf():
    assert cech_cohomology(P1, "structure", (0,)) == (1, 0)
    for m in [(1,), (-1,), (3,)]:
        assert cech_cohomology(P1, "structure", m) == (0, 0)


def test_p1_canonical_forms():
    assert cech_cohomology(P1, "tilde:1", (0,)) == (0, 1)


def test_p2_hodge_numbers_at_zero():
    assert [cech_cohomology(P2, f"tilde:{p}", (0, 0)) for p in range(3)] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


@pytest.mark.parametrize("sheaf", SHEAVES)
def test_affine_fans_are_acyclic(sheaf):
    for f in (A1, tau_fan()):
        for m in box(f.ambient_rank, 2):
            h = cech_cohomology(f, sheaf, m)
            assert all(x == 0 for x in h[1:])


def test_affine_h0_is_sections():
    tau = cone((1, 0, 0), (1, 2, 0))
    for m in box(3, 1):
        assert cech_cohomology(tau_fan(), "tilde:1", m)[0] == tilde_omega_weight(tau, m, 1).dim


def test_parse_sheaf():
    assert parse_sheaf("tilde:2") == ("tilde", 2)
    assert parse_sheaf("structure") == ("tilde", 0)
    with pytest.raises(ValueError):
        parse_sheaf("bogus:1")


def test_invalid_fan_rejected():
    overlapping = Fan.from_cones([cone((1, 0), (0, 1)), cone((1, 1), (-1, 1))])
    with pytest.raises(InvalidFan):
        cech_cohomology(overlapping, "structure", (0, 0))


@pytest.mark.parametrize("f", [P2, HIRZ, huge_fan()], ids=["p2", "hirzebruch", "huge"])
def test_ordering_independence(f):
    k = len(f.maximal)
    for m in list(box(f.ambient_rank, 1))[:9]:
        for sheaf in ("structure", "tilde:1"):
            ref = cech_cohomology(f, sheaf, m)
            for order in list(permutations(range(k)))[:6]:
                C = cech_complex(f, sheaf, m, order=order)
                assert C.d_squared_zero()
                assert C.cohomology() == ref


@pytest.mark.parametrize("f", [P1, P2, HIRZ, huge_fan()], ids=["p1", "p2", "hirzebruch", "huge"])
def test_hyper_bicomplex_signs(f):
    for m in box(f.ambient_rank, 1):
        H = hyper_complex(f, 2, m)
        assert H.d_squared_zero() and H.anticommutes()
        assert H.columns[0].cohomology() == cech_cohomology(f, "structure", m)
        assert hyper_cohomology_truncated(f, 0, m)[: len(H.columns[0].dims)] == cech_cohomology(f, "structure", m)
        M = mapping_cone_complex(f, m)
        assert M.d_squared_zero() and M.anticommutes()


def test_p1_hyper_t1():
    assert hyper_cohomology_truncated(P1, 1, (0,)) == (1, 0, 1)


def test_affine_even_degrees_vanish():
    for f in (A1, tau_fan()):
        for m in box(f.ambient_rank, 1):
            for t in (1, 2):
                h = hyper_cohomology_truncated(f, t, m)
                assert 2 * t >= len(h) or h[2 * t] == 0


def test_huge_mapping_cone_examples():
    assert mapping_cone_cohomology(huge_fan(), (1, 0, 0))[2] == 1
    assert mapping_cone_cohomology(huge_fan(), (1, 0, 1))[2] == 0


@pytest.mark.parametrize("f", [P1, P2, HIRZ], ids=["p1", "p2", "hirzebruch"])
def test_smooth_mapping_cone_vanishes(f):
    for m in box(f.ambient_rank, 2):
        assert not any(mapping_cone_cohomology(f, m))


SUBDIVISIONS = [(A1, (1, 1)), (P2, (1, 1)), (tau_fan(), (1, 1, 0)), (huge_fan(), (1, 1, 0)),
                (Fan.from_cones([cone((1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1))]), (1, 1, 1))]


@pytest.mark.parametrize("f,v", SUBDIVISIONS)
def test_subdivision_invariance(f, v):
    g = star_subdivision(f, v)
    radius = 3 if f.ambient_rank == 2 else 2
    for m in box(f.ambient_rank, radius):
        assert cech_cohomology(f, "structure", m) [:1] == cech_cohomology(g, "structure", m)[:1]
        hf, hg = cech_cohomology(f, "structure", m), cech_cohomology(g, "structure", m)
        assert hf + (0,) * (len(hg) - len(hf)) == hg + (0,) * (len(hf) - len(hg))
        for p in range(1, f.ambient_rank + 1):
            assert cech_cohomology(f, ("tilde", p), m)[0] == cech_cohomology(g, ("tilde", p), m)[0]


@settings(max_examples=10)
@given(cones(max_rank=2, max_rays=3, pointed=True, full=True).filter(lambda c: c.ambient_rank == 2), st.data())
def test_random_subdivision_invariance(c, data):
    f = Fan.from_cones([c])
    s = [sum(r[i] for r in c.rays) for i in range(2)]
    v = data.draw(st.sampled_from([s] + [list(r) for r in c.rays]))
    from toricforms.lattice import primitive
    g = star_subdivision(f, primitive(v))
    for m in box(2, 2):
        for p in range(3):
            assert cech_cohomology(f, ("tilde", p), m)[0] == cech_cohomology(g, ("tilde", p), m)[0]
        assert cech_cohomology(g, "structure", m)[1:] == (0,) * (len(cech_cohomology(g, "structure", m)) - 1)


def test_les_a1_square():
    sq = blowup_square(A1, (1, 1))
    for m in box(2, 2):
        r = blowup_les_check(sq, 1, m)
        assert r.exact and r.alternating_sum == 0


def test_les_huge_square():
    sq = blowup_square(huge_fan(), (1, 1, 0))
    for p in range(3):
        for m in box(3, 1):
            assert blowup_les_check(sq, p, m).exact


def test_les_degenerate_square():
    sq = blowup_square(P2, (1, 0))
    assert sq.degenerate
    for m in box(2, 1):
        for p in range(3):
            assert blowup_les_check(sq, p, m).exact


def test_les_p2_blowup():
    sq = blowup_square(P2, (1, 1))
    for m in box(2, 1):
        for p in range(3):
            assert blowup_les_check(sq, p, m).exact
