from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricforms import lattice as lt

from .oracles import det, elementary_divisors_by_minors

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def _diag(S):
    return [S[i][i] for i in range(min(len(S), len(S[0])))]


@pytest.mark.parametrize(
    "A, diag",
    [([[1, 0], [0, 1]], [1, 1]), ([[2, 4], [6, 8]], [2, 4]), ([[0]], [0])],
)
def test_smith_normal_form_examples(A, diag):
    S, U, V = lt.smith_normal_form(A)
    assert _diag(S) == diag
    assert lt.matmul(lt.matmul(U, A), V) == tuple(map(tuple, S))


@given(matrices)
def test_smith_normal_form_reconstructs(A):
    S, U, V = lt.smith_normal_form(A)
    assert lt.matmul(lt.matmul(U, A), V) == tuple(map(tuple, S))
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    d = _diag(S)
    assert all(S[i][j] == 0 for i in range(len(S)) for j in range(len(S[0])) if i != j)
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert nz == elementary_divisors_by_minors(A)


def test_quotient_lattice_examples():
    k, P, S = lt.quotient_lattice(2, [])
    assert k == 2 and P == lt.identity(2)
    assert lt.quotient_lattice(1, [(1,)])[0] == 0
    k, P, S = lt.quotient_lattice(3, [(1, 0, 0), (1, 2, 0)], saturate=True)
    assert k == 1 and P == ((0, 0, 1),)


def test_quotient_lattice_rejects_torsion():
    with pytest.raises(lt.TorsionQuotient):
        lt.quotient_lattice(3, [(1, 0, 0), (1, 2, 0)])


@given(st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), max_size=3))
))
def test_quotient_round_trip(data):
    n, gens = data
    k, P, S = lt.quotient_lattice(n, gens, saturate=True)
    assert k == n - lt.rank_of(gens) if gens else k == n
    if k:
        assert lt.matmul(P, S) == lt.identity(k)
        for g in gens:
            assert not any(lt.apply(P, g))


@pytest.mark.parametrize(
    "v, out", [((2, 4, 0), (1, 2, 0)), ((1, 0, 0), (1, 0, 0)), ((-3, -6), (-1, -2))]
)
def test_primitive_examples(v, out):
    assert lt.primitive(v) == out


def test_primitive_zero():
    with pytest.raises(lt.ZeroVector):
        lt.primitive((0, 0))


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=5).filter(any))
def test_primitive_idempotent(v):
    p = lt.primitive(v)
    assert lt.primitive(p) == p and lt.content(p) == 1


@pytest.mark.parametrize("n, p", [(3, 0), (3, 1), (4, 2), (5, 3)])
def test_wedge_basis_lexicographic(n, p):
    B = lt.wedge_basis(n, p)
    assert len(B) == comb(n, p)
    assert list(B) == sorted(B)


def test_wedge_is_alternating():
    u, v = (1, 2, 3), (0, 1, 5)
    assert lt.wedge([u, v], 3) == tuple(-x for x in lt.wedge([v, u], 3))
    assert not any(lt.wedge([u, u], 3))
    assert lt.wedge_mul(u, v, 3, 1) == lt.wedge([u, v], 3)


def test_integer_kernel_and_saturation():
    K = lt.integer_kernel([(1, 2, 0)], 3)
    assert len(K) == 2 and all(lt.dot(k, (1, 2, 0)) == 0 for k in K)
    assert lt.saturation([(2, 0, 0)], 3) == ((1, 0, 0),)
