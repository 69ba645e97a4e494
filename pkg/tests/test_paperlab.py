import pytest

from toricforms.cones import cone
from toricforms.fans import Fan
from toricforms.paperlab import (
    DERIVED,
    DOCUMENTED,
    PUBLISHED,
    SPECTRUM_LEVEL,
    TRIVIAL,
    huge_fan,
    k0_affine_identity,
    mayer_vietoris_cokernel,
    run_huge,
    run_hugeK1,
    structural_identities,
    tau_cone,
    tau_fan,
    weight_box,
)


def _row(report, m):
    return dict(report.table)[m]


def test_hugeK1_window_two():
    rep = run_hugeK1(2)
    assert rep.verdict and not rep.failures
    support = [m for m, row in rep.table if row["coker"]]
    assert support == [(1, 0, c) for c in range(-2, 3)]
    assert all(_row(rep, m)["coker"] == 1 == _row(rep, m)["cone_H1"] for m in support)
    assert _row(rep, (1, 0, 0))["tilde"] == 3 and _row(rep, (1, 0, 0))["image"] == 2
    assert _row(rep, (0, 1, 0))["coker"] == 0
    assert {e.provenance for e in rep.expectations} == {PUBLISHED, DERIVED}


def test_huge_window_two():
    rep = run_huge(2)
    assert rep.verdict
    assert _row(rep, (1, 0, 0))["H2"] == 1
    assert _row(rep, (1, 0, 1))["H2"] == 0 and _row(rep, (1, 0, -1))["H2"] == 0
    assert [m for m, row in rep.table if row["H2"]] == [(1, 0, 0)]


def test_mayer_vietoris_needs_two_charts():
    assert mayer_vietoris_cokernel(huge_fan(), (1, 0, 0)) == 1
    with pytest.raises(ValueError):
        mayer_vietoris_cokernel(tau_fan(), (1, 0, 0))


def test_k0_identity():
    rep = k0_affine_identity(tau_cone(), radius=1, max_t=2)
    assert rep.verdict
    assert _row(rep, (1, 0, 0))["H0_t0"] == 1
    assert _row(rep, (-1, 0, 0))["H0_t0"] == 0
    assert all(row["H2_t1"] == 0 for _, row in rep.table)
    assert {e.provenance for e in rep.expectations} == {TRIVIAL}
    assert any(DOCUMENTED in n for n in rep.notes)


def test_k0_rejects_non_pointed():
    from toricforms.cones import Cone

    with pytest.raises(ValueError):
        k0_affine_identity(Cone.from_generators([(1, 0)], 2, lineality=[(0, 1)]))


def test_identities_on_huge():
    rep = structural_identities(huge_fan(), radius=1)
    assert rep.verdict
    assert _row(rep, (1, 0, 0))["chain"] == (1, 0)
    for claim in SPECTRUM_LEVEL:
        assert f"{claim}: {DOCUMENTED}" in rep.notes


def test_identities_on_affine_tau():
    rep = structural_identities(tau_fan(), radius=1)
    assert rep.verdict
    assert {m for m, _ in rep.table} == {(1, 0, c) for c in (-1, 0, 1)}
    assert all(row["chain"] == (1, 0) for _, row in rep.table)


def test_identities_on_smooth_fan():
    P2 = Fan.from_rays([(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [0, 2]])
    rep = structural_identities(P2, radius=2)
    assert rep.verdict and rep.table == ()


def test_weight_box():
    assert list(weight_box(2, 0)) == [(0, 0)]
    assert len(list(weight_box(3, 2))) == 125
    with pytest.raises(ValueError):
        list(weight_box(2, -1))
    with pytest.raises(ValueError):
        run_hugeK1(0)
