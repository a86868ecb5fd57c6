import numpy as np
import pytest

from conftest import space
from spherodeck.errors import InvalidInput
from spherodeck.lie_core import Subspace, contains
from spherodeck.root_system import chamber_of, enumerate_minimal_parabolics, standard_parabolic
from spherodeck.sphericity import (certify, default_grid, interior_point_search, test_open as open_test,
                                   test_spherical_pair as pair_test)


def _parabolic_at(rs, x):
    c, _ = chamber_of(rs, np.asarray(x, dtype=float))
    return standard_parabolic(rs, (), c)


def test_degenerate_triple_p_prime_and_p_double_prime():
    sp = space("triple_sl2_degenerate")
    p1 = _parabolic_at(sp.rs, [1, -1, 1])    # P0 x opposite P0 x Q0
    p2 = _parabolic_at(sp.rs, [1, 1, 1])     # P0 x P0 x Q0
    ok1, (dsum1, dcap1) = open_test(p1, sp.h)
    ok2, (dsum2, dcap2) = open_test(p2, sp.h)
    assert ok1 and dsum1 == 9 and dcap1 == 0
    assert not ok2 and dcap2 > 0
    assert pair_test(p2, sp.h, sp.cd) == (True, False)


def test_flags():
    for name, sph, pure in [("triple_sl2_generic", True, True), ("gp_gl2_gl1", True, True),
                            ("group_sl2", True, False), ("triple_sl2_degenerate", True, True)]:
        sp = space(name)
        cert = certify(name, sp.rs, sp.h, sp.cd)
        assert cert.is_spherical is sph and cert.is_pure is pure, name
    sp = space("triple_sl2_generic")
    assert len(certify("t", sp.rs, sp.h, sp.cd).open_chambers) == 8


def test_gp_gl2_gl1_minimal_parabolics_pure():
    sp = space("gp_gl2_gl1")
    for _, par in enumerate_minimal_parabolics(sp.rs):
        ok, (_, dcap) = open_test(par, sp.h)
        assert ok and dcap == 0


def test_group_case_spherical_pair():
    sp = space("group_sl2")
    c1, c2 = pair_test(standard_parabolic(sp.rs, (), sp.rs.chambers[1]), sp.h, sp.cd)
    assert c1 and c2
    full = standard_parabolic(sp.rs, tuple(range(sp.rs.rank)))
    assert pair_test(full, sp.h, sp.cd)[0] is False


def test_certificate_invariants():
    for name in ["group_sl2", "sp2_chain", "gp_gl3_gl2"]:
        sp = space(name)
        cert = certify(name, sp.rs, sp.h, sp.cd)
        for _, ok, dsum, _ in cert.per_parabolic:
            assert ok == (dsum == sp.g.dim)
        assert cert.is_spherical == any(e[1] for e in cert.per_parabolic)
        js = cert.to_json()
        assert js["is_spherical"] == cert.is_spherical


@pytest.mark.parametrize("name", ["group_sl2", "triple_sl2_degenerate", "sp2_chain"])
def test_open_basis_invariance(name):
    sp = space(name)
    rng = np.random.default_rng(5)
    h2 = Subspace.from_matrices(sp.g, np.tensordot(rng.normal(size=(sp.h.dim, sp.h.dim)), sp.h.matrices(), axes=1))
    for _, par in enumerate_minimal_parabolics(sp.rs):
        p2 = Subspace.from_matrices(sp.g, np.tensordot(rng.normal(size=(par.p_F.dim,) * 2), par.p_F.matrices(), axes=1))
        assert open_test(par, sp.h) == open_test(p2, h2)


@pytest.mark.parametrize("name", ["group_sl2", "triple_sl2_degenerate", "sp2_chain", "gp_gl3_gl2"])
def test_monotonicity_and_minimal_lemma(name):
    sp = space(name)
    rs = sp.rs
    for c in rs.chambers:
        p0 = standard_parabolic(rs, (), c)
        open0 = open_test(p0, sp.h)[0]
        for j in range(rs.rank):
            pF = standard_parabolic(rs, (j,), c)
            assert contains(pF.p_F, p0.p_F)
            if open0:
                assert open_test(pF, sp.h)[0]
            c1, c2 = pair_test(pF, sp.h, sp.cd)
            if c1 and c2:
                # some minimal parabolic inside p_F is open
                assert any(open_test(q, sp.h)[0] for _, q in enumerate_minimal_parabolics(rs)
                           if contains(pF.p_F, q.p_F))


@pytest.mark.parametrize("name", ["group_sl2", "triple_sl2_generic", "gp_gl2_gl1"])
def test_limit_heuristic(name):
    sp = space(name)
    rs = sp.rs
    par = standard_parabolic(rs, (), rs.chambers[0])
    c1, c2 = pair_test(par, sp.h, sp.cd)
    if c1 and c2:
        assert interior_point_search(rs, sp.h, sp.cd, [np.zeros(rs.rank_a)])[2] == sp.g.dim


def test_interior_point_group_case():
    sp = space("group_sl2")
    found, _, _ = interior_point_search(sp.rs, sp.h, sp.cd, [np.zeros(2)])
    assert not found
    found, x, _ = interior_point_search(sp.rs, sp.h, sp.cd, [np.array([1.0, 0.0])])
    assert found and np.allclose(x, [1, 0])
    found, _, _ = interior_point_search(sp.rs, sp.h, sp.cd, default_grid(sp.rs, seed=1))
    assert found
    with pytest.raises(InvalidInput):
        interior_point_search(sp.rs, sp.h, sp.cd, [])


def test_interior_point_full_h():
    sp = space("group_sl2")
    found, x, _ = interior_point_search(sp.rs, sp.g.full(), sp.cd, [np.zeros(2)])
    assert found and np.allclose(x, 0)
