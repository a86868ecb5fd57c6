import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SHIPPED, space
from spherodeck.errors import InvalidPresentation
from spherodeck.lie_core import (LieAlgebraPresentation, Subspace, bracket, cartan_decompose, contains,
                                 kappa, subspace_intersect, subspace_sum, theta)
from spherodeck.models import block_diag, gl_basis, sl_basis, unit


def test_bracket_sl2_relations():
    assert np.allclose(bracket(unit(2, 0, 1), unit(2, 1, 0)), np.diag([1.0, -1.0]))
    x = np.random.default_rng(0).normal(size=(3, 3))
    assert np.allclose(bracket(x, x), 0)


def test_bracket_diag_closed_in_triple():
    h = space("triple_sl2_generic").h
    rng = np.random.default_rng(1)
    for _ in range(20):
        x, y = (np.tensordot(rng.normal(size=h.dim), h.matrices(), axes=1) for _ in range(2))
        assert h.member(bracket(x, y))


@pytest.mark.parametrize("name,dk,ds", [("group_sl2", 2, 4), ("triple_sl2_generic", 3, 6), ("gp_gl2_gl1", 1, 4)])
def test_cartan_dimensions(name, dk, ds):
    cd = space(name).cd
    assert (cd.k_part.dim, cd.s_part.dim) == (dk, ds)


def test_cartan_sl2(sl2):
    cd = cartan_decompose(sl2)
    assert (cd.k_part.dim, cd.s_part.dim) == (1, 2)
    assert cd.form_signature[0] > 1e-9 and cd.form_signature[1] > 1e-9


@pytest.mark.parametrize("name", SHIPPED)
def test_catalog_algebra_invariants(name):
    sp = space(name)
    g, cd = sp.g, sp.cd
    assert cd.k_part.dim + cd.s_part.dim == g.dim
    assert g.jacobi_residual() < 1e-9
    for x in g.basis:
        assert np.allclose(theta(theta(x)), x)
    rng = np.random.default_rng(2)
    for _ in range(10):
        x, y = (np.tensordot(rng.normal(size=g.dim), g.basis, axes=1) for _ in range(2))
        assert abs(kappa(theta(x), theta(y)) - kappa(x, y)) < 1e-9 * (1 + abs(kappa(x, y)))


def test_sum_and_intersection_sl2(sl2):
    cd = cartan_decompose(sl2)
    assert subspace_sum(cd.k_part, cd.s_part).dim == 3
    assert subspace_intersect(cd.k_part, cd.s_part).dim == 0
    u = cd.s_part
    assert subspace_sum(u, u).dim == u.dim == subspace_intersect(u, u).dim
    assert contains(sl2.full(), u) and not contains(u, sl2.full())


def _random_subspace(g, rng, k):
    return Subspace.from_matrices(g, [np.tensordot(rng.normal(size=g.dim), g.basis, axes=1) for _ in range(k)])


@pytest.mark.parametrize("name", ["group_sl2", "gp_gl3_gl2", "sp2_chain"])
def test_grassmann_dimension_formula(name):
    g = space(name).g
    rng = np.random.default_rng(3)
    for _ in range(1000):
        u = _random_subspace(g, rng, int(rng.integers(0, g.dim + 1)))
        v = _random_subspace(g, rng, int(rng.integers(0, g.dim + 1)))
        assert subspace_sum(u, v).dim + subspace_intersect(u, v).dim == u.dim + v.dim


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_rebasing_invariance(seed):
    g = space("triple_sl2_generic").g
    rng = np.random.default_rng(seed)
    u, v = _random_subspace(g, rng, 4), _random_subspace(g, rng, 5)
    mix = rng.normal(size=(u.dim, u.dim))
    u2 = Subspace.from_matrices(g, np.tensordot(mix, u.matrices(), axes=1))
    assert subspace_sum(u, v).dim == subspace_sum(u2, v).dim
    assert subspace_intersect(u, v).dim == subspace_intersect(u2, v).dim


def test_invalid_presentations():
    with pytest.raises(InvalidPresentation):
        LieAlgebraPresentation("dep", 2, np.array([unit(2, 0, 0), unit(2, 0, 0)]))
    with pytest.raises(InvalidPresentation):
        LieAlgebraPresentation("not_theta_stable", 2, np.array([unit(2, 0, 1)]))
    with pytest.raises(InvalidPresentation):
        # e12 and e12^T span no subalgebra without their bracket
        LieAlgebraPresentation("open", 2, np.array([unit(2, 0, 1), unit(2, 1, 0)]))


def test_gl_sl_dimensions():
    g = LieAlgebraPresentation("b", 3, np.array([block_diag(x, np.zeros((1, 1))) for x in gl_basis(2)]
                                                + [unit(3, 2, 2)]))
    assert g.dim == 5
    assert LieAlgebraPresentation("sl3", 3, np.array(sl_basis(3))).dim == 8
