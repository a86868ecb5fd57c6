import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from conftest import space
from spherodeck.decomp import (SAMPLING, SOLVER, SP_Y1, coverage_check, kah_decompose, kah_gross_prasad,
                               kah_sp_chain, kak_decompose, mostow_decompose, rng, sample_element,
                               wavefront_probe)
from spherodeck.errors import InvalidInput
from spherodeck.models import a_t, block_diag, rot

CONSTRUCTIVE = ["group_sl2", "triple_sl2_generic", "triple_sl2_degenerate", "gp_gl2_gl1", "gp_gl3_gl2", "sp2_chain"]


def _haar_sl2(gen):
    return rot(gen.uniform(0, 2 * np.pi)) @ a_t(gen.normal()) @ rot(gen.uniform(0, 2 * np.pi))


@pytest.mark.parametrize("name", CONSTRUCTIVE)
def test_identity_gives_trivial_witness(name):
    sp = space(name)
    w = kah_decompose(sp, np.eye(sp.n))
    assert w.residual < 1e-12
    assert np.allclose(sp.rs.a_element(w.X_a), 0, atol=1e-7)


@pytest.mark.parametrize("name", CONSTRUCTIVE)
def test_element_of_h(name):
    sp = space(name)
    gen = np.random.default_rng(8)
    h = sp.exp_h(gen.normal(size=sp.h.dim) * 0.7)
    w = kah_decompose(sp, h)
    assert w.residual <= 1e-8 * max(1, np.linalg.norm(h))
    assert np.allclose(sp.rs.a_element(w.X_a), 0, atol=1e-6)


@pytest.mark.parametrize("name", CONSTRUCTIVE)
def test_random_samples(name):
    sp = space(name)
    for i in range(100):
        g = sample_element(sp, rng(11, SAMPLING, i))
        w = kah_decompose(sp, g, rng(11, SOLVER, i))
        assert w.residual <= 1e-8 * max(1, np.linalg.norm(g))
        assert sp.in_K(w.k) and sp.in_H(w.h)


def test_kak_examples():
    k1, a, k2 = kak_decompose(a_t(0.7))
    assert np.allclose(a, a_t(0.7)) and np.allclose(k1, np.eye(2)) and np.allclose(k2, np.eye(2))
    _, a, _ = kak_decompose(rot(0.4))
    assert np.allclose(a, np.eye(2))
    gen = np.random.default_rng(0)
    for _ in range(50):
        g = _haar_sl2(gen)
        k1, a, k2 = kak_decompose(g)
        assert np.allclose(np.diag(a), np.linalg.svd(g, compute_uv=False))
        assert np.allclose(k1 @ a @ k2, g)
        assert np.linalg.det(k1) > 0 and np.linalg.det(k2) > 0


def test_mostow_group_case():
    sp = space("group_sl2")
    k, x, h = mostow_decompose(sp, np.eye(4))
    assert np.allclose(x, 0) and np.allclose(k, np.eye(4), atol=1e-9)
    p = np.array([[2.0, 0.5], [0.5, 0.625]])  # det 1, positive definite
    w, v = np.linalg.eigh(p)
    log_p = v @ np.diag(np.log(w)) @ v.T
    k, x, h = mostow_decompose(sp, block_diag(p, np.eye(2)))
    assert np.allclose(x, block_diag(log_p / 2, -log_p / 2), atol=1e-8)
    assert np.allclose(k, np.eye(4), atol=1e-8)
    k, x, h = mostow_decompose(sp, block_diag(rot(0.3), np.eye(2)))
    assert np.allclose(x, 0, atol=1e-9)


def test_gross_prasad_small_cases():
    k, a, k2, a2, y = kah_gross_prasad(np.array([[-3.0]]), np.zeros((0, 0)))
    assert np.allclose(k, [[-1]]) and np.allclose(a, [[3]])
    k, a, k2, a2, y = kah_gross_prasad(np.eye(2), np.eye(1))
    assert np.allclose(a, np.eye(2), atol=1e-12) and np.allclose(a2, np.eye(1))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_gross_prasad_n2_property(seed):
    gen = np.random.default_rng(seed)
    g1, g2 = gen.normal(size=(3, 3)), gen.normal(size=(2, 2))
    k1, a1, k2, a2, y = kah_gross_prasad(g1, g2)
    emb = np.eye(3)
    emb[1:, 1:] = y
    assert np.allclose(k1 @ a1 @ emb, g1, atol=1e-8 * np.linalg.norm(g1))
    assert np.allclose(k2 @ a2 @ y, g2, atol=1e-8 * np.linalg.norm(g2))
    assert np.allclose(k1.T @ k1, np.eye(3), atol=1e-9)


def test_sp_chain_examples():
    sp = space("sp2_chain")
    for t in [0.0, 0.4, 1.3]:
        w = kah_decompose(sp, expm(t * SP_Y1))
        assert np.allclose(w.X_a, [t, 0], atol=1e-9)
        assert np.allclose(w.k, np.eye(4), atol=1e-9) and np.allclose(w.h, np.eye(4), atol=1e-9)
    k, (mu, tau), h = kah_sp_chain(np.eye(4))
    assert abs(mu) < 1e-12 and abs(tau) < 1e-12


def test_coverage_examples():
    assert coverage_check(space("triple_sl2_generic"), 200, 7).coverage == 1.0
    assert coverage_check(space("group_sl2"), 200, 7).coverage == 1.0
    rep = coverage_check(space("triple_sl2_degenerate"), 200, 7)
    assert rep.coverage < 1.0 and rep.solver_failures == 0
    with pytest.raises(InvalidInput):
        coverage_check(space("group_sl2"), 0, 7)


def test_coverage_deterministic_across_threads():
    sp = space("gp_gl2_gl1")
    a = coverage_check(sp, 120, 3, threads=1).to_json()
    b = coverage_check(sp, 120, 3, threads=4).to_json()
    assert a == b


def test_kah_rejects_non_group_elements():
    sp = space("group_sl2")
    with pytest.raises(InvalidInput):
        kah_decompose(sp, 2 * np.eye(4))
    with pytest.raises(InvalidInput):
        kah_decompose(sp, np.eye(3))


def test_mostow_and_kah_agree_on_k_orbit():
    sp = space("group_sl2")
    for i in range(100):
        g = sample_element(sp, rng(5, SAMPLING, i))
        w = kah_decompose(sp, g)
        _, x, _ = mostow_decompose(sp, g)
        # |X| of the Mostow part is a K x H invariant of g z0; so is |X_a|
        xa = sp.rs.a_element(w.X_a)
        assert np.isclose(np.linalg.norm(x), np.linalg.norm(xa), atol=1e-7)


def test_wavefront_probe():
    sp = space("group_sl2")
    delta, info = wavefront_probe(sp, 0.1, 20, 3)
    assert 0 < delta <= 0.1
    delta0, _ = wavefront_probe(sp, 0.1, 5, 3, t_max=0.0)
    assert delta0 == pytest.approx(0.1)
