import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import space
from spherodeck.errors import InvalidInput, NumericalInstability
from spherodeck.exponents import (Envelope, ExponentData, halving_count, improve_exponent, lambda_V,
                                  ode_envelope_check, sl2_principal_series, transport, weyl_dual)


def test_lambda_v_trivial_module():
    rs = space("triple_sl2_generic").rs
    env = lambda_V(ExponentData(rs, np.zeros((1, 3)), np.ones(3, dtype=int)))
    assert np.allclose(env.Lambda, 0) and env.d == 3


def test_lambda_v_max_formula(sl2_rs):
    E = ExponentData(sl2_rs, np.array([[-2.0], [1.0], [-1.0 + 3j]]), [1])
    env = lambda_V(E)
    assert sl2_rs.dual_values(env.Lambda)[0] == pytest.approx(2.0)


def test_sl2_principal_series_envelopes():
    env0 = lambda_V(sl2_principal_series(0))
    assert env0.Lambda[0] == pytest.approx(-1.0) and env0.d == 2
    env_half = lambda_V(sl2_principal_series(0.5))
    assert env_half.Lambda[0] == pytest.approx(-0.5)


def test_catalog_presets_match_model():
    sp = space("group_sl2")
    rs = sl2_principal_series(0).root_system
    for key, lam in [("principal_series_lambda0", 0), ("principal_series_lambda_half", 0.5)]:
        preset = lambda_V(ExponentData.from_json(rs, sp.exponent_presets[key]))
        model = lambda_V(sl2_principal_series(lam))
        assert np.allclose(preset.Lambda, model.Lambda) and preset.d == model.d


def test_exponent_data_validation(sl2_rs):
    with pytest.raises(InvalidInput):
        ExponentData(sl2_rs, np.zeros((0, 1)), [1])
    with pytest.raises(InvalidInput):
        ExponentData(sl2_rs, np.zeros((1, 1)), [0])
    with pytest.raises(InvalidInput):
        ExponentData(sl2_rs, np.zeros((1, 2)), [1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=5),
       st.tuples(st.floats(-3, 3), st.floats(-3, 3)))
def test_lambda_v_monotone(rows, extra):
    rs = space("group_sl2").rs
    e = np.array(rows, dtype=complex)
    small = lambda_V(ExponentData(rs, e, [1, 1]))
    big = lambda_V(ExponentData(rs, np.vstack([e, [extra]]), [1, 1]))
    assert np.all(rs.dual_values(big.Lambda) >= rs.dual_values(small.Lambda) - 1e-12)


def test_restriction_law():
    rs = space("triple_sl2_generic").rs
    e = np.array([[0.5, 1 + 1j, -2], [0.5, 3, 0], [0.25, 1 + 1j, 1]])
    E = ExponentData(rs, e, [1, 1, 1])
    for j in range(3):
        assert E.restrict(j) == sorted({complex(z) for z in e[:, j]}, key=lambda z: (z.real, z.imag))


def test_transport_examples(sl2_rs):
    env = Envelope([0.3, -1.2, 0.7], 2)
    rs = space("triple_sl2_generic").rs
    assert np.allclose(transport(env, (), rs).Lambda, env.Lambda)
    e1 = Envelope([-0.5], 1)
    assert np.allclose(transport(e1, (0,), sl2_rs).Lambda, [0.5])
    # s1 s3 of (Z/2)^3 flips the first and third coordinates
    lam = rs.simple_mat.sum(axis=0)
    moved = transport(Envelope(lam, 0), (0, 2), rs).Lambda
    assert np.allclose(rs.dual_values(moved), [-1, 1, -1])
    with pytest.raises(InvalidInput):
        transport(env, (5,), rs)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=6), st.lists(st.integers(0, 1), max_size=6),
       st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_transport_group_action(s, sp_word, vals):
    rs = space("sp2_chain").rs
    env = Envelope(rs.functional_from_dual_values(vals), 1)
    lhs = transport(transport(env, s, rs), sp_word, rs)
    rhs = transport(env, tuple(sp_word) + tuple(s), rs)
    assert np.allclose(lhs.Lambda, rhs.Lambda)
    assert np.allclose(weyl_dual(rs, s) @ weyl_dual(rs, s[::-1]), np.eye(2), atol=1e-9)


def test_improve_rank1_trace():
    res = improve_exponent([1.3], [-1.0], 0, [1])
    halves = [s for s in res.trace if s.action == "halve"]
    assert [round(s.after, 12) for s in halves] == [0.8, 0.3, -0.2]
    assert res.delta[0] == -1.0 and res.d == 1 and res.halvings(0) == 3


def test_improve_immediate_and_rank2():
    res = improve_exponent([-1.0], [-1.0], 4, [2])
    assert res.halvings(0) == 0 and res.d == 6
    res = improve_exponent([5.0, -3.0], [0.0, -3.0], 0, [1, 1])
    assert res.halvings(1) == 0
    assert res.halvings(0) == halving_count(5.0, 0.0) == 8
    assert np.allclose(res.delta, [0, -3])


def test_improve_rejects_non_finite():
    with pytest.raises(InvalidInput):
        improve_exponent([np.inf], [0.0], 0, [1])
    with pytest.raises(InvalidInput):
        improve_exponent([1.0], [np.nan], 0, [1])


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.tuples(
    st.lists(st.floats(-20, 20), min_size=r, max_size=r),
    st.lists(st.floats(-20, 20), min_size=r, max_size=r),
    st.lists(st.integers(1, 4), min_size=r, max_size=r),
    st.permutations(list(range(r))))))
def test_improve_properties(data):
    delta, lam, dF, perm = data
    res = improve_exponent(delta, lam, 0, dF)
    assert np.allclose(res.delta, lam)
    assert res.d == sum(dF)
    for j in range(len(delta)):
        assert res.halvings(j) == halving_count(delta[j], lam[j])
    # axes are independent: permuting them permutes the result
    p = improve_exponent([delta[i] for i in perm], [lam[i] for i in perm], 0, [dF[i] for i in perm])
    assert [p.halvings(k) for k in range(len(perm))] == [res.halvings(i) for i in perm]


def test_ode_explicit_case():
    rep = ode_envelope_check([[-1.0]], -2.0, [1.0], lambda t: [1.0])
    assert rep.p == 1 and rep.mu == -1.0
    assert rep.C_fit <= 2 + 1e-6 and not rep.violated


def test_ode_jordan_block():
    rep = ode_envelope_check([[0.0, 1.0], [0.0, 0.0]], -1.0, [0.0, 1.0], None)
    assert rep.p == 2 and np.isfinite(rep.C_fit) and not rep.violated


def test_ode_resonance():
    # nu = mu: f = (1 + t) e^{-t}, exactly the p = 1 envelope
    rep = ode_envelope_check([[-1.0]], -1.0, [1.0], lambda t: [1.0])
    assert rep.C_fit == pytest.approx(1.0, abs=1e-6) and not rep.violated


def test_ode_input_checks():
    with pytest.raises(InvalidInput):
        ode_envelope_check([[1.0, 0.0]], 0.0, [1.0])
    with pytest.raises(InvalidInput):
        ode_envelope_check([[-1.0]], 0.0, [2.0])
    with pytest.raises(InvalidInput):
        ode_envelope_check([[-1.0]], 0.0, [1.0], steps=100)
    with pytest.raises(NumericalInstability):
        ode_envelope_check([[-5000.0]], 0.0, [1.0], t_max=10.0)


def test_ode_forcing_paths_agree():
    from spherodeck.exponents import _forcing
    u, w = np.array([1.0, -2.0, 0.5]), np.array([0.3, 0.0, 1.0])
    s = np.linspace(0, 3, 7)
    vec = _forcing(lambda t: np.cos(t) * u + np.sin(t) * w, -0.5, s, 3)
    pointwise = _forcing(lambda t: [float(np.cos(t)) * u[i] + float(np.sin(t)) * w[i] for i in range(3)],
                         -0.5, s, 3)
    assert np.allclose(vec, pointwise, atol=1e-14)
    assert np.allclose(np.linalg.norm(vec, axis=1), np.exp(-0.5 * s))


def test_ode_affine_step_is_rk4():
    from spherodeck.exponents import _rk4
    a = np.array([[-0.3, 1.0], [-1.0, -0.2]], dtype=complex)
    f0 = np.array([0.6, 0.0], dtype=complex)

    def g(s):
        return np.exp(0.2 * s) * np.array([np.cos(s), np.sin(s)])

    y, h = f0.copy(), 0.01
    for i in range(100):
        s = i * h
        k1 = a @ y + g(s)
        k2 = a @ (y + h / 2 * k1) + g(s + h / 2)
        k3 = a @ (y + h / 2 * k2) + g(s + h / 2)
        k4 = a @ (y + h * k3) + g(s + h)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    _, nf = _rk4(a, 0.2, f0, lambda s: np.hstack([np.cos(s), np.sin(s)]), 1.0, 100)
    assert nf[-1] == pytest.approx(np.linalg.norm(y), rel=1e-12)
