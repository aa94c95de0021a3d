"""Flux matrices, relaxation sources, and the three-model interface."""

import math

import numpy as np
import pytest

from mmbgk.basis import BasisParams, hme_state_to_expansion, maxwellian_coefficients
from mmbgk.coupling import basis_transform
from mmbgk.errors import ConfigError, DomainError, StateError
from mmbgk.models import (
    EulerModel,
    euler_system_matrix,
    hme_source,
    hme_system_matrices,
    hme_system_matrix,
    hsm_source,
    hsm_system_matrix,
    largest_hermite_root,
    make_model,
)

SQRT2 = math.sqrt(2.0)


def test_adaptive_matrix_equilibrium_m6():
    a = hme_system_matrix(np.array([1.0, 0.0, 1.0, 0.0, 0.0, 0.0]))
    expected = np.array([
        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 2.0, 0.0, 6.0, 0.0, 0.0],
        [0.0, 0.0, 0.5, 0.0, 4.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 5.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    ])
    np.testing.assert_array_equal(a, expected)


def test_adaptive_matrix_low_rows_any_state():
    rng = np.random.default_rng(1)
    for _ in range(5):
        w = rng.uniform(-0.3, 0.3, size=8)
        w[0] = rng.uniform(0.5, 2.0)
        w[2] = rng.uniform(0.5, 2.0)
        a = hme_system_matrix(w)
        assert a[0, 1] == w[0]
        assert a[1, 0] == w[2] / w[0]
        assert a[1, 2] == 1.0


def test_adaptive_matrix_batched():
    rng = np.random.default_rng(2)
    w = rng.uniform(-0.2, 0.2, size=(7, 6))
    w[:, 0] = 1.0
    w[:, 2] = 1.0
    mats = hme_system_matrices(w)
    assert mats.shape == (7, 6, 6)
    np.testing.assert_array_equal(mats[3], hme_system_matrix(w[3]))
    with pytest.raises(DomainError):
        hme_system_matrix(w)  # batched input needs the plural form


def test_equilibrium_spectrum_is_shifted_hermite_nodes():
    # at equilibrium the adaptive system has characteristic speeds
    # u + sqrt(theta) * (roots of He_M)
    rng = np.random.default_rng(3)
    for m in (6, 8, 10):
        rho, u, theta = rng.uniform(0.5, 2.0), rng.uniform(-1, 1), rng.uniform(0.5, 2.0)
        w = np.zeros(m)
        w[0], w[1], w[2] = rho, u, theta
        eig = np.linalg.eigvals(hme_system_matrix(w))
        assert np.max(np.abs(eig.imag)) < 1e-10
        nodes = np.polynomial.hermite_e.hermegauss(m)[0]
        got = np.sort(eig.real)
        np.testing.assert_allclose(got, u + math.sqrt(theta) * nodes, rtol=0, atol=1e-12)


def test_adaptive_matrix_realizability():
    with pytest.raises(StateError):
        hme_system_matrix(np.array([-1.0, 0.0, 1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(StateError):
        hme_system_matrix(np.array([1.0, 0.0, -1.0, 0.0, 0.0, 0.0]))


def test_fixed_basis_matrix_literals():
    np.testing.assert_array_equal(
        hsm_system_matrix(3),
        np.array([[0.0, 1.0, 0.0], [1.0, 0.0, SQRT2], [0.0, SQRT2, 0.0]]),
    )
    np.testing.assert_array_equal(hsm_system_matrix(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(DomainError):
        hsm_system_matrix(1)


def test_fixed_basis_spectral_radius_m10():
    eig = np.linalg.eigvalsh(hsm_system_matrix(10))
    assert np.max(np.abs(eig)) == pytest.approx(4.859462828332312, abs=1e-12)
    assert np.max(np.abs(eig)) == pytest.approx(largest_hermite_root(10), abs=1e-12)
    # probabilists' root = sqrt(2) * physicists' root
    phys = np.polynomial.hermite.hermgauss(10)[0][-1]
    assert largest_hermite_root(10) == pytest.approx(SQRT2 * phys, rel=1e-14)


def test_fixed_basis_eigenvalues_are_hermite_nodes():
    for m in (4, 7, 10):
        eig = np.sort(np.linalg.eigvalsh(hsm_system_matrix(m)))
        nodes = np.polynomial.hermite_e.hermegauss(m)[0]
        np.testing.assert_allclose(eig, nodes, rtol=0, atol=1e-13)


# --- relaxation sources ------------------------------------------------------


def test_adaptive_source_literal():
    s = hme_source(np.array([1.0, 0.0, 1.0, 0.2, -0.1]), 0.1)
    np.testing.assert_array_equal(s, np.array([0.0, 0.0, 0.0, -2.0, 1.0]))


def test_adaptive_source_structure():
    rng = np.random.default_rng(4)
    w = rng.standard_normal(8)
    s = hme_source(w, 0.37)
    np.testing.assert_array_equal(s[:3], 0.0)
    w_eq = np.array([1.0, 0.5, 2.0, 0.0, 0.0, 0.0])
    np.testing.assert_array_equal(hme_source(w_eq, 0.1), np.zeros(6))
    np.testing.assert_array_equal(hme_source(w, math.inf), np.zeros(8))
    with pytest.raises(ConfigError):
        hme_source(w, 0.0)
    with pytest.raises(ConfigError):
        hme_source(w, -1.0)


def test_fixed_basis_source_vanishes_on_maxwellian():
    f = maxwellian_coefficients(1.0, 0.3, 1.2, 8)
    np.testing.assert_allclose(hsm_source(f, 1.0), np.zeros(8), atol=1e-14)


def test_fixed_basis_source_literal():
    f = np.array([1.0, 0.0, 0.0, 0.5, 0.0, 0.0])
    s = hsm_source(f, 1.0)
    np.testing.assert_array_equal(s, np.array([0.0, 0.0, 0.0, -0.5, 0.0, 0.0]))


def test_fixed_basis_source_structure():
    f = np.array([1.2, 0.3, 0.1, 0.5, -0.2])
    s = hsm_source(f, 0.7)
    np.testing.assert_allclose(s[:3], 0.0, atol=1e-15)
    np.testing.assert_array_equal(hsm_source(f, math.inf), np.zeros(5))
    with pytest.raises(ConfigError):
        hsm_source(f, 0.0)
    with pytest.raises(StateError):
        hsm_source(np.array([1.0, 0.0, -2.0, 0.0]), 1.0)  # recovered theta < 0


# --- Euler model -------------------------------------------------------------


def test_euler_matrix_literals():
    np.testing.assert_array_equal(
        euler_system_matrix(np.array([1.0, 0.0, 1.0])),
        np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 2.0, 0.0]]),
    )
    a = euler_system_matrix(np.array([2.0, 1.0, 1.0]))
    np.testing.assert_array_equal(a[1], np.array([0.5, 1.0, 1.0]))
    np.testing.assert_array_equal(a[0], np.array([1.0, 2.0, 0.0]))
    with pytest.raises(StateError):
        euler_system_matrix(np.array([0.0, 0.0, 1.0]))


def test_euler_eigenvalues():
    eig = np.sort(np.linalg.eigvals(euler_system_matrix(np.array([1.0, 0.0, 1.0]))).real)
    np.testing.assert_allclose(eig, [-math.sqrt(3.0), 0.0, math.sqrt(3.0)], atol=1e-12)


def test_euler_equals_adaptive_block_at_equilibrium():
    rng = np.random.default_rng(5)
    for _ in range(5):
        rho, u, theta = rng.uniform(0.5, 2.0), rng.uniform(-1, 1), rng.uniform(0.5, 2.0)
        w = np.zeros(7)
        w[0], w[1], w[2] = rho, u, theta
        np.testing.assert_array_equal(
            euler_system_matrix(np.array([rho, u, theta])),
            hme_system_matrix(w)[:3, :3],
        )


# --- model linearizations agree near global equilibrium ----------------------


def _to_fixed_basis(w):
    return basis_transform(hme_state_to_expansion(w), BasisParams(0.0, 1.0))


def _mapped_flux_mismatch(delta, d_state, d_grad, model, a_fixed):
    """|J(A_adaptive g) - A_fixed (J g)| at distance delta from equilibrium."""
    m = model.n_vars
    eq = np.zeros(m)
    eq[0], eq[2] = 1.0, 1.0
    w = eq + delta * d_state
    g = delta * d_grad

    def jac_apply(v, h=1e-5):
        nv = np.linalg.norm(v)
        vh = v / nv
        return (_to_fixed_basis(w + h * vh) - _to_fixed_basis(w - h * vh)) / (2 * h) * nv

    lhs = jac_apply(model.system_matrices(w) @ g)
    rhs = a_fixed @ jac_apply(g)
    return np.max(np.abs(lhs - rhs))


def test_adaptive_and_fixed_fluxes_agree_to_second_order():
    m = 8
    model = make_model("hme", m)
    a_fixed = hsm_system_matrix(m)
    rng = np.random.default_rng(7)
    d1 = rng.standard_normal(m)
    d1 /= np.linalg.norm(d1)
    d2 = rng.standard_normal(m)
    d2 /= np.linalg.norm(d2)
    e1 = _mapped_flux_mismatch(1e-4, d1, d2, model, a_fixed)
    e2 = _mapped_flux_mismatch(5e-5, d1, d2, model, a_fixed)
    assert e1 < 1e-6
    # halving the distance quarters the mismatch: quadratic contact
    assert 3.5 < e1 / e2 < 4.5


# --- shared model interface --------------------------------------------------


def test_wave_speed_estimates():
    hme = make_model("hme", 10)
    w = np.array([[1.0, 0.5, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
    r10 = largest_hermite_root(10)
    assert hme.wave_speeds(w)[0] == pytest.approx(0.5 + math.sqrt(2.0) * r10, rel=1e-14)
    hsm = make_model("hsm", 10)
    assert hsm.wave_speeds(np.eye(10)[:1])[0] == r10
    euler = EulerModel()
    assert euler.wave_speeds(np.array([[1.0, -0.5, 2.0]]))[0] == pytest.approx(
        0.5 + math.sqrt(6.0), rel=1e-14
    )


def test_relax_is_single_factor_decay():
    hme = make_model("hme", 6)
    w = np.array([[1.0, 0.2, 1.1, 0.3, -0.2, 0.1]])
    out = hme.relax(w, 0.01, 0.004)
    np.testing.assert_array_equal(out[:, :3], w[:, :3])
    np.testing.assert_array_equal(out[:, 3:], w[:, 3:] * (1.0 - 0.004 / 0.01))
    out = hme.relax_exact(w, 0.01, 0.004)
    np.testing.assert_array_equal(out[:, 3:], w[:, 3:] * math.exp(-0.4))


def test_relax_exact_fixed_basis_targets_maxwellian():
    hsm = make_model("hsm", 6)
    f = np.array([[1.0, 0.1, 0.05, 0.3, -0.1, 0.02]])
    out = hsm.relax_exact(f, 1e-3, 1.0)  # dt >> eps: lands on the Maxwellian
    prim = hsm.primitive_moments(f)
    m = maxwellian_coefficients(prim[:, 0], prim[:, 1], prim[:, 2], 6)
    np.testing.assert_allclose(out, m, atol=1e-12)


def test_heat_flux_matches_expansion_moments():
    from mmbgk.basis import moments_of

    hme = make_model("hme", 6)
    w = np.array([1.0, 0.3, 1.4, 0.05, -0.02, 0.01])
    q = hme.heat_flux(w[None, :])[0]
    assert q == 6.0 * w[3]
    assert q == pytest.approx(moments_of(hme_state_to_expansion(w))[3], rel=1e-13)


def test_equilibrium_constructor_shapes():
    hme = make_model("hme", 6)
    w = hme.equilibrium(np.array([1.0, 2.0]), np.array([0.1, -0.1]), 1.0)
    assert w.shape == (2, 6)
    np.testing.assert_array_equal(w[:, 0], [1.0, 2.0])
    np.testing.assert_array_equal(w[:, 3:], 0.0)
    hsm = make_model("hsm", 6)
    np.testing.assert_array_equal(hsm.equilibrium(1.0, 0.0, 1.0), np.eye(6)[:1])


def test_validate_names_offending_cell():
    hme = make_model("hme", 4)
    bad = np.ones((4, 4))
    bad[2, 0] = -1.0
    with pytest.raises(StateError, match="cell 2"):
        hme.validate(bad)
    bad = np.ones((4, 4))
    bad[1, 3] = math.nan
    with pytest.raises(StateError, match="cell 1"):
        hme.validate(bad)


def test_make_model_validation():
    with pytest.raises(ConfigError):
        make_model("hme", 3)
    with pytest.raises(ConfigError):
        make_model("hsm", 2)
    with pytest.raises(ConfigError):
        make_model("banana", 5)
    with pytest.raises(DomainError):
        largest_hermite_root(0)
