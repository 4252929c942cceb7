import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscoevans.errors import ContractViolation, DomainError
from viscoevans.model import (
    ElasticPotential,
    ModelVariant,
    StateV,
    ViscosityKind,
    W0,
    characteristics,
    cofactor,
    dissipation_check,
    embed,
    entropy_pair,
    eval_potential,
    flux,
    flux_jacobian,
    general_W_derivative,
    grad_potential,
    hess_potential,
    lame_constants,
    viscosity_matrix,
)

STRAIN_VARIANTS = [v for v in ModelVariant if v is not ModelVariant.TRANSVERSE]
coord = st.floats(-2.0, 2.0, allow_nan=False)
pots = st.builds(ElasticPotential, st.floats(0.2, 2.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0),
                 st.floats(-1.0, 1.0))


def _fd_grad(f, a, h=1e-6):
    return np.array([(f(a + h * e) - f(a - h * e)) / (2 * h) for e in np.eye(a.size)])


def _fd_jac(g, a, h=1e-5):
    return np.column_stack([(g(a + h * e) - g(a - h * e)) / (2 * h) for e in np.eye(a.size)])


def test_hessian_at_rest_has_eigenvalues_1_1_2():
    eig = np.sort(np.linalg.eigvalsh(hess_potential([0.0, 0.0, 1.0], W0, ModelVariant.COMPRESSIBLE3D)))
    assert np.max(np.abs(eig - [1.0, 1.0, 2.0])) <= 1e-12


def test_w0_matches_rest_state_formula():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.normal(size=3)
        ref = 0.25 * (a @ a - 1) ** 2 + 0.5 * (a[0] ** 2 + a[1] ** 2)
        assert eval_potential(a, W0, ModelVariant.COMPRESSIBLE3D) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(STRAIN_VARIANTS), st.lists(coord, min_size=3, max_size=3), pots)
def test_gradient_and_hessian_match_finite_differences(variant, xs, pot):
    a = np.array(xs[: variant.strain_dim])
    g = grad_potential(a, pot, variant)
    fd = _fd_grad(lambda x: eval_potential(x, pot, variant), a)
    assert np.max(np.abs(g - fd)) <= 1e-7 * (1 + np.max(np.abs(g)))
    H = hess_potential(a, pot, variant)
    fdH = _fd_jac(lambda x: grad_potential(x, pot, variant), a)
    assert np.max(np.abs(H - fdH)) <= 1e-5 * (1 + np.max(np.abs(H)))
    assert np.allclose(H, H.T)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(STRAIN_VARIANTS), st.lists(coord, min_size=3, max_size=3))
def test_characteristics_are_eigenpairs(variant, xs):
    a = np.array(xs[: variant.strain_dim])
    ch = characteristics(a, W0, variant)
    M = hess_potential(a, W0, variant)
    assert np.allclose(np.sort(ch.m), np.linalg.eigvalsh(M), atol=1e-9)
    for j in range(a.size):
        r = ch.r[:, j]
        assert np.linalg.norm(M @ r - ch.m[j] * r) <= 1e-8 * (1 + abs(ch.m[j]))
    assert np.allclose(ch.r.T @ ch.r, np.eye(a.size), atol=1e-8)


def test_shear_characteristics_closed_form():
    # shear Hessian (|a|^2 + 1) I + 2 a a^T
    a = np.array([0.3, -0.7])
    ch = characteristics(a, W0, ModelVariant.SHEAR2D)
    r2 = a @ a
    assert np.allclose(np.sort(ch.m), [r2 + 1, 3 * r2 + 1])


def test_compressible_1d_hyperbolicity_threshold():
    assert not characteristics([0.5], W0, ModelVariant.COMPRESSIBLE1D).strictly_hyperbolic
    assert characteristics([0.6], W0, ModelVariant.COMPRESSIBLE1D).strictly_hyperbolic
    m = characteristics([0.5], W0, ModelVariant.COMPRESSIBLE1D).m
    assert m[0] == pytest.approx(3 * 0.25 - 1)


def test_embed_pins_the_frozen_components():
    assert np.allclose(embed([0.2, 0.3], ModelVariant.SHEAR2D), [0.2, 0.3, 1.0])
    assert np.allclose(embed([0.2, 0.3], ModelVariant.COMPRESSIBLE2D), [0.0, 0.2, 0.3])
    assert np.allclose(embed([0.4], ModelVariant.COMPRESSIBLE1D), [0.0, 0.0, 0.4])
    with pytest.raises(ContractViolation):
        embed([1.0, 2.0, 3.0], ModelVariant.SHEAR2D)
    with pytest.raises(ContractViolation):
        embed([0.1], ModelVariant.TRANSVERSE)


def test_genform_round_trip():
    p = ElasticPotential.from_genform(0.1, -0.3)
    assert p.to_genform() == pytest.approx((0.1, -0.3))
    assert ElasticPotential.from_genform(0.0, 0.0) == W0


def test_flux_jacobian_matches_flux():
    rng = np.random.default_rng(1)
    for variant in STRAIN_VARIANTS:
        n = variant.strain_dim
        a = rng.normal(size=n)
        if variant.is_compressible:
            a[-1] = abs(a[-1]) + 0.5
        b = rng.normal(size=n)
        J = flux_jacobian(a, W0, variant)

        def G(v):
            return flux(StateV(v[:n], v[n:]), W0, variant)
        assert np.allclose(J, _fd_jac(G, np.concatenate([a, b])), atol=1e-6)


def test_entropy_flux_compatibility():
    # grad q = grad eta . DG for the first-order system
    rng = np.random.default_rng(2)
    variant = ModelVariant.COMPRESSIBLE2D
    a, b = np.array([0.3, 0.9]), rng.normal(size=2)
    v = np.concatenate([a, b])

    def eta(x):
        return entropy_pair(StateV(x[:2], x[2:]), W0, variant)[0]

    def q(x):
        return entropy_pair(StateV(x[:2], x[2:]), W0, variant)[1]
    DG = flux_jacobian(a, W0, variant)
    assert np.allclose(_fd_grad(q, v), _fd_grad(eta, v) @ DG, atol=1e-6)


def test_viscosity_z2_requires_positive_a3():
    with pytest.raises(DomainError):
        viscosity_matrix([0.1, -0.2], ViscosityKind.Z2, ModelVariant.COMPRESSIBLE2D)
    B = viscosity_matrix([0.1, 0.5], ViscosityKind.Z2, ModelVariant.COMPRESSIBLE2D)
    assert np.allclose(B, np.diag([2.0, 4.0]))


def test_cofactor_is_det_times_inverse_transpose():
    F = np.random.default_rng(3).normal(size=(3, 3))
    assert np.allclose(cofactor(F), np.linalg.det(F) * np.linalg.inv(F).T)


def _w0_matrix(F):
    C = F.T @ F - np.eye(3)
    return 0.25 * np.sum(C * C)


def test_general_derivative_matches_fd_for_w0():
    # W0(F) = sigma(|F|^2, |F F^T|^2, det F) with sigma = (y - 2x + 3) / 4
    F = np.eye(3) + 0.3 * np.random.default_rng(4).normal(size=(3, 3))
    D = general_W_derivative(F, [-0.5, 0.25, 0.0])
    fd = _fd_grad(lambda x: _w0_matrix(x.reshape(3, 3)), F.ravel()).reshape(3, 3)
    assert np.allclose(D, fd, atol=1e-7)
    assert np.allclose(D, F @ (F.T @ F - np.eye(3)), atol=1e-12)


def test_lame_constants_of_w0_against_fd_oracle():
    lam, mu = lame_constants([-0.5, 0.25, 0.0], np.zeros((3, 3)))
    assert (lam, mu) == pytest.approx((0.0, 2.0))
    # oracle: D^2 W(Id)[A, A] = lam (tr A)^2 + mu sym A : A by central differences
    rng = np.random.default_rng(5)
    h = 1e-4
    for _ in range(5):
        A = rng.normal(size=(3, 3))
        I = np.eye(3)
        d2 = (_w0_matrix(I + h * A) - 2 * _w0_matrix(I) + _w0_matrix(I - h * A)) / h ** 2
        sym = 0.5 * (A + A.T)
        assert d2 == pytest.approx(lam * np.trace(A) ** 2 + mu * np.sum(sym * A), rel=1e-5)


def test_dissipation_is_nonnegative():
    rng = np.random.default_rng(6)
    for _ in range(20):
        F = np.eye(3) + 0.2 * rng.normal(size=(3, 3))
        C = F.T @ F
        D = rng.normal(size=(3, 3))
        D = D + D.T
        for kind in ViscosityKind:
            assert dissipation_check(C, D, kind) >= -1e-12
    with pytest.raises(DomainError):
        dissipation_check(-np.eye(3), np.eye(3), ViscosityKind.Z2)
