import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loopframes.discreteforms import GridChart, MatrixOneForm, mc_residual
from loopframes.loopfamily import (IMAGINARY_AXIS, REAL_AXIS, UNIT_CIRCLE, ComponentForms,
                                   SpectralPoint, admissible_locus, affine_factor,
                                   assemble_affine_form, assemble_family_form,
                                   assemble_scaled_form, assemble_sphere_form, c_of_lambda,
                                   derive_alpha, lambda0)
from loopframes.oracle import desitter_components
from loopframes.pseudolinalg import SpaceFormSpec, make_metric


def admissible_c(rng):
    eps = int(rng.choice([1, -1]))
    if eps == 1:
        c = -rng.uniform(0.05, 10) if rng.random() < 0.5 else rng.uniform(1.05, 10)
    else:
        c = rng.uniform(0.05, 10) if rng.random() < 0.5 else -rng.uniform(1.05, 10)
    return c, eps


@pytest.fixture(scope="module")
def small_cf():
    return desitter_components(GridChart(-1, 1, -1, 1, 9, 9))


class TestDeriveAlpha:
    def test_zero(self):
        J = make_metric(SpaceFormSpec(2, 1, 1, 1, -1, 1.0))
        np.testing.assert_array_equal(derive_alpha(np.zeros((2, 1)), J), np.zeros((1, 2)))

    def test_formula(self):
        J = make_metric(SpaceFormSpec(2, 1, 1, 1, -1, 1.0))
        np.testing.assert_array_equal(derive_alpha(np.array([[2.0], [5.0]]), J), [[-2.0, 5.0]])

    def test_round_trip_exact(self):
        rng = np.random.default_rng(0)
        J = make_metric(SpaceFormSpec(3, 2, 1, 2, 1, 2.0))
        for _ in range(50):
            beta = rng.normal(size=(3, 2))
            alpha = derive_alpha(beta, J)
            np.testing.assert_array_equal(-J.J1 @ alpha.T @ J.J2, beta)


class TestCoefficients:
    def test_affine_factor_negative_c(self):
        assert affine_factor(-3.0, 1) == pytest.approx(-math.sqrt(3) / 2, rel=1e-15)

    def test_affine_factor_large_c(self):
        assert affine_factor(2.0, 1) == pytest.approx(math.sqrt(2), rel=1e-15)

    @pytest.mark.parametrize("c, eps", [(0.5, 1), (-0.5, -1), (1.0, 1)])
    def test_affine_factor_rejects(self, c, eps):
        with pytest.raises(ValueError, match="admissible range"):
            affine_factor(c, eps)

    def test_lambda0_values(self):
        assert lambda0(-3.0, 1) == pytest.approx(-1j * math.sqrt(3), abs=1e-15)
        l0 = lambda0(2.0, 1)
        assert l0 == pytest.approx((1 + 1j) / math.sqrt(2), abs=1e-15)
        assert abs(l0) == pytest.approx(1.0, abs=1e-15)

    def test_lambda0_rejects(self):
        with pytest.raises(ValueError):
            lambda0(0.5, 1)

    def test_lambda0_recovers_c(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            c, eps = admissible_c(rng)
            l0 = lambda0(c, eps)
            assert admissible_locus(c, eps) in (IMAGINARY_AXIS, UNIT_CIRCLE)
            SpectralPoint(l0, admissible_locus(c, eps))
            assert abs(c_of_lambda(l0, eps) - c) <= 1e-12 * max(1, abs(c))


class TestLocus:
    @pytest.mark.parametrize("c, eps, locus", [
        (-3.0, 1, IMAGINARY_AXIS), (0.5, 1, REAL_AXIS), (2.0, 1, UNIT_CIRCLE),
        (1.0, -1, IMAGINARY_AXIS), (-0.5, -1, REAL_AXIS), (-2.0, -1, UNIT_CIRCLE),
    ])
    def test_rules(self, c, eps, locus):
        assert admissible_locus(c, eps) == locus

    def test_spectral_point_validation(self):
        SpectralPoint(2j, IMAGINARY_AXIS)
        with pytest.raises(ValueError):
            SpectralPoint(1 + 2j, IMAGINARY_AXIS)
        with pytest.raises(ValueError):
            SpectralPoint(0, REAL_AXIS)
        assert SpectralPoint.from_parameter(UNIT_CIRCLE, math.pi / 2).lam == pytest.approx(1j)


class TestCOfLambda:
    def test_values(self):
        assert c_of_lambda(1.0, 1) == 1.0
        assert c_of_lambda(2j, -1) == pytest.approx(16 / 9, rel=1e-15)

    @pytest.mark.parametrize("lam", [0, 1j, -1j])
    def test_degenerate(self, lam):
        with pytest.raises(ValueError):
            c_of_lambda(lam, 1)

    def test_off_locus(self):
        with pytest.raises(ValueError):
            c_of_lambda(1 + 1j, 1)

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from([IMAGINARY_AXIS, REAL_AXIS, UNIT_CIRCLE]),
           st.floats(0.1, 6.0), st.sampled_from([1, -1]))
    def test_inversion_and_sign_symmetry(self, locus, t, eps):
        lam = SpectralPoint.from_parameter(locus, t).lam
        if abs(lam - 1j) < 1e-3 or abs(lam + 1j) < 1e-3:
            return
        c = c_of_lambda(lam, eps)
        assert c_of_lambda(1 / lam, eps) == pytest.approx(c, rel=1e-12)
        assert c_of_lambda(-lam, eps) == pytest.approx(c, rel=1e-12)


class TestAssembly:
    def test_zero_components(self):
        ch = GridChart(0, 1, 0, 1, 3, 3)
        spec = SpaceFormSpec(2, 1, 0, 0, 1, 2.0)
        z = dict(omega=MatrixOneForm.zeros(ch, 2), eta=MatrixOneForm.zeros(ch, 1),
                 beta=MatrixOneForm.zeros(ch, 2, 1), theta=MatrixOneForm.zeros(ch, 2, 1))
        with pytest.raises(ValueError, match=r"singular at node \(0, 0\)"):
            ComponentForms(spec=spec, chart=ch, **z)
        cf = ComponentForms(spec=spec, chart=ch, require_immersion=False, **z)
        for A in (assemble_sphere_form(cf), assemble_family_form(cf, 0.7),
                  assemble_scaled_form(cf, 0.7), assemble_affine_form(cf)):
            assert np.abs(A.du).max() == 0 and np.abs(A.dv).max() == 0

    def test_sphere_form_is_j_skew(self, small_cf):
        J = make_metric(small_cf.spec).J
        A = assemble_sphere_form(small_cf)
        for X in (A.du, A.dv):
            assert np.abs(np.swapaxes(X, -1, -2) @ J + J @ X).max() < 1e-12

    def test_lambda0_reproduces_sphere_form(self, small_cf):
        spec = small_cf.spec
        A0 = assemble_sphere_form(small_cf)
        Al = assemble_family_form(small_cf, lambda0(spec.c, spec.epsilon))
        assert np.abs(Al.du - A0.du).max() <= 1e-12
        assert np.abs(Al.dv - A0.dv).max() <= 1e-12

    def test_theta_vanishes_at_i(self, small_cf):
        A = assemble_family_form(small_cf, 1j)
        for X in (A.du, A.dv):
            assert np.abs(X[..., :2, 3]).max() == 0
            assert np.abs(X[..., 3, :2]).max() == 0

    @pytest.mark.parametrize("t", [0.3, 2.0, 7.0])
    def test_real_on_locus(self, small_cf, t):
        A = assemble_family_form(small_cf, SpectralPoint.from_parameter(IMAGINARY_AXIS, t))
        assert max(np.abs(A.du.imag).max(), np.abs(A.dv.imag).max()) <= 1e-12

    def test_family_is_j_skew_on_locus(self, small_cf):
        J = make_metric(small_cf.spec).J
        A = assemble_family_form(small_cf, 3.5j)
        assert np.abs(np.swapaxes(A.dv, -1, -2) @ J + J @ A.dv).max() < 1e-12

    def test_inverse_lambda_keeps_theta_blocks(self, small_cf):
        A = assemble_family_form(small_cf, 2.5j)
        B = assemble_family_form(small_cf, 1 / 2.5j)
        np.testing.assert_allclose(A.dv[..., :2, 3], B.dv[..., :2, 3], atol=1e-14)
        np.testing.assert_allclose(A.dv[..., :2, 2], -B.dv[..., :2, 2], atol=1e-14)

    def test_scaled_form_layout(self, small_cf):
        lam = 1.7j
        S = assemble_scaled_form(small_cf, lam)
        F = assemble_family_form(small_cf, lam)
        assert S.n == 5
        np.testing.assert_array_equal(S.du[..., :4, :4], F.du)
        np.testing.assert_array_equal(S.dv[..., :2, 4], small_cf.theta.dv[..., 0])
        assert np.abs(S.du[..., 4, :]).max() == 0

    def test_scaled_form_at_i_is_affine_form(self, small_cf):
        S = assemble_scaled_form(small_cf, 1j)
        Ah = assemble_affine_form(small_cf)
        np.testing.assert_allclose(S.du, Ah.du, atol=1e-14)
        np.testing.assert_allclose(S.dv, Ah.dv, atol=1e-14)
        assert not np.iscomplexobj(Ah.du)

    def test_affine_form_rejects(self, small_cf):
        bad = small_cf.with_spec(small_cf.spec.replace(c=-0.5))
        with pytest.raises(ValueError, match="admissible"):
            assemble_affine_form(bad)

    def test_zero_lambda(self, small_cf):
        with pytest.raises(ValueError):
            assemble_family_form(small_cf, 0)
        with pytest.raises(ValueError):
            assemble_scaled_form(small_cf, 0)

    def test_flat_for_all_lambda(self, cf64, cf128):
        for lam in (0.3j, 1.5j, 4j):
            r64 = mc_residual(assemble_family_form(cf64, lam))
            r128 = mc_residual(assemble_family_form(cf128, lam))
            assert 3.5 < r64 / r128 < 4.5

    def test_component_skewness_enforced(self, small_cf):
        bad = MatrixOneForm(small_cf.omega.du + 1.0, small_cf.omega.dv, small_cf.chart)
        with pytest.raises(ValueError, match="skew"):
            ComponentForms(bad, small_cf.eta, small_cf.beta, small_cf.theta, small_cf.spec,
                           small_cf.chart)
