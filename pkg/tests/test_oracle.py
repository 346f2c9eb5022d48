import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopframes.discreteforms import GridChart
from loopframes.geometry import induced_metric, pullback_metric
from loopframes.integrator import ImmersionMesh
from loopframes.loopfamily import (assemble_affine_form, assemble_family_form,
                                   assemble_sphere_form, lambda0)
from loopframes.oracle import (DESITTER_J, ab, desitter_affine_frame, desitter_components,
                               desitter_flat_immersion, desitter_frame,
                               desitter_frame_derivatives, desitter_immersion, desitter_spec)
from loopframes.pseudolinalg import pseudo_orthogonality_residual

coord = st.floats(-1.5, 1.5)
spectral = st.complex_numbers(min_magnitude=0.2, max_magnitude=5.0, allow_nan=False,
                              allow_infinity=False)


def _mc(F, Fu, Fv, J):
    Finv = J @ np.swapaxes(F, -1, -2) @ J
    return Finv @ Fu, Finv @ Fv


@pytest.mark.parametrize("lam", [2j, 0.5j, 1.3 + 0.4j, 1j])
def test_identity_at_origin(lam):
    np.testing.assert_allclose(desitter_frame(0.0, 0.0, lam), np.eye(4), atol=1e-15)


@given(coord, coord, spectral)
@settings(max_examples=60, deadline=None)
def test_pseudo_orthogonal(u, v, lam):
    assert pseudo_orthogonality_residual(desitter_frame(u, v, lam), DESITTER_J) <= 1e-9 * (
        1 + abs(lam) + 1 / abs(lam)) ** 4


@given(spectral)
def test_a_b_identity(lam):
    a, b = ab(lam)
    assert abs(a * a - b * b - 1) <= 1e-10 * (1 + abs(lam) + 1 / abs(lam)) ** 2


def test_last_column_and_quadric():
    U, V = np.meshgrid(np.linspace(-1, 1, 7), np.linspace(-1, 1, 5), indexing="ij")
    for lam in (2j, 0.7j, 3.0 + 1j):
        f = desitter_immersion(U, V, lam)
        np.testing.assert_allclose(f, desitter_frame(U, V, lam)[..., -1], atol=1e-14)
        np.testing.assert_allclose(np.einsum("...i,ij,...j->...", f, DESITTER_J, f), -1,
                                   atol=1e-12)
    np.testing.assert_allclose(desitter_immersion(U, V, 1j),
                               np.broadcast_to([0, 0, 0, 1.0], U.shape + (4,)), atol=1e-15)


@given(coord, coord, st.sampled_from([2j, 0.5j, 1 + 1j]))
@settings(max_examples=40, deadline=None)
def test_derivatives_match_differences(u, v, lam):
    h = 1e-5
    Fu, Fv = desitter_frame_derivatives(u, v, lam)
    du = (desitter_frame(u + h, v, lam) - desitter_frame(u - h, v, lam)) / (2 * h)
    dv = (desitter_frame(u, v + h, lam) - desitter_frame(u, v - h, lam)) / (2 * h)
    np.testing.assert_allclose(Fu, du, atol=1e-8)
    np.testing.assert_allclose(Fv, dv, atol=1e-8)


def test_flat_immersion_values():
    np.testing.assert_allclose(desitter_flat_immersion(0.0, np.pi / 2, 1.0), [-1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(desitter_flat_immersion(0.0, np.pi / 2, 4.0), [-0.5, 0, 0.5],
                               atol=1e-15)
    with pytest.raises(ValueError):
        desitter_flat_immersion(0.0, 0.0, -1.0)


@pytest.mark.parametrize("c", [1.0, 2.0])
def test_flat_pullback_metric(c):
    ch = GridChart(-1, 1, -1, 1, 129, 129)
    U, V = ch.mesh()
    mesh = ImmersionMesh(desitter_flat_immersion(U, V, c), ch, desitter_spec(c), "flat")
    g = pullback_metric(mesh).g[1:-1, 1:-1]
    np.testing.assert_allclose(g[..., 0, 0], -1 / c, atol=1e-3)
    np.testing.assert_allclose(g[..., 1, 1], np.cosh(U[1:-1, 1:-1]) ** 2 / c, atol=1e-3)
    np.testing.assert_allclose(g[..., 0, 1], 0, atol=1e-3)


@pytest.fixture(scope="module")
def chart():
    return GridChart(-1, 1, -1, 1, 9, 11)


class TestComponents:
    def test_independent_of_reference_lambda(self, chart):
        a = desitter_components(chart, lam_ref=2j)
        b = desitter_components(chart, lam_ref=3j)
        for name in ("omega", "eta", "beta", "theta"):
            fa, fb = getattr(a, name), getattr(b, name)
            assert np.abs(fa.du - fb.du).max() <= 1e-10
            assert np.abs(fa.dv - fb.dv).max() <= 1e-10

    def test_family_form_is_exact_logarithmic_derivative(self, chart):
        cf = desitter_components(chart)
        U, V = chart.mesh()
        for lam in (0.5j, 5j, 1.7 + 0.3j):
            A = assemble_family_form(cf, lam)
            Au, Av = _mc(desitter_frame(U, V, lam), *desitter_frame_derivatives(U, V, lam),
                         DESITTER_J)
            assert np.abs(A.du - Au).max() <= 1e-10
            assert np.abs(A.dv - Av).max() <= 1e-10

    def test_sphere_form_is_family_at_lambda0(self, chart):
        cf = desitter_components(chart)
        S = assemble_sphere_form(cf)
        A = assemble_family_form(cf, lambda0(1.0, -1))
        assert np.abs(S.du - A.du).max() <= 1e-10
        assert np.abs(S.dv - A.dv).max() <= 1e-10

    def test_eta_vanishes_and_omega_skew(self, chart):
        cf = desitter_components(chart)
        assert np.abs(cf.eta.du).max() <= 1e-14 and np.abs(cf.eta.dv).max() <= 1e-14
        J1 = cf.metric.J1
        for X in (cf.omega.du, cf.omega.dv):
            assert np.abs(np.swapaxes(X, -1, -2) @ J1 + J1 @ X).max() <= 1e-12

    def test_induced_metric(self, chart):
        U, _ = chart.mesh()
        g = induced_metric(desitter_components(chart, c=2.0)).g
        np.testing.assert_allclose(g[..., 0, 0], -0.5, atol=1e-12)
        np.testing.assert_allclose(g[..., 1, 1], np.cosh(U) ** 2 / 2, atol=1e-12)

    def test_affine_frame_is_integral_of_flat_form(self, chart):
        cf = desitter_components(chart)
        U, V = chart.mesh()
        A = assemble_affine_form(cf)
        h = 1e-5
        T = desitter_affine_frame(U, V, 1.0)
        Tu = (desitter_affine_frame(U + h, V, 1.0) - desitter_affine_frame(U - h, V, 1.0)) / (2 * h)
        Tv = (desitter_affine_frame(U, V + h, 1.0) - desitter_affine_frame(U, V - h, 1.0)) / (2 * h)
        Tinv = np.linalg.inv(T)
        assert np.abs(Tinv @ Tu - A.du).max() <= 1e-8
        assert np.abs(Tinv @ Tv - A.dv).max() <= 1e-8
