"""Closed-form de Sitter family: S^2_{c,1} into H^3_1 and its flat image in R^3_1.

With ``a = (lam + 1/lam)/2`` and ``b = (lam - 1/lam)/2`` the frame ``F_lam``
below is an adapted frame of ``f_lam`` (its last column) for every nonzero
``lam``; it is real on the imaginary axis and equals the identity at
``(u, v) = (0, 0)``. Partial derivatives are written out by hand so the
oracle itself carries no discretization error.
"""

from __future__ import annotations

import numpy as np

from .discreteforms import GridChart, MatrixOneForm
from .loopfamily import ComponentForms, beta_coefficient, theta_coefficient
from .pseudolinalg import SpaceFormSpec, make_metric

__all__ = [
    "DESITTER_J",
    "desitter_spec",
    "default_chart",
    "ab",
    "desitter_frame",
    "desitter_frame_derivatives",
    "desitter_immersion",
    "desitter_flat_immersion",
    "desitter_affine_frame",
    "desitter_components",
    "frame_reference",
    "flat_reference",
]

DESITTER_J = np.diag([1.0, -1.0, 1.0, -1.0])


def desitter_spec(c: float = 1.0) -> SpaceFormSpec:
    return SpaceFormSpec(m=2, k=1, r=1, s=1, epsilon=-1, c=c)


def default_chart(N_u: int = 64, N_v: int = 64) -> GridChart:
    return GridChart(-1.0, 1.0, -1.0, 1.0, N_u, N_v)


def ab(lam: complex) -> tuple[complex, complex]:
    lam = complex(lam)
    if lam == 0:
        raise ValueError("spectral parameter must be nonzero")
    return (lam + 1 / lam) / 2, (lam - 1 / lam) / 2


def _trig(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.cosh(u), np.sinh(u), np.cos(v), np.sin(v)


def _stack(rows):
    rows = [np.broadcast_arrays(*[np.asarray(e, dtype=complex) for e in row]) for row in rows]
    shape = np.broadcast_shapes(*[r[0].shape for r in rows])
    return np.stack([np.stack([np.broadcast_to(e, shape) for e in row], axis=-1)
                     for row in rows], axis=-2)


def desitter_frame(u, v, lam) -> np.ndarray:
    """F_lam(u, v); broadcasts over ``u`` and ``v``, returning shape (..., 4, 4)."""
    a, b = ab(lam)
    ch, sh, cv, sv = _trig(u, v)
    zero = np.zeros_like(ch)
    return _stack([
        [cv, sv * sh, -1j * b * ch * sv, -1j * a * ch * sv],
        [zero, ch, -1j * b * sh, -1j * a * sh],
        [1j * b * sv, -1j * b * cv * sh, a * a - b * b * cv * ch, a * b * (1 - cv * ch)],
        [-1j * a * sv, 1j * a * cv * sh, a * b * (cv * ch - 1), a * a * cv * ch - b * b],
    ])


def desitter_frame_derivatives(u, v, lam) -> tuple[np.ndarray, np.ndarray]:
    """Analytic (dF/du, dF/dv)."""
    a, b = ab(lam)
    ch, sh, cv, sv = _trig(u, v)
    zero = np.zeros_like(ch)
    Fu = _stack([
        [zero, sv * ch, -1j * b * sh * sv, -1j * a * sh * sv],
        [zero, sh, -1j * b * ch, -1j * a * ch],
        [zero, -1j * b * cv * ch, -b * b * cv * sh, -a * b * cv * sh],
        [zero, 1j * a * cv * ch, a * b * cv * sh, a * a * cv * sh],
    ])
    Fv = _stack([
        [-sv, cv * sh, -1j * b * ch * cv, -1j * a * ch * cv],
        [zero, zero, zero, zero],
        [1j * b * cv, 1j * b * sv * sh, b * b * sv * ch, a * b * sv * ch],
        [-1j * a * cv, -1j * a * sv * sh, -a * b * sv * ch, -a * a * sv * ch],
    ])
    return Fu, Fv


def desitter_immersion(u, v, lam) -> np.ndarray:
    """f_lam(u, v), the last column of F_lam."""
    a, b = ab(lam)
    ch, sh, cv, sv = _trig(u, v)
    return np.stack(np.broadcast_arrays(
        -1j * a * ch * sv + 0j, -1j * a * sh + 0j, a * b * (1 - cv * ch) + 0j,
        a * a * cv * ch - b * b + 0j), axis=-1)


def desitter_flat_immersion(u, v, c: float) -> np.ndarray:
    """(1/sqrt c)(-cosh u sin v, -sinh u, 1 - cos v cosh u), an embedding into R^3_1."""
    if not c > 0:
        raise ValueError(f"the de Sitter example needs c > 0, got c={c}")
    ch, sh, cv, sv = _trig(u, v)
    return np.stack(np.broadcast_arrays(-ch * sv, -sh, 1 - cv * ch), axis=-1) / np.sqrt(c)


def desitter_affine_frame(u, v, c: float) -> np.ndarray:
    """Adapted frame of the flat embedding in the (m+k+2) layout of the flat form.

    The rotation part is F_lam at lam = i (real there), the translation column
    is the flat embedding padded with a zero.
    """
    F_i = desitter_frame(u, v, 1j).real
    f_hat = desitter_flat_immersion(u, v, c)
    shape = F_i.shape[:-2]
    out = np.zeros(shape + (5, 5))
    out[..., :4, :4] = F_i
    out[..., :3, 4] = f_hat
    out[..., 4, 4] = 1.0
    return out


def _chart_coords(chart: GridChart, chart_map) -> tuple[np.ndarray, np.ndarray]:
    S, T = chart.mesh()
    if chart_map is None:
        return S, T
    L = np.asarray(chart_map, dtype=float)
    return L[0, 0] * S + L[0, 1] * T, L[1, 0] * S + L[1, 1] * T


def desitter_components(chart: GridChart | None = None, c: float = 1.0,
                        lam_ref: complex = 2j, chart_map=None) -> ComponentForms:
    """Recover omega, eta, beta, theta from F^{-1} dF at ``lam_ref``.

    The beta and theta blocks are divided by their spectral coefficients at
    ``lam_ref``, so reassembling at any other lambda is an honest check.
    ``chart_map`` is an optional 2x2 matrix L; the chart coordinates (s, t)
    are then mapped to (u, v) = L (s, t) and the forms are pulled back.
    """
    chart = default_chart() if chart is None else chart
    spec = desitter_spec(c)
    U, V = _chart_coords(chart, chart_map)
    F = desitter_frame(U, V, lam_ref)
    Fu, Fv = desitter_frame_derivatives(U, V, lam_ref)
    if chart_map is not None:
        L = np.asarray(chart_map, dtype=float)
        Fu, Fv = L[0, 0] * Fu + L[1, 0] * Fv, L[0, 1] * Fu + L[1, 1] * Fv
    J = make_metric(spec).J
    Finv = J @ np.swapaxes(F, -1, -2) @ J
    bc = beta_coefficient(lam_ref, c, spec.epsilon)
    tc = theta_coefficient(lam_ref, c, spec.epsilon)

    pieces = {}
    for name, A in (("du", Finv @ Fu), ("dv", Finv @ Fv)):
        pieces[name] = dict(
            omega=A[..., :2, :2],
            eta=A[..., 2:3, 2:3],
            beta=A[..., :2, 2:3] / bc,
            theta=A[..., :2, 3:4] / tc,
        )
    forms = {key: MatrixOneForm(pieces["du"][key], pieces["dv"][key], chart)
             for key in ("omega", "eta", "beta", "theta")}
    return ComponentForms(spec=spec, chart=chart, **forms)


def frame_reference(chart: GridChart, lam, chart_map=None) -> np.ndarray:
    """Closed-form family renormalized to the identity at the chart's base node."""
    U, V = _chart_coords(chart, chart_map)
    F = desitter_frame(U, V, lam)
    i, j = chart.base
    Finv_p = DESITTER_J @ F[i, j].T @ DESITTER_J
    return Finv_p @ F


def flat_reference(chart: GridChart, c: float = 1.0, chart_map=None) -> np.ndarray:
    """Closed-form flat embedding with its adapted frame renormalized at the base node.

    Returns positions ``T(p)^{-1} (f_hat(x) - f_hat(p))`` of shape (N_u, N_v, 3).
    """
    U, V = _chart_coords(chart, chart_map)
    f_hat = desitter_flat_immersion(U, V, c)
    i, j = chart.base
    T_p = desitter_affine_frame(U[i, j], V[i, j], c)[:3, :3]
    Jf = DESITTER_J[:3, :3]
    Tinv = Jf @ T_p.T @ Jf
    return (f_hat - f_hat[i, j]) @ Tinv.T
