"""Maurer-Cartan forms of the associated family.

Everything is assembled from the lambda-independent pieces of an adapted
frame of ``f : M -> Q^{m+k}_s(epsilon)``: the tangent connection ``omega``,
the normal connection ``eta``, the second fundamental form ``beta`` and the
coframe ``theta``. The block ``alpha = -J2 beta^t J1`` is always derived.

Square roots of ``epsilon*c`` and ``1 - epsilon*c`` use the principal branch,
so a negative argument gives ``i*sqrt(|x|)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .discreteforms import GridChart, MatrixOneForm
from .pseudolinalg import MetricBlocks, SpaceFormSpec, make_metric

__all__ = [
    "IMAGINARY_AXIS",
    "REAL_AXIS",
    "UNIT_CIRCLE",
    "ComponentForms",
    "SpectralPoint",
    "derive_alpha",
    "assemble_sphere_form",
    "assemble_affine_form",
    "assemble_family_form",
    "assemble_scaled_form",
    "lambda0",
    "admissible_locus",
    "c_of_lambda",
    "require_sym_range",
    "theta_coefficient",
    "beta_coefficient",
    "affine_factor",
]

IMAGINARY_AXIS = "imaginary-axis"
REAL_AXIS = "real-axis"
UNIT_CIRCLE = "unit-circle"
LOCI = (IMAGINARY_AXIS, REAL_AXIS, UNIT_CIRCLE)

LOCUS_TOL = 1e-12


@dataclass(frozen=True)
class ComponentForms:
    """Real coefficient forms omega (m x m), eta (k x k), beta (m x k), theta (m x 1)."""

    omega: MatrixOneForm
    eta: MatrixOneForm
    beta: MatrixOneForm
    theta: MatrixOneForm
    spec: SpaceFormSpec
    chart: GridChart = field(repr=False)
    skew_tol: float = 1e-10
    require_immersion: bool = True

    def __post_init__(self):
        m, k = self.spec.m, self.spec.k
        expected = {"omega": (m, m), "eta": (k, k), "beta": (m, k), "theta": (m, 1)}
        for name, shape in expected.items():
            form = getattr(self, name)
            if form.block_shape != shape:
                raise ValueError(f"{name} blocks must be {shape}, got {form.block_shape}")
            if form.chart.shape != self.chart.shape:
                raise ValueError(f"{name} lives on a different chart")
            object.__setattr__(self, name, _as_real(form, name))

        J = self.metric
        for name, Jb in (("omega", J.J1), ("eta", J.J2)):
            form = getattr(self, name)
            for coeff in (form.du, form.dv):
                skew = np.abs(np.swapaxes(coeff, -1, -2) @ Jb + Jb @ coeff).max()
                if skew > self.skew_tol * max(1.0, np.abs(coeff).max()):
                    raise ValueError(f"{name} is not skew with respect to the metric "
                                     f"(defect {skew:.3e})")

        if m == 2 and self.require_immersion:
            cof = np.stack([self.theta.du[..., 0], self.theta.dv[..., 0]], axis=-1)
            det = np.abs(np.linalg.det(cof))
            scale = np.abs(cof).max(axis=(-1, -2)) ** 2
            bad = np.argwhere(~(det > 1e-12 * np.maximum(scale, 1e-300)) | (scale == 0))
            if bad.size:
                i, j = bad[0]
                u, v = self.chart.u[i], self.chart.v[j]
                raise ValueError(f"coframe is singular at node ({i}, {j}) "
                                 f"(u={u:.6g}, v={v:.6g}); not an immersion")

    @property
    def metric(self) -> MetricBlocks:
        return make_metric(self.spec)

    @property
    def alpha(self) -> MatrixOneForm:
        J = self.metric
        return MatrixOneForm(derive_alpha(self.beta.du, J), derive_alpha(self.beta.dv, J),
                             self.chart)

    def with_spec(self, spec: SpaceFormSpec) -> "ComponentForms":
        return ComponentForms(self.omega, self.eta, self.beta, self.theta, spec, self.chart,
                              self.skew_tol, self.require_immersion)

    def with_beta_zeroed(self) -> "ComponentForms":
        return ComponentForms(self.omega, self.eta, 0.0 * self.beta, self.theta, self.spec,
                              self.chart, self.skew_tol, self.require_immersion)


def _as_real(form: MatrixOneForm, name: str) -> MatrixOneForm:
    if np.iscomplexobj(form.du) or np.iscomplexobj(form.dv):
        imag = max(np.abs(form.du.imag).max(), np.abs(form.dv.imag).max())
        scale = max(1.0, np.abs(form.du).max(), np.abs(form.dv).max())
        if imag > 1e-10 * scale:
            raise ValueError(f"{name} must have real coefficients (imaginary part {imag:.3e})")
        return MatrixOneForm(form.du.real.copy(), form.dv.real.copy(), form.chart)
    return MatrixOneForm(form.du.astype(float), form.dv.astype(float), form.chart)


def on_locus(lam: complex, locus: str, tol: float = LOCUS_TOL) -> bool:
    lam = complex(lam)
    scale = max(abs(lam), 1.0)
    if locus == IMAGINARY_AXIS:
        return abs(lam.real) <= tol * scale
    if locus == REAL_AXIS:
        return abs(lam.imag) <= tol * scale
    if locus == UNIT_CIRCLE:
        return abs(abs(lam) - 1.0) <= tol
    raise ValueError(f"unknown locus {locus!r}; expected one of {LOCI}")


@dataclass(frozen=True)
class SpectralPoint:
    lam: complex
    locus: str

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if self.lam == 0:
            raise ValueError("spectral parameter must be nonzero")
        if not on_locus(self.lam, self.locus):
            raise ValueError(f"lambda={self.lam} is not on the {self.locus}")

    @classmethod
    def from_parameter(cls, locus: str, t: float) -> "SpectralPoint":
        """lambda = i*t on the imaginary axis, t on the real axis, exp(i*t) on the circle."""
        if locus == IMAGINARY_AXIS:
            return cls(1j * t, locus)
        if locus == REAL_AXIS:
            return cls(complex(t), locus)
        if locus == UNIT_CIRCLE:
            return cls(cmath.exp(1j * t), locus)
        raise ValueError(f"unknown locus {locus!r}; expected one of {LOCI}")


def derive_alpha(beta, J: MetricBlocks) -> np.ndarray:
    """alpha = -J2 beta^t J1, applied to the trailing two axes."""
    beta = np.asarray(beta)
    return -J.J2 @ np.swapaxes(beta, -1, -2) @ J.J1


def admissible_locus(c: float, epsilon: int) -> str:
    if c == 0:
        raise ValueError("curvature must be nonzero")
    ec = epsilon * c
    if ec < 0:
        return IMAGINARY_AXIS
    if ec < 1:
        return REAL_AXIS
    return UNIT_CIRCLE


def _valid_interval(epsilon: int) -> str:
    return "(-inf, 0) U (1, inf)" if epsilon == 1 else "(-inf, -1) U (0, inf)"


def require_sym_range(c: float, epsilon: int) -> None:
    """Reject curvatures for which lambda = +-i is not on the admissible locus."""
    if c == 0 or epsilon * c == 1 or admissible_locus(c, epsilon) == REAL_AXIS:
        raise ValueError(f"curvature c={c} is outside the admissible range for "
                         f"epsilon={epsilon:+d}; c must lie in {_valid_interval(epsilon)}")


def _roots(c: float, epsilon: int) -> tuple[complex, complex]:
    return cmath.sqrt(epsilon * c), cmath.sqrt(1 - epsilon * c)


def theta_coefficient(lam: complex, c: float, epsilon: int) -> complex:
    """Scale sqrt(eps c)/2 (lam + 1/lam) carried by the coframe blocks."""
    sec, _ = _roots(c, epsilon)
    return sec / 2 * (lam + 1 / lam)


def beta_coefficient(lam: complex, c: float, epsilon: int) -> complex:
    """Scale sqrt(eps c)/(2 sqrt(1 - eps c)) (lam - 1/lam) carried by beta and alpha."""
    sec, s1 = _roots(c, epsilon)
    if s1 == 0:
        raise ValueError(f"epsilon*c = 1 is degenerate (c={c}, epsilon={epsilon:+d})")
    return sec / (2 * s1) * (lam - 1 / lam)


def affine_factor(c: float, epsilon: int) -> float:
    """The real factor i sqrt(eps c)/sqrt(1 - eps c) multiplying beta in the flat form."""
    require_sym_range(c, epsilon)
    sec, s1 = _roots(c, epsilon)
    factor = 1j * sec / s1
    assert abs(factor.imag) <= 1e-14 * abs(factor)
    return factor.real


def lambda0(c: float, epsilon: int) -> complex:
    """Spectral value (1 + sqrt(1 - eps c))/sqrt(eps c) recovering the original form."""
    require_sym_range(c, epsilon)
    sec, s1 = _roots(c, epsilon)
    return (1 + s1) / sec


def c_of_lambda(lam: complex, epsilon: int) -> float:
    """Curvature 4 eps/(lam + 1/lam)^2 of the immersion f_lam."""
    lam = complex(lam)
    if lam == 0 or abs(lam - 1j) <= 1e-15 or abs(lam + 1j) <= 1e-15:
        raise ValueError(f"lambda={lam} is degenerate (0 or +-i) for the curvature formula")
    val = 4 * epsilon / (lam + 1 / lam) ** 2
    if abs(val.imag) > LOCUS_TOL * max(1.0, abs(val)):
        raise ValueError(f"lambda={lam} is off every admissible locus (curvature {val})")
    return val.real


def _require_nonzero(lam) -> complex:
    if isinstance(lam, SpectralPoint):
        lam = lam.lam
    lam = complex(lam)
    if lam == 0:
        raise ValueError("spectral parameter must be nonzero")
    return lam


def _assemble_square(cf: ComponentForms, bcoef: complex, tcoef: complex) -> MatrixOneForm:
    m, k, eps = cf.spec.m, cf.spec.k, cf.spec.epsilon
    n = m + k + 1
    J1 = cf.metric.J1
    alpha = cf.alpha
    dtype = complex if isinstance(bcoef, complex) or isinstance(tcoef, complex) else float
    parts = []
    for om, et, be, al, th in zip((cf.omega.du, cf.omega.dv), (cf.eta.du, cf.eta.dv),
                                  (cf.beta.du, cf.beta.dv), (alpha.du, alpha.dv),
                                  (cf.theta.du, cf.theta.dv)):
        out = np.zeros(cf.chart.shape + (n, n), dtype=dtype)
        out[..., :m, :m] = om
        out[..., :m, m:m + k] = bcoef * be
        out[..., :m, n - 1:] = tcoef * th
        out[..., m:m + k, :m] = bcoef * al
        out[..., m:m + k, m:m + k] = et
        out[..., n - 1:, :m] = -eps * tcoef * (np.swapaxes(th, -1, -2) @ J1)
        parts.append(out)
    return MatrixOneForm(parts[0], parts[1], cf.chart)


def assemble_sphere_form(cf: ComponentForms) -> MatrixOneForm:
    """Maurer-Cartan form of the adapted frame into the sphere or hyperbolic space."""
    return _assemble_square(cf, 1.0, 1.0)


def assemble_family_form(cf: ComponentForms, lam) -> MatrixOneForm:
    lam = _require_nonzero(lam)
    c, eps = cf.spec.c, cf.spec.epsilon
    return _assemble_square(cf, complex(beta_coefficient(lam, c, eps)),
                            complex(theta_coefficient(lam, c, eps)))


def _affine_extend(square: MatrixOneForm, theta: MatrixOneForm, m: int) -> MatrixOneForm:
    n = square.n
    parts = []
    for sq, th in ((square.du, theta.du), (square.dv, theta.dv)):
        out = np.zeros(square.chart.shape + (n + 1, n + 1), dtype=sq.dtype)
        out[..., :n, :n] = sq
        out[..., :m, n:] = th
        parts.append(out)
    return MatrixOneForm(parts[0], parts[1], square.chart)


def assemble_scaled_form(cf: ComponentForms, lam) -> MatrixOneForm:
    """Form of the frame of the rescaled family, size m+k+2; lam = +-i is allowed."""
    lam = _require_nonzero(lam)
    return _affine_extend(assemble_family_form(cf, lam), cf.theta, cf.spec.m)


def assemble_affine_form(cf: ComponentForms) -> MatrixOneForm:
    """Flat-space form with beta, alpha scaled by the real affine factor.

    Laid out in size m+k+2 with an idle (m+k+1)-th row and column, the same
    layout the scaled form has at lam = i, so the two compare entrywise.
    """
    factor = affine_factor(cf.spec.c, cf.spec.epsilon)
    m = cf.spec.m
    square = _assemble_square(cf, factor, 0.0)
    return _affine_extend(square, cf.theta, m)
