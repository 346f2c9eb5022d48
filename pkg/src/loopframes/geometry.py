"""Geometric verifiers and the two routes to the flat-space immersion.

The direct transfer integrates the flat form (beta and alpha rescaled by a
real factor); the Sym route differentiates the associated family ``f_lam``
in lambda at ``lam = i``. Both normalize the frame to the identity at the
base node, so their outputs are compared as-is.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .discreteforms import GridChart, MatrixOneForm, exterior_derivative, interior_sup, wedge
from .integrator import (AFFINE, FLAT, FrameField, ImmersionMesh, extract_immersion,
                         integrate_frame)
from .loopfamily import (IMAGINARY_AXIS, REAL_AXIS, UNIT_CIRCLE, ComponentForms,
                         SpectralPoint, admissible_locus, assemble_affine_form,
                         assemble_family_form, require_sym_range)
from .pseudolinalg import MetricBlocks, SpaceFormSpec, make_metric

__all__ = [
    "MetricSample",
    "ResidualReport",
    "LocusPath",
    "default_locus_path",
    "induced_metric",
    "pullback_metric",
    "brioschi_curvature",
    "constant_curvature_residual",
    "normal_flatness_residual",
    "family_frame",
    "family_mesh",
    "theorem1_transfer",
    "sym_quotient",
    "sym_extract",
    "realness_defect",
    "deformation_snapshot",
    "collapse_diameter",
    "metric_agreement",
]


@dataclass(frozen=True)
class MetricSample:
    """Per-node 2x2 symmetric metric, shape (N_u, N_v, 2, 2)."""

    g: np.ndarray
    chart: GridChart = field(repr=False)

    def signature(self) -> np.ndarray:
        """Number of negative eigenvalues at each node."""
        return (np.linalg.eigvalsh(self.g) < 0).sum(axis=-1)


@dataclass
class ResidualReport:
    """Named residual checks with tolerances; a check passes iff value <= tol."""

    h: float
    dstep: float | None = None
    spec: SpaceFormSpec | None = None
    entries: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, name: str, value: float, tol: float) -> None:
        self.entries.append((name, float(value), float(tol)))

    def passed(self, name: str | None = None) -> bool:
        rows = [e for e in self.entries if name is None or e[0] == name]
        return all(value <= tol for _, value, tol in rows)

    def value(self, name: str) -> float:
        for n, value, _ in self.entries:
            if n == name:
                return value
        raise KeyError(name)

    def to_text(self) -> str:
        lines = []
        if self.spec is not None:
            sp = self.spec
            lines.append(f"spec = m={sp.m} k={sp.k} r={sp.r} s={sp.s} "
                         f"epsilon={sp.epsilon:+d} c={sp.c!r}")
        lines.append(f"h = {self.h!r}")
        if self.dstep is not None:
            lines.append(f"dstep = {self.dstep!r}")
        for key, val in self.notes.items():
            lines.append(f"# {key}: {val}")
        for name, value, tol in self.entries:
            verdict = "pass" if value <= tol else "fail"
            lines.append(f"{name} = {value:.6e} (tol = {tol:.3e}, {verdict})")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LocusPath:
    """A real parameterization t -> lambda(t) of a locus through lambda = i."""

    name: str
    lam: callable
    dlam: callable
    t_at_i: float


def _imaginary_exp():
    return LocusPath("i*exp(t)", lambda t: 1j * np.exp(t), lambda t: 1j * np.exp(t), 0.0)


def _imaginary_linear():
    return LocusPath("i*(1+t)", lambda t: 1j * (1 + t), lambda t: 1j, 0.0)


def _circle():
    return LocusPath("exp(i*phi)", lambda t: cmath.exp(1j * t),
                     lambda t: 1j * cmath.exp(1j * t), np.pi / 2)


LOCUS_PATHS = {"i*exp(t)": _imaginary_exp, "i*(1+t)": _imaginary_linear,
               "exp(i*phi)": _circle}


def default_locus_path(c: float, epsilon: int) -> LocusPath:
    locus = admissible_locus(c, epsilon)
    if locus == IMAGINARY_AXIS:
        return _imaginary_exp()
    if locus == UNIT_CIRCLE:
        return _circle()
    raise ValueError(f"the real-axis locus does not pass through lambda = i (c={c})")


def induced_metric(cf: ComponentForms, J: MetricBlocks | None = None) -> MetricSample:
    """g_ab = sum_i (J1)_ii theta^i_a theta^i_b with a, b in {u, v}."""
    J = cf.metric if J is None else J
    w = np.diag(J.J1)
    cof = np.stack([cf.theta.du[..., 0], cf.theta.dv[..., 0]], axis=-1)  # (.., m, 2)
    g = np.einsum("...ia,i,...ib->...ab", cof, w, cof)
    return MetricSample(g, cf.chart)


def _ambient_metric(mesh: ImmersionMesh) -> np.ndarray:
    J = make_metric(mesh.spec)
    if mesh.dim == mesh.spec.m + mesh.spec.k:
        return J.J_flat
    if mesh.dim == mesh.spec.m + mesh.spec.k + 1:
        return J.J
    raise ValueError(f"mesh dimension {mesh.dim} fits neither the flat nor the quadric ambient")


def pullback_metric(mesh: ImmersionMesh) -> MetricSample:
    """Pull back the ambient metric by central differences of the positions."""
    ch = mesh.chart
    x = mesh.points
    xu = np.gradient(x, ch.h_u, axis=0, edge_order=2)
    xv = np.gradient(x, ch.h_v, axis=1, edge_order=2)
    J = _ambient_metric(mesh)
    tangents = np.stack([xu, xv], axis=-1)  # (.., dim, 2)
    g = np.einsum("...ia,ij,...jb->...ab", tangents, J, tangents)
    if np.iscomplexobj(g):
        g = g.real
    return MetricSample(g, ch)


def brioschi_curvature(metric: MetricSample) -> np.ndarray:
    """Gauss curvature of a sampled 2-D metric by the Brioschi formula."""
    ch = metric.chart
    E, F, G = metric.g[..., 0, 0], metric.g[..., 0, 1], metric.g[..., 1, 1]

    def du(f):
        return np.gradient(f, ch.h_u, axis=0, edge_order=2)

    def dv(f):
        return np.gradient(f, ch.h_v, axis=1, edge_order=2)

    Eu, Ev, Fu, Fv, Gu, Gv = du(E), dv(E), du(F), dv(F), du(G), dv(G)
    Evv, Guu, Fuv = dv(Ev), du(Gu), dv(Fu)

    def det3(rows):
        return np.linalg.det(np.stack([np.stack(r, axis=-1) for r in rows], axis=-2))

    zero = np.zeros_like(E)
    first = det3([
        [-Evv / 2 + Fuv - Guu / 2, Eu / 2, Fu - Ev / 2],
        [Fv - Gu / 2, E, F],
        [Gv / 2, F, G],
    ])
    second = det3([
        [zero, Ev / 2, Gu / 2],
        [Ev / 2, E, F],
        [Gu / 2, F, G],
    ])
    return (first - second) / (E * G - F * F) ** 2


def constant_curvature_residual(cf: ComponentForms, J: MetricBlocks | None, c: float) -> float:
    """Interior sup of d omega + omega ^ omega - c theta ^ theta^t J1."""
    J = cf.metric if J is None else J
    theta_t_J1 = MatrixOneForm(np.swapaxes(cf.theta.du, -1, -2) @ J.J1,
                               np.swapaxes(cf.theta.dv, -1, -2) @ J.J1, cf.chart)
    curv = exterior_derivative(cf.omega) + wedge(cf.omega, cf.omega)
    return interior_sup(curv - c * wedge(cf.theta, theta_t_J1))


def normal_flatness_residual(cf: ComponentForms) -> float:
    """Interior sup of d eta + eta ^ eta."""
    return interior_sup(exterior_derivative(cf.eta) + wedge(cf.eta, cf.eta))


def _lam_value(lam) -> complex:
    return lam.lam if isinstance(lam, SpectralPoint) else complex(lam)


def family_frame(cf: ComponentForms, lam, chart: GridChart | None = None) -> FrameField:
    """F_lam normalized to the identity at the base node."""
    return integrate_frame(assemble_family_form(cf, lam), chart)


def family_mesh(cf: ComponentForms, lam, chart: GridChart | None = None) -> ImmersionMesh:
    return extract_immersion(family_frame(cf, lam, chart), cf.spec, _lam_value(lam))


def theorem1_transfer(cf: ComponentForms, chart: GridChart | None = None) -> ImmersionMesh:
    """Flat immersion with the same induced metric, by integrating the flat form."""
    require_sym_range(cf.spec.c, cf.spec.epsilon)
    F = integrate_frame(assemble_affine_form(cf), chart, mode=AFFINE)
    return extract_immersion(F, cf.spec)


def _diameter(points: np.ndarray) -> float:
    return float(np.abs(points).max(initial=0.0))


def sym_quotient(cf: ComponentForms, chart: GridChart | None = None, dstep: float = 1e-4,
                 path: LocusPath | None = None) -> np.ndarray:
    """Complex (1/sqrt(eps c)) pi_{m+k} d/dlambda f_lambda at lambda = i, per node.

    The lambda-derivative is a central difference of step ``dstep`` in the
    parameter of ``path``, divided by the path's own d lambda/dt.
    """
    spec = cf.spec
    if not dstep > 0:
        raise ValueError(f"dstep must be positive, got {dstep}")
    require_sym_range(spec.c, spec.epsilon)
    path = default_locus_path(spec.c, spec.epsilon) if path is None else path
    t0 = path.t_at_i
    if abs(path.lam(t0) - 1j) > 1e-14:
        raise ValueError(f"locus path {path.name} does not pass through i at t={t0}")

    plus = family_mesh(cf, path.lam(t0 + dstep), chart).points
    minus = family_mesh(cf, path.lam(t0 - dstep), chart).points
    dfdlam = (plus - minus) / (2 * dstep) / path.dlam(t0)
    return dfdlam[..., : spec.m + spec.k] / cmath.sqrt(spec.epsilon * spec.c)


def realness_defect(values: np.ndarray) -> float:
    """Imaginary part relative to the size of the data (at least 1)."""
    return _diameter(np.imag(values)) / max(_diameter(np.real(values)), 1.0)


def sym_extract(cf: ComponentForms, chart: GridChart | None = None, dstep: float = 1e-4,
                path: LocusPath | None = None, real_tol: float = 1e-8) -> ImmersionMesh:
    """Flat immersion from the lambda-derivative of the family at lambda = i."""
    f_hat = sym_quotient(cf, chart, dstep, path)
    defect = realness_defect(f_hat)
    if defect > real_tol:
        raise ArithmeticError(f"Sym output is not real (relative imaginary part {defect:.3e})")
    ch = cf.chart if chart is None else chart
    return ImmersionMesh(np.ascontiguousarray(f_hat.real), ch, cf.spec, FLAT, 1j)


def deformation_snapshot(f_mesh: ImmersionMesh, lam, spec: SpaceFormSpec | None = None,
                         real_tol: float = 1e-8) -> ImmersionMesh:
    """Rescaled family member 2/(sqrt(eps c)(lam + 1/lam)) (f_lam - e_last)."""
    spec = f_mesh.spec if spec is None else spec
    lam = _lam_value(lam)
    if lam == 0 or abs(lam - 1j) <= 1e-15 or abs(lam + 1j) <= 1e-15:
        raise ValueError(f"lambda={lam} is degenerate; take the limit with sym_extract")
    if f_mesh.dim != spec.m + spec.k + 1:
        raise ValueError("deformation snapshots need an ambient (quadric) mesh")
    scale = 2 / (cmath.sqrt(spec.epsilon * spec.c) * (lam + 1 / lam))
    shifted = np.array(f_mesh.points, dtype=complex)
    shifted[..., -1] -= 1
    out = scale * shifted
    imag = _diameter(out.imag)
    if imag > real_tol * max(_diameter(out.real), 1.0):
        raise ArithmeticError(f"deformation snapshot at lambda={lam} is not real "
                              f"(imaginary part {imag:.3e})")
    return ImmersionMesh(out.real.copy(), f_mesh.chart, spec, FLAT, lam)


def collapse_diameter(f_mesh: ImmersionMesh) -> float:
    """Largest Euclidean distance from the base-node position."""
    x = f_mesh.points
    return float(np.linalg.norm(x - f_mesh.at_base(), axis=-1).max())


def metric_agreement(mesh: ImmersionMesh, reference: MetricSample, scale: float = 1.0) -> float:
    """Interior sup of |pullback(mesh) - scale * reference|."""
    g = pullback_metric(mesh).g
    return float(np.abs(g - scale * reference.g)[1:-1, 1:-1].max())
