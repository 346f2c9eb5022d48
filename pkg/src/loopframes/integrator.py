"""Frame integration F^{-1} dF = A on a grid chart.

Each lattice edge is crossed with one Lie step

    F_next = F_cur @ exp(h/2 * (A(start) + A(end)))

along the edge direction, which is second order and, for J-skew ``A``, keeps
every frame J-orthogonal up to roundoff. The canonical path from the base
node goes along its row (the u direction) first, then up and down every
column, so all columns advance together as one batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discreteforms import GridChart, MatrixOneForm
from .pseudolinalg import SpaceFormSpec, make_metric, pseudo_exp

__all__ = [
    "AMBIENT",
    "AFFINE",
    "FrameField",
    "ImmersionMesh",
    "integrate_frame",
    "path_independence_audit",
    "extract_immersion",
    "quadric_residual",
]

AMBIENT = "ambient-square"
AFFINE = "affine-block"

SPHERE, HYPERBOLIC, FLAT = "sphere", "hyperbolic", "flat"


@dataclass(frozen=True)
class FrameField:
    frames: np.ndarray
    chart: GridChart = field(repr=False)
    mode: str = AMBIENT

    @property
    def n(self) -> int:
        return self.frames.shape[-1]

    @property
    def base(self) -> tuple[int, int]:
        return self.chart.base


@dataclass(frozen=True)
class ImmersionMesh:
    """Ambient positions per node, shape ``(N_u, N_v, dim)``."""

    points: np.ndarray
    chart: GridChart = field(repr=False)
    spec: SpaceFormSpec
    target: str
    lam: complex | None = None

    @property
    def dim(self) -> int:
        return self.points.shape[-1]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.points)

    def at_base(self) -> np.ndarray:
        i, j = self.chart.base
        return self.points[i, j]


def _edge_exp(A_start, A_end, h):
    return pseudo_exp(0.5 * h * (A_start + A_end))


def _check_init(init, n: int, mode: str) -> np.ndarray:
    init = np.eye(n, dtype=complex) if init is None else np.asarray(init, dtype=complex)
    if init.shape != (n, n):
        raise ValueError(f"initial frame must be {n}x{n}, got {init.shape}")
    if not np.all(np.isfinite(init)):
        raise ValueError("initial frame has non-finite entries")
    if mode == AFFINE:
        last = np.zeros(n)
        last[-1] = 1
        if not np.array_equal(init[-1], last):
            raise ValueError("affine-block initial frame must have last row (0, ..., 0, 1)")
    elif mode != AMBIENT:
        raise ValueError(f"unknown frame mode {mode!r}")
    return init


def _pin_affine(F: np.ndarray) -> np.ndarray:
    F[..., -1, :-1] = 0
    F[..., -1, -1] = 1
    return F


def integrate_frame(A: MatrixOneForm, chart: GridChart | None = None, init=None,
                    mode: str = AMBIENT) -> FrameField:
    """Integrate ``A`` from the base node with ``F(base) = init`` (identity by default)."""
    chart = A.chart if chart is None else chart
    if chart.shape != A.chart.shape:
        raise ValueError("one-form and chart have different node counts")
    if not (np.all(np.isfinite(A.du)) and np.all(np.isfinite(A.dv))):
        raise ValueError("one-form has non-finite coefficients")
    n = A.n
    init = _check_init(init, n, mode)
    Au, Av = A.du, A.dv
    hu, hv = chart.h_u, chart.h_v
    ib, jb = chart.base
    Nu, Nv = chart.shape

    F = np.empty(chart.shape + (n, n), dtype=complex)
    F[ib, jb] = init
    pin = _pin_affine if mode == AFFINE else (lambda x: x)

    for i in range(ib, Nu - 1):
        F[i + 1, jb] = pin(F[i, jb] @ _edge_exp(Au[i, jb], Au[i + 1, jb], hu))
    for i in range(ib, 0, -1):
        F[i - 1, jb] = pin(F[i, jb] @ _edge_exp(Au[i, jb], Au[i - 1, jb], -hu))

    for j in range(jb, Nv - 1):
        F[:, j + 1] = pin(F[:, j] @ _edge_exp(Av[:, j], Av[:, j + 1], hv))
    for j in range(jb, 0, -1):
        F[:, j - 1] = pin(F[:, j] @ _edge_exp(Av[:, j], Av[:, j - 1], -hv))

    F[ib, jb] = init
    return FrameField(F, chart, mode)


def _walk(F, A_axis, fixed, axis, start, stop, h):
    step = 1 if stop >= start else -1
    for t in range(start, stop, step):
        if axis == 0:
            a0, a1 = A_axis[t, fixed], A_axis[t + step, fixed]
        else:
            a0, a1 = A_axis[fixed, t], A_axis[fixed, t + step]
        F = F @ _edge_exp(a0, a1, step * h)
    return F


def path_independence_audit(A: MatrixOneForm, chart: GridChart | None = None) -> float:
    """Corner-to-corner holonomy defect of ``A`` over the whole chart.

    Integrates from node (0, 0) to (N_u-1, N_v-1) once u-first and once
    v-first, starting from the identity, and returns the sup-norm of the
    difference between the two end frames.
    """
    chart = A.chart if chart is None else chart
    Nu, Nv = chart.shape
    eye = np.eye(A.n, dtype=complex)

    row_first = _walk(eye, A.du, 0, 0, 0, Nu - 1, chart.h_u)
    row_first = _walk(row_first, A.dv, Nu - 1, 1, 0, Nv - 1, chart.h_v)

    col_first = _walk(eye, A.dv, 0, 1, 0, Nv - 1, chart.h_v)
    col_first = _walk(col_first, A.du, Nv - 1, 0, 0, Nu - 1, chart.h_u)
    return float(np.abs(row_first - col_first).max())


def _maybe_real(points: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    scale = max(1.0, float(np.abs(points).max(initial=0.0)))
    if np.abs(points.imag).max(initial=0.0) <= tol * scale:
        return points.real.copy()
    return points


def extract_immersion(F: FrameField, spec: SpaceFormSpec, lam: complex | None = None
                      ) -> ImmersionMesh:
    """Position vectors from the last frame column.

    Ambient frames give points on the quadric x^t J x = epsilon; affine frames
    give the translation part, projected onto the first m+k coordinates.
    """
    n_amb = spec.m + spec.k + 1
    if F.mode == AMBIENT:
        if F.n != n_amb:
            raise ValueError(f"ambient frame of size {F.n} does not match m+k+1={n_amb}")
        points = F.frames[..., :, -1]
        target = SPHERE if spec.epsilon == 1 else HYPERBOLIC
    elif F.mode == AFFINE:
        if F.n not in (n_amb, n_amb + 1):
            raise ValueError(f"affine frame of size {F.n} does not match m+k={n_amb - 1}")
        points = F.frames[..., : spec.m + spec.k, -1]
        target = FLAT
    else:
        raise ValueError(f"unknown frame mode {F.mode!r}")
    return ImmersionMesh(_maybe_real(np.array(points)), F.chart, spec, target,
                         None if lam is None else complex(lam))


def quadric_residual(mesh: ImmersionMesh) -> float:
    """Sup of |x^t J x - epsilon| over nodes; zero for flat targets."""
    if mesh.target == FLAT:
        return 0.0
    J = make_metric(mesh.spec).J
    x = mesh.points
    q = np.einsum("...i,ij,...j->...", x, J, x)
    return float(np.abs(q - mesh.spec.epsilon).max())
