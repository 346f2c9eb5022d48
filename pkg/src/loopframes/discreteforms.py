"""Matrix-valued 1-forms and 2-forms sampled on a rectangular (u, v) chart.

A 1-form ``A = A_u du + A_v dv`` is stored as two coefficient arrays of shape
``(N_u, N_v, rows, cols)``; a 2-form keeps only its ``du ^ dv`` coefficient.
Derivatives are second-order finite differences (central inside, one-sided
three-point on the boundary); residual norms skip the boundary nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridChart",
    "MatrixOneForm",
    "MatrixTwoForm",
    "exterior_derivative",
    "wedge",
    "mc_residual",
    "interior_sup",
]


@dataclass(frozen=True)
class GridChart:
    """Uniform tensor grid on [u_min, u_max] x [v_min, v_max].

    Node ``(i, j)`` sits at ``(u[i], v[j])``. The base point defaults to the
    node nearest the origin (first one on ties).
    """

    u_min: float = -1.0
    u_max: float = 1.0
    v_min: float = -1.0
    v_max: float = 1.0
    N_u: int = 64
    N_v: int = 64
    base: tuple[int, int] | None = None

    def __post_init__(self):
        if self.N_u < 3 or self.N_v < 3:
            raise ValueError(f"need at least 3 nodes per direction, got {self.N_u}x{self.N_v}")
        if not (self.u_max > self.u_min and self.v_max > self.v_min):
            raise ValueError("chart bounds must satisfy u_min < u_max and v_min < v_max")
        if self.base is None:
            i = int(np.argmin(np.abs(self.u)))
            j = int(np.argmin(np.abs(self.v)))
            object.__setattr__(self, "base", (i, j))
        i, j = self.base
        if not (0 <= i < self.N_u and 0 <= j < self.N_v):
            raise ValueError(f"base node {self.base} outside the {self.N_u}x{self.N_v} grid")

    @property
    def u(self) -> np.ndarray:
        return np.linspace(self.u_min, self.u_max, self.N_u)

    @property
    def v(self) -> np.ndarray:
        return np.linspace(self.v_min, self.v_max, self.N_v)

    @property
    def h_u(self) -> float:
        return (self.u_max - self.u_min) / (self.N_u - 1)

    @property
    def h_v(self) -> float:
        return (self.v_max - self.v_min) / (self.N_v - 1)

    @property
    def h(self) -> float:
        return max(self.h_u, self.h_v)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N_u, self.N_v)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.u, self.v, indexing="ij")

    @property
    def base_point(self) -> tuple[float, float]:
        i, j = self.base
        return float(self.u[i]), float(self.v[j])

    def refined(self, factor: int = 2) -> "GridChart":
        """Same bounds with ``factor`` times as many nodes per direction."""
        return GridChart(self.u_min, self.u_max, self.v_min, self.v_max,
                         self.N_u * factor, self.N_v * factor)

    def with_nodes(self, N_u: int, N_v: int) -> "GridChart":
        return GridChart(self.u_min, self.u_max, self.v_min, self.v_max, N_u, N_v)


def _check_coeffs(arr: np.ndarray, chart: GridChart, what: str) -> np.ndarray:
    arr = np.asarray(arr)
    if arr.ndim != 4 or arr.shape[:2] != chart.shape:
        raise ValueError(f"{what} must have shape ({chart.N_u}, {chart.N_v}, rows, cols), "
                         f"got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} has non-finite entries")
    return arr


@dataclass(frozen=True)
class MatrixOneForm:
    du: np.ndarray
    dv: np.ndarray
    chart: GridChart = field(repr=False)

    def __post_init__(self):
        du = _check_coeffs(self.du, self.chart, "du coefficient")
        dv = _check_coeffs(self.dv, self.chart, "dv coefficient")
        if du.shape != dv.shape:
            raise ValueError(f"du/dv coefficient shapes differ: {du.shape} vs {dv.shape}")
        object.__setattr__(self, "du", du)
        object.__setattr__(self, "dv", dv)

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.du.shape[2:]

    @property
    def n(self) -> int:
        return self.du.shape[2]

    @classmethod
    def zeros(cls, chart: GridChart, rows: int, cols: int | None = None,
              dtype=float) -> "MatrixOneForm":
        cols = rows if cols is None else cols
        z = np.zeros(chart.shape + (rows, cols), dtype=dtype)
        return cls(z, z.copy(), chart)

    def __add__(self, other: "MatrixOneForm") -> "MatrixOneForm":
        return MatrixOneForm(self.du + other.du, self.dv + other.dv, self.chart)

    def __mul__(self, scalar) -> "MatrixOneForm":
        return MatrixOneForm(scalar * self.du, scalar * self.dv, self.chart)

    __rmul__ = __mul__

    def transpose(self) -> "MatrixOneForm":
        return MatrixOneForm(np.swapaxes(self.du, -1, -2), np.swapaxes(self.dv, -1, -2),
                             self.chart)

    def at(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        return self.du[i, j], self.dv[i, j]


@dataclass(frozen=True)
class MatrixTwoForm:
    """The ``du ^ dv`` coefficient of a matrix-valued 2-form."""

    coeff: np.ndarray
    chart: GridChart = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coeff", _check_coeffs(self.coeff, self.chart, "2-form coefficient"))

    def __add__(self, other: "MatrixTwoForm") -> "MatrixTwoForm":
        return MatrixTwoForm(self.coeff + other.coeff, self.chart)

    def __sub__(self, other: "MatrixTwoForm") -> "MatrixTwoForm":
        return MatrixTwoForm(self.coeff - other.coeff, self.chart)

    def __mul__(self, scalar) -> "MatrixTwoForm":
        return MatrixTwoForm(scalar * self.coeff, self.chart)

    __rmul__ = __mul__


def exterior_derivative(A: MatrixOneForm) -> MatrixTwoForm:
    """d(A_u du + A_v dv) = (dA_v/du - dA_u/dv) du ^ dv."""
    ch = A.chart
    dAv_du = np.gradient(A.dv, ch.h_u, axis=0, edge_order=2)
    dAu_dv = np.gradient(A.du, ch.h_v, axis=1, edge_order=2)
    return MatrixTwoForm(dAv_du - dAu_dv, ch)


def wedge(X: MatrixOneForm, Y: MatrixOneForm) -> MatrixTwoForm:
    """(X ^ Y)^i_j = sum_k X^i_k ^ Y^k_j, i.e. coefficient X_u Y_v - X_v Y_u."""
    if X.chart.shape != Y.chart.shape:
        raise ValueError("wedge of forms on different charts")
    if X.block_shape[1] != Y.block_shape[0]:
        raise ValueError(f"cannot wedge {X.block_shape} with {Y.block_shape} blocks")
    return MatrixTwoForm(X.du @ Y.dv - X.dv @ Y.du, X.chart)


def interior_sup(omega: MatrixTwoForm) -> float:
    """Entrywise sup-norm over nodes off the chart boundary."""
    return float(np.abs(omega.coeff[1:-1, 1:-1]).max(initial=0.0))


def mc_residual(A: MatrixOneForm) -> float:
    """Interior sup-norm of dA + A ^ A."""
    return interior_sup(exterior_derivative(A) + wedge(A, A))
