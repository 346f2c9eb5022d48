"""Small dense matrix tools for indefinite (pseudo-Euclidean) metrics.

Everything here works on complex arrays, including data that happens to be
real: frames evaluated at a complex spectral parameter are complex in
general, and being real is something we check rather than assume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpaceFormSpec",
    "MetricBlocks",
    "make_metric",
    "pseudo_exp",
    "pseudo_orthogonality_residual",
    "is_j_skew",
]


@dataclass(frozen=True)
class SpaceFormSpec:
    """Dimensions, signatures and curvature of an immersion problem.

    ``r`` counts negative directions of the induced metric, ``s`` those of
    the flat ambient space, ``epsilon`` picks the sphere (+1) or hyperbolic
    (-1) target and ``c`` is the constant curvature of the source manifold.
    """

    m: int
    k: int
    r: int
    s: int
    epsilon: int
    c: float

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ValueError(f"dimensions must be positive, got m={self.m}, k={self.k}")
        if not 0 <= self.r <= self.m:
            raise ValueError(f"intrinsic signature r={self.r} outside [0, m={self.m}]")
        if not 0 <= self.s - self.r <= self.k:
            raise ValueError(
                f"normal signature s-r={self.s - self.r} outside [0, k={self.k}]"
            )
        if self.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")
        if not np.isfinite(self.c) or self.c == 0:
            raise ValueError(f"curvature must be finite and nonzero, got c={self.c}")

    @property
    def delta(self) -> int:
        return (1 - self.epsilon) // 2

    @property
    def n(self) -> int:
        """Size of the square ambient frame, m + k + 1."""
        return self.m + self.k + 1

    def replace(self, **changes) -> "SpaceFormSpec":
        fields = dict(m=self.m, k=self.k, r=self.r, s=self.s, epsilon=self.epsilon, c=self.c)
        fields.update(changes)
        return SpaceFormSpec(**fields)


@dataclass(frozen=True)
class MetricBlocks:
    J1: np.ndarray
    J2: np.ndarray
    epsilon_entry: int

    @property
    def J(self) -> np.ndarray:
        """The assembled diagonal diag(J1, J2, epsilon)."""
        return np.diag(
            np.concatenate([np.diag(self.J1), np.diag(self.J2), [self.epsilon_entry]])
        )

    @property
    def J_flat(self) -> np.ndarray:
        """diag(J1, J2): the metric of the flat ambient space."""
        return np.diag(np.concatenate([np.diag(self.J1), np.diag(self.J2)]))


def _signature_block(size: int, negatives: int) -> np.ndarray:
    # negatives go last within the block
    return np.diag(np.r_[np.ones(size - negatives), -np.ones(negatives)])


def make_metric(spec: SpaceFormSpec) -> MetricBlocks:
    return MetricBlocks(
        J1=_signature_block(spec.m, spec.r),
        J2=_signature_block(spec.k, spec.s - spec.r),
        epsilon_entry=spec.epsilon,
    )


# Pade [13/13] coefficients and the 1-norm bound under which it is accurate to
# unit roundoff (Higham 2005).
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152


def pseudo_exp(X) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant.

    Accepts a single square matrix or a stack of shape ``(..., n, n)``. Every
    matrix in a stack gets its own scaling exponent, so results do not depend
    on what else is in the batch.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim < 2 or X.shape[-1] != X.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("pseudo_exp received non-finite entries")

    n = X.shape[-1]
    norms = np.abs(X).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        s = np.ceil(np.log2(norms / _THETA13))
    s = np.where(norms > 0, np.maximum(s, 0), 0).astype(int)
    A = X / (2.0 ** s)[..., None, None]

    b = _PADE13
    ident = np.broadcast_to(np.eye(n, dtype=complex), A.shape)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4
             + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4
         + b[2] * A2 + b[0] * ident)
    R = np.linalg.solve(V - U, V + U)

    for step in range(int(s.max(initial=0))):
        squared = R @ R
        R = np.where((step < s)[..., None, None], squared, R)
    return np.where((norms == 0)[..., None, None], ident, R)


def pseudo_orthogonality_residual(F, J) -> float:
    """Sup-norm of F^t J F - J; ``J`` may be a MetricBlocks or a diagonal matrix."""
    if isinstance(J, MetricBlocks):
        J = J.J
    F = np.asarray(F, dtype=complex)
    J = np.asarray(J)
    if F.shape[-2:] != J.shape:
        raise ValueError(f"frame shape {F.shape} does not match metric shape {J.shape}")
    resid = np.swapaxes(F, -1, -2) @ J @ F - J
    return float(np.abs(resid).max())


def is_j_skew(X, J, tol: float = 1e-12) -> bool:
    """True when X^t J + J X vanishes to ``tol`` (X may be a stack)."""
    X = np.asarray(X)
    return bool(np.abs(np.swapaxes(X, -1, -2) @ J + J @ X).max(initial=0.0) <= tol)
