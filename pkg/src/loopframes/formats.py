"""Plain-text file formats: component data, meshes and residual reports.

Component file::

    # optional comment lines
    m k r s epsilon c N_u N_v u_min u_max v_min v_max
    <one row per node, row-major (v index fastest)>

Each node row holds the C-order flattened coefficients of omega_u, omega_v,
eta_u, eta_v, beta_u, beta_v, theta_u, theta_v.

Mesh file::

    # target=<sphere|hyperbolic|flat> m=.. k=.. r=.. s=.. epsilon=.. lambda_re=.. lambda_im=.. N_u=.. N_v=..
    u v x_1 ... x_n

All reals are written with 17 significant digits, so reading back is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .discreteforms import GridChart, MatrixOneForm
from .integrator import ImmersionMesh
from .loopfamily import ComponentForms
from .pseudolinalg import SpaceFormSpec

__all__ = [
    "write_components",
    "read_components",
    "write_mesh",
    "read_mesh",
    "MeshFile",
    "write_report",
]

FMT = "%.17g"
_HEADER_FIELDS = ("m", "k", "r", "s", "epsilon", "c", "N_u", "N_v",
                  "u_min", "u_max", "v_min", "v_max")


def _block_sizes(m: int, k: int) -> list[tuple[str, tuple[int, int]]]:
    return [("omega", (m, m)), ("eta", (k, k)), ("beta", (m, k)), ("theta", (m, 1))]


def write_components(path, cf: ComponentForms) -> None:
    sp, ch = cf.spec, cf.chart
    header = " ".join(FMT % x if isinstance(x, float) else str(x) for x in (
        sp.m, sp.k, sp.r, sp.s, sp.epsilon, float(sp.c), ch.N_u, ch.N_v,
        float(ch.u_min), float(ch.u_max), float(ch.v_min), float(ch.v_max)))
    cols = []
    for name, _ in _block_sizes(sp.m, sp.k):
        form = getattr(cf, name)
        for coeff in (form.du, form.dv):
            cols.append(coeff.reshape(ch.N_u * ch.N_v, -1))
    body = np.hstack(cols)
    with open(path, "w") as fh:
        fh.write("# " + " ".join(_HEADER_FIELDS) + "\n")
        fh.write(header + "\n")
        np.savetxt(fh, body, fmt=FMT)


def _data_lines(path) -> list[str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValueError(f"cannot read component file {path}: {exc}") from exc
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_components(path) -> ComponentForms:
    lines = _data_lines(path)
    if not lines:
        raise ValueError(f"{path}: empty component file")
    fields = lines[0].split()
    if len(fields) != len(_HEADER_FIELDS):
        raise ValueError(f"{path}: malformed header, expected {len(_HEADER_FIELDS)} fields "
                         f"({' '.join(_HEADER_FIELDS)}), got {len(fields)}")
    try:
        m, k, r, s, eps = (int(x) for x in fields[:5])
        c = float(fields[5])
        Nu, Nv = int(fields[6]), int(fields[7])
        bounds = [float(x) for x in fields[8:]]
    except ValueError as exc:
        raise ValueError(f"{path}: malformed header: {exc}") from exc
    spec = SpaceFormSpec(m, k, r, s, eps, c)
    chart = GridChart(bounds[0], bounds[1], bounds[2], bounds[3], Nu, Nv)

    blocks = _block_sizes(m, k)
    width = sum(2 * a * b for _, (a, b) in blocks)
    try:
        body = np.array([[float(x) for x in ln.split()] for ln in lines[1:]], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric coefficient data: {exc}") from exc
    if body.shape != (Nu * Nv, width):
        raise ValueError(f"{path}: expected {Nu * Nv} rows of {width} values, "
                         f"got shape {body.shape}")
    forms, col = {}, 0
    for name, (a, b) in blocks:
        parts = []
        for _ in range(2):
            parts.append(body[:, col:col + a * b].reshape(Nu, Nv, a, b))
            col += a * b
        forms[name] = MatrixOneForm(parts[0], parts[1], chart)
    return ComponentForms(spec=spec, chart=chart, **forms)


def write_mesh(path, mesh: ImmersionMesh) -> None:
    if np.iscomplexobj(mesh.points):
        raise ValueError("cannot export a complex-valued mesh")
    sp, ch = mesh.spec, mesh.chart
    lam = complex("nan") if mesh.lam is None else mesh.lam
    header = (f"target={mesh.target} m={sp.m} k={sp.k} r={sp.r} s={sp.s} "
              f"epsilon={sp.epsilon} lambda_re={FMT % lam.real} lambda_im={FMT % lam.imag} "
              f"N_u={ch.N_u} N_v={ch.N_v}")
    U, V = ch.mesh()
    body = np.column_stack([U.ravel(), V.ravel(), mesh.points.reshape(ch.N_u * ch.N_v, -1)])
    np.savetxt(path, body, fmt=FMT, header=header, comments="# ")


@dataclass(frozen=True)
class MeshFile:
    header: dict
    u: np.ndarray
    v: np.ndarray
    points: np.ndarray

    @property
    def target(self) -> str:
        return self.header["target"]

    @property
    def lam(self) -> complex:
        return complex(float(self.header["lambda_re"]), float(self.header["lambda_im"]))


def read_mesh(path) -> MeshFile:
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("#"):
        raise ValueError(f"{path}: missing mesh header")
    header = dict(item.split("=", 1) for item in first[1:].split())
    Nu, Nv = int(header["N_u"]), int(header["N_v"])
    body = np.loadtxt(path, comments="#", ndmin=2)
    if body.shape[0] != Nu * Nv:
        raise ValueError(f"{path}: expected {Nu * Nv} node rows, got {body.shape[0]}")
    return MeshFile(header, body[:, 0].reshape(Nu, Nv), body[:, 1].reshape(Nu, Nv),
                    body[:, 2:].reshape(Nu, Nv, -1))


def write_report(path, report) -> None:
    Path(path).write_text(report.to_text())
