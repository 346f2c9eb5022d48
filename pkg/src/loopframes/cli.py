"""Command-line driver: ``loopframes <command> [--config FILE] [options]``.

Config files are flat ``key = value`` text with ``#`` comments. Recognized
keys::

    input        = oracle | path/to/components.txt
    m, k, r, s, epsilon, c          space-form data (oracle input: optional)
    oracle_c     = 1.0              curvature the oracle is built with
    u_min, u_max, v_min, v_max, N_u, N_v
    lambda_sweep = 0.5, 2, 5        locus parameters; a value ending in 'j'
                                    is taken as a raw complex lambda
    dstep        = 1e-4
    tol.<name>   = <real>
    output_dir   = out

Locus parameters map to lambda = i*t (imaginary axis), t (real axis) or
exp(i*t) (unit circle).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import formats
from .discreteforms import GridChart, mc_residual
from .geometry import (ResidualReport, collapse_diameter, constant_curvature_residual,
                       deformation_snapshot, family_frame, induced_metric, metric_agreement,
                       normal_flatness_residual, realness_defect, sym_quotient,
                       theorem1_transfer)
from .integrator import (FLAT, ImmersionMesh, extract_immersion, integrate_frame,
                         path_independence_audit, quadric_residual)
from .loopfamily import (SpectralPoint, admissible_locus, assemble_family_form,
                         assemble_sphere_form, on_locus, require_sym_range)
from .pseudolinalg import SpaceFormSpec, make_metric, pseudo_orthogonality_residual
from . import oracle

DEFAULT_TOLERANCES = {
    "maurer-cartan": 1e-2,
    "constant-curvature": 1e-2,
    "normal-flatness": 1e-2,
    "orthogonality": 1e-8,
    "path-independence": 1e-2,
    "quadric-constraint": 1e-8,
    "realness": 1e-8,
    "metric-agreement": 1e-2,
    "sym-error": 1e-2,
    "transfer-error": 1e-2,
    "transfer-vs-sym": 2e-2,
    "origin": 1e-12,
    "oracle": 1e-9,
}

DEFAULT_SWEEPS = {
    "imaginary-axis": [0.5, 2.0, 5.0],
    "real-axis": [0.5, 2.0, 3.0],
    "unit-circle": [0.4, 0.8, 2.4],
}


@dataclass
class RunConfig:
    spec: SpaceFormSpec
    chart: GridChart
    input: str = "oracle"
    oracle_c: float = 1.0
    lambda_sweep: list = field(default_factory=list)
    dstep: float = 1e-4
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: Path = Path("out")

    def __post_init__(self):
        bad = {k: v for k, v in self.tolerances.items() if not v > 0}
        if bad:
            raise ValueError(f"tolerances must be positive: {bad}")
        if not self.dstep > 0:
            raise ValueError(f"dstep must be positive, got {self.dstep}")

    @property
    def is_oracle(self) -> bool:
        return self.input == "oracle"

    def tol(self, name: str) -> float:
        return self.tolerances[name]


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values


def _parse_sweep(text: str) -> list[str]:
    return [s.strip() for s in text.replace(";", ",").split(",") if s.strip()]


def build_config(values: dict, base_dir: Path | None = None) -> RunConfig:
    """Turn parsed key/value pairs into a RunConfig, filling defaults."""
    vals = dict(values)
    source = vals.pop("input", "oracle")
    oracle_c = float(vals.pop("oracle_c", 1.0))
    tolerances = dict(DEFAULT_TOLERANCES)
    for key in [k for k in vals if k.startswith("tol.")]:
        tolerances[key[4:]] = float(vals.pop(key))

    if source == "oracle":
        base = oracle.desitter_spec(oracle_c)
        spec = SpaceFormSpec(int(vals.pop("m", base.m)), int(vals.pop("k", base.k)),
                             int(vals.pop("r", base.r)), int(vals.pop("s", base.s)),
                             int(vals.pop("epsilon", base.epsilon)),
                             float(vals.pop("c", oracle_c)))
        if (spec.m, spec.k, spec.r, spec.s, spec.epsilon) != (2, 1, 1, 1, -1):
            raise ValueError("the oracle is the (m,k,r,s,epsilon) = (2,1,1,1,-1) de Sitter family")
    else:
        path = Path(source)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        source = str(path)
        header = formats.read_components(path)
        spec = header.spec
        if "c" in vals:
            spec = spec.replace(c=float(vals.pop("c")))
        for key in ("m", "k", "r", "s", "epsilon"):
            vals.pop(key, None)

    chart = GridChart(float(vals.pop("u_min", -1.0)), float(vals.pop("u_max", 1.0)),
                      float(vals.pop("v_min", -1.0)), float(vals.pop("v_max", 1.0)),
                      int(vals.pop("N_u", 64)), int(vals.pop("N_v", 64)))
    sweep = _parse_sweep(vals.pop("lambda_sweep", ""))
    if not sweep and "lambda_sweep" not in values:
        sweep = [repr(t) for t in DEFAULT_SWEEPS[admissible_locus(spec.c, spec.epsilon)]]
    dstep = float(vals.pop("dstep", 1e-4))
    out = Path(vals.pop("output_dir", "out"))
    if vals:
        raise ValueError(f"unknown config keys: {', '.join(sorted(vals))}")
    return RunConfig(spec, chart, source, oracle_c, sweep, dstep, tolerances, out)


def load_components(config: RunConfig):
    """Components on the run's chart, carrying the run's SpaceFormSpec."""
    if config.is_oracle:
        cf = oracle.desitter_components(config.chart, c=config.oracle_c)
    else:
        # the file fixes its own chart; grid settings only apply to the oracle
        cf = formats.read_components(config.input)
        config.chart = cf.chart
    if cf.spec != config.spec:
        cf = cf.with_spec(config.spec)
    return cf


def resolve_lambda(entry: str, spec: SpaceFormSpec) -> SpectralPoint:
    """A sweep entry as a point on the admissible locus, or ValueError."""
    locus = admissible_locus(spec.c, spec.epsilon)
    entry = entry.strip()
    if entry.endswith("j"):
        lam = complex(entry)
        if not on_locus(lam, locus):
            raise ValueError(f"lambda={lam} is not on the admissible {locus} "
                             f"for c={spec.c}, epsilon={spec.epsilon:+d}")
        return SpectralPoint(lam, locus)
    return SpectralPoint.from_parameter(locus, float(entry))


def _new_report(config: RunConfig, dstep: float | None = None) -> ResidualReport:
    return ResidualReport(h=config.chart.h, dstep=dstep, spec=config.spec)


def cmd_verify(config: RunConfig) -> ResidualReport:
    cf = load_components(config)
    rep = _new_report(config)
    spec = cf.spec
    sphere = assemble_sphere_form(cf)
    rep.add("maurer-cartan[lambda0]", mc_residual(sphere), config.tol("maurer-cartan"))
    for entry in config.lambda_sweep[:2]:
        pt = resolve_lambda(entry, spec)
        rep.add(f"maurer-cartan[lambda={pt.lam:.6g}]",
                mc_residual(assemble_family_form(cf, pt)), config.tol("maurer-cartan"))
    rep.add("constant-curvature", constant_curvature_residual(cf, None, spec.c),
            config.tol("constant-curvature"))
    rep.add("normal-flatness", normal_flatness_residual(cf), config.tol("normal-flatness"))
    rep.add("path-independence", path_independence_audit(sphere),
            config.tol("path-independence"))
    frame = integrate_frame(sphere)
    rep.add("orthogonality", pseudo_orthogonality_residual(frame.frames, make_metric(spec)),
            config.tol("orthogonality"))
    mesh = extract_immersion(frame, spec)
    rep.add("quadric-constraint", quadric_residual(mesh), config.tol("quadric-constraint"))
    return rep


def cmd_sweep(config: RunConfig) -> ResidualReport:
    cf = load_components(config)
    spec = cf.spec
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = _new_report(config)
    table = []
    for idx, entry in enumerate(config.lambda_sweep):
        try:
            pt = resolve_lambda(entry, spec)
        except ValueError as exc:
            rep.notes[f"rejected[{entry}]"] = str(exc)
            continue
        frame = family_frame(cf, pt)
        mesh = extract_immersion(frame, spec, pt.lam)
        formats.write_mesh(out / f"family_{idx:03d}.txt", mesh)
        rep.add(f"quadric-constraint[lambda={pt.lam:.6g}]", quadric_residual(mesh),
                config.tol("quadric-constraint"))
        rep.add(f"orthogonality[lambda={pt.lam:.6g}]",
                pseudo_orthogonality_residual(frame.frames, make_metric(spec)),
                config.tol("orthogonality"))
        try:
            snap = deformation_snapshot(mesh, pt, spec)
        except ValueError as exc:
            rep.notes[f"snapshot-skipped[{entry}]"] = str(exc)
        else:
            formats.write_mesh(out / f"snapshot_{idx:03d}.txt", snap)
        table.append((pt.lam, collapse_diameter(mesh)))
    with open(out / "collapse_diameter.txt", "w") as fh:
        fh.write("# lambda_re lambda_im diameter\n")
        for lam, diam in table:
            fh.write(f"{lam.real:.17g} {lam.imag:.17g} {diam:.17g}\n")
    formats.write_report(out / "sweep_report.txt", rep)
    return rep


def _origin_defect(mesh) -> float:
    return float(np.abs(mesh.at_base()).max())


def cmd_sym(config: RunConfig) -> ResidualReport:
    require_sym_range(config.spec.c, config.spec.epsilon)
    cf = load_components(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = _new_report(config, config.dstep)
    f_hat = sym_quotient(cf, dstep=config.dstep)
    mesh = ImmersionMesh(np.ascontiguousarray(f_hat.real), cf.chart, cf.spec, FLAT, 1j)
    rep.add("realness", realness_defect(f_hat), config.tol("realness"))
    rep.add("origin", _origin_defect(mesh), config.tol("origin"))
    if config.is_oracle:
        ref = oracle.flat_reference(cf.chart, config.oracle_c)
        rep.add("sym-error", float(np.abs(mesh.points - ref).max()), config.tol("sym-error"))
    formats.write_mesh(out / "sym_mesh.txt", mesh)
    formats.write_report(out / "sym_report.txt", rep)
    return rep


def cmd_transfer(config: RunConfig) -> ResidualReport:
    require_sym_range(config.spec.c, config.spec.epsilon)
    cf = load_components(config)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = _new_report(config)
    mesh = theorem1_transfer(cf)
    rep.add("origin", _origin_defect(mesh), config.tol("origin"))
    rep.add("metric-agreement", metric_agreement(mesh, induced_metric(cf)),
            config.tol("metric-agreement"))
    if config.is_oracle:
        ref = oracle.flat_reference(cf.chart, config.oracle_c)
        rep.add("transfer-error", float(np.abs(mesh.points - ref).max()),
                config.tol("transfer-error"))
    sym_path = out / "sym_mesh.txt"
    if sym_path.exists():
        sym = formats.read_mesh(sym_path)
        if sym.points.shape == mesh.points.shape:
            rep.add("transfer-vs-sym", float(np.abs(sym.points - mesh.points).max()),
                    config.tol("transfer-vs-sym"))
        else:
            rep.notes["transfer-vs-sym"] = "sym_mesh.txt is from a different grid; skipped"
    formats.write_mesh(out / "transfer_mesh.txt", mesh)
    formats.write_report(out / "transfer_report.txt", rep)
    return rep


def cmd_oracle_selftest(config: RunConfig, samples: int = 200, seed: int = 0) -> ResidualReport:
    """Closed-form consistency checks of the de Sitter oracle."""
    rng = np.random.default_rng(seed)
    rep = _new_report(config)
    tol = config.tol("oracle")
    u = rng.uniform(-1, 1, samples)
    v = rng.uniform(-1, 1, samples)
    lams = 1j * rng.uniform(0.2, 5.0, samples)

    ortho = max(pseudo_orthogonality_residual(oracle.desitter_frame(a, b, l), oracle.DESITTER_J)
                for a, b, l in zip(u, v, lams))
    rep.add("frame-orthogonality", ortho, tol)
    ab_defect = max(abs(a * a - b * b - 1) for a, b in map(oracle.ab, lams))
    rep.add("a2-minus-b2", ab_defect, tol)
    f = np.array([oracle.desitter_immersion(a, b, l) for a, b, l in zip(u, v, lams)])
    q = np.einsum("ni,ij,nj->n", f, oracle.DESITTER_J, f)
    rep.add("hyperbolic-quadric", float(np.abs(q + 1).max()), tol)
    collapse = np.abs(oracle.desitter_immersion(u, v, 1j) - np.array([0, 0, 0, 1])).max()
    rep.add("collapse-at-i", float(collapse), tol)

    eps = 1e-6
    deriv = 0.0
    for a, b, l in zip(u[:20], v[:20], lams[:20]):
        Fu, Fv = oracle.desitter_frame_derivatives(a, b, l)
        Fu_fd = (oracle.desitter_frame(a + eps, b, l) - oracle.desitter_frame(a - eps, b, l)) / (2 * eps)
        Fv_fd = (oracle.desitter_frame(a, b + eps, l) - oracle.desitter_frame(a, b - eps, l)) / (2 * eps)
        deriv = max(deriv, np.abs(Fu - Fu_fd).max(), np.abs(Fv - Fv_fd).max())
    rep.add("frame-derivatives", float(deriv), 1e-6)

    chart = GridChart(-1, 1, -1, 1, 9, 9)
    cf = oracle.desitter_components(chart, c=config.oracle_c, lam_ref=2j)
    U, V = chart.mesh()
    F = oracle.desitter_frame(U, V, 3j)
    Fu, Fv = oracle.desitter_frame_derivatives(U, V, 3j)
    Finv = oracle.DESITTER_J @ np.swapaxes(F, -1, -2) @ oracle.DESITTER_J
    A = assemble_family_form(cf, 3j)
    cross = max(np.abs(A.du - Finv @ Fu).max(), np.abs(A.dv - Finv @ Fv).max())
    rep.add("cross-lambda-components", float(cross), tol)
    return rep


COMMANDS = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "sym": cmd_sym,
    "transfer": cmd_transfer,
    "oracle-selftest": cmd_oracle_selftest,
}

REPORT_NAMES = {"verify": "verify_report.txt", "oracle-selftest": "oracle_report.txt"}


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        nu, nv = text.lower().split("x")
        return int(nu), int(nv)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x64, got {text!r}")


def _parse_tol(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"tolerance must be name=value, got {text!r}")
    name, val = text.split("=", 1)
    return name.strip(), float(val)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopframes",
        description="Loop-group frames of constant-curvature immersions: "
                    "verification, spectral sweeps, Sym extraction and flat transfer.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=Path, help="key = value configuration file")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--dstep", type=float, help="lambda step of the Sym difference quotient")
    parser.add_argument("--tol", type=_parse_tol, action="append", default=[],
                        metavar="NAME=VALUE", help="override a tolerance (repeatable)")
    parser.add_argument("--grid", type=_parse_grid, metavar="NUxNV", help="grid node counts")
    return parser


def config_from_args(args) -> RunConfig:
    values, base_dir = {}, None
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ValueError(f"cannot read config {args.config}: {exc}") from exc
        values = parse_config_text(text)
        base_dir = args.config.parent
    if args.grid is not None:
        values["N_u"], values["N_v"] = (str(n) for n in args.grid)
    if args.dstep is not None:
        values["dstep"] = repr(args.dstep)
    if args.out is not None:
        values["output_dir"] = str(args.out)
    for name, val in args.tol:
        values[f"tol.{name}"] = repr(val)
    return build_config(values, base_dir)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        report = COMMANDS[args.command](config)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command in REPORT_NAMES:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        formats.write_report(out / REPORT_NAMES[args.command], report)
    sys.stdout.write(report.to_text())
    return 0 if report.passed() else 1


if __name__ == "__main__":
    sys.exit(main())
