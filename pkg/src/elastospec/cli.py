"""Command-line entry point tying the modules into reproducible pipelines.

Every subcommand is deterministic for a fixed seed and writes diff-able
artifacts (JSON / CSV / SVG). Validation failures exit 1 with a
machine-readable {stage, message, hint} object on stderr; unexpected
failures exit 2.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import ElastospecError
from .kernel_asymptotics import BoundaryCondition
from .materials import LameParameters

DEFAULT_SEED = 42


def _out_path(path: str) -> str:
    base = os.environ.get("ELASTOSPEC_OUTDIR", ".")
    if os.path.isabs(path):
        return path
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, path)


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(_out_path(out), "w") as fh:
            fh.write(text)


def _parse_domain(spec: str):
    from .mesh_geometry import Disk, Ellipse, Polygon, Rectangle

    kind, _, rest = spec.partition(":")
    kind = kind.lower()
    try:
        if kind == "disk":
            return Disk(float(rest))
        if kind in ("rect", "rectangle"):
            lx, ly = (float(v) for v in rest.split(","))
            return Rectangle(lx, ly)
        if kind == "ellipse":
            a, b = (float(v) for v in rest.split(","))
            return Ellipse(a, b)
        if kind in ("polygon", "poly"):
            verts = tuple(
                tuple(float(c) for c in pair.split(",")) for pair in rest.split(";")
            )
            return Polygon(verts)
    except (ValueError, TypeError) as exc:
        raise ElastospecError(
            f"cannot parse domain spec {spec!r}: {exc}",
            hint="use disk:R | rect:LX,LY | ellipse:A,B | polygon:x,y;x,y;...",
        )
    raise ElastospecError(
        f"unknown domain kind {kind!r}",
        hint="use disk:R | rect:LX,LY | ellipse:A,B | polygon:x,y;x,y;...",
    )


def _load_spectrum(path: str):
    from . import serialize

    with open(path) as fh:
        return serialize.spectrum_from_dict(serialize.loads(fh.read(), "spectrum"))


def _write_fit_svg(path, spectrum, fit):
    from .svgplot import fit_plot_svg
    from .trace_fitter import geometric_times, heat_trace_partial

    n = spectrum.dim
    ts = geometric_times(fit.window[0], fit.window[1], fit.n_samples)
    y = [heat_trace_partial(spectrum, float(t)).theta * t ** (n / 2.0) for t in ts]
    y_fit = [
        fit.a0_hat
        + fit.a1_hat * math.sqrt(t)
        + (fit.guard_c or 0.0) * t
        for t in ts
    ]
    title = (
        f"a0={fit.a0_hat:.6g} a1={fit.a1_hat:.6g} "
        f"guard_c={0.0 if fit.guard_c is None else fit.guard_c:.3g}"
    )
    with open(_out_path(path), "w") as fh:
        fh.write(fit_plot_svg(np.sqrt(ts).tolist(), y, y_fit, title))


def cmd_symbol_check(args):
    from . import serialize, symbol_core

    rng = np.random.default_rng(args.seed)
    params_pool = []
    while len(params_pool) < 40:
        tau = float(rng.uniform(0.1, 5.0))
        mu = float(rng.uniform(-0.9 * tau, 5.0))
        params_pool.append(LameParameters(tau, mu))

    max_rel = 0.0
    for _ in range(args.draws):
        p = params_pool[int(rng.integers(len(params_pool)))]
        xi = rng.uniform(-3.0, 3.0, size=args.n)
        s = float(xi @ xi)
        if s < 1e-3:
            continue
        hi = p.pressure_speed_sq * s
        lam = complex(rng.uniform(-2.0 * hi, 3.0 * hi), rng.uniform(-hi, hi))
        if min(abs(lam - p.shear_speed_sq * s), abs(lam - hi)) < 0.1 * hi:
            continue
        closed = symbol_core.resolvent_trace_closed(p, args.n, s, lam)
        brute = symbol_core.resolvent_trace_bruteforce(p, xi, lam)
        max_rel = max(max_rel, abs(closed - brute) / abs(brute))
        det_c = symbol_core.symbol_determinant_closed(p, args.n, s, lam)
        det_b = symbol_core.symbol_determinant_bruteforce(p, xi, lam)
        max_rel = max(max_rel, abs(det_c - det_b) / abs(det_b))
        max_rel = max(max_rel, symbol_core.parametrix_residual(p, xi, lam))
    for p in params_pool[:5]:
        for s in (0.5, 1.0, 4.0):
            # dimensionless times: e^{-t*lam} on the contour grows like
            # e^{t*radius}, so keep t*(2tau+mu)*s moderate for float64
            for t_scaled in (0.2, 1.0, 4.0):
                t = t_scaled / (p.pressure_speed_sq * s)
                res = symbol_core.residue_heat_symbol(p, args.n, s, t)
                quad = symbol_core.contour_integral_oracle(p, args.n, s, t)
                max_rel = max(max_rel, abs(res - quad) / abs(res))
    report = {
        "schema_version": 1,
        "kind": "symbol_check",
        "n": args.n,
        "draws": args.draws,
        "max_rel_err": max_rel,
        "pass": bool(max_rel < 1e-8),
    }
    _emit(serialize.dumps(report), args.out)
    return 0 if report["pass"] else 1


def cmd_coeffs(args):
    from . import serialize
    from .kernel_asymptotics import boundary_coefficient, interior_coefficient

    params = LameParameters(args.tau, args.mu)
    bcs = (
        [BoundaryCondition.parse(args.bc)]
        if args.bc != "both"
        else [BoundaryCondition.DIRICHLET, BoundaryCondition.NEUMANN]
    )
    report = {
        "schema_version": 1,
        "kind": "trace_coefficients",
        "n": args.n,
        "tau": args.tau,
        "mu": args.mu,
        "a0_density": interior_coefficient(params, args.n),
        "a1_density": {
            bc.value: boundary_coefficient(params, args.n, bc) for bc in bcs
        },
    }
    _emit(serialize.dumps(report), args.out)
    return 0


def cmd_mesh(args):
    from . import serialize
    from .mesh_geometry import generate_mesh, refine, validate_mesh

    if args.validate:
        with open(args.validate) as fh:
            mesh = serialize.read_mesh_text(fh.read())
        sys.stdout.write(
            f"valid mesh: {mesh.node_count} nodes, {mesh.triangle_count} "
            f"triangles, {mesh.boundary_edges.shape[0]} boundary edges\n"
        )
        return 0
    domain = _parse_domain(args.domain)
    mesh = generate_mesh(domain, args.h)
    for _ in range(args.refine):
        mesh = refine(mesh)
    validate_mesh(mesh)
    _emit(serialize.write_mesh_text(mesh), args.out)
    return 0


def cmd_eigs(args):
    from . import serialize
    from .fem_eigensolver import convergence_study, solve_domain

    domain = _parse_domain(args.domain)
    params = LameParameters(args.tau, args.mu)
    bc = BoundaryCondition.parse(args.bc)
    target_h = args.h if args.h is not None else domain.diameter / 8.0
    if args.levels >= 3:
        study = convergence_study(
            domain, params, bc, args.k, levels=args.levels,
            target_h0=target_h, seed=args.seed,
        )
        spectrum = study.extrapolated
    else:
        spectrum = solve_domain(
            domain, params, bc, args.k, target_h=target_h, seed=args.seed
        )
    _emit(serialize.dumps(serialize.spectrum_to_dict(spectrum)), args.out)
    return 0


def cmd_oracle_interval(args):
    from . import serialize
    from .analytic_oracles import interval_spectrum_1d

    spectrum = interval_spectrum_1d(
        LameParameters(args.tau, args.mu),
        args.L,
        BoundaryCondition.parse(args.bc),
        args.K,
    )
    _emit(serialize.dumps(serialize.spectrum_to_dict(spectrum)), args.out)
    return 0


def cmd_oracle_disk(args):
    from . import serialize
    from .analytic_oracles import disk_dirichlet_spectrum

    spectrum = disk_dirichlet_spectrum(
        LameParameters(args.tau, args.mu),
        args.R,
        args.lambda_max,
        m_max=args.m_max,
    )
    _emit(serialize.dumps(serialize.spectrum_to_dict(spectrum)), args.out)
    return 0


def cmd_trace_fit(args):
    from . import serialize
    from .trace_fitter import (
        fit_asymptotics,
        geometric_times,
        heat_trace_partial,
        select_window,
    )

    spectrum = _load_spectrum(args.spectrum)
    n = spectrum.dim
    t_min, t_max = select_window(spectrum, n, tol=args.tol)
    samples = [
        heat_trace_partial(spectrum, float(t))
        for t in geometric_times(t_min, t_max, args.samples)
    ]
    fit = fit_asymptotics(samples, n)
    report = {"schema_version": 1, "kind": "trace_fit", "dim": n}
    report.update(serialize.fit_to_dict(fit))
    _emit(serialize.dumps(report), args.out)
    if args.svg:
        _write_fit_svg(args.svg, spectrum, fit)
    return 0


def cmd_recover(args):
    from . import serialize
    from .trace_fitter import end_to_end_recover

    spectrum = _load_spectrum(args.spectrum)
    if args.truth:
        import dataclasses

        with open(args.truth) as fh:
            domain = serialize.domain_from_dict(serialize.loads(fh.read(), "domain"))
        spectrum = dataclasses.replace(spectrum, domain_meta=domain)
    rec = end_to_end_recover(
        spectrum, spectrum.params, spectrum.dim, spectrum.bc, tol=args.tol
    )
    _emit(serialize.dumps(serialize.recovered_to_dict(rec)), args.out)
    if args.svg:
        _write_fit_svg(args.svg, spectrum, rec.fit)
    return 0


def cmd_weyl(args):
    from .kernel_asymptotics import weyl_count_prediction

    spectrum = _load_spectrum(args.spectrum)
    lines = ["eta,count_empirical,count_predicted,ratio"]
    eig = spectrum.eigenvalues
    idx = np.unique(np.linspace(9, spectrum.count - 1, args.rows).astype(int))
    for i in idx:
        eta = float(eig[i])
        emp = spectrum.counting_function(eta)
        pred = weyl_count_prediction(spectrum.params, spectrum.dim, args.volume, eta)
        lines.append(f"{eta:.17g},{emp},{pred:.17g},{emp / pred:.17g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_audit_ball(args):
    from . import serialize
    from .trace_fitter import end_to_end_recover

    spectrum = _load_spectrum(args.spectrum)
    rec = end_to_end_recover(
        spectrum, spectrum.params, spectrum.dim, spectrum.bc, audit_tol=args.tol
    )
    verdict = {
        "schema_version": 1,
        "kind": "ball_audit",
        "is_ball_within_tol": rec.audit.is_ball_within_tol,
        "ratio": rec.audit.ratio,
        "ball_ratio": rec.audit.ball_ratio,
        "excess": rec.audit.excess,
        "tol": rec.audit.tol,
        "excess_over_sigma": rec.audit.excess_over_sigma,
    }
    _emit(serialize.dumps(verdict), None)  # verdict always prints
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elastospec",
        description="spectral geometry of an elastic body: eigenvalues, "
        "heat traces, and hearing volume/boundary-area from the spectrum",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("symbol-check", help="property suite for the symbol calculus")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_symbol_check)

    p = sub.add_parser("coeffs", help="print heat-trace coefficient densities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--bc", default="both", choices=["dirichlet", "neumann", "both"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("mesh", help="emit or validate a mesh file")
    p.add_argument("--domain")
    p.add_argument("--h", type=float)
    p.add_argument("--refine", type=int, default=0)
    p.add_argument("--validate", metavar="FILE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("eigs", help="finite-element eigenvalues of a 2-D domain")
    p.add_argument("--domain", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--bc", required=True, choices=["dirichlet", "neumann"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--h", type=float)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eigs)

    p = sub.add_parser("oracle-interval", help="exact 1-D interval spectrum")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--bc", required=True, choices=["dirichlet", "neumann"])
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_interval)

    p = sub.add_parser("oracle-disk", help="clamped-disk Bessel-determinant spectrum")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--m-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_disk)

    p = sub.add_parser("trace-fit", help="fit the two-term trace model")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_trace_fit)

    p = sub.add_parser("recover", help="hear volume and boundary area")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--truth", help="domain JSON with ground-truth geometry")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("weyl", help="tabulate counting function vs prediction")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--volume", type=float, required=True)
    p.add_argument("--rows", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("audit-ball", help="ball-rigidity verdict for a spectrum")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--tol", type=float, default=0.08)
    p.set_defaults(func=cmd_audit_ball)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except ElastospecError as exc:
        error = {"stage": exc.stage, "message": str(exc), "hint": exc.hint}
        sys.stderr.write(json.dumps(error) + "\n")
        return 1
    except (OSError, ValueError) as exc:
        error = {"stage": "cli", "message": str(exc), "hint": "check inputs"}
        sys.stderr.write(json.dumps(error) + "\n")
        return 1
    except Exception as exc:  # internal failure
        error = {"stage": "internal", "message": f"{type(exc).__name__}: {exc}", "hint": ""}
        sys.stderr.write(json.dumps(error) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
