"""Experiment runner: parses domain/config files, dispatches, emits CSV tables and verdicts.

Every inequality check prints one machine-parseable line

    VERDICT <name> <PASS|FAIL> measured=<v> bound=<b> ratio=<r>

and the process exits 0 iff every requested check passed.  Output files are
written atomically into --out (or $GRIDHARM_OUT, default the working
directory).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import cylinder as cyl
from . import dirichlet, montecarlo, serialize, spectral, strip
from .lattice import DomainError, Mesh, build_box_domain
from .operators import GridFunction
from .serialize import FormatError


class _Verdicts:
    def __init__(self) -> None:
        self.all_pass = True

    def add(self, name: str, passed: bool, measured: float, bound: float) -> None:
        ratio = measured / bound if bound != 0 else math.inf
        status = "PASS" if passed else "FAIL"
        print(f"VERDICT {name} {status} measured={measured!r} bound={bound!r} ratio={ratio!r}")
        self.all_pass = self.all_pass and passed

    def status(self) -> int:
        return 0 if self.all_pass else 1


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _strip_data_from_files(args) -> strip.StripBoundaryData:
    bottom = serialize.read_point_values_csv(args.bottom)
    top = serialize.read_point_values_csv(args.top)
    dims = {len(p) for p in bottom} | {len(p) for p in top}
    if len(dims) > 1:
        raise FormatError(f"{args.bottom}, {args.top}: inconsistent coordinate dimensions {sorted(dims)}")
    n = dims.pop() if dims else 1
    return strip.StripBoundaryData.create(args.denominator, n, bottom, top)


# ------------------------------------------------------------------- commands


def cmd_solve(args) -> int:
    domain = serialize.realize_domain(serialize.read_domain_spec(args.domain), args.domain)
    bvals = serialize.read_point_values_csv(args.boundary)
    u = dirichlet.solve(domain, bvals)
    serialize.write_grid_function_csv(_out_path(args, "solution.csv"), u)
    res = dirichlet.residual(u)
    tol = dirichlet.RESIDUAL_TOL_FACTOR * domain.mesh.inv_delta_sq * float(np.abs(u.values).max())
    v = _Verdicts()
    v.add("solve_residual", res <= tol, res, tol)
    return v.status()


def cmd_eig(args) -> int:
    domain = serialize.realize_domain(serialize.read_domain_spec(args.domain), args.domain)
    spectrum = spectral.dirichlet_spectrum(domain)
    rows = [(k + 1, lam) for k, lam in enumerate(spectrum.eigenvalues)]
    serialize.write_table_csv(_out_path(args, "eigenvalues.csv"), ["k", "lambda"], rows)
    if args.vectors:
        for k in range(1, spectrum.size + 1):
            serialize.write_grid_function_csv(
                _out_path(args, f"eigenfunction_{k:04d}.csv"), spectrum.eigenfunction(k)
            )
    print(f"wrote {spectrum.size} eigenvalues for {domain!r}")
    return 0


def cmd_strip(args) -> int:
    data = _strip_data_from_files(args)
    sol = strip.solve_strip(data, args.quad, args.window)
    for k in range(sol.L + 1):
        serialize.write_point_values_csv(
            _out_path(args, f"strip_layer_{k:02d}.csv"), sol.layer_map(k), sol.n
        )
    v = _Verdicts()
    M = sol.M
    ms = [strip.three_line_m(sol, k) for k in range(M + 1)]
    rows = []
    worst_ratio = 0.0
    for k, mk in enumerate(ms):
        bound = strip.three_line_bound(ms[0], ms[M], k, M)
        ratio = mk / bound if bound > 0 else (0.0 if mk == 0 else math.inf)
        worst_ratio = max(worst_ratio, ratio)
        rows.append((k, mk, bound, ratio))
    serialize.write_table_csv(_out_path(args, "strip_mtable.csv"), ["k", "m", "bound", "ratio"], rows)
    v.add("three_line_ratio", worst_ratio <= 1.0 + 1e-9, worst_ratio, 1.0)

    total = data.bottom_norm_sq + data.top_norm_sq
    worst_layer = max(strip.layer_parseval_sq_norm(sol, k) for k in range(sol.L + 1))
    v.add("tempered_layer_norm", worst_layer <= total + 1e-9, worst_layer, total)
    print(f"quadrature points per axis: {sol.quad_points}; window radius: {sol.window_radius}")
    return v.status()


def cmd_measure(args) -> int:
    spec = serialize.realize_cylinder(serialize.read_domain_spec(args.spec), args.spec)
    expansion, g = cyl.harmonic_measure(spec)
    direct = cyl.solve_measure_directly(spec)
    diff = float(np.abs(g.values - direct.values).max())
    inv_cosh = cyl.cosh_ratio(expansion.a, 0.0, expansion.N)
    rows = [
        (k + 1, spec.spectrum.eigenvalues[k], expansion.a[k], expansion.d[k], abs(expansion.d[k]) * inv_cosh[k])
        for k in range(spec.K)
    ]
    serialize.write_table_csv(
        _out_path(args, "measure.csv"), ["k", "lambda", "a", "d", "contribution"], rows
    )
    serialize.write_grid_function_csv(_out_path(args, "measure_values.csv"), g)
    v = _Verdicts()
    v.add("measure_spectral_vs_direct", diff <= args.tol, diff, args.tol)
    v.add("measure_range", 0.0 <= float(g.values.min()) + 1e-9 and float(g.values.max()) <= 1.0 + 1e-9, float(g.values.max()), 1.0)
    return v.status()


def cmd_pl(args) -> int:
    spec = serialize.realize_cylinder(serialize.read_domain_spec(args.spec), args.spec)
    v = _Verdicts()

    u1 = cyl.harmonic_basis(spec, 1, "even")
    scaled = GridFunction(u1.domain, u1.values * math.sqrt(spec.K))  # amplitude A = 1
    rep = cyl.verify_pl(spec, scaled)
    v.add("pl_first_mode", rep.passed, rep.max_value, rep.bound_exact)

    _, g = cyl.harmonic_measure(spec)
    rep_g = cyl.verify_pl(spec, g)
    v.add("pl_harmonic_measure", rep_g.passed, rep_g.max_value, rep_g.bound_exact)

    report = cyl.pl_constant_partition_report(spec, args.threshold)
    rows = [(s.l, s.count, s.cube_count) for s in report.shells]
    serialize.write_table_csv(_out_path(args, "pl_shells.csv"), ["l", "count", "cube_count"], rows)
    worst = max((s.count / s.cube_count for s in report.shells if s.cube_count), default=0.0)
    v.add("pl_shell_counts", report.shells_bounded, worst, 1.0)
    print(
        f"partition: |I1|={report.i1_count} |I2|={report.i2_count} "
        f"i2_tail={report.i2_tail!r} mode_sum={report.mode_sum!r} "
        f"measured_constant={report.measured_constant!r}"
    )
    return v.status()


def cmd_stability(args) -> int:
    spec = serialize.realize_cylinder(serialize.read_domain_spec(args.spec), args.spec)
    rng = np.random.default_rng(args.seed)
    wall_pts = [spec.domain.points[i] for i in spec.wall_indices]
    cap_pts = [spec.domain.points[i] for i in spec.cap_indices]
    rows = []
    violations = 0
    worst_margin = math.inf
    for trial in range(args.trials):
        f = rng.uniform(-1.0, 1.0, size=len(wall_pts))
        caps = rng.uniform(-args.cap_bound, args.cap_bound, size=len(cap_pts))
        bvals = {p: float(val) for p, val in zip(wall_pts, f)}
        bvals.update({p: float(val) for p, val in zip(cap_pts, caps)})
        h = dirichlet.solve(spec.domain, bvals)
        measured = float(np.abs(h.values[spec.mid_indices]).max())
        bound = cyl.stability_bound(spec, bvals, args.cap_bound)
        ok = measured <= bound
        violations += 0 if ok else 1
        worst_margin = min(worst_margin, bound - measured)
        rows.append((trial, float(np.abs(f).max()), measured, bound, bound - measured))
    serialize.write_table_csv(
        _out_path(args, "stability.csv"), ["trial", "fmax", "measured", "bound", "margin"], rows
    )
    v = _Verdicts()
    v.add("stability_violations", violations == 0, float(violations), 1.0)
    print(f"worst margin over {args.trials} trials: {worst_margin!r}")
    return v.status()


def cmd_mc(args) -> int:
    spec_dict = serialize.read_domain_spec(args.domain)
    domain = serialize.realize_domain(spec_dict, args.domain)
    start = tuple(int(c) for c in args.start.split(","))
    if args.target in ("caps", "wall"):
        if spec_dict["kind"] != "cylinder":
            raise FormatError(f"{args.domain}: target '{args.target}' needs a cylinder spec")
        cspec = serialize.realize_cylinder(spec_dict, args.domain)
        idx = cspec.cap_indices if args.target == "caps" else cspec.wall_indices
        target = [cspec.domain.points[i] for i in idx]
    elif args.target == "all":
        target = list(domain.boundary)
    else:
        target = list(serialize.read_point_values_csv(args.target))
    cfg = montecarlo.WalkConfig(seed=args.seed, samples=args.samples, max_steps=args.max_steps)
    est = montecarlo.estimate_exit_probability(domain, start, target, cfg)
    serialize.write_table_csv(
        _out_path(args, "mc.csv"),
        ["estimate", "stderr", "stop_fraction", "hits", "stopped", "samples"],
        [(est.estimate, est.stderr, est.stop_fraction, est.hits, est.stopped, est.samples)],
    )
    print(
        f"estimate={est.estimate!r} stderr={est.stderr!r} stop_fraction={est.stop_fraction!r}"
    )
    v = _Verdicts()
    v.add("mc_stop_fraction", est.stop_fraction < 1e-4, est.stop_fraction, 1e-4)
    return v.status()


# --------------------------------------------------------------------- sweeps


def _sweep_measure_decay(cfg: dict, args, v: _Verdicts) -> list[tuple]:
    template = cfg.get("base", {"kind": "box", "dimension": 1, "side_lengths": [1]})
    constant = float(cfg.get("constant", 3.0))
    rows = []
    for denom in cfg.get("mesh_denominators", []):
        base_spec = dict(template, mesh_denominator=int(denom))
        base = serialize.realize_domain(base_spec, "<sweep config: base>")
        spectrum = spectral.dirichlet_spectrum(base)
        for n_units in cfg.get("half_length_units", []):
            spec = cyl.CylinderSpec(base, spectrum, int(n_units) * int(denom))
            a1 = float(spec.rates[0])
            g0max = float(cyl.measure_mid_values(spec).max())
            measured = g0max * math.exp(a1 * spec.N)
            passed = measured <= constant
            v.add(f"measure_decay_d{denom}_N{n_units}", passed, measured, constant)
            rows.append((denom, n_units, a1, g0max, measured, constant, passed))
    return rows


def _sweep_rate_refinement(cfg: dict, args, v: _Verdicts) -> list[tuple]:
    min_improvement = float(cfg.get("min_improvement", 3.0))
    target = math.pi
    rows = []
    prev_err = None
    for denom in cfg.get("mesh_denominators", []):
        mesh = Mesh(int(denom), 1)
        spectrum = spectral.dirichlet_spectrum(build_box_domain(mesh, (1,)))
        a1 = spectral.a_of_lambda(float(spectrum.eigenvalues[0]), mesh).a
        err = abs(a1 - target)
        improvement = prev_err / err if prev_err is not None else math.inf
        passed = improvement >= min_improvement
        bound = err if prev_err is None else prev_err / min_improvement
        v.add(f"rate_refinement_d{denom}", passed, err, bound)
        rows.append((denom, a1, err, improvement, passed))
        prev_err = err
    return rows


def _sweep_strip_three_line(cfg: dict, args, v: _Verdicts) -> list[tuple]:
    rng = np.random.default_rng(int(cfg.get("seed", args.seed)))
    radius = int(cfg.get("support_radius", 2))
    rows = []
    for denom in cfg.get("mesh_denominators", []):
        for inst in range(int(cfg.get("instances", 3))):
            offs = range(-radius, radius + 1)
            data = strip.StripBoundaryData.create(
                int(denom),
                1,
                {(j,): rng.uniform(-1, 1) for j in offs},
                {(j,): rng.uniform(-1, 1) for j in offs},
            )
            sol = strip.solve_strip(data, window_radius=radius + 8 * data.L)
            M = sol.M
            ms = [strip.three_line_m(sol, k) for k in range(M + 1)]
            worst = max(
                (ms[k] / strip.three_line_bound(ms[0], ms[M], k, M) for k in range(M + 1)),
                default=0.0,
            )
            passed = worst <= 1.0 + 1e-9
            v.add(f"three_line_d{denom}_i{inst}", passed, worst, 1.0)
            rows.append((denom, inst, worst, passed))
    return rows


_SWEEPS = {
    "measure_decay": (
        _sweep_measure_decay,
        ["denominator", "half_length_units", "a1", "max_g0", "measured", "bound", "pass"],
    ),
    "rate_refinement": (
        _sweep_rate_refinement,
        ["denominator", "a1", "abs_error", "improvement", "pass"],
    ),
    "strip_three_line": (
        _sweep_strip_three_line,
        ["denominator", "instance", "max_ratio", "pass"],
    ),
}


def cmd_sweep(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{args.config}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise FormatError(f"{args.config}: missing field 'kind'")
    kind = cfg["kind"]
    if kind not in _SWEEPS:
        raise FormatError(f"{args.config}: field 'kind' must be one of {sorted(_SWEEPS)}, got {kind!r}")
    runner, header = _SWEEPS[kind]
    v = _Verdicts()
    rows = runner(cfg, args, v)
    serialize.write_table_csv(_out_path(args, "sweep.csv"), header, rows)
    print(f"sweep '{kind}': {len(rows)} rows")
    return v.status()


# ---------------------------------------------------------------------- parser


def _add_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=os.environ.get("GRIDHARM_OUT", "."), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridharm",
        description="Discrete potential theory on rectangular lattices: solvers, spectra, verifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="direct Dirichlet solve: domain JSON + boundary CSV -> solution CSV")
    p.add_argument("--domain", required=True)
    p.add_argument("--boundary", required=True)
    _add_out(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eig", help="Dirichlet spectrum: domain JSON -> eigenvalue CSV")
    p.add_argument("--domain", required=True)
    p.add_argument("--vectors", action="store_true", help="also write eigenfunction CSVs")
    _add_out(p)
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("strip", help="strip transfer solve: bottom/top layer CSVs -> layer CSVs + m-table")
    p.add_argument("--bottom", required=True)
    p.add_argument("--top", required=True)
    p.add_argument("--denominator", type=int, required=True, help="layer count L = 1/delta")
    p.add_argument("--quad", type=int, default=None, help="starting quadrature points per axis")
    p.add_argument("--window", type=int, default=None, help="reported window radius |j|_inf")
    _add_out(p)
    p.set_defaults(func=cmd_strip)

    p = sub.add_parser("measure", help="cap harmonic measure: cylinder JSON -> expansion CSV + oracle verdict")
    p.add_argument("--spec", required=True)
    p.add_argument("--tol", type=float, default=1e-9, help="spectral-vs-direct tolerance")
    _add_out(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("pl", help="lower-bound checks and mode-partition report for a cylinder")
    p.add_argument("--spec", required=True)
    p.add_argument("--threshold", type=float, default=1.0, help="partition threshold c")
    _add_out(p)
    p.set_defaults(func=cmd_pl)

    p = sub.add_parser("stability", help="randomized conditional-stability trials on a cylinder")
    p.add_argument("--spec", required=True)
    p.add_argument("--cap-bound", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("mc", help="random-walk exit probability estimate")
    p.add_argument("--domain", required=True)
    p.add_argument("--start", required=True, help="comma-separated integer lattice coordinates")
    p.add_argument("--target", required=True, help="caps | wall | all | CSV file of boundary points")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=None)
    _add_out(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("sweep", help="parameter sweeps from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: file not found", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
