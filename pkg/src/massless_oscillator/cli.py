"""Command-line front end.

Every subcommand writes one table, either as CSV (header row, ``.17g``
floats) or as JSON ``{"meta": {...}, "data": [...]}``.  Nothing time- or
host-dependent is written, so identical arguments give identical bytes.

Exit codes: 0 success, 2 bad input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classical import (
    Invariants2D,
    OscillatorParams,
    PhaseState,
    apsidal_angle,
    classify,
    invariants_of,
    periodicity,
    radial_period,
    segment_motion,
    segment_period,
    simulate,
    trajectory_angle,
    turning_radii,
)
from .errors import ConvergenceError, DomainError, EvaluationError, StiffnessError, UnsupportedError
from .quantum import (
    density_compare,
    energy_level,
    expectations,
    momentum_wavefunction,
    position_wavefunction,
    turning_radius,
)

SCHEMA = "1"
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse already exits with 2; keep it but route through our handler
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


# ---------------------------------------------------------------- table type


class Table:
    def __init__(self, columns, rows, extra_meta=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.extra_meta = extra_meta or {}


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")  # no "-0"
    return "" if v is None else str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def render(table: Table, fmt: str, meta: dict) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    data = [dict(zip(table.columns, row)) for row in table.rows]
    doc = {"meta": {**meta, **table.extra_meta}, "data": data}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False, allow_nan=False) + "\n"


def gnuplot_script(table: Table, data_path: Path, command: str) -> str:
    x = table.columns[0]
    numeric = [
        i for i, _ in enumerate(table.columns[1:], start=2)
        if all(isinstance(r[i - 1], (int, float, np.integer, np.floating)) for r in table.rows)
    ]
    lines = [
        f"# {command}: columns {', '.join(table.columns)}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
    ]
    if command in ("orbit", "trajectory"):
        if command == "orbit":
            lines.append("set size ratio -1")
            lines.append(f"plot '{data_path.name}' using 2:3 with lines title 'orbit'")
        else:
            lines.append("set size ratio -1")
            lines.append(f"plot '{data_path.name}' using 4:5 with lines title 'trajectory'")
    else:
        series = ", ".join(f"'{data_path.name}' using 1:{i} with lines" for i in numeric[:4])
        lines.append(f"plot {series}" if series else "# no numeric columns")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands


def _params(args) -> OscillatorParams:
    explicit = [v for v in (args.c, args.kappa2, args.hbar) if v is not None]
    if args.natural:
        if explicit:
            raise InputError("--natural cannot be combined with --c/--kappa2/--hbar")
        return OscillatorParams()
    return OscillatorParams(
        c=1.0 if args.c is None else args.c,
        kappa2=1.0 if args.kappa2 is None else args.kappa2,
        hbar=1.0 if args.hbar is None else args.hbar,
    )


def _invariants(args, params) -> Invariants2D:
    if args.x0 is not None or args.p0 is not None:
        if args.x0 is None or args.p0 is None:
            raise InputError("--x0 and --p0 must be given together")
        if args.E is not None or args.J is not None:
            raise InputError("give either a phase state or --E/--J, not both")
        return invariants_of(PhaseState(np.array(args.x0), np.array(args.p0)), params)
    if args.E is None or args.J is None:
        raise InputError("need --x0/--p0 or --E/--J")
    return Invariants2D(args.E, args.J)


def cmd_classify(args, params, tol):
    inv = _invariants(args, params)
    mc = classify(inv, params, tol=tol)
    row = [inv.E, inv.J, mc.lam, mc.tag.name.lower(), mc.r_min, mc.r_max, mc.r_minus]
    return Table(["E", "J", "lambda", "motion", "r_min", "r_max", "r_minus"], [row])


def cmd_orbit(args, params, tol):
    x0, p0 = np.array(args.x0), np.array(args.p0)
    state = PhaseState(x0, p0)
    inv = invariants_of(state, params)
    t_end = args.t_end
    if t_end is None:
        t_end = args.periods * radial_period(inv, params)
    if not t_end > 0:
        raise InputError("integration time must be positive")
    orbit = simulate(state, params, (0.0, t_end), rel_tol=tol, abs_tol=tol * 1e-2)
    t = np.linspace(0.0, t_end, args.samples)
    y = np.atleast_2d(orbit.sample(t))
    x, p = y[:, :2], y[:, 2:4]
    pn = np.hypot(p[:, 0], p[:, 1])
    E = params.c * pn + 0.5 * params.kappa2 * np.sum(x * x, axis=1)
    J = x[:, 0] * p[:, 1] - x[:, 1] * p[:, 0]
    rows = zip(
        t, x[:, 0], x[:, 1], p[:, 0], p[:, 1], np.hypot(x[:, 0], x[:, 1]), pn,
        (E - inv.E) / abs(inv.E), (J - inv.J) / abs(inv.J),
    )
    diag = dict(orbit.diagnostics)
    lam = classify(inv, params)
    diag.update(E=inv.E, J=inv.J, r_min=lam.r_min, r_max=lam.r_max, t_end=t_end)
    return Table(["t", "x1", "x2", "p1", "p2", "r", "p_norm", "E_drift", "J_drift"], rows, {"diagnostics": diag})


def cmd_apsidal(args, params, tol):
    inv = _invariants(args, params)
    dphi = apsidal_angle(inv, params)
    dphi_q = apsidal_angle(inv, params, method="quadrature")
    per = periodicity(dphi, args.max_denominator, tol=args.rational_tol)
    mc = classify(inv, params)
    row = [
        inv.E, inv.J, mc.lam, dphi, dphi_q, dphi / math.pi,
        None if per is None else per[0], None if per is None else per[1],
        radial_period(inv, params),
    ]
    return Table(["E", "J", "lambda", "delta_phi", "delta_phi_quadrature", "ratio_to_pi", "m", "n", "T_r"], [row])


def cmd_trajectory(args, params, tol):
    inv = _invariants(args, params)
    r_min, r_max, _ = turning_radii(inv, params)
    r = np.linspace(r_min, r_max, args.points)
    method = "quadrature" if args.quadrature else "elliptic"
    phi = trajectory_angle(r, inv, params, anchor=args.anchor, phi0=args.phi0, method=method)
    rows = zip(r, phi, phi - args.phi0, r * np.cos(phi), r * np.sin(phi))
    return Table(["r", "phi", "delta_phi", "x1", "x2"], rows)


def cmd_segment(args, params, tol):
    if not args.rmax > 0:
        raise InputError("--rmax must be positive")
    E = 0.5 * params.kappa2 * args.rmax**2
    T = segment_period(E, params)
    t = np.linspace(0.0, args.periods * T, args.samples)
    x, p = segment_motion(t, E, params)
    return Table(["t", "x", "p"], zip(t, x, p), {"period": T, "E": E})


def cmd_spectrum(args, params, tol):
    if args.levels < 1:
        raise InputError("--levels must be >= 1")
    rows = []
    for n in range(1, args.levels + 1):
        lv = energy_level(n, params)
        rows.append([n, lv.airy_zero, lv.E, turning_radius(lv.E, params)])
    return Table(["n", "a_n", "E_n", "r_max"], rows)


def cmd_wavefunction(args, params, tol):
    n = args.n
    if args.space == "momentum":
        lv = energy_level(n, params)
        k_hi = args.extent if args.extent else 2.0 * lv.E / params.c
        grid = np.linspace(0.0, k_hi, args.points)
        wf = momentum_wavefunction(n, params, grid)
        dens = 4.0 * math.pi * grid**2 * wf.values**2
        return Table(["k", "psi", "radial_density"], zip(grid, wf.values, dens),
                     {"normalization_defect": wf.normalization_defect})
    grid = None
    if args.extent:
        grid = np.linspace(args.extent / args.points, args.extent, args.points)
    elif args.points != 400:
        rm = turning_radius(energy_level(n, params).E, params)
        grid = np.linspace(2.0 * rm / args.points, 2.0 * rm, args.points)
    wf = position_wavefunction(n, params, grid, rel_tol=tol)
    dens = 4.0 * math.pi * wf.grid**2 * wf.values**2
    return Table(["r", "psi", "radial_density"], zip(wf.grid, wf.values, dens),
                 {"normalization_defect": wf.normalization_defect})


def cmd_density_compare(args, params, tol):
    levels = args.n or list(range(1, 9))
    if args.profile:
        rows = []
        for n in levels:
            dc = density_compare(n, params, rel_tol=tol)
            for r, q, c in zip(dc.r, dc.rho_quantum, dc.rho_classical):
                rows.append([n, r, q, c])
        return Table(["n", "r", "rho_quantum", "rho_classical"], rows)
    rows = []
    for n in levels:
        dc = density_compare(n, params, rel_tol=tol)
        rows.append([n, dc.E, dc.r_max, dc.l1_distance, dc.cdf_distance, dc.quantum_norm,
                     dc.classical_norm, dc.extras["quantum_mass_beyond_r_max"]])
    return Table(["n", "E_n", "r_max", "l1_distance", "cdf_distance", "quantum_norm", "classical_norm",
                  "mass_beyond_r_max"], rows)


def cmd_virial(args, params, tol):
    if args.levels < 1:
        raise InputError("--levels must be >= 1")
    rows = []
    for n in range(1, args.levels + 1):
        e = expectations(n, params, rel_tol=tol)
        half = 0.5 * turning_radius(e.E, params)
        rows.append([n, e.E, e.kinetic, e.potential, e.potential_direct, e.kinetic / e.E, e.potential / e.E,
                     e.mean_r, half, abs(e.mean_r - half) / e.mean_r, e.mean_r_error])
    return Table(["n", "E_n", "kinetic", "potential", "potential_direct", "kinetic_over_E", "potential_over_E",
                  "mean_r", "half_r_max", "mean_r_rel_dev", "mean_r_error"], rows)


COMMANDS = {
    "classify": (cmd_classify, 1e-9, "motion type and turning radii"),
    "orbit": (cmd_orbit, 1e-10, "integrate Hamilton's equations"),
    "apsidal": (cmd_apsidal, 1e-10, "apsidal angle and closure"),
    "trajectory": (cmd_trajectory, 1e-10, "polar angle along an annulus orbit"),
    "segment": (cmd_segment, 0.0, "exact J = 0 motion"),
    "spectrum": (cmd_spectrum, 0.0, "energy levels"),
    "wavefunction": (cmd_wavefunction, 1e-11, "radial wave function"),
    "density-compare": (cmd_density_compare, 1e-8, "quantum vs classical radial density"),
    "virial": (cmd_virial, 1e-9, "expectation values"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--tol", type=float, default=None,
                   help="relative tolerance of the command's integrator or quadrature (recorded in JSON meta)")
    g.add_argument("--natural", action="store_true", help="c = kappa^2 = hbar = 1")
    g.add_argument("--c", type=float, default=None, help="speed of light [m/s] (default 1)")
    g.add_argument("--kappa2", type=float, default=None, help="spring constant [J/m^2] (default 1)")
    g.add_argument("--hbar", type=float, default=None, help="Planck constant [J s] (default 1)")
    g.add_argument("--output", "-o", type=Path, default=None, help="output file (default stdout)")
    g.add_argument("--gnuplot", action="store_true", help="also write <output>.gp")

    def state_args(p, allow_invariants=True):
        p.add_argument("--x0", type=float, nargs=2, metavar=("X1", "X2"))
        p.add_argument("--p0", type=float, nargs=2, metavar=("P1", "P2"))
        if allow_invariants:
            p.add_argument("--E", type=float)
            p.add_argument("--J", type=float)

    parser = _Parser(prog="massless-oscillator", description="Relativistic massless harmonic oscillator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    ps = {name: sub.add_parser(name, parents=[common], help=h) for name, (_, _, h) in COMMANDS.items()}

    state_args(ps["classify"])
    o = ps["orbit"]
    o.add_argument("--x0", type=float, nargs=2, required=True, metavar=("X1", "X2"))
    o.add_argument("--p0", type=float, nargs=2, required=True, metavar=("P1", "P2"))
    o.add_argument("--t-end", type=float, default=None)
    o.add_argument("--periods", type=float, default=1.0, help="radial periods when --t-end is absent")
    o.add_argument("--samples", type=int, default=2001)
    state_args(ps["apsidal"])
    ps["apsidal"].add_argument("--max-denominator", type=int, default=64)
    ps["apsidal"].add_argument("--rational-tol", type=float, default=1e-6)
    t = ps["trajectory"]
    state_args(t)
    t.add_argument("--points", type=int, default=201)
    t.add_argument("--anchor", choices=("from_rmin", "from_rmax"), default="from_rmin")
    t.add_argument("--phi0", type=float, default=0.0)
    t.add_argument("--quadrature", action="store_true", help="direct quadrature instead of elliptic integrals")
    s = ps["segment"]
    s.add_argument("--rmax", type=float, default=1.0)
    s.add_argument("--periods", type=float, default=1.0)
    s.add_argument("--samples", type=int, default=401)
    ps["spectrum"].add_argument("--levels", type=int, default=10)
    w = ps["wavefunction"]
    w.add_argument("--n", type=int, default=1)
    w.add_argument("--space", choices=("position", "momentum"), default="position")
    w.add_argument("--points", type=int, default=400)
    w.add_argument("--extent", type=float, default=None, help="grid upper end (default 2 r_max or 2E/c)")
    d = ps["density-compare"]
    d.add_argument("--n", type=int, nargs="+", default=None, help="levels (default 1..8)")
    d.add_argument("--profile", action="store_true", help="emit densities on the grid instead of summaries")
    ps["virial"].add_argument("--levels", type=int, default=10)
    return parser


def _check_counts(args):
    for attr in ("samples", "points"):
        v = getattr(args, attr, None)
        if v is not None and v < 2:
            raise InputError(f"--{attr} must be >= 2")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    func, default_tol, _ = COMMANDS[args.command]
    tol = default_tol if args.tol is None else args.tol
    try:
        if args.tol is not None and not (0.0 < args.tol < 1.0):
            raise InputError("--tol must lie in (0, 1)")
        _check_counts(args)
        if args.gnuplot and (args.output is None or args.format != "csv"):
            raise InputError("--gnuplot needs --output and --format csv")
        params = _params(args)
        table = func(args, params, tol)
    except (InputError, DomainError, UnsupportedError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except (ConvergenceError, StiffnessError, EvaluationError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC

    meta = {
        "command": args.command,
        "params": {"c": params.c, "kappa2": params.kappa2, "hbar": params.hbar},
        "tolerances": {"rel_tol": tol},
        "version": {"schema": SCHEMA, "package": __version__},
    }
    text = render(table, args.format, meta)
    if args.output is None:
        stdout.write(text)
    else:
        args.output.write_text(text, encoding="utf-8", newline="\n")
        if args.gnuplot:
            script = args.output.with_suffix(args.output.suffix + ".gp")
            script.write_text(gnuplot_script(table, args.output, args.command), encoding="utf-8")
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
