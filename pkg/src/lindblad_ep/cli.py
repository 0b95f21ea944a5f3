"""Command-line surface: spectrum queries, curve and grid exports, evolution, self-checks.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
3 integrator failure.  All outputs are deterministic given the flags and the
seed; numeric fields are printed with shortest round-trip decimals.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import (
    DomainError,
    LindbladEPError,
    NearDegenerateError,
    StepSizeError,
)
from .exceptional import (
    D_TILDE_EP3,
    Region,
    classify,
    ep2_eigenvalue,
    ep2_gamma,
    ep3_point,
    scaled_discriminant,
)
from .model import (
    INITIAL_STATES,
    LabParams,
    ModelParams,
    initial_state,
    max_abs,
)
from .dynamics import evolve_rotating, verify_frame_equivalence
from .spectrum import (
    characteristic_residual,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    full_spectrum,
    match_distance,
)
from .superop import build_lindblad
from .verify import CHECK_NAMES, DEFAULT_SEED, run_checks

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_INTEGRATOR = 3


def _fmt(x) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def _cjson(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


def _emit_table(path, fmt, header, rows):
    """Serialise a table as CSV (default) or as a JSON list of row objects."""
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        _write_text(path, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [",".join(header)]
        lines += [",".join(str(cell) for cell in row) for row in rows]
        _write_text(path, "\n".join(lines) + "\n")


def _workers_default() -> int:
    env = os.environ.get("LINDBLAD_EP_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


@dataclass(frozen=True)
class RunConfig:
    """Validated sweep settings shared by the grid-producing commands."""

    subcommand: str
    delta: float = 1.0
    d_min: float = 0.0
    d_max: float = 0.0
    nd: int = 1
    gamma_min: float = 0.0
    gamma_max: float = 0.0
    ngamma: int = 1
    dt: float = 1e-3
    t_max: float = 1.0
    rho0: str = "excited"
    out: str | None = None
    format: str = "csv"
    seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        if self.nd < 1 or self.ngamma < 1:
            raise DomainError("grid counts must be >= 1")
        if self.d_max < self.d_min or self.gamma_max < self.gamma_min:
            raise DomainError("range maxima must be >= minima")
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        if self.workers < 1:
            raise DomainError("worker count must be >= 1")

    def d_grid(self) -> np.ndarray:
        return np.linspace(self.d_min, self.d_max, self.nd)

    def gamma_grid(self) -> np.ndarray:
        return np.linspace(self.gamma_min, self.gamma_max, self.ngamma)


def _model_params(args) -> ModelParams:
    return ModelParams(args.delta, args.d, args.gamma)


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    params = _model_params(args)
    point = classify(params)  # rejects delta = 0 with a scaled-coordinate message
    L = build_lindblad(params)
    scale = max(1.0, max_abs(L))
    closed = eigenvalues_closed_form(params)
    numeric = eigenvalues_numeric(L)

    residual_tol = 1e-9 * scale**4
    residuals = [characteristic_residual(L, z) for z in closed.eigenvalues]
    residuals_num = [characteristic_residual(L, z) for z in numeric]

    degenerate = bool(closed.degenerate_pairs)
    biorth_defect = None
    vector_residual = None
    try:
        spec = full_spectrum(params)
        biorth = spec.left @ spec.right.T
        biorth_defect = float(np.max(np.abs(biorth - np.eye(4))))
        vector_residual = float(spec.residuals.max())
    except NearDegenerateError:
        degenerate = True

    payload = {
        "parameters": {"delta": params.delta, "d": params.d, "gamma": params.gamma},
        "region": point.region.value,
        "ordering": point.ordering,
        "disc": point.disc,
        "eigenvalues_closed": [_cjson(z) for z in closed.eigenvalues],
        "eigenvalues_numeric": [_cjson(z) for z in numeric],
        "char_residuals_closed": residuals,
        "char_residuals_numeric": residuals_num,
        "matched_distance": match_distance(closed.eigenvalues, numeric),
        "degenerate": degenerate,
        "degenerate_pairs": [list(pair) for pair in closed.degenerate_pairs],
        "biorthogonality_defect": biorth_defect,
        "eigenvector_residual": vector_residual,
    }
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    if max(residuals + residuals_num) > residual_tol:
        print(
            f"error: characteristic residual exceeds {residual_tol:.3e}",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


# --------------------------------------------------------------------------
# phase-diagram
# --------------------------------------------------------------------------

def _phase_rows(task) -> list[tuple]:
    """Rows for one drive value; top-level so worker processes can import it."""
    delta, d_t, gammas = task
    rows = []
    for g_t in gammas:
        point = classify(ModelParams(delta, d_t * delta, g_t * delta))
        rows.append(
            (_fmt(d_t), _fmt(g_t), _fmt(point.disc), point.region.value, point.ordering)
        )
    return rows


def cmd_phase_diagram(args) -> int:
    if args.delta <= 0:
        raise DomainError("grid commands use delta > 0 so flags read as d/delta, gamma/delta")
    config = RunConfig(
        subcommand="phase-diagram",
        delta=args.delta,
        d_min=args.d_min,
        d_max=args.d_max,
        nd=args.nd,
        gamma_min=args.gamma_min,
        gamma_max=args.gamma_max,
        ngamma=args.ngamma,
        out=args.out,
        format=args.format,
        workers=args.workers,
    )
    g_grid = tuple(config.gamma_grid())
    tasks = [(config.delta, float(d_t), g_grid) for d_t in config.d_grid()]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_phase_rows, tasks, chunksize=8))
    else:
        chunks = [_phase_rows(task) for task in tasks]
    rows = [row for chunk in chunks for row in chunk]
    header = ("d_tilde", "gamma_tilde", "disc", "region", "ordering")
    _emit_table(config.out, config.format, header, rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# ep-curve
# --------------------------------------------------------------------------

def cmd_ep_curve(args) -> int:
    config = RunConfig(
        subcommand="ep-curve",
        d_min=args.d_min,
        d_max=args.d_max,
        nd=args.nd,
        out=args.out,
        format=args.format,
    )
    if config.d_min < D_TILDE_EP3:
        raise DomainError(
            f"curves exist only for d_tilde >= 2*sqrt(2) = {D_TILDE_EP3!r}; "
            f"requested range starts at {config.d_min}"
        )
    header = (
        "d_tilde",
        "gamma_minus",
        "gamma_plus",
        "im_z_minus",
        "im_z_plus",
        "disc_minus",
        "disc_plus",
    )
    rows = []
    worst_resid = 0.0
    for d_t in config.d_grid():
        d_t = float(d_t)
        gm, gp = ep2_gamma(d_t)
        zm = ep2_eigenvalue(d_t, "minus")
        zp = ep2_eigenvalue(d_t, "plus")
        rm = abs(scaled_discriminant(ModelParams(1.0, d_t, gm)))
        rp = abs(scaled_discriminant(ModelParams(1.0, d_t, gp)))
        worst_resid = max(worst_resid, rm, rp)
        rows.append(
            (_fmt(d_t), _fmt(gm), _fmt(gp), _fmt(zm.imag), _fmt(zp.imag), _fmt(rm), _fmt(rp))
        )
    _emit_table(config.out, config.format, header, rows)
    if worst_resid > 1e-10:
        print(
            f"error: on-curve discriminant residual {worst_resid:.3e} exceeds 1e-10",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


# --------------------------------------------------------------------------
# ep3
# --------------------------------------------------------------------------

def cmd_ep3(args) -> int:
    d_t, g_t, z = ep3_point()
    payload = {"d_tilde": d_t, "gamma_tilde": g_t, "z": _cjson(z)}
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# evolve
# --------------------------------------------------------------------------

def cmd_evolve(args) -> int:
    params = _model_params(args)
    config = RunConfig(
        subcommand="evolve",
        delta=args.delta,
        dt=args.dt,
        t_max=args.t_max,
        rho0=args.rho0,
        out=args.out,
        format=args.format,
    )
    rho0 = initial_state(config.rho0)
    traj = evolve_rotating(params, rho0, config.t_max, config.dt)
    header = ("t", "re_ee", "re_gg", "re_eg", "im_eg", "trace_dev", "dist_eq")
    rows = []
    for t, rho, tdev, dist in zip(traj.times, traj.states, traj.trace_dev, traj.dist_eq):
        rows.append(
            (
                _fmt(t),
                _fmt(rho[0, 0].real),
                _fmt(rho[1, 1].real),
                _fmt(rho[0, 1].real),
                _fmt(rho[0, 1].imag),
                _fmt(tdev),
                _fmt(dist),
            )
        )
    _emit_table(config.out, config.format, header, rows)
    print(f"final_dist_eq = {_fmt(traj.dist_eq[-1])}")
    if float(traj.trace_dev.max()) > 1e-10:
        print(
            f"error: trace deviation {traj.trace_dev.max():.3e} exceeds 1e-10",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


# --------------------------------------------------------------------------
# verify-frame
# --------------------------------------------------------------------------

def cmd_verify_frame(args) -> int:
    params = LabParams(args.Delta, args.omega, args.d, args.gamma)
    rho0 = initial_state(args.rho0)
    dev = verify_frame_equivalence(params, rho0, args.t_max, args.dt)
    coarse = verify_frame_equivalence(params, rho0, args.t_max, args.order_dt)
    fine = verify_frame_equivalence(params, rho0, args.t_max, args.order_dt / 2.0)
    order = math.log2(coarse / fine) if fine > 0 else float("inf")
    payload = {
        "deviation": dev,
        "dt": args.dt,
        "order_dt": args.order_dt,
        "measured_order": order,
        "coarse_deviation": coarse,
        "fine_deviation": fine,
    }
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    if args.tol is not None and dev > args.tol:
        print(f"error: deviation {dev:.3e} exceeds --tol {args.tol}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    names = None
    if args.checks:
        names = [name.strip() for name in args.checks.split(",") if name.strip()]
    results = run_checks(names=names, seed=args.seed, tol_scale=args.tol_scale)
    for result in results:
        print(result.summary())
    if all(r.passed for r in results):
        print(f"verify: all {len(results)} checks passed")
        return EXIT_OK
    failed = [r.name for r in results if not r.passed]
    print(f"verify: FAILED checks: {', '.join(failed)}", file=sys.stderr)
    return EXIT_VERIFY


# --------------------------------------------------------------------------
# parser plumbing
# --------------------------------------------------------------------------

def _add_out_flags(p, default_format="csv"):
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def _add_point_flags(p):
    p.add_argument("--delta", type=float, default=1.0, help="detuning (default 1)")
    p.add_argument("--d", type=float, default=1.0, help="drive amplitude")
    p.add_argument("--gamma", type=float, default=1.0, help="environment coupling")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindblad-ep",
        description="Driven dissipative two-level system: spectra, exceptional points, dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues, residuals and region at one point")
    _add_point_flags(p)
    _add_out_flags(p, default_format="json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("phase-diagram", help="region classification over a (d, gamma) grid")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--d-min", type=float, default=0.0)
    p.add_argument("--d-max", type=float, default=6.0)
    p.add_argument("--nd", type=int, default=300)
    p.add_argument("--gamma-min", type=float, default=0.0)
    p.add_argument("--gamma-max", type=float, default=16.0)
    p.add_argument("--ngamma", type=int, default=300)
    p.add_argument("--workers", type=int, default=_workers_default(),
                   help="parallel row workers (default: LINDBLAD_EP_WORKERS or 1)")
    _add_out_flags(p)
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("ep-curve", help="both coalescence branches over a drive range")
    p.add_argument("--d-min", type=float, default=D_TILDE_EP3)
    p.add_argument("--d-max", type=float, default=10.0)
    p.add_argument("--nd", type=int, default=200)
    _add_out_flags(p)
    p.set_defaults(func=cmd_ep_curve)

    p = sub.add_parser("ep3", help="the triple-point constants")
    _add_out_flags(p, default_format="json")
    p.set_defaults(func=cmd_ep3)

    p = sub.add_parser("evolve", help="integrate one trajectory and export it")
    _add_point_flags(p)
    p.add_argument("--rho0", choices=INITIAL_STATES, default="excited")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    _add_out_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify-frame", help="lab versus rotating frame agreement")
    p.add_argument("--Delta", type=float, default=2.0, help="level splitting")
    p.add_argument("--omega", type=float, default=1.0, help="drive frequency")
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.3)
    p.add_argument("--rho0", choices=INITIAL_STATES, default="excited")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--order-dt", type=float, default=0.04,
                   help="coarse step for the convergence-order measurement")
    p.add_argument("--tol", type=float, default=None,
                   help="fail (exit 1) if the deviation exceeds this")
    _add_out_flags(p, default_format="json")
    p.set_defaults(func=cmd_verify_frame)

    p = sub.add_parser("verify", help="run the acceptance checklist")
    p.add_argument("--checks", default=None,
                   help=f"comma-separated subset of: {', '.join(CHECK_NAMES)}")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tol-scale", type=float, default=1.0,
                   help="multiplier on every tolerance (must be > 0)")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StepSizeError as exc:
        print(f"integrator error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR
    except LindbladEPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


def entry() -> None:
    raise SystemExit(main())
