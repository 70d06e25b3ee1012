"""Command-line front end: ``diffest bound | sweep | csl | montecarlo``.

Exit codes: 0 on success, 2 for configuration errors, 3 when the requested
point lies in a degenerate regime (e.g. pure input state with zero diffusion).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__
from .config import RunConfig, apply_overrides, load_config, parse_scheme
from .csl import SphereSpec, delta_lambda_csl, load_overlay, min_detectable_rate
from .errors import ConfigError, DegenerateRegimeError, DiffestError
from .fisher import (
    Homodyne,
    PrecisionBound,
    heterodyne_crb,
    homodyne_crb,
    optimal_homodyne_angle,
    optimal_homodyne_crb,
    optimal_homodyne_squeeze_angle,
    optimal_qcrb_squeeze_angle,
    qcrb_branch_select,
    qcrb_closed_form,
)
from .gaussian import SqueezedThermalSpec, db_to_r
from .montecarlo import ExperimentRun, saturation_study
from .sld import required_squeezing_db, sld_for_spec

log = logging.getLogger("diffest")

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE = 0, 2, 3
DEGENERATE = "degenerate"
NOT_APPLICABLE = "na"
THREADS_ENV = "DIFFEST_THREADS"


@dataclass(frozen=True)
class SchemeResult:
    bound: PrecisionBound
    spec: SqueezedThermalSpec
    theta: float  # measured quadrature, nan when not a quadrature measurement


def _heterodyne_best_phi(T, r, tau, lt):
    if r == 0:
        return 0.0

    def f(phi):
        return heterodyne_crb(SqueezedThermalSpec(T, r, phi), tau, lt).dimensionless_bound

    grid = np.linspace(0.0, math.pi, 65)[:-1]
    vals = [f(p) for p in grid]
    k = int(np.argmin(vals))
    h = grid[1] - grid[0]
    res = minimize_scalar(f, bounds=(grid[k] - h, grid[k] + h), method="bounded", options={"xatol": 1e-10})
    return res.x


def evaluate_scheme(name: str, T: float, r: float, squeeze_angle, tau: float, lt: float, lsql: float) -> SchemeResult:
    """Bound for one named scheme, choosing the squeezing angle by the config policy.

    With ``squeeze_angle == "optimal"`` each scheme uses its own best
    orientation: the branch rule for the quantum bound, the quadrature-matched
    angle for homodyne schemes and a numeric search for heterodyne.
    """
    scheme = parse_scheme(name)
    fixed = squeeze_angle != "optimal"
    if name == "qcrb":
        if fixed:
            spec = SqueezedThermalSpec(T, r, squeeze_angle)
        else:
            phi, sign = qcrb_branch_select(SqueezedThermalSpec(T, r, 0.0), tau, lt)
            spec = SqueezedThermalSpec(T, sign * r, phi)
        return SchemeResult(qcrb_closed_form(spec, tau, lt, lsql), spec, math.nan)
    if name == "heterodyne":
        phi = squeeze_angle if fixed else _heterodyne_best_phi(T, r, tau, lt)
        spec = SqueezedThermalSpec(T, r, phi)
        return SchemeResult(heterodyne_crb(spec, tau, lt, lsql), spec, math.nan)
    if name == "optimal-homodyne":
        theta = optimal_homodyne_angle(tau)
        if fixed:
            spec = SqueezedThermalSpec(T, r, squeeze_angle)
            return SchemeResult(homodyne_crb(theta, spec, tau, lt, lsql), spec, theta)
        spec = SqueezedThermalSpec(T, abs(r), optimal_homodyne_squeeze_angle(theta, tau))
        return SchemeResult(optimal_homodyne_crb(spec, tau, lt, lsql), spec, theta)
    assert isinstance(scheme, Homodyne)
    theta = scheme.theta
    phi = squeeze_angle if fixed else optimal_homodyne_squeeze_angle(theta, tau)
    spec = SqueezedThermalSpec(T, abs(r) if not fixed else r, phi)
    return SchemeResult(homodyne_crb(theta, spec, tau, lt, lsql), spec, theta)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return n


def _gather(fn, items, threads):
    """Map in parallel but return results in input order."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if not math.isfinite(x):
        return DEGENERATE
    return repr(float(x))


def _header(command: str, cfg: RunConfig) -> str:
    return f"# diffest {__version__}\n# command: {command}\n# config: {cfg.to_json()}\n"


def read_header_config(path_or_text) -> RunConfig:
    """Recover the config echoed into an output file header."""
    text = path_or_text
    if "\n" not in text and os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    for line in text.splitlines():
        if line.startswith("# config: "):
            return RunConfig.from_dict(json.loads(line[len("# config: "):]))
    raise ConfigError("no config line in header")


def _write(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="") as fh:
            fh.write(text)


def _csv(header_text: str, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(header_text)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _point(cfg: RunConfig, lambda_=None, tau=None, squeezing_db=None, r=None):
    sc = cfg.scenario() if lambda_ is None else cfg.scenario(lambda_=lambda_)
    tau = sc.tau if tau is None else tau
    if r is None:
        r = db_to_r(cfg.squeezing if squeezing_db is None else squeezing_db)
    return sc, tau, sc.lambda_ / sc.lambda_sql, r


def bound_report(cfg: RunConfig) -> dict:
    """All bounds, angles and the SLD squeezing at the configured point."""
    sc, tau, lt, r = _point(cfg)
    nu = cfg.nu
    report = {
        "tau": tau,
        "lambda_sql": sc.lambda_sql,
        "lambda_tilde": lt,
        "repetitions": nu,
        "r": r,
        "schemes": {},
        "angles": {},
    }
    for name in cfg.schemes:
        res = evaluate_scheme(name, cfg.thermal_variance, r, cfg.squeeze_angle, tau, lt, sc.lambda_sql)
        report["schemes"][name] = {
            "variance_single_shot": res.bound.variance_bound,
            "std_single_shot": res.bound.std(),
            "std_repeated": res.bound.std(nu),
            "squeeze_angle": res.spec.phi,
            "r": res.spec.r,
            "theta": None if math.isnan(res.theta) else res.theta,
        }
    if tau > 0:
        theta = optimal_homodyne_angle(tau)
        report["angles"] = {
            "qcrb_squeeze_angle": optimal_qcrb_squeeze_angle(tau),
            "optimal_homodyne_angle": theta,
            "optimal_homodyne_squeeze_angle": optimal_homodyne_squeeze_angle(theta, tau),
        }
    try:
        spec = SqueezedThermalSpec(cfg.thermal_variance, r, 0.0)
        if cfg.squeeze_angle == "optimal":
            phi, sign = qcrb_branch_select(spec, tau, lt)
            spec = SqueezedThermalSpec(cfg.thermal_variance, sign * r, phi)
        else:
            spec = SqueezedThermalSpec(cfg.thermal_variance, r, cfg.squeeze_angle)
        _, dec = sld_for_spec(spec, tau, lt)
        report["sld_required_squeezing_db"] = required_squeezing_db(dec)
    except DegenerateRegimeError:
        report["sld_required_squeezing_db"] = None
    return report


def cmd_bound(cfg: RunConfig, args) -> int:
    report = bound_report(cfg)
    if args.json:
        _write(json.dumps({"version": __version__, "config": cfg.to_dict(), "report": report}, indent=2, sort_keys=True) + "\n", args.output)
        return EXIT_OK
    lines = [
        f"tau = {report['tau']:.6g}   lambda_SQL = {report['lambda_sql']:.6g} m^-2 s^-1   "
        f"lambda_tilde = {report['lambda_tilde']:.6g}   nu = {report['repetitions']}",
        f"{'scheme':<18}{'var (1 shot)':>16}{'std (1 shot)':>16}{'std (nu)':>16}{'phi':>10}{'theta':>10}",
    ]
    for name, row in report["schemes"].items():
        theta = "-" if row["theta"] is None else f"{row['theta']:.4f}"
        lines.append(
            f"{name:<18}{row['variance_single_shot']:>16.6g}{row['std_single_shot']:>16.6g}"
            f"{row['std_repeated']:>16.6g}{row['squeeze_angle']:>10.4f}{theta:>10}"
        )
    for key, value in report["angles"].items():
        lines.append(f"{key} = {value:.8g} rad")
    sld = report["sld_required_squeezing_db"]
    lines.append("SLD required squeezing: " + ("undefined (pure state)" if sld is None else f"{sld:.2f} dB"))
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _safe(fn):
    try:
        return fn()
    except DegenerateRegimeError:
        return None


def sweep_rows(cfg: RunConfig, threads: int = 1):
    grid = cfg.sweep
    if grid is None:
        raise ConfigError("sweep requires a 'sweep' grid in the config")
    if grid.variable == "r_c":
        raise ConfigError("r_c grids belong to the csl command")
    columns = [grid.variable, "tau", "lambda_tilde", "r"]
    for name in cfg.schemes:
        columns += [f"std_{name}", f"phi_{name}", f"theta_{name}"]

    def row(value):
        kw = {"lambda": "lambda_", "tau": "tau", "squeezing": "squeezing_db", "r": "r"}[grid.variable]
        sc, tau, lt, r = _point(cfg, **{kw: value})
        out = [value, tau, lt, r]
        for name in cfg.schemes:
            res = _safe(lambda: evaluate_scheme(name, cfg.thermal_variance, r, cfg.squeeze_angle, tau, lt, sc.lambda_sql))
            if res is None:
                out += [DEGENERATE] * 3
            else:
                out += [res.bound.std(cfg.nu), res.spec.phi, NOT_APPLICABLE if math.isnan(res.theta) else res.theta]
        return out

    return columns, _gather(row, list(grid.values()), threads)


def cmd_sweep(cfg: RunConfig, args) -> int:
    columns, rows = sweep_rows(cfg, _threads(args))
    _write(_csv(_header("sweep", cfg), columns, rows), args.output)
    return EXIT_OK


def _overlay_column(data, r_c):
    x, y = np.log(data[:, 0]), np.log(data[:, 1])
    order = np.argsort(x)
    x, y = x[order], y[order]
    out = []
    for rc in r_c:
        lx = math.log(rc)
        out.append(math.exp(np.interp(lx, x, y)) if x[0] <= lx <= x[-1] else NOT_APPLICABLE)
    return out


def csl_rows(cfg: RunConfig, threads: int = 1):
    grid = cfg.sweep
    if grid is None:
        r_c = np.logspace(-9, -4, 51)
    elif grid.variable != "r_c":
        raise ConfigError("the csl command sweeps r_c")
    else:
        r_c = grid.values()
    sc, tau, _, r = _point(cfg, lambda_=0.0)
    sphere = SphereSpec(cfg.sphere_mass or cfg.mass, cfg.sphere_radius, cfg.m0)
    nu = cfg.nu
    columns = ["r_c"] + [f"lambda_min_{name}" for name in cfg.schemes]

    def curve(name):
        res = _safe(lambda: evaluate_scheme(name, cfg.thermal_variance, r, cfg.squeeze_angle, tau, 0.0, sc.lambda_sql))
        if res is None:
            return [DEGENERATE] * len(r_c)
        std0 = res.bound.std()
        return [min_detectable_rate(delta_lambda_csl(std0, rc, sphere), nu) for rc in r_c]

    curves = _gather(curve, list(cfg.schemes), threads)
    for path in cfg.overlays:
        try:
            data = load_overlay(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"overlay {path}: {exc}") from None
        columns.append("overlay_" + os.path.splitext(os.path.basename(path))[0])
        curves.append(_overlay_column(data, r_c))
    rows = [[rc] + [c[i] for c in curves] for i, rc in enumerate(r_c)]
    return columns, rows


def cmd_csl(cfg: RunConfig, args) -> int:
    columns, rows = csl_rows(cfg, _threads(args))
    _write(_csv(_header("csl", cfg), columns, rows), args.output)
    return EXIT_OK


def montecarlo_report(cfg: RunConfig, threads: int = 1):
    if cfg.seed is None:
        raise ConfigError("montecarlo needs an explicit seed (config 'seed' or --seed)")
    if len(cfg.schemes) != 1:
        raise ConfigError("montecarlo takes exactly one scheme")
    name = cfg.schemes[0]
    if name == "qcrb":
        raise ConfigError("the quantum bound has no sampling model; choose a homodyne or heterodyne scheme")
    sc, tau, lt, r = _point(cfg)
    res = evaluate_scheme(name, cfg.thermal_variance, r, cfg.squeeze_angle, tau, lt, sc.lambda_sql)
    scheme = Homodyne(res.theta) if name == "optimal-homodyne" else parse_scheme(name)
    if cfg.nu < 2:
        raise ConfigError("montecarlo needs repetitions >= 2")
    run = ExperimentRun(scheme, res.spec, tau, lt, cfg.nu, cfg.seed, cfg.chunk_size, cfg.clamp)
    try:
        return saturation_study(run, cfg.replicates, threads)
    except DegenerateRegimeError as exc:
        raise ConfigError(f"scheme {name!r} is not identifiable here: {exc}") from None


def cmd_montecarlo(cfg: RunConfig, args) -> int:
    report = montecarlo_report(cfg, _threads(args))
    d = report.as_dict()
    _write(_csv(_header("montecarlo", cfg), list(d), [list(d.values())]), args.output)
    return EXIT_OK


COMMANDS = {"bound": cmd_bound, "sweep": cmd_sweep, "csl": cmd_csl, "montecarlo": cmd_montecarlo}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffest", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("bound", "bounds, optimal angles and SLD squeezing at one point"),
        ("sweep", "bounds over a grid in lambda, tau or squeezing (CSV)"),
        ("csl", "minimum detectable CSL rate over r_C (CSV)"),
        ("montecarlo", "maximum-likelihood saturation study (CSV)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", help="JSON config file")
        p.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE", help="override a config entry")
        p.add_argument("-o", "--output", help="output file (default stdout)")
        p.add_argument("--seed", type=int, help="random seed (montecarlo)")
        p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
        p.add_argument("--table1-literal", action="store_true", help="use the tabulated tau and lambda_SQL")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "bound":
            p.add_argument("--json", action="store_true", help="structured output")
    return parser


def config_from_args(args) -> RunConfig:
    d = load_config(args.config) if args.config else {}
    d = apply_overrides(d, args.set)
    if args.seed is not None:
        d["seed"] = args.seed
    if args.table1_literal:
        d["table1_literal"] = True
    return RunConfig.from_dict(d)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = config_from_args(args)
        log.info("config: %s", cfg.to_json())
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateRegimeError as exc:
        print(f"degenerate regime: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DiffestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
