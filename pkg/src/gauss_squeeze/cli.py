"""Command-line entry point ``gauss-squeeze``.

Exit codes: 0 success, 2 unstable parameters, 3 configuration or validation
error, 4 numerical failure. Every failure prints one line
``error: <code>: <detail>`` on stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .config import apply_overrides, load_point
from .dynamics import evolve_covariance, relaxation_time, steady_covariance
from .errors import ConfigError, GaussSqueezeError, NumericalError, UnstableError
from .metrics import SqueezingReport, reduced_mech_covariance, report_from_covariance, wigner
from .model import Mode
from .spectrum import SpectrumConfig, default_omega_grid, output_spectrum, write_spectrum_csv
from .stability import routh_hurwitz
from .sweep import (
    PRESETS,
    SCENARIO_KEYS,
    default_jobs,
    format_cell,
    load_scenario,
    preset,
    run_sweep,
    scenario_from_dict,
)

EXIT_OK = 0
EXIT_UNSTABLE = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for unstable parameters
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML configuration file ('-' reads stdin)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration key (repeatable, dotted keys for scenarios)")
    common.add_argument("--out", help="write results to this path instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--jobs", type=int, help="worker processes for grids (default: $GAUSS_SQUEEZE_JOBS or CPU count)")
    common.add_argument("--mode", choices=("rwa", "full"), help="drift matrix: rotating-wave or full time dependence")
    common.add_argument("--phi", type=float, default=0.0, help="homodyne phase in radians")
    common.add_argument("--as-printed", action="store_true", help="use the uncorrected reflection coefficient")
    common.add_argument("--theta-pi", type=float, help="squeezing phase in units of pi")

    parser = _Parser(prog="gauss-squeeze", description="Mechanical squeezing in a two-tone driven optomechanical cavity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("steady", parents=[common], help="steady-state squeezing report")
    sub.add_parser("stability", parents=[common], help="Routh-Hurwitz margins and eigenvalue check")

    p = sub.add_parser("evolve", parents=[common], help="covariance trajectory")
    p.add_argument("--t-end", type=float, help="final time (default 50/|spectral abscissa|)")
    p.add_argument("--dt", type=float, help="RK4 step (default 0.1 in RWA, pi/64 in FULL)")
    p.add_argument("--stride", type=float, help="time between stored samples")

    p = sub.add_parser("wigner", parents=[common], help="Wigner function of the mechanics")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--extent", type=float, help="half-width of the grid (default 5 sqrt(max variance))")

    p = sub.add_parser("spectrum", parents=[common], help="homodyne output spectrum")
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--points", type=int, default=1001)

    for name, help_text in (("sweep", "run a parameter sweep"), ("preset", "emit a figure scenario as TOML")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "preset":
            p.add_argument("name", choices=PRESETS)
        else:
            p.add_argument("--preset", choices=PRESETS)
        p.add_argument("--r-set", type=_float_list, help="comma-separated squeezing parameters for multi-curve presets")
    return parser


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _dump_json(obj, fh):
    fh.write(json.dumps(obj, indent=1, allow_nan=False) + "\n")


def _point(args):
    return load_point(args.config, args.overrides, args.theta_pi, args.mode)


def _cmd_steady(args):
    params, bath, mode = _point(args)
    V = steady_covariance(params, bath, mode)
    report = report_from_covariance(V, params)
    with _sink(args.out) as fh:
        if args.format == "csv":
            fields = list(SqueezingReport.__dataclass_fields__)
            fh.write(",".join(fields) + "\n")
            values = report.to_dict()
            fh.write(",".join(format_cell(values[f]) for f in fields) + "\n")
        else:
            _dump_json(report.to_dict(), fh)


def _cmd_stability(args):
    params, _, _ = _point(args)
    with _sink(args.out) as fh:
        _dump_json(routh_hurwitz(params).to_dict(), fh)


def _cmd_evolve(args):
    params, bath, mode = _point(args)
    t_end = args.t_end if args.t_end is not None else relaxation_time(params)
    dt = args.dt if args.dt is not None else (0.1 if mode is Mode.RWA else math.pi / 64)
    traj = evolve_covariance(None, params, bath, t_end, dt, mode, stride=args.stride)
    with _sink(args.out) as fh:
        if args.format == "json":
            _dump_json({"columns": ["t", "V"], "t": traj.times.tolist(), "V": traj.covariances.tolist()}, fh)
        else:
            traj.write_csv(fh)


def _cmd_wigner(args):
    params, bath, mode = _point(args)
    sigma = reduced_mech_covariance(steady_covariance(params, bath, mode))
    grid = wigner(sigma, points=args.points, extent=args.extent)
    with _sink(args.out) as fh:
        if args.format == "json":
            _dump_json({"q": grid.q.tolist(), "p": grid.p.tolist(), "W": grid.W.tolist()}, fh)
        else:
            grid.write_csv(fh)


def _cmd_spectrum(args):
    params, bath, _ = _point(args)
    report = routh_hurwitz(params)
    if not (report.stable_rh and report.stable_eig):
        raise UnstableError("output spectrum needs stable parameters", report.margins)
    if args.omega_min is None and args.omega_max is None:
        omega = default_omega_grid(params, args.points)
    else:
        lo = args.omega_min if args.omega_min is not None else -5 * params.kappa
        hi = args.omega_max if args.omega_max is not None else 5 * params.kappa
        if not lo <= hi:
            raise ConfigError("--omega-min must not exceed --omega-max")
        omega = np.linspace(lo, hi, args.points)
    omega, S = output_spectrum(params, bath, SpectrumConfig(phi=args.phi, omega=omega), as_printed=args.as_printed)
    with _sink(args.out) as fh:
        if args.format == "json":
            _dump_json({"phi": args.phi, "as_printed": args.as_printed, "omega": omega.tolist(), "S": S.tolist()}, fh)
        else:
            write_spectrum_csv(fh, omega, S, args.phi)


def _scenario_overrides(args):
    extra = list(args.overrides)
    if args.mode is not None:
        extra.append(f'mode="{args.mode}"')
    if args.theta_pi is not None:
        extra.append(f"base.theta={args.theta_pi * math.pi!r}")
    return extra


def _cmd_preset(args):
    data = preset(args.name, args.r_set).to_dict()
    apply_overrides(data, _scenario_overrides(args), SCENARIO_KEYS)
    scenario = scenario_from_dict(data)
    with _sink(args.out) as fh:
        fh.write(scenario.to_toml())


def _cmd_sweep(args):
    if args.preset and args.config:
        raise ConfigError("use either --preset or --config, not both")
    if args.preset:
        data = preset(args.preset, args.r_set).to_dict()
        apply_overrides(data, _scenario_overrides(args), SCENARIO_KEYS)
        scenario = scenario_from_dict(data)
    elif args.config:
        if args.r_set is not None:
            raise ConfigError("--r-set only applies to --preset")
        scenario = load_scenario(args.config, _scenario_overrides(args))
    else:
        raise ConfigError("sweep needs --preset or --config")
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    result = run_sweep(scenario, jobs=jobs)
    text = result.to_json() if args.format == "json" else result.to_csv()
    with _sink(args.out or scenario.output) as fh:
        fh.write(text)


COMMANDS = {
    "steady": _cmd_steady,
    "stability": _cmd_stability,
    "evolve": _cmd_evolve,
    "wigner": _cmd_wigner,
    "spectrum": _cmd_spectrum,
    "preset": _cmd_preset,
    "sweep": _cmd_sweep,
}


def _fail(code, detail, status):
    detail = " ".join(str(detail).split())
    print(f"error: {code}: {detail}", file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except UsageError as exc:
        return _fail("usage", exc, EXIT_CONFIG)
    except UnstableError as exc:
        return _fail(exc.code, exc, EXIT_UNSTABLE)
    except ConfigError as exc:
        return _fail(exc.code, exc, EXIT_CONFIG)
    except NumericalError as exc:
        return _fail(exc.code, exc, EXIT_NUMERICAL)
    except GaussSqueezeError as exc:
        return _fail(exc.code, exc, EXIT_CONFIG)
    except (ValueError, OSError) as exc:
        return _fail("config", exc, EXIT_CONFIG)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
