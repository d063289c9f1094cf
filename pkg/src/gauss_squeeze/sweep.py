"""Declarative parameter sweeps over steady-state squeezing observables."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import tomli_w

from .config import BATH_KEYS, PARAM_KEYS, apply_overrides, parse_toml, read_toml
from .dynamics import steady_covariance
from .errors import ConfigError, MarginalStabilityError, UnstableError
from .metrics import quadrature_squeezing_db, reduced_mech_covariance, total_squeezing
from .model import Mode, SqueezedBath, SystemParams
from .stability import routh_hurwitz

# "ratio" sets g_plus = ratio * g_minus after every other axis is applied
AXIS_NAMES = PARAM_KEYS + BATH_KEYS + ("ratio",)
OBSERVABLES = ("S_Q", "S_P", "lambda", "S_total_paper", "S_total_norm", "stable", "spectral_abscissa")
DEFAULT_CAP = 10**6
DEFAULT_R_SET = (0.0, 0.5, 1.0, 1.5)

FIG2_BASE = SystemParams(kappa=0.1, gamma_m=1e-6, g0=1e-4, g_minus=0.01, g_plus=0.2 * 0.01, n_th=0.0)


@dataclass(frozen=True)
class SweepScenario:
    params: SystemParams = field(default_factory=SystemParams)
    bath: SqueezedBath = field(default_factory=SqueezedBath)
    axes: tuple = ()
    observables: tuple = ("S_Q",)
    mode: Mode = Mode.RWA
    output: str | None = None
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        axes = tuple((str(name), tuple(float(v) for v in values)) for name, values in self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "observables", tuple(self.observables))
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        names = [name for name, _ in axes]
        for name, values in axes:
            if name not in AXIS_NAMES:
                raise ConfigError(f"unknown axis {name!r}; expected one of {', '.join(AXIS_NAMES)}")
            if not values:
                raise ConfigError(f"axis {name!r} has no values")
            if not all(math.isfinite(v) for v in values):
                raise ConfigError(f"axis {name!r} has non-finite values")
        if len(set(names)) != len(names):
            raise ConfigError("duplicate axis names")
        if not self.observables:
            raise ConfigError("at least one observable is required")
        for obs in self.observables:
            if obs not in OBSERVABLES:
                raise ConfigError(f"unknown observable {obs!r}; expected one of {', '.join(OBSERVABLES)}")
        if self.size > self.cap:
            raise ConfigError(f"grid has {self.size} points, above the cap of {self.cap}")

    @property
    def size(self) -> int:
        return math.prod(len(values) for _, values in self.axes)

    @property
    def columns(self):
        return [name for name, _ in self.axes] + list(self.observables) + ["status"]

    def points(self):
        """Grid points in lexicographic axis order (last axis fastest)."""
        return itertools.product(*(values for _, values in self.axes))

    def to_dict(self):
        base = {k: getattr(self.params, k) for k in PARAM_KEYS}
        base.update({k: getattr(self.bath, k) for k in BATH_KEYS})
        data = {
            "mode": self.mode.value,
            "observables": list(self.observables),
            "base": base,
            "axes": [{"name": name, "values": list(values)} for name, values in self.axes],
        }
        if self.output is not None:
            data["output"] = self.output
        return data

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())


SCENARIO_KEYS = {"base": PARAM_KEYS + BATH_KEYS, "axes": None, "observables": None, "mode": None, "output": None}


def scenario_from_dict(data) -> SweepScenario:
    unknown = sorted(set(data) - set(SCENARIO_KEYS))
    if unknown:
        raise ConfigError(f"unknown scenario key(s): {', '.join(unknown)}")
    base = dict(data.get("base", {}))
    bad = sorted(set(base) - set(PARAM_KEYS + BATH_KEYS))
    if bad:
        raise ConfigError(f"unknown base key(s): {', '.join(bad)}")
    for key, value in base.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"base.{key} must be a number, got {value!r}")
    params = SystemParams(**{k: float(v) for k, v in base.items() if k in PARAM_KEYS})
    bath = SqueezedBath(**{k: float(v) for k, v in base.items() if k in BATH_KEYS})
    axes = []
    for entry in data.get("axes", []):
        if not isinstance(entry, dict) or set(entry) != {"name", "values"}:
            raise ConfigError("each axes[] entry needs exactly the keys 'name' and 'values'")
        values = entry["values"]
        if not isinstance(values, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
            raise ConfigError(f"axis {entry['name']!r} values must be a list of numbers")
        axes.append((entry["name"], values))
    observables = data.get("observables", ["S_Q"])
    if not isinstance(observables, list):
        raise ConfigError("observables must be a list")
    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a string path")
    return SweepScenario(
        params=params,
        bath=bath,
        axes=tuple(axes),
        observables=tuple(observables),
        mode=data.get("mode", "rwa"),
        output=output,
    )


def load_scenario(path, overrides=()) -> SweepScenario:
    data = read_toml(path)
    apply_overrides(data, overrides, SCENARIO_KEYS)
    return scenario_from_dict(data)


def scenario_from_toml(text, overrides=()) -> SweepScenario:
    data = parse_toml(text)
    apply_overrides(data, overrides, SCENARIO_KEYS)
    return scenario_from_dict(data)


def _linspace(start, stop, num):
    return tuple(float(x) for x in np.linspace(start, stop, num))


def _open_grid(stop, num):
    """``num`` evenly spaced points in ``(0, stop]``."""
    return tuple(stop * k / num for k in range(1, num + 1))


def preset(name, r_values=None) -> SweepScenario:
    """Scenarios reproducing the data behind each figure.

    ``r_values`` overrides the squeezing-parameter set used by the
    multi-curve panels.
    """
    r_set = tuple(float(r) for r in (DEFAULT_R_SET if r_values is None else r_values))
    theta_axis = ("theta", _linspace(0.0, 4 * math.pi, 401))
    ratio_axis = ("ratio", _open_grid(0.999, 500))
    vacuum = SqueezedBath(r=0.0, theta=0.0)
    if name == "fig2":
        return SweepScenario(FIG2_BASE, vacuum, (theta_axis, ("r", r_set)), ("S_Q", "S_P"))
    if name == "fig3a":
        return SweepScenario(FIG2_BASE, vacuum, (ratio_axis, ("r", r_set)), ("S_Q",))
    if name == "fig3b":
        return SweepScenario(FIG2_BASE, vacuum, (theta_axis, ("r", r_set)), ("S_total_paper",))
    if name == "fig5":
        r_grid = _linspace(0.0, max(r_set), 31)
        return SweepScenario(FIG2_BASE, vacuum, (("r", r_grid), ("ratio", _open_grid(0.999, 100))), ("S_Q",))
    if name == "fig6":
        axes = (("kappa", _open_grid(2.0, 100)), ("n_th", _linspace(0.0, 1000.0, 101)))
        return SweepScenario(FIG2_BASE, SqueezedBath(r=1.0, theta=0.0), axes, ("S_total_paper",))
    raise ConfigError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}")


PRESETS = ("fig2", "fig3a", "fig3b", "fig5", "fig6")


def point_inputs(scenario: SweepScenario, values):
    """Parameters and bath at one grid point."""
    assigned = dict(zip((name for name, _ in scenario.axes), values))
    ratio = assigned.pop("ratio", None)
    params = replace(scenario.params, **{k: v for k, v in assigned.items() if k in PARAM_KEYS})
    bath = replace(scenario.bath, **{k: v for k, v in assigned.items() if k in BATH_KEYS})
    if ratio is not None:
        params = replace(params, g_plus=ratio * params.g_minus)
    return params, bath


def evaluate_point(params: SystemParams, bath: SqueezedBath, observables, mode=Mode.RWA):
    """Observable values and a status string ("ok" or "unstable") for one point."""
    report = routh_hurwitz(params)
    values = {"stable": report.stable_rh and report.stable_eig, "spectral_abscissa": report.spectral_abscissa}
    status = "ok"
    try:
        V = steady_covariance(params, bath, mode)
    except (UnstableError, MarginalStabilityError):
        status = "unstable"
        values["stable"] = False
    else:
        lam, s_paper, s_norm = total_squeezing(reduced_mech_covariance(V))
        values.update(
            S_Q=quadrature_squeezing_db(V, "Q"),
            S_P=quadrature_squeezing_db(V, "P"),
            S_total_paper=s_paper,
            S_total_norm=s_norm,
        )
        values["lambda"] = lam
    return [values.get(obs) for obs in observables], status


def _evaluate_chunk(args):
    scenario, chunk = args
    out = []
    for values in chunk:
        params, bath = point_inputs(scenario, values)
        obs, status = evaluate_point(params, bath, scenario.observables, scenario.mode)
        out.append(list(values) + obs + [status])
    return out


@dataclass(frozen=True)
class SweepResult:
    columns: list
    rows: list

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(x) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        records = [dict(zip(self.columns, row)) for row in self.rows]
        return json.dumps(records, indent=1) + "\n"


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def default_jobs() -> int:
    env = os.environ.get("GAUSS_SQUEEZE_JOBS")
    if env:
        try:
            jobs = int(env)
        except ValueError:
            raise ConfigError(f"GAUSS_SQUEEZE_JOBS must be an integer, got {env!r}") from None
        if jobs < 1:
            raise ConfigError("GAUSS_SQUEEZE_JOBS must be >= 1")
        return jobs
    return os.cpu_count() or 1


def run_sweep(scenario: SweepScenario, jobs=1, chunk_size=256) -> SweepResult:
    """Evaluate every grid point; rows come back in grid order whatever ``jobs`` is."""
    points = list(scenario.points())
    chunks = [points[i : i + chunk_size] for i in range(0, len(points), chunk_size)]
    if jobs <= 1 or len(chunks) <= 1:
        results = [_evaluate_chunk((scenario, chunk)) for chunk in chunks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # map yields in submission order, so completion order never leaks into the rows
            results = list(pool.map(_evaluate_chunk, [(scenario, chunk) for chunk in chunks]))
    rows = [row for chunk in results for row in chunk]
    return SweepResult(columns=scenario.columns, rows=rows)
