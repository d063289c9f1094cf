"""TOML configuration files for single parameter points and ``--set`` overrides."""

from __future__ import annotations

import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigError
from .model import Mode, SqueezedBath, SystemParams

PARAM_KEYS = ("kappa", "gamma_m", "g0", "g_minus", "g_plus", "n_th")
BATH_KEYS = ("r", "theta")
POINT_KEYS = PARAM_KEYS + BATH_KEYS + ("mode",)

# weak-coupling working point of the fig2 preset, bath at r = 1
DEFAULT_POINT = {
    "kappa": 0.1,
    "gamma_m": 1e-6,
    "g0": 1e-4,
    "g_minus": 0.01,
    "g_plus": 0.002,
    "n_th": 0.0,
    "r": 1.0,
    "theta": 0.0,
    "mode": "rwa",
}


def parse_toml(text, source="<string>"):
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def read_toml(path):
    if path == "-":
        return parse_toml(sys.stdin.read(), "<stdin>")
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_toml(data.decode("utf-8"), path)


def parse_value(text):
    """Interpret the right-hand side of ``--set key=value`` as a TOML value.

    Bare words that are not valid TOML (``full``, ``rwa``) are kept as strings.
    """
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def parse_override(item):
    key, sep, value = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    return key, parse_value(value.strip())


def apply_overrides(data, overrides, allowed):
    """Apply dotted-key overrides in order; unknown keys are errors.

    ``allowed`` maps each top-level key to either ``None`` (scalar) or a
    collection of permitted sub-keys.
    """
    for item in overrides:
        key, value = parse_override(item)
        head, _, tail = key.partition(".")
        if head not in allowed:
            raise ConfigError(f"unknown key {key!r}")
        sub = allowed[head]
        if sub is None:
            if tail:
                raise ConfigError(f"unknown key {key!r}")
            data[head] = value
        else:
            if tail not in sub:
                raise ConfigError(f"unknown key {key!r}")
            data.setdefault(head, {})[tail] = value
    return data


def _number(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def point_from_mapping(data):
    """Build ``(SystemParams, SqueezedBath, Mode)`` from a flat mapping."""
    unknown = sorted(set(data) - set(POINT_KEYS))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    merged = dict(DEFAULT_POINT)
    merged.update(data)
    params = SystemParams(**{k: _number(k, merged[k]) for k in PARAM_KEYS})
    bath = SqueezedBath(**{k: _number(k, merged[k]) for k in BATH_KEYS})
    return params, bath, Mode.parse(merged["mode"])


def load_point(path=None, overrides=(), theta_pi=None, mode=None):
    """Read a point configuration, then apply ``--set`` and convenience flags."""
    data = read_toml(path) if path else {}
    apply_overrides(data, overrides, {k: None for k in POINT_KEYS})
    if theta_pi is not None:
        data["theta"] = float(theta_pi) * math.pi
    if mode is not None:
        data["mode"] = mode
    return point_from_mapping(data)
