"""Physical parameters, bath correlations and the linearized drift/diffusion matrices.

All rates and couplings are expressed in units of the mechanical frequency,
so ``omega_m`` is fixed to 1. Quadratures are ordered ``(dX, dY, dQ, dP)``:
cavity amplitude and phase followed by mechanical position and momentum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError

__all__ = [
    "Mode",
    "SystemParams",
    "SqueezedBath",
    "DriveConfig",
    "ClassicalSteadyState",
    "bath_correlations",
    "classical_steady_state",
    "effective_couplings",
    "drift_matrix",
    "diffusion_matrix",
]


class Mode(str, enum.Enum):
    """Drift-matrix flavour: rotating-wave approximation or full time dependence."""

    RWA = "rwa"
    FULL = "full"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"mode must be 'rwa' or 'full', got {value!r}") from None


def _require_finite(name, value):
    if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
        raise ConfigError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Cavity and mechanical rates in units of ``omega_m``.

    ``g_minus`` is the beam-splitter (red sideband) coupling and ``g_plus``
    the parametric (blue sideband) coupling.
    """

    kappa: float = 0.1
    gamma_m: float = 1e-6
    g0: float = 1e-4
    g_minus: float = 0.01
    g_plus: float = 0.002
    n_th: float = 0.0
    omega_m: float = field(default=1.0)

    def __post_init__(self):
        for name in ("kappa", "gamma_m", "g0", "g_minus", "g_plus", "n_th", "omega_m"):
            _require_finite(name, getattr(self, name))
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.omega_m != 1.0:
            raise ConfigError("omega_m is the unit of frequency and must equal 1")
        if self.kappa <= 0:
            raise ConfigError(f"kappa must be > 0, got {self.kappa}")
        if self.gamma_m <= 0:
            raise ConfigError(f"gamma_m must be > 0, got {self.gamma_m}")
        for name in ("g0", "g_minus", "g_plus", "n_th"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def ratio(self) -> float:
        """Blue-to-red coupling ratio ``g_plus / g_minus`` (``inf`` if ``g_minus`` is 0)."""
        if self.g_minus == 0:
            return math.inf if self.g_plus > 0 else 0.0
        return self.g_plus / self.g_minus


@dataclass(frozen=True)
class SqueezedBath:
    """Squeezed-vacuum input with squeezing parameter ``r`` and phase ``theta``."""

    r: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        _require_finite("r", self.r)
        _require_finite("theta", self.theta)
        if self.r < 0:
            raise ConfigError(f"squeezing parameter r must be >= 0, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def N(self) -> float:
        return math.sinh(self.r) ** 2

    @property
    def M(self) -> complex:
        # reduce first so that theta = 2*pi*k reproduces theta = 0 bit for bit
        phase = math.fmod(self.theta, 2 * math.pi)
        return complex(math.cos(phase), -math.sin(phase)) * math.sinh(self.r) * math.cosh(self.r)


def bath_correlations(r, theta) -> SqueezedBath:
    """Return the squeezed bath for ``(r, theta)``.

    The resulting ``N = sinh(r)**2`` and ``M = exp(-i theta) sinh(r) cosh(r)``
    satisfy ``|M|**2 = N (N + 1)``.
    """
    return SqueezedBath(r=r, theta=theta)


@dataclass(frozen=True)
class DriveConfig:
    """Two-tone drive: amplitudes of the blue (``+``) and red (``-``) tones.

    The tones sit at ``omega_c +/- omega_m``.
    """

    epsilon_plus: float
    epsilon_minus: float
    omega_c: float

    def __post_init__(self):
        for name in ("epsilon_plus", "epsilon_minus", "omega_c"):
            _require_finite(name, getattr(self, name))
        if self.epsilon_plus < 0 or self.epsilon_minus < 0:
            raise ConfigError("drive amplitudes must be >= 0")

    @property
    def omega_plus(self) -> float:
        return self.omega_c + 1.0

    @property
    def omega_minus(self) -> float:
        return self.omega_c - 1.0

    @classmethod
    def from_powers(cls, power_plus, power_minus, omega_c, kappa, hbar=1.0) -> "DriveConfig":
        """Build amplitudes from drive powers via ``eps = sqrt(kappa P / (hbar omega))``."""
        if power_plus < 0 or power_minus < 0:
            raise ConfigError("drive powers must be >= 0")
        eps_p = math.sqrt(kappa * power_plus / (hbar * (omega_c + 1.0)))
        eps_m = math.sqrt(kappa * power_minus / (hbar * (omega_c - 1.0)))
        return cls(epsilon_plus=eps_p, epsilon_minus=eps_m, omega_c=omega_c)


@dataclass(frozen=True)
class ClassicalSteadyState:
    c_plus: complex
    c_minus: complex
    b_mean: complex
    omega_c_eff: float

    def residual(self, g0: float, omega_m: float = 1.0) -> float:
        """Residual of ``omega_m <b> = g0 (|c+|^2 + |c-|^2)``."""
        intensity = abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2
        return abs(omega_m * self.b_mean - g0 * intensity)


def _sideband_amplitudes(drive, kappa, omega_c_eff):
    c_plus = drive.epsilon_plus / complex(drive.omega_plus - omega_c_eff, kappa / 2)
    c_minus = drive.epsilon_minus / complex(drive.omega_minus - omega_c_eff, kappa / 2)
    return c_plus, c_minus


def classical_steady_state(drive: DriveConfig, params: SystemParams, tol=1e-12, max_iter=10_000) -> ClassicalSteadyState:
    """Solve the self-consistent classical amplitudes by fixed-point iteration.

    The intracavity intensity entering the radiation-pressure shift is the
    time average ``|c+|^2 + |c-|^2``; the beat note at ``2 omega_m`` is
    dropped. Since that intensity is real, ``<b>`` is real and the shifted
    cavity frequency is ``omega_c - 2 g0 <b>``.

    Raises
    ------
    ConvergenceError
        If successive iterates still differ by more than ``tol`` after
        ``max_iter`` steps (e.g. in the bistable regime).
    """
    g0, kappa, omega_m = params.g0, params.kappa, params.omega_m
    b = 0.0
    step = math.inf
    for _ in range(max_iter):
        omega_c_eff = drive.omega_c - 2.0 * g0 * b
        c_plus, c_minus = _sideband_amplitudes(drive, kappa, omega_c_eff)
        b_new = g0 * (abs(c_plus) ** 2 + abs(c_minus) ** 2) / omega_m
        step = abs(b_new - b)
        b = b_new
        if step < tol:
            break
    else:
        raise ConvergenceError("classical steady state did not converge", step)

    omega_c_eff = drive.omega_c - 2.0 * g0 * b
    c_plus, c_minus = _sideband_amplitudes(drive, kappa, omega_c_eff)
    return ClassicalSteadyState(c_plus=c_plus, c_minus=c_minus, b_mean=complex(b, 0.0), omega_c_eff=omega_c_eff)


def effective_couplings(g0, css: ClassicalSteadyState):
    """Return ``(g_plus, g_minus) = g0 * (|c+|, |c-|)``.

    Each sideband amplitude is rotated to the real non-negative axis, which
    is the gauge the drift matrix assumes.
    """
    return g0 * abs(css.c_plus), g0 * abs(css.c_minus)


def drift_matrix(params: SystemParams, t=0.0, mode=Mode.RWA) -> np.ndarray:
    """4x4 drift matrix over ``(dX, dY, dQ, dP)``.

    In FULL mode the couplings carry the ``exp(+-2i t)`` counter-rotating
    terms (``omega_m = 1``); in RWA mode these are dropped and the matrix is
    time independent.
    """
    gp, gm = params.g_plus, params.g_minus
    if Mode.parse(mode) is Mode.RWA:
        f1 = complex(gp)
        f2 = f3 = complex(gm)
    else:
        rot = complex(math.cos(2.0 * t), math.sin(2.0 * t))
        f1 = gp + gm * rot
        f2 = gm + gp * rot.conjugate()
        f3 = gm + gp * rot
    f12p, f12m = f1 + f2, f1 - f2
    f13p, f13m = f1 + f3, f1 - f3
    hk = -params.kappa / 2
    hg = -params.gamma_m / 2
    return np.array(
        [
            [hk, 0.0, -f12p.imag, f12m.real],
            [0.0, hk, f12p.real, f12m.imag],
            [-f13p.imag, f13m.real, hg, 0.0],
            [f13p.real, f13m.imag, 0.0, hg],
        ]
    )


def diffusion_matrix(params: SystemParams, bath: SqueezedBath) -> np.ndarray:
    """Block-diagonal diffusion matrix ``D_a (+) D_b``.

    ``D_a`` is the squeezed-vacuum noise on the cavity quadratures and
    ``D_b`` the thermal noise on the mechanics.
    """
    N, M = bath.N, bath.M
    half_k = params.kappa / 2
    cross = (1j * (M.conjugate() - M)).real
    D = np.zeros((4, 4))
    D[0, 0] = half_k * (2 * N + 1 + 2 * M.real)
    D[1, 1] = half_k * (2 * N + 1 - 2 * M.real)
    D[0, 1] = D[1, 0] = half_k * cross
    D[2, 2] = D[3, 3] = params.gamma_m / 2 * (2 * params.n_th + 1)
    return D
