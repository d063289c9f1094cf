"""Routh-Hurwitz margins and eigenvalue checks for the RWA drift matrix."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .model import Mode, SystemParams, drift_matrix

MARGINAL_BAND = 1e-12


@dataclass(frozen=True)
class StabilityReport:
    rh1: float
    rh2: float
    rh3: float
    # stability core 4g-^2 - 4g+^2 + kappa*gamma_m over its natural scale
    relative_margin: float
    spectral_abscissa: float
    stable_rh: bool
    stable_eig: bool
    # the simpler sufficient condition g_plus < g_minus
    sufficient: bool

    @property
    def margins(self):
        return (self.rh1, self.rh2, self.rh3)

    @property
    def marginal(self) -> bool:
        """True when the Lyapunov operator is numerically singular.

        Judged on the scale-free core of the margins, so tiny but healthy
        rates (e.g. ``gamma_m = 1e-6`` with no coupling) are not flagged.
        """
        return abs(self.relative_margin) <= MARGINAL_BAND

    def to_dict(self):
        return asdict(self)


def rh_margins(params: SystemParams):
    """The three Routh-Hurwitz polynomials; all must be positive for stability."""
    k, g = params.kappa, params.gamma_m
    core = 4 * params.g_minus**2 - 4 * params.g_plus**2 + k * g
    rh1 = (k + g) * (4 * params.g_minus**2 - 4 * params.g_plus**2 + g**2 + 3 * k * g + k**2) / 4
    rh2 = (k + g) ** 4 * core / 16
    rh3 = core**2 / 16
    return rh1, rh2, rh3


def spectral_abscissa(A) -> float:
    """Largest real part among the eigenvalues of a time-independent drift matrix."""
    return float(np.max(np.linalg.eigvals(np.asarray(A, dtype=float)).real))


def relative_margin(params: SystemParams) -> float:
    k, g = params.kappa, params.gamma_m
    core = 4 * params.g_minus**2 - 4 * params.g_plus**2 + k * g
    return core / (4 * params.g_minus**2 + 4 * params.g_plus**2 + k * g)


def routh_hurwitz(params: SystemParams) -> StabilityReport:
    rh1, rh2, rh3 = rh_margins(params)
    abscissa = spectral_abscissa(drift_matrix(params, mode=Mode.RWA))
    return StabilityReport(
        rh1=rh1,
        rh2=rh2,
        rh3=rh3,
        relative_margin=relative_margin(params),
        spectral_abscissa=abscissa,
        stable_rh=bool(rh1 > 0 and rh2 > 0 and rh3 > 0),
        stable_eig=bool(abscissa < 0),
        sufficient=bool(params.g_plus < params.g_minus),
    )
