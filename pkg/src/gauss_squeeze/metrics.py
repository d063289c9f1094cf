"""Squeezing observables derived from a covariance matrix."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import steady_covariance
from .errors import ConfigError, NumericalError
from .model import Mode, SqueezedBath, SystemParams
from .stability import routh_hurwitz

VACUUM_VARIANCE = 0.5
LOG2_DB = 10 * math.log10(2)

_INDEX = {"Q": 2, "P": 3}


def _db(variance, reference=1.0):
    return -10 * math.log10(variance / reference)


def quadrature_squeezing_db(V, which="Q") -> float:
    """Squeezing of the mechanical position (``Q``) or momentum (``P``) in dB.

    Positive values are below the vacuum variance 1/2; negative values mean
    anti-squeezing.
    """
    try:
        idx = _INDEX[which.upper()]
    except (KeyError, AttributeError):
        raise ValueError(f"which must be 'Q' or 'P', got {which!r}") from None
    var = float(np.asarray(V)[idx, idx])
    if not var > 0:
        raise NumericalError(f"non-positive variance <d{which}^2> = {var!r} is unphysical")
    return _db(var, VACUUM_VARIANCE)


def reduced_mech_covariance(V) -> np.ndarray:
    """The 2x2 mechanical block ``[[V33, V34], [V43, V44]]``."""
    return np.array(np.asarray(V, dtype=float)[2:4, 2:4])


def total_squeezing(sigma):
    """Smallest eigenvalue of ``sigma`` and the total squeezing in two conventions.

    Returns
    -------
    (lambda_min, s_total_paper_db, s_total_norm_db)
        ``s_total_paper_db = -10 log10(lambda)`` is the unnormalised figure
        convention; ``s_total_norm_db = -10 log10(lambda / 0.5)`` is relative
        to vacuum. They always differ by ``10 log10(2)``.
    """
    lam = float(np.linalg.eigvalsh(np.asarray(sigma, dtype=float)).min())
    if not lam > 0:
        raise NumericalError(f"smallest eigenvalue {lam!r} of the mechanical covariance is not positive")
    s_paper = _db(lam)
    return lam, s_paper, s_paper - LOG2_DB


def bogoliubov_params(g_plus, g_minus):
    """Squeezing coefficient ``xi`` and Bogoliubov-mode coupling ``G_eff``.

    Only defined for ``0 <= g_plus < g_minus``.
    """
    if g_plus < 0 or not g_plus < g_minus:
        raise ConfigError(f"Bogoliubov mode needs 0 <= g_plus < g_minus, got g_plus={g_plus}, g_minus={g_minus}")
    xi = 0.5 * math.log((g_minus + g_plus) / (g_minus - g_plus))
    g_eff = math.sqrt(g_minus**2 - g_plus**2)
    return xi, g_eff


@dataclass(frozen=True)
class WignerGrid:
    q: np.ndarray
    p: np.ndarray
    # W[i, j] is the value at (q[j], p[i])
    W: np.ndarray

    def riemann_sum(self) -> float:
        dq = self.q[1] - self.q[0]
        dp = self.p[1] - self.p[0]
        return float(self.W.sum() * dq * dp)

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["q", "p", "W"])
        for i, pv in enumerate(self.p):
            for j, qv in enumerate(self.q):
                writer.writerow([f"{qv:.17g}", f"{pv:.17g}", f"{self.W[i, j]:.17g}"])


def default_extent(sigma) -> float:
    return 5 * math.sqrt(max(sigma[0][0], sigma[1][1]))


def wigner(sigma, q=None, p=None, points=201, extent=None) -> WignerGrid:
    """Gaussian Wigner function of the mechanics on a Cartesian grid.

    ``q`` and ``p`` may be given explicitly; otherwise both axes span
    ``+-extent`` (default five standard deviations of the wider quadrature)
    with ``points`` samples.
    """
    sigma = np.asarray(sigma, dtype=float)
    det = float(np.linalg.det(sigma))
    if not det > 0:
        raise NumericalError(f"singular or indefinite covariance (det = {det!r})")
    if extent is None:
        extent = default_extent(sigma)
    q = np.linspace(-extent, extent, points) if q is None else np.asarray(q, dtype=float)
    p = np.linspace(-extent, extent, points) if p is None else np.asarray(p, dtype=float)
    inv = np.linalg.inv(sigma)
    Q, P = np.meshgrid(q, p)
    quad = inv[0, 0] * Q**2 + (inv[0, 1] + inv[1, 0]) * Q * P + inv[1, 1] * P**2
    W = np.exp(-0.5 * quad) / (2 * math.pi * math.sqrt(det))
    return WignerGrid(q=q, p=p, W=W)


@dataclass(frozen=True)
class SqueezingReport:
    s_q_db: float
    s_p_db: float
    lambda_min: float
    s_total_paper_db: float
    s_total_norm_db: float
    xi: float | None
    g_eff: float | None
    stable_rh: bool
    stable_eig: bool

    def to_dict(self):
        return asdict(self)


def report_from_covariance(V, params: SystemParams) -> SqueezingReport:
    lam, s_paper, s_norm = total_squeezing(reduced_mech_covariance(V))
    try:
        xi, g_eff = bogoliubov_params(params.g_plus, params.g_minus)
    except ConfigError:
        xi = g_eff = None
    stab = routh_hurwitz(params)
    return SqueezingReport(
        s_q_db=quadrature_squeezing_db(V, "Q"),
        s_p_db=quadrature_squeezing_db(V, "P"),
        lambda_min=lam,
        s_total_paper_db=s_paper,
        s_total_norm_db=s_norm,
        xi=xi,
        g_eff=g_eff,
        stable_rh=stab.stable_rh,
        stable_eig=stab.stable_eig,
    )


def squeezing_report(params: SystemParams, bath: SqueezedBath, mode=Mode.RWA) -> SqueezingReport:
    """Steady-state squeezing observables for one parameter point."""
    return report_from_covariance(steady_covariance(params, bath, mode), params)
