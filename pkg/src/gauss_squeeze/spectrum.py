"""Homodyne spectrum of the cavity output field.

Frequencies are measured in the frame rotating with the mechanical
sideband, in units of ``omega_m``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .model import SqueezedBath, SystemParams

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumConfig:
    phi: float = 0.0
    omega: np.ndarray | None = None

    def grid(self, params: SystemParams) -> np.ndarray:
        if self.omega is None:
            return default_omega_grid(params)
        omega = np.asarray(self.omega, dtype=float)
        if not np.all(np.isfinite(omega)) or np.any(np.diff(omega) < 0):
            raise ValueError("omega grid must be finite and sorted")
        return omega


def default_omega_grid(params: SystemParams, points=1001) -> np.ndarray:
    return np.linspace(-5 * params.kappa, 5 * params.kappa, points)


@dataclass(frozen=True)
class SpectrumCoefficients:
    """Quadrature coefficients of ``X_in, Y_in, Q_in, P_in`` in ``dZ_out(omega)``."""

    a: np.ndarray
    b: np.ndarray
    e: np.ndarray
    f: np.ndarray
    u: np.ndarray
    v: np.ndarray
    d: np.ndarray


def spectrum_coefficients(params: SystemParams, omega, phi, as_printed=False) -> SpectrumCoefficients:
    """Output-quadrature coefficients at frequency (or array of frequencies) ``omega``.

    Solving the frequency-domain equations for the intracavity field gives
    ``dc = [4i sqrt(gamma_m) (g- b_in + g+ b_in^+) + 2 sqrt(kappa) u c_in] / d``,
    so the cavity reflection is ``(2 kappa u - d) / d``. With ``as_printed``
    the mechanical susceptibility ``u`` is replaced by the cavity one ``v``
    in that numerator, which breaks the unit-modulus reflection at zero
    coupling and is kept only for comparison.
    """
    omega = np.asarray(omega, dtype=float)
    k, gm = params.kappa, params.gamma_m
    gp, gmi = params.g_plus, params.g_minus
    u = gm - 2j * omega
    v = k - 2j * omega
    d = 4 * gmi**2 - 4 * gp**2 + u * v
    if np.any(d == 0):
        raise NumericalError("d(omega) vanishes on the grid (resonant singularity)")
    reflect = (2 * k * (v if as_printed else u) - d) / d
    mech = 4 * math.sqrt(k * gm) / d
    return SpectrumCoefficients(
        a=reflect * math.cos(phi),
        b=reflect * math.sin(phi),
        e=mech * math.sin(phi) * (gp + gmi),
        f=mech * math.cos(phi) * (gp - gmi),
        u=u,
        v=v,
        d=d,
    )


def output_spectrum(params: SystemParams, bath: SqueezedBath, config: SpectrumConfig = SpectrumConfig(), as_printed=False):
    """Power spectral density of the homodyne quadrature at phase ``config.phi``.

    Returns ``(omega, S)`` arrays. Values below 1/2 witness squeezing of the
    output light.

    Raises
    ------
    NumericalError
        If the assembled spectrum has an imaginary part above ``1e-10``.
    """
    omega = config.grid(params)
    pos = spectrum_coefficients(params, omega, config.phi, as_printed)
    neg = spectrum_coefficients(params, -omega, config.phi, as_printed)
    N, M = bath.N, bath.M
    Mc = M.conjugate()
    S = (
        0.5 * pos.a * neg.a * (2 * N + 1 + M + Mc)
        + 0.5 * pos.b * neg.b * (2 * N + 1 - M - Mc)
        + 0.5j * pos.a * neg.b * (1 - M + Mc)
        + 0.5j * pos.b * neg.a * (Mc - M - 1)
        + (pos.e * neg.e + pos.f * neg.f) * (params.n_th + 0.5)
    )
    imag = float(np.max(np.abs(S.imag))) if S.size else 0.0
    if imag > IMAG_TOL:
        raise NumericalError(f"output spectrum has imaginary residue {imag:.3e}")
    return omega, S.real


def write_spectrum_csv(fh, omega, S, phi):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["omega", "S", "phi"])
    for w, s in zip(omega, S):
        writer.writerow([f"{w:.17g}", f"{s:.17g}", f"{phi:.17g}"])
