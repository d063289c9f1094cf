"""Covariance-matrix dynamics: Lyapunov steady state and RK4 time evolution."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, MarginalStabilityError, NumericalError, UnstableError
from .model import Mode, SqueezedBath, SystemParams, diffusion_matrix, drift_matrix
from .stability import routh_hurwitz, spectral_abscissa

# symplectic form for the (X, Y, Q, P) ordering
OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))

PHYSICALITY_TOL = 1e-9
RESIDUAL_TOL = 1e-10
PERIOD = math.pi  # period of the counter-rotating terms, omega_m = 1
MAX_FULL_DT = 2 * math.pi / (20 * 2)

TRAJECTORY_COLUMNS = ["t"] + [f"V{i + 1}{j + 1}" for i in range(4) for j in range(i, 4)]


def default_initial_covariance(params: SystemParams) -> np.ndarray:
    """Vacuum cavity and thermal mechanics, uncorrelated."""
    return np.diag([0.5, 0.5, params.n_th + 0.5, params.n_th + 0.5])


def symmetrize(V) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    return (V + V.T) / 2


def lyapunov_residual(A, V, D) -> float:
    """Max-norm of ``A V + V A^T + D``."""
    return float(np.max(np.abs(A @ V + V @ A.T + D)))


def lyapunov_operator(A) -> np.ndarray:
    """16x16 matrix of ``V -> A V + V A^T`` acting on row-major ``vec(V)``."""
    eye = np.eye(A.shape[0])
    return np.kron(A, eye) + np.kron(eye, A)


def steady_state_covariance(params: SystemParams, bath: SqueezedBath) -> np.ndarray:
    """Stationary covariance of the RWA dynamics.

    Solves ``A V + V A^T + D = 0`` as a 16-unknown linear system.

    Raises
    ------
    MarginalStabilityError
        A Routh-Hurwitz margin is within ``1e-12`` of zero, so the linear
        system is (numerically) singular.
    UnstableError
        The drift matrix has an eigenvalue with non-negative real part.
    NumericalError
        The solve could not reach the residual tolerance.
    """
    report = routh_hurwitz(params)
    if report.marginal:
        raise MarginalStabilityError("drift matrix is marginally stable", report.margins)
    if not (report.stable_rh and report.stable_eig):
        raise UnstableError("drift matrix is unstable", report.margins)

    A = drift_matrix(params, mode=Mode.RWA)
    D = diffusion_matrix(params, bath)
    L = lyapunov_operator(A)
    rhs = -D.reshape(-1)
    v = np.linalg.solve(L, rhs)
    # one step of iterative refinement, cheap and tightens ill-conditioned cases
    v = v + np.linalg.solve(L, rhs - L @ v)
    V = symmetrize(v.reshape(4, 4))
    res = lyapunov_residual(A, V, D)
    if not res < RESIDUAL_TOL:
        raise NumericalError(f"Lyapunov residual {res:.3e} exceeds {RESIDUAL_TOL:.0e}")
    return V


@dataclass(frozen=True)
class PhysicalityReport:
    symmetry_defect: float
    min_eigenvalue: float
    min_diagonal: float
    passed: bool


def check_physicality(V, tol=PHYSICALITY_TOL) -> PhysicalityReport:
    """Gaussian-state validity: ``V + i Omega / 2`` must be positive semi-definite."""
    V = np.asarray(V, dtype=float)
    defect = float(np.max(np.abs(V - V.T)))
    n = V.shape[0]
    omega = np.kron(np.eye(n // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    H = symmetrize(V) + 0.5j * omega
    min_eig = float(np.linalg.eigvalsh(H).min())
    min_diag = float(np.diag(V).min())
    passed = defect <= 1e-12 * max(1.0, float(np.abs(V).max())) and min_eig >= -tol and min_diag >= 0
    return PhysicalityReport(defect, min_eig, min_diag, bool(passed))


@dataclass(frozen=True)
class Trajectory:
    """Covariance samples ``V(t)`` at strictly increasing times."""

    times: np.ndarray
    covariances: np.ndarray
    stride: float

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.covariances[-1]

    def rows(self):
        iu = np.triu_indices(4)
        for t, V in zip(self.times, self.covariances):
            yield [float(t)] + [float(x) for x in V[iu]]

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for row in self.rows():
            writer.writerow([f"{x:.17g}" for x in row])


class _DriftSeries:
    """``A(t) = A0 + cos(2t) Ac + sin(2t) As``, exact for the drift's harmonic content."""

    def __init__(self, params, mode):
        self.mode = Mode.parse(mode)
        a0 = drift_matrix(params, 0.0, self.mode)
        if self.mode is Mode.RWA:
            self.A0, self.Ac, self.As = a0, None, None
            return
        a_quarter = drift_matrix(params, math.pi / 4, self.mode)
        a_half = drift_matrix(params, math.pi / 2, self.mode)
        self.A0 = (a0 + a_half) / 2
        self.Ac = (a0 - a_half) / 2
        self.As = a_quarter - self.A0

    def __call__(self, t):
        if self.Ac is None:
            return self.A0
        return self.A0 + math.cos(2 * t) * self.Ac + math.sin(2 * t) * self.As


def rk4_step(V, t, h, drift, D):
    """One classical RK4 step of ``dV/dt = A(t) V + V A(t)^T + D``."""

    def rhs(tt, X):
        A = drift(tt)
        return A @ X + X @ A.T + D

    k1 = rhs(t, V)
    k2 = rhs(t + h / 2, V + h / 2 * k1)
    k3 = rhs(t + h / 2, V + h / 2 * k2)
    k4 = rhs(t + h, V + h * k3)
    return V + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _step_map(t, h, drift, D):
    """The RK4 step as an affine map on the 17-vector ``[vec(V), 1]``.

    Built by pushing basis matrices through :func:`rk4_step`, so it is the
    same arithmetic as the matrix-form step, just cached.
    """
    S = np.zeros((17, 17))
    zero = np.zeros((4, 4))
    offset = rk4_step(zero, t, h, drift, D)
    S[:16, 16] = offset.reshape(-1)
    S[16, 16] = 1.0
    for k in range(16):
        E = np.zeros(16)
        E[k] = 1.0
        S[:16, k] = (rk4_step(E.reshape(4, 4), t, h, drift, D) - offset).reshape(-1)
    return S


def evolve_covariance(
    V0,
    params: SystemParams,
    bath: SqueezedBath,
    t_end,
    dt,
    mode=Mode.RWA,
    stride=None,
    bound=1e12,
) -> Trajectory:
    """Integrate the covariance dynamics with fixed-step RK4 from ``t = 0``.

    Parameters
    ----------
    V0 : array_like or None
        Initial 4x4 covariance; ``None`` selects vacuum cavity plus thermal
        mechanics.
    t_end, dt : float
        Final time and maximum step. The step actually used divides
        ``t_end`` (RWA) or the period ``pi`` (FULL) exactly, so it may be
        slightly smaller than ``dt``.
    stride : float, optional
        Time between stored samples; defaults to every step. The initial and
        final states are always stored.
    bound : float
        Divergence threshold on any covariance entry.

    Raises
    ------
    ValueError
        For non-positive ``dt``/``t_end`` or a FULL-mode ``dt`` too coarse to
        resolve the ``2 omega_m`` oscillation.
    DivergenceError
        If an entry exceeds ``bound`` or becomes non-finite.
    """
    mode = Mode.parse(mode)
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not t_end > 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    if mode is Mode.FULL and dt > MAX_FULL_DT + 1e-15:
        raise ValueError(f"FULL mode needs dt <= {MAX_FULL_DT:.6g} to resolve the 2*omega_m oscillation")

    V = default_initial_covariance(params) if V0 is None else symmetrize(V0)
    D = diffusion_matrix(params, bath)
    drift = _DriftSeries(params, mode)

    if mode is Mode.RWA:
        n_steps = max(1, math.ceil(t_end / dt - 1e-9))
        h = t_end / n_steps
        per_period = None
        maps = [_step_map(0.0, h, drift, D)]
    else:
        per_period = math.ceil(PERIOD / dt - 1e-9)
        h = PERIOD / per_period
        n_steps = max(1, math.ceil(t_end / h - 1e-9))
        maps = [_step_map(k * h, h, drift, D) for k in range(per_period)]

    every = 1 if stride is None else max(1, int(round(stride / h)))
    times = [0.0]
    samples = [symmetrize(V)]
    state = np.append(V.reshape(-1), 1.0)
    for n in range(n_steps):
        S = maps[0] if per_period is None else maps[n % per_period]
        if per_period is not None and n == n_steps - 1 and (n + 1) * h > t_end * (1 + 1e-12):
            # final partial step lands exactly on t_end
            S = _step_map(n * h, t_end - n * h, drift, D)
        state = S @ state
        peak = np.max(np.abs(state[:16]))
        if not peak <= bound:
            raise DivergenceError(f"covariance entry {peak:.3e} exceeded bound {bound:.1e} at t={(n + 1) * h:.6g}")
        last = n == n_steps - 1
        if (n + 1) % every == 0 or last:
            t = t_end if last else (n + 1) * h
            times.append(t)
            samples.append(symmetrize(state[:16].reshape(4, 4)))
    return Trajectory(times=np.array(times), covariances=np.array(samples), stride=every * h)


def relaxation_time(params: SystemParams, factor=50.0) -> float:
    """``factor / |spectral abscissa|`` of the RWA drift matrix."""
    abscissa = spectral_abscissa(drift_matrix(params, mode=Mode.RWA))
    if not abscissa < 0:
        report = routh_hurwitz(params)
        raise UnstableError("no relaxation time for an unstable drift matrix", report.margins)
    return factor / abs(abscissa)


def periodic_steady_state(params: SystemParams, bath: SqueezedBath, dt=math.pi / 64, t_relax=None) -> np.ndarray:
    """Period-averaged covariance of the FULL dynamics after relaxation.

    With the counter-rotating terms ``V(t)`` never settles to a constant, so
    the observable steady state is the mean over one period ``pi`` sampled
    at every RK4 step.
    """
    if t_relax is None:
        t_relax = relaxation_time(params)
    t_relax = math.ceil(t_relax / PERIOD) * PERIOD
    relaxed = evolve_covariance(None, params, bath, t_relax, dt, Mode.FULL, stride=t_relax).final
    # t_relax is a multiple of the period, so restarting the clock at 0 keeps the phase
    cycle = evolve_covariance(relaxed, params, bath, PERIOD, dt, Mode.FULL)
    return symmetrize(cycle.covariances[:-1].mean(axis=0))


def steady_covariance(params: SystemParams, bath: SqueezedBath, mode=Mode.RWA) -> np.ndarray:
    """Algebraic steady state in RWA mode, period average in FULL mode."""
    if Mode.parse(mode) is Mode.RWA:
        return steady_state_covariance(params, bath)
    report = routh_hurwitz(params)
    if not (report.stable_rh and report.stable_eig) or report.marginal:
        raise UnstableError("drift matrix is unstable", report.margins)
    return periodic_steady_state(params, bath)
