"""Mechanical squeezing of an optomechanical cavity driven by two tones and a squeezed vacuum."""

__version__ = "0.1.0"

from .dynamics import (
    Trajectory,
    check_physicality,
    evolve_covariance,
    periodic_steady_state,
    steady_covariance,
    steady_state_covariance,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DivergenceError,
    GaussSqueezeError,
    MarginalStabilityError,
    NumericalError,
    UnstableError,
)
from .metrics import (
    SqueezingReport,
    WignerGrid,
    bogoliubov_params,
    quadrature_squeezing_db,
    reduced_mech_covariance,
    squeezing_report,
    total_squeezing,
    wigner,
)
from .model import (
    ClassicalSteadyState,
    DriveConfig,
    Mode,
    SqueezedBath,
    SystemParams,
    bath_correlations,
    classical_steady_state,
    diffusion_matrix,
    drift_matrix,
    effective_couplings,
)
from .spectrum import SpectrumConfig, output_spectrum, spectrum_coefficients
from .stability import StabilityReport, routh_hurwitz, spectral_abscissa
from .sweep import SweepResult, SweepScenario, preset, run_sweep
