"""Exception hierarchy shared by the library and the command line."""


class GaussSqueezeError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ConfigError(GaussSqueezeError, ValueError):
    """Invalid parameters, unknown configuration keys or malformed scenarios."""

    code = "config"


class NumericalError(GaussSqueezeError, ArithmeticError):
    """A computation failed for numerical reasons."""

    code = "numerical"


class ConvergenceError(NumericalError):
    """Fixed-point iteration did not converge within the iteration cap."""

    code = "convergence"

    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class DivergenceError(NumericalError):
    """Covariance integration blew up, which signals an unstable system."""

    code = "divergence"


class UnstableError(GaussSqueezeError):
    """The drift matrix is unstable, so no steady state exists.

    Carries the Routh-Hurwitz margins so callers can report how far from
    stability the parameters are.
    """

    code = "unstable"

    def __init__(self, message, margins):
        super().__init__(f"{message}; margins rh1={margins[0]:.6e} rh2={margins[1]:.6e} rh3={margins[2]:.6e}")
        self.margins = tuple(margins)


class MarginalStabilityError(NumericalError):
    """The Lyapunov system is singular because a stability margin is zero."""

    code = "singular"

    def __init__(self, message, margins):
        super().__init__(f"{message}; margins rh1={margins[0]:.6e} rh2={margins[1]:.6e} rh3={margins[2]:.6e}")
        self.margins = tuple(margins)
