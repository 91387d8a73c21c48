"""Exception types shared across the package."""


class DeflatedGNError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(DeflatedGNError):
    """An input contains NaN/Inf or is otherwise unusable."""


class ShapeError(DeflatedGNError):
    """Array dimensions are incompatible with the requested operation."""


class RankDeficiencyError(DeflatedGNError):
    """A matrix is rank deficient beyond the working tolerance.

    Rank-deficient Jacobians are outside the supported problem class; solvers
    abort the affected run with a diagnostic instead of regularizing.
    """


class AtDeflatedPointError(DeflatedGNError):
    """The evaluation point coincides with a deflated point to machine precision."""


class DegenerateEigenvaluesError(DeflatedGNError):
    """Eigenvalues are too close for the eigenvalue Jacobian to be well defined."""


class LineSearchError(DeflatedGNError):
    """The line search could not find an acceptable step."""


class ConfigError(DeflatedGNError):
    """An experiment configuration is invalid."""
