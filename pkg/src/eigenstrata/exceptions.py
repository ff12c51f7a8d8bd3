"""Error hierarchy shared by every numerical module and the CLI."""


class EigenstrataError(Exception):
    """Base class for all eigenstrata errors."""


# ------------ input errors ------------


class InvalidSpec(EigenstrataError, ValueError):
    """An ensemble or run configuration violates its invariants."""


class RankOutOfRange(EigenstrataError, ValueError):
    """An eigenvalue or order-statistic rank lies outside its valid range."""


class DomainError(EigenstrataError, ValueError):
    """An abscissa lies outside the domain where the quantity is defined."""


class AlphaOutOfRange(EigenstrataError, ValueError):
    """The Wishart parameter is too small for the integral representation."""


class ConfigError(EigenstrataError, ValueError):
    """A run configuration file or flag could not be applied."""


class OutOfGrid(EigenstrataError, ValueError):
    """A query lies outside a tabulated solution grid."""


# ------------ numerical errors ------------


class NumericalError(EigenstrataError, ArithmeticError):
    """Base class for failures of a numerical procedure."""


class DegenerateInitCondition(NumericalError):
    """A second-solution initial condition would divide by a vanishing value."""


class QuadratureNotConverged(NumericalError):
    """Adaptive quadrature stopped before reaching the requested accuracy."""


class GridTooCoarse(NumericalError):
    """A phase grid is too coarse to unwrap the phase by continuity."""


class TurningPointProximity(NumericalError):
    """A semiclassical form was requested too close to a turning point."""


class EdgeSingularity(NumericalError):
    """An asymptotic density correction dominates its leading term."""


class VarianceUndefined(NumericalError):
    """The fluctuation amplitude is too large for a positive variance."""


class NotFound(NumericalError):
    """A searched feature (root, sign change, peak) does not exist."""


class BlowUp(NumericalError):
    """An ODE solution left the expected branch and diverged."""


class InsufficientGrid(NumericalError):
    """A tabulated solution does not carry enough probability mass."""


class SplitMismatch(NumericalError):
    """The smooth and fluctuating parts do not add back up to the density."""
