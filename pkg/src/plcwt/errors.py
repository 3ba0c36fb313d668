"""Exception types raised by the transform library."""


class PlcwtError(Exception):
    """Base class for all library errors."""


class GridMismatch(PlcwtError, ValueError):
    pass


class BandwidthError(PlcwtError, ValueError):
    """Input chirp would alias on the sampling grid."""


class ScaleError(PlcwtError, ValueError):
    pass


class DivergenceError(PlcwtError, ArithmeticError):
    """Admissibility quadrature failed to stabilise."""


class AdmissibilityError(PlcwtError, ValueError):
    pass


class MomentOverflow(PlcwtError, ArithmeticError):
    """Field does not decay at the grid border, so moments are meaningless."""


class DomainError(PlcwtError, ValueError):
    pass


class EmptyStack(PlcwtError, ValueError):
    pass


class FormatError(PlcwtError, ValueError):
    pass


class ConfigError(PlcwtError, ValueError):
    pass
