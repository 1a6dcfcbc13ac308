class FinslerConeError(Exception):
    """Base class for every failure raised by the engine."""
    pass


class DomainError(FinslerConeError):
    """Point outside the chart domain of the model."""
    pass


class ConeDomainError(FinslerConeError):
    """Tangent vector outside the conic domain where the Lagrangian is evaluable."""
    pass


class DegenerateTensorError(FinslerConeError):
    """Fundamental tensor numerically singular."""
    pass


class NoRootError(FinslerConeError):
    pass


class BracketError(FinslerConeError):
    pass


class NotOnBoundaryError(FinslerConeError):
    pass


class NonTimelikeBoundaryError(FinslerConeError):
    """The cone does not meet the boundary tangent space transversally."""
    pass


class NotTangentError(FinslerConeError):
    pass


class NotInwardError(FinslerConeError):
    pass


class InvalidInitialDataError(FinslerConeError):
    pass


class StiffnessError(FinslerConeError):
    """Integrator step size collapsed."""
    pass


class NotAGeodesicError(FinslerConeError):
    pass


class NotLightlikeError(FinslerConeError):
    pass


class NotProductFormError(FinslerConeError):
    pass


class GridMismatchError(FinslerConeError):
    pass


class NotStationaryError(FinslerConeError):
    pass


class BudgetExhaustedError(FinslerConeError):
    pass


class DecayViolationError(FinslerConeError):
    """Asymptotic perturbation does not vanish at infinity."""
    pass


class ChartLeakError(FinslerConeError):
    """Geodesic left a quotient chart without a valid deck continuation."""
    pass


class ConfigError(FinslerConeError):
    pass


class ModelDefinitionError(FinslerConeError):
    """Malformed or unsupported model definition file."""
    pass
