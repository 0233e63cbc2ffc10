"""Exception types shared across the package."""


class SurvoptError(ValueError):
    """Base class for every input, model or configuration error."""


class DegenerateInputError(SurvoptError):
    """Inputs make a formula undefined (zero mean, zero variance, ...)."""


class SingularSystemError(SurvoptError):
    """A linear system that must be solved has no unique solution."""


class InfeasibleModelError(SurvoptError):
    """The inventory model has no valid trajectory for these parameters."""


class ConfigurationError(SurvoptError):
    """A required parameter is missing or outside its allowed set."""
