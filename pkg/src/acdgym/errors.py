"""Exception types raised across the package."""


class AcdGymError(Exception):
    """Base class for all package errors."""


class InvalidTopologyError(AcdGymError, ValueError):
    pass


class InvalidActionError(AcdGymError, ValueError):
    pass


class EpisodeFinishedError(AcdGymError, RuntimeError):
    """Raised when ``step`` is called on an episode that is already done."""


class ConfigurationError(AcdGymError, ValueError):
    pass


class EmptyInputError(AcdGymError, ValueError):
    pass
