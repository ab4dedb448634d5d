class LeastGradientError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(LeastGradientError, ValueError):
    pass


class InvalidNormError(LeastGradientError, ValueError):
    pass


class DomainError(LeastGradientError, ValueError):
    pass


class NotUniformlyConvexError(DomainError):
    pass


class HypothesisError(LeastGradientError, ValueError):
    """A solver precondition (strict convexity of the norm or domain) does not hold."""


class MatchingError(LeastGradientError, ValueError):
    pass


class NestingError(LeastGradientError, RuntimeError):
    pass


class DivergenceError(LeastGradientError, RuntimeError):
    pass


class NoFacetError(LeastGradientError, ValueError):
    pass


class ConstructionError(LeastGradientError, ValueError):
    pass
