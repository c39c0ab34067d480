"""Exception types raised across the package."""


class GenDickeError(Exception):
    """Base class for all package errors."""


class InvalidParameters(GenDickeError, ValueError):
    """Model or run parameters outside their admissible range."""


class PoleSingularity(GenDickeError):
    """Evaluation in (jz, phi) coordinates too close to a pole."""


class NonConvergence(GenDickeError):
    """An iterative numerical procedure failed to converge."""


class DegenerateBranch(GenDickeError):
    """A closed-form root pair is requested where its quadratic degenerates."""


class DegenerateDenominator(GenDickeError):
    """The limiting-angle denominator vanishes (phi-independent bound)."""


class DivergenceFlag(GenDickeError):
    """The DoS derivative diverges at the requested energy."""


class GridTooLarge(GenDickeError):
    """A sweep grid exceeds the allowed number of cells."""


class PreconditionViolated(GenDickeError):
    """An operation was called outside its domain of validity."""


class ConfigError(GenDickeError):
    """Malformed or unknown configuration input."""
