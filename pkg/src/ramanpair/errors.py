"""Exception types shared across the package."""


class SimError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(SimError):
    """Operator or state dimensions do not match the expected signature."""


class ConfigError(SimError):
    """Invalid system description or unparseable config document."""


class SingularDetuningError(SimError):
    """A detuning required by an analytic formula is zero."""


class IntegrationError(SimError):
    """Time evolution failed its accuracy or physicality checks."""


class ScanError(SimError):
    """Frequency scan could not bracket or identify its objective."""
