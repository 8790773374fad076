class FMSMError(Exception):
    """Base class for library errors."""


class ValidationError(FMSMError, ValueError):
    """Malformed instance data; ``path`` locates the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InfeasibleError(FMSMError):
    """No set satisfies both the matroid and the color bounds."""


class ConfigurationError(FMSMError):
    """An algorithm was invoked outside its preconditions."""


class UnsupportedSizeError(FMSMError):
    """The request exceeds an exhaustive-enumeration cap."""


class GenerationError(FMSMError):
    """Random instance generation ran out of retries."""
