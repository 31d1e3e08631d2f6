"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """A parameter is outside its valid domain.

    ``key`` carries the dotted config path when the error originates from a
    config document.
    """

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class UnsupportedFeatureError(ConfigurationError):
    """The request is well-formed but names a feature the simulator does not model."""
