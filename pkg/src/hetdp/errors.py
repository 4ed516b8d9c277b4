"""Exception types shared across the library."""


class InvalidParameterError(ValueError):
    """A parameter is outside its documented range (non-positive scale, bad q, ...)."""


class EmptyInputError(ValueError):
    """An operation that needs data received an empty collection."""


class DegenerateSampleError(RuntimeError):
    """Threshold sampling kept zero points, so no estimate can be released.

    The experiment harness catches this and records the trial as failed.
    """


class UnsupportedError(ValueError):
    """The request is valid but outside the scope an operation supports."""
