"""Exception hierarchy shared by every module."""


class UbrepError(Exception):
    """Base class for all library errors."""


class ParseError(UbrepError, ValueError):
    pass


class ParameterError(UbrepError, ValueError):
    pass


class SizeError(UbrepError):
    """An enumeration would exceed the configured element cap."""

    def __init__(self, predicted, cap):
        self.predicted = predicted
        self.cap = cap
        super().__init__(f"ball would contain {predicted} elements, cap is {cap}")


class WindowError(UbrepError):
    """The enumerated ball is too small for the requested window."""

    def __init__(self, required, available):
        self.required = required
        self.available = available
        super().__init__(f"window needs ball radius {required}, enumerated radius is {available}")


class ModeError(UbrepError):
    """A certified operator-level quantity was requested in windowed mode."""


class NumericError(UbrepError):
    pass


class NumericIntegrityError(NumericError):
    pass


class CompositionError(UbrepError):
    pass


class SchemaError(UbrepError):
    pass
