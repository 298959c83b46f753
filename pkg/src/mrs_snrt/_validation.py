"""Input validation helpers shared by the model, optimizer and CLI."""

import numpy as np


class InvalidParameterError(ValueError):
    """A parameter violates its documented domain."""


class MalformedEnvelopeError(InvalidParameterError):
    """An RF pulse envelope is not a valid sampled waveform."""


class DegenerateObjectiveError(ArithmeticError):
    """The objective evaluated to a non-finite value."""


def check_finite(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(name, value):
    check_finite(name, value)
    if not np.all(np.asarray(value, dtype=float) > 0):
        raise InvalidParameterError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(name, value):
    check_finite(name, value)
    if not np.all(np.asarray(value, dtype=float) >= 0):
        raise InvalidParameterError(f"{name} must be >= 0, got {value!r}")
    return value


def check_interval(name, value, low, high):
    """Closed-interval check ``low <= value <= high``."""
    check_finite(name, value)
    arr = np.asarray(value, dtype=float)
    if not np.all((arr >= low) & (arr <= high)):
        raise InvalidParameterError(
            f"{name} must lie in [{low:g}, {high:g}], got {value!r}")
    return value


def as_float(value):
    """Collapse 0-d arrays to Python floats, leave arrays alone."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr)
    return arr

