"""Shared exception types.

Two families matter for exit-code mapping in the CLI: anything wrong
with user-supplied input (files, flags, circuit/layout mismatches) is an
``InputError``; failures that arise while a structurally valid problem
is being scheduled are ``SchedulingError``s.
"""


class InputError(ValueError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    """Syntax error in an input file; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LayoutError(InputError):
    """Circuit does not fit the layout, or layout parameters are invalid."""


class PatchAccessError(InputError):
    """A product asks for a patch access pattern the layout forbids."""


class SchedulingError(RuntimeError):
    """Scheduling failed on a structurally valid problem."""


class StarvationError(SchedulingError):
    """No progress is possible: nothing commits and nothing is cultivating."""


class ValidationError(SchedulingError):
    """A finished schedule violated one of the validity checks."""
