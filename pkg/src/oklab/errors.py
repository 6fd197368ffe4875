"""Exception types shared across the toolkit.

Each class carries the CLI exit status it maps to.
"""


class OklabError(Exception):
    exit_code = 2


class InputError(OklabError, ValueError):
    """Malformed or inadmissible input (bad file, bad parameter, failed precondition)."""

    exit_code = 2


class DimensionError(InputError):
    pass


class DependenceError(InputError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PropertyViolation(OklabError):
    exit_code = 1


class NumericFailure(OklabError):
    """A numerical procedure did not reach its tolerance."""

    exit_code = 3
