"""Exception classes. CLI exit codes are attached to each class."""


class HHNetError(Exception):
    exit_code = 1


class ValidationError(HHNetError, ValueError):
    """Input failed validation. ``problems`` lists every issue found."""

    exit_code = 2

    def __init__(self, message, problems=None):
        self.problems = list(problems or [])
        if self.problems:
            message = message + ":\n  " + "\n  ".join(self.problems)
        super().__init__(message)


class DegeneracyError(HHNetError, ValueError):
    """A quantity is numerically undefined for the given input (e.g. no edges)."""

    exit_code = 4
