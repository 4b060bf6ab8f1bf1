"""Exception types shared across the package.

The CLI maps any :class:`TreeFDRError` (and plain ``ValueError``) to exit
code 2; everything else is treated as an internal error (exit code 1).
"""


class TreeFDRError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TreeFDRError, ValueError):
    """Invalid user input (bad values, malformed structure)."""


class EmptyInputError(ValidationError):
    """No usable rows or values were supplied."""


class PvalueOutOfRangeError(ValidationError):
    """A probability fell outside [0, 1] (or was NaN)."""


class DuplicateLeafPathError(ValidationError):
    """The same leaf path appeared more than once."""


class InconsistentDepthError(ValidationError):
    """A path is both a leaf and an ancestor of another leaf."""


class InvalidNodeIdError(TreeFDRError, KeyError):
    """Node id does not refer to a node of this tree."""


class MissingPvalueError(ValidationError):
    """A node that must carry a p-value does not have one."""


class TreeMismatchError(ValidationError):
    """Two inputs that must describe the same tree do not agree."""


class ParseError(ValidationError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class SimulationError(TreeFDRError):
    """A Monte-Carlo replicate failed; the message names the replicate."""
