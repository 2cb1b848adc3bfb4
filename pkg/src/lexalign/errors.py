"""Exception hierarchy shared across the toolkit.

Every error class carries the process exit code the CLI maps it to, so
the service layer and the CLI agree on failure semantics without
re-classifying exceptions.
"""


class ToolkitError(Exception):
    """Base class for all toolkit failures."""

    exit_code = 1


class ParseError(ToolkitError):
    """Malformed or unreadable input file."""

    exit_code = 2


class ValidationError(ToolkitError):
    """Input violates an operation's contract (shape, range, vocabulary)."""

    exit_code = 2


class EmptySeedError(ToolkitError):
    """No usable supervision pairs (seed, surviving, or mutual-NN)."""

    exit_code = 3


class TrainingDivergenceError(ToolkitError):
    """Adversarial training produced a non-finite loss."""

    exit_code = 4


class NoEvaluableQueriesError(ToolkitError):
    """Evaluation was left with zero queries after OOV and gold filtering."""

    exit_code = 5
