"""Exception types shared across the toolkit.

Everything raised on bad input or an unsatisfiable request derives from
:class:`ToolkitError`, so the command-line layer can map domain failures to a
single exit code without enumerating modules.
"""


class ToolkitError(Exception):
    """Base class for all domain errors raised by this package."""


class ConfigError(ToolkitError):
    """A config document is malformed or violates a model invariant."""


class KernelNotFound(ToolkitError):
    """The named analysis kernel is not part of the workload."""


class InfeasibleUtilization(ToolkitError):
    """Busy time exceeds the idle-time budget of the staging tier."""


class NonPositiveTick(ToolkitError):
    """The simulator was asked to run with a tick <= 0."""


class InfeasibleConfig(ToolkitError):
    """An operation that requires a feasible config was given an infeasible one."""


# -- tabular data ------------------------------------------------------------

class MissingFile(ToolkitError):
    """An input path does not exist."""


class HeaderMismatch(ToolkitError):
    """Input files do not agree on a single well-formed header."""


class EmptyInput(ToolkitError):
    """No data rows (or records) were supplied."""


class UnknownVariable(ToolkitError):
    """A referenced column name is not part of the schema."""


class ReadPastEnd(ToolkitError):
    """read() was called with no rows left before the cursor."""


class TypeMismatch(ToolkitError):
    """An operation was applied to a column of the wrong kind."""


class EmptyJob(ToolkitError):
    """A map-reduce run had no chunks to process."""


# -- statistics --------------------------------------------------------------

class InsufficientObservations(ToolkitError):
    """Too few rows for the requested fit."""


class CollinearDesign(ToolkitError):
    """The design matrix is rank deficient (a normal-equations pivot collapsed)."""


class InvalidSums(ToolkitError):
    """Sum-of-squares inputs violate 0 <= ss_reg <= ss_total or n <= k + 1."""


class DomainError(ToolkitError):
    """A distribution function was evaluated outside its domain."""


# -- factor analysis ---------------------------------------------------------

class ConstantColumn(ToolkitError):
    """A column has zero variance, so correlations are undefined."""


class MissingData(ToolkitError):
    """Numeric input contains missing (or non-finite) cells."""


class ConvergenceFailure(ToolkitError):
    """An iterative routine exhausted its iteration budget."""


class LengthMismatch(ToolkitError):
    """Parallel sequences differ in length."""
