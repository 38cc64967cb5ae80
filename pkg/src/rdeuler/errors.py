"""Exception types shared across the solver.

The command line driver maps these onto process exit codes, so library code
should raise the most specific class that applies instead of bare ValueError.
"""


class SolverError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SolverError):
    """Invalid or inconsistent run configuration."""


class MeshError(SolverError):
    """Mesh loading, generation or topology failure."""


class MeshFormatError(MeshError):
    """Unparseable mesh file. Carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PeriodicityError(MeshError):
    """Face sets declared periodic do not match under translation."""


class DegenerateElementError(MeshError):
    """Element with non-positive or vanishing measure."""


class StateError(SolverError):
    """Non-admissible thermodynamic state (rho <= 0 or p <= 0)."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class StepFailureError(SolverError):
    """A time step could not be completed.

    Records the simulation time of the step and, when available, the
    deferred correction iteration that produced the inadmissible state.
    """

    def __init__(self, message, time=None, iteration=None):
        super().__init__(message)
        self.time = time
        self.iteration = iteration
