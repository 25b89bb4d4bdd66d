"""Exception hierarchy.

The CLI maps these onto exit codes: :class:`InputError` (and subclasses) to 1,
:class:`DivergenceError` / :class:`ConvergenceError` to 3.
"""


class TorzetaError(Exception):
    """Base class for all library errors."""


class InputError(TorzetaError, ValueError):
    """Malformed or invariant-violating input."""


class SpectrumError(InputError):
    """A length spectrum failed to parse or violates an invariant."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


class DivergenceError(TorzetaError):
    """Evaluation point lies on or left of the abscissa of absolute convergence."""

    def __init__(self, message, s=None, abscissa=None, k=None):
        super().__init__(message)
        self.s = s
        self.abscissa = abscissa
        self.k = k


class ConvergenceError(TorzetaError):
    """A truncation or quadrature error could not be brought under the requested budget."""

    def __init__(self, message, required_cutoff=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class QuadratureError(ConvergenceError):
    """Adaptive quadrature reported non-convergence."""


class FitError(InputError):
    """Degenerate least-squares design."""
