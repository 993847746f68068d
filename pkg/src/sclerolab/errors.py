"""Exception types shared across the library.

Numerical failures (NonFinite) are kept apart from configuration problems
(ValidationError, ParseError) so the command line can map them to distinct
exit codes.
"""

from __future__ import annotations


class SclerolabError(Exception):
    """Base class for all library-specific errors."""


class ValidationError(SclerolabError, ValueError):
    """A constructor argument or config value violates a stated invariant."""


class ParseError(SclerolabError, ValueError):
    """A config file could not be parsed; message carries file/line context."""


class Infeasible(SclerolabError, ValueError):
    """No admissible Lyapunov weights exist (chi >= chi_subcrit)."""


class NonPositiveGap(SclerolabError, ValueError):
    """A Lyapunov quadratic form fails to be negative definite.

    The computed triple of gaps is attached as ``gaps`` so callers can
    inspect boundary cases (a gap of exactly zero).
    """

    def __init__(self, message: str, gaps: tuple[float, float, float]):
        super().__init__(message)
        self.gaps = gaps


class MismatchedRuns(SclerolabError, ValueError):
    """Two trajectories cannot be compared (different grids, times or params)."""


class NonFinite(SclerolabError, FloatingPointError):
    """A field picked up a NaN or Inf; the run is aborted.

    ``t`` is the simulation time at which the failing step started.
    """

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class StepTooLarge(UserWarning):
    """Advisory only: m grew past 10x max(1, its value at step entry)."""
