"""Exception types shared across the package."""

from __future__ import annotations


class SpinStarError(Exception):
    """Base class for errors raised by this package."""


class SymmetryError(SpinStarError):
    """A construction required equal potentials on a set of nodes and got
    values differing beyond tolerance."""


class ResourceLimitError(SpinStarError):
    """The requested problem size exceeds what this code is prepared to
    materialize (it would allocate an impractically large dense matrix)."""


class NoRealDesignError(SpinStarError):
    """The hub/bystander potentials implied by a candidate root are not real,
    or neither assignment satisfies the constant-term condition."""


class InfeasibleDesignError(SpinStarError):
    """No admissible root exists for the requested bystander count and
    spectrum ratio.  Carries the :class:`FeasibilityReport` that explains why
    in ``report`` (may be ``None`` when raised before the analysis ran)."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
