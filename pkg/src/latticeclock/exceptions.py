"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalError -> 3,
BracketError (no root / no extremum) -> 4.
"""


class LatticeClockError(Exception):
    """Base class for all package errors."""


class UnknownSpeciesError(LatticeClockError):
    """Requested species is not in the atomic data registry."""


class DomainError(LatticeClockError, ValueError):
    """An argument is outside the physical or documented domain."""


class NearResonanceError(DomainError):
    """Trapping light too close to an atomic line for the far-detuned model."""


class BracketError(LatticeClockError):
    """A root or extremum was requested but none exists in the bracket."""


class LabelContinuationError(LatticeClockError):
    """Adiabatic label assignment failed (ambiguous overlaps)."""


class FitError(LatticeClockError):
    """A least-squares fit was underdetermined or degenerate."""


class ConfigError(LatticeClockError):
    """Run configuration failed validation."""


class NumericalError(LatticeClockError):
    """A numerical routine failed to reach its documented tolerance."""
