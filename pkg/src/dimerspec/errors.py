"""Exception hierarchy shared by all dimerspec modules."""


class DimerspecError(Exception):
    """Base class for all package errors."""


class IncompatibleUnits(DimerspecError):
    """Conversion requested between unit tags of different dimensions."""


class ParseError(DimerspecError):
    """Malformed input file."""


class ValidationError(DimerspecError):
    """Input parsed but violates a structural invariant."""


class InvalidParameter(DimerspecError):
    """Argument outside its documented domain."""


class ConvergenceError(DimerspecError):
    """Iterative solver failed to converge after the documented retries."""


class InvalidEnergy(DimerspecError):
    """Continuum energy at or below threshold."""


class InsufficientLevels(DimerspecError):
    """Too few levels supplied for a near-dissociation fit."""


class InvalidQuantumNumbers(DimerspecError):
    """Angular-momentum arguments out of range or of mixed half-integrity."""


class MissingDipole(DimerspecError):
    """No dipole function connects the requested channel pair."""


class SelectionRuleViolation(DimerspecError):
    """Quantum numbers violate a hard selection rule for the operation."""


class OnResonance(DimerspecError):
    """Probe frequency sits on a zero-width pole."""


class DegeneratePair(DimerspecError):
    """Two supposedly distinct levels coincide."""


class AllPoles(DimerspecError):
    """Every sample of the requested window falls inside a pole exclusion."""
