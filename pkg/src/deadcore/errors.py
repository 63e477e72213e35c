"""Exception hierarchy shared by all deadcore modules."""


class DeadcoreError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(DeadcoreError):
    """Non-finite, out-of-range or structurally impossible input."""


class DomainError(DeadcoreError):
    """Evaluation requested outside the mathematical domain of a term
    (e.g. a negative base under a non-integer power)."""


class SingularPoint(DeadcoreError):
    """Evaluation requested exactly at a singular point of a weight or ODE."""


class DegenerateBalance(DeadcoreError):
    """The exponent-balancing system has no solution (a root index or
    divisor vanished or changed sign)."""


class SignError(DeadcoreError):
    """The coefficient of a gradient term has the wrong sign for the
    selected variant."""


class TieUnresolved(DeadcoreError):
    """Both candidate exponents coincide; the profile selector does not
    define a scale constant for the tied case."""


class NoDeadCore(DeadcoreError):
    """The dead-core compatibility condition R > T fails: no plateau fits
    inside the requested ball."""


class DegenerateGradient(DeadcoreError):
    """h' vanished mid-integration while the equation still forces
    h'' through a negative power of h'."""


class Overflow(DeadcoreError):
    """The integrated solution exceeded the blow-up guard."""


class BracketError(DeadcoreError):
    """A root bracket does not actually straddle the target value."""


class InsufficientData(DeadcoreError):
    """Too few ladder samples to estimate a limit."""


class UnsupportedForThreshold(DeadcoreError):
    """No closed-form growth threshold exists for this nonlinearity; use
    the oscillation criterion instead."""
