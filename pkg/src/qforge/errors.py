"""Exception hierarchy shared by all qforge modules."""


class QForgeError(Exception):
    """Base class for all qforge errors."""


class DivisionByZero(QForgeError, ZeroDivisionError):
    """Exact division by a zero field element."""


class ZeroDenominator(QForgeError, ZeroDivisionError):
    """A denominator vanished at a concrete evaluation point."""


class InvalidDomain(QForgeError):
    """Numeric operation outside its convergence domain (e.g. |q| >= 1)."""


class NotTerminating(QForgeError):
    """No terminating exponent r <= bound was detected for an exact series."""


class NoConvergence(QForgeError):
    """Numeric series summation detected sustained term growth."""


class NotInTable(QForgeError, KeyError):
    """Shift vector has no transcribed (Q, R) pair."""


class BudgetExceeded(QForgeError):
    """Derived relation exceeded the requested x-degree budget."""


class VerificationFailed(QForgeError):
    """A derived relation failed its independent residual verification."""


class UndefinedAction(QForgeError):
    """A symmetry generator divides by an identically-zero parameter."""


class NoRepresentativeFound(QForgeError):
    """No orbit member satisfies the canonical representative condition."""


class DegenerateFamily(QForgeError):
    """Parameter family lies on an excluded locus (identically degenerate)."""


class DegenerateParameter(QForgeError):
    """A concrete parameter value makes the requested identity undefined."""


class SamplingExhausted(QForgeError):
    """Random sampling kept hitting degenerate points."""


class ConstraintViolated(QForgeError):
    """Bindings do not satisfy an identity record's constraints."""
