"""Exception hierarchy shared by all qpade modules.

Every failure mode is an error, never a sentinel value.  Plain
``ZeroDivisionError`` is used for exact division by zero (``fractions.Fraction``
already raises it); the classes below cover the domain-specific conditions.
"""

from __future__ import annotations

__all__ = [
    "QPadeError",
    "NonTerminatingError",
    "NonUnitConstantTermError",
    "InsufficientCoefficientsError",
    "DegenerateParametersError",
    "KernelDimensionError",
    "ShapeViolationError",
    "DegenerateTauError",
    "RatioSingularError",
    "StepSingularError",
    "CertificationFailedError",
    "PoleAtEvaluationPointError",
]


class QPadeError(Exception):
    """Base class for all qpade-specific errors."""


class NonTerminatingError(QPadeError, ValueError):
    """A basic hypergeometric sum has no upper parameter of the form q**(-k)."""


class NonUnitConstantTermError(QPadeError, ZeroDivisionError):
    """Series inversion was requested for a series with zero constant term."""


class InsufficientCoefficientsError(QPadeError, IndexError):
    """A Jacobi-Trudi determinant needs p-coefficients beyond those supplied."""


class DegenerateParametersError(QPadeError, ValueError):
    """A normalizing determinant (e.g. the rectangular Schur tau) vanished."""


class KernelDimensionError(QPadeError, ValueError):
    """The linear Pade system has kernel dimension different from one."""


class ShapeViolationError(QPadeError, ValueError):
    """A claimed factored shape left a nonzero residual coefficient."""


class DegenerateTauError(QPadeError, ZeroDivisionError):
    """A tau determinant entering a solution formula vanished."""


class RatioSingularError(QPadeError, ZeroDivisionError):
    """A ratio equation for f or g degenerated and cannot be solved."""


class StepSingularError(QPadeError, ZeroDivisionError):
    """An evolution-map step hit a vanishing denominator or singular branch."""


class CertificationFailedError(QPadeError, ValueError):
    """A point failed the base-point indeterminacy certification."""


class PoleAtEvaluationPointError(QPadeError, ZeroDivisionError):
    """An operator coefficient or elimination divisor vanished at x0."""
