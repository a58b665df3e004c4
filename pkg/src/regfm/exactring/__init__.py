"""Exact scalar rings: rational polynomials, truncated series and jet polynomials."""

from fractions import Fraction

from .integrate import closedness_defect, diff, evaluate, integrate_closed_one_form
from .jet import MAX_ORDER, JetExpr, mu_jet, v_jet
from .poly import Poly, as_fraction
from .series import DEFAULT_ORDER, TruncSeries

Rational = Fraction


def zero_like(x):
    """Additive zero in the ring of ``x``."""
    return x * 0


def is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


__all__ = [
    "Rational", "Poly", "TruncSeries", "JetExpr", "mu_jet", "v_jet", "MAX_ORDER",
    "DEFAULT_ORDER", "as_fraction", "diff", "evaluate", "integrate_closed_one_form",
    "closedness_defect", "zero_like", "is_zero",
]
