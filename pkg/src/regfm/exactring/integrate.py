"""Integration of closed one-forms by antidifferentiating along coordinate axes."""

from __future__ import annotations

from ..errors import NotClosed
from .poly import Poly, as_fraction
from .series import TruncSeries


def diff(p, var: int):
    """Partial derivative in any of the scalar rings (Poly, TruncSeries, JetExpr)."""
    return p.diff(var)


def evaluate(p: Poly, point):
    return p.eval(point)


def closedness_defect(omega):
    """First pair (j, k), j < k, with d_j w_k != d_k w_j, as ``(j, k, difference)``."""
    n = len(omega)
    for j in range(n):
        for k in range(j + 1, n):
            d = omega[k].diff(j) - omega[j].diff(k)
            if isinstance(d, TruncSeries):
                if not d.is_zero():
                    return j, k, d
            elif not d.is_zero():
                return j, k, d
    return None


def integrate_closed_one_form(omega, base):
    """Return f with df = omega and f(base) = 0.

    ``omega`` is a sequence of Poly or of TruncSeries (expanded at ``base``).
    Raises :class:`NotClosed` on the first non-closed pair.
    """
    omega = list(omega)
    n = len(omega)
    if n == 0:
        raise ValueError("empty one-form")
    base = tuple(as_fraction(b) for b in base)
    defect = closedness_defect(omega)
    if defect is not None:
        raise NotClosed(*defect)

    if isinstance(omega[0], TruncSeries):
        for w in omega:
            if w.base != base:
                raise ValueError("series components must be expanded at the integration base")
        order = min(w.order for w in omega) + 1
        total = Poly.zero(n)
        for k, w in enumerate(omega):
            # in shifted coordinates the base is the origin: drop h_{k+1..n}
            g = Poly(n, {e: c for e, c in w.poly.items() if not any(e[k + 1:])})
            total = total + g.antiderivative(k)
        return TruncSeries(base, order, total)

    total = Poly.zero(n)
    for k, w in enumerate(omega):
        g = w
        for m in range(k + 1, n):
            g = g.subs_value(m, base[m])
        a = g.antiderivative(k)
        total = total + a - a.subs_value(k, base[k])
    return total
