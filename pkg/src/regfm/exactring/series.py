"""Truncated multivariate Taylor series at a rational base point.

A series is a polynomial in the shifted variables ``h = r - base`` together
with an order ``N``: everything of total degree > N is unknown and dropped.
Differentiation lowers the known order by one and antidifferentiation raises
it by one, so equality checks always happen at the order that is actually
known.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import SingularPivot
from .poly import Poly, _is_scalar, as_fraction

__all__ = ["TruncSeries", "DEFAULT_ORDER"]

DEFAULT_ORDER = 10


def _mul_truncated(a: Poly, b: Poly, order: int) -> Poly:
    out = {}
    bt = list(b.items())
    bdeg = [sum(e) for e, _ in bt]
    for e1, c1 in a.items():
        d1 = sum(e1)
        if d1 > order:
            continue
        for (e2, c2), d2 in zip(bt, bdeg):
            if d1 + d2 > order:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return Poly(a.nvars, out)


class TruncSeries:
    __slots__ = ("base", "order", "poly")

    def __init__(self, base, order: int, poly: Poly):
        self.base = tuple(as_fraction(b) for b in base)
        if poly.nvars != len(self.base):
            raise ValueError("series polynomial and base point disagree on dimension")
        self.order = order
        self.poly = poly.truncate(order)

    @classmethod
    def from_poly(cls, p: Poly, base, order: int = DEFAULT_ORDER) -> "TruncSeries":
        return cls(base, order, p.shift(base))

    @classmethod
    def const(cls, base, order, c):
        return cls(base, order, Poly.const(len(base), c))

    @property
    def nvars(self):
        return len(self.base)

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            if other.base != self.base:
                raise ValueError("series expanded at different base points")
            return other
        if isinstance(other, Poly):
            return TruncSeries.from_poly(other, self.base, self.order)
        if _is_scalar(other):
            return TruncSeries.const(self.base, self.order, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TruncSeries(self.base, min(self.order, o.order), self.poly + o.poly)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.base, self.order, -self.poly)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TruncSeries(self.base, min(self.order, o.order), self.poly - o.poly)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if _is_scalar(other):
            return TruncSeries(self.base, self.order, self.poly * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        return TruncSeries(self.base, order, _mul_truncated(self.poly, o.poly, order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (Fraction(1) / as_fraction(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        result = TruncSeries.const(self.base, self.order, 1)
        for _ in range(k):
            result = result * self
        return result

    def inverse(self) -> "TruncSeries":
        """1/s via the geometric series in the non-constant part."""
        c0 = self.poly.constant_term()
        if not c0:
            raise SingularPivot(f"series has zero constant term at base {self.base}")
        rest = (self.poly - c0) * (-1 / c0)
        term = Poly.const(self.nvars, 1)
        total = Poly.const(self.nvars, 1)
        for _ in range(self.order):
            term = _mul_truncated(term, rest, self.order)
            if term.is_zero():
                break
            total = total + term
        return TruncSeries(self.base, self.order, total * (1 / c0))

    def diff(self, i: int) -> "TruncSeries":
        return TruncSeries(self.base, self.order - 1, self.poly.diff(i))

    def is_zero(self) -> bool:
        """Zero up to the known order."""
        return self.poly.is_zero()

    def constant_term(self) -> Fraction:
        return self.poly.constant_term()

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(self.base, min(order, self.order), self.poly)

    def eq_to_order(self, other, order: int | None = None) -> bool:
        o = self._coerce(other)
        k = min(self.order, o.order) if order is None else order
        return (self.poly - o.poly).truncate(k).is_zero()

    def __eq__(self, other):
        if isinstance(other, (TruncSeries, Poly)) or _is_scalar(other):
            try:
                return self.eq_to_order(other)
            except ValueError:
                return False
        return NotImplemented

    __hash__ = None

    def to_literal(self) -> str:
        return self.poly.to_literal(prefix="h")

    def to_dict(self) -> dict:
        return {
            "base": [str(b) for b in self.base],
            "order": self.order,
            "terms": self.to_literal(),
        }

    @classmethod
    def from_dict(cls, d) -> "TruncSeries":
        base = [Fraction(b) for b in d["base"]]
        return cls(base, int(d["order"]), Poly.parse(d["terms"], len(base), prefix="h"))

    def __repr__(self):
        return f"TruncSeries(base={[str(b) for b in self.base]}, order={self.order}, {self.to_literal()!r})"
