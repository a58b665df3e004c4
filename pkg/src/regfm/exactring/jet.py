"""Polynomials in formal jet symbols for mu-components and V.

A symbol is ``("mu", i, K)`` or ``("V", K)`` where ``K`` is a sorted tuple
of coordinate indices (the multiset of derivative directions).  Symbols
commute; differentiation by coordinate ``j`` prolongs ``K`` by ``j`` via the
product rule.  Jet order is capped at :data:`MAX_ORDER`.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, _is_scalar, as_fraction

__all__ = ["JetExpr", "mu_jet", "v_jet", "MAX_ORDER"]

MAX_ORDER = 2


def _mono_mul(m1, m2):
    d = dict(m1)
    for s, a in m2:
        d[s] = d.get(s, 0) + a
    return tuple(sorted(d.items()))


def _prolong(sym, j):
    K = tuple(sorted(sym[-1] + (j,)))
    if len(K) > MAX_ORDER:
        raise ValueError(f"jet order capped at {MAX_ORDER}: cannot differentiate {sym}")
    return sym[:-1] + (K,)


def _sym_name(sym):
    K = sym[-1]
    head = f"mu{sym[1] + 1}" if sym[0] == "mu" else "V"
    if not K:
        return head
    return "".join(f"d{k + 1}" for k in K) + head


class JetExpr:
    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for m, c in (terms or {}).items():
            c = as_fraction(c)
            if c:
                clean[m] = c
        self._terms = clean

    @classmethod
    def symbol(cls, sym) -> "JetExpr":
        return cls({((sym, 1),): 1})

    @classmethod
    def const(cls, c):
        return cls({(): c})

    def items(self):
        return self._terms.items()

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def symbols(self):
        return sorted({s for m in self._terms for s, _ in m})

    def _coerce(self, other):
        if isinstance(other, JetExpr):
            return other
        if _is_scalar(other):
            return JetExpr.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in o._terms.items():
            out[m] = out.get(m, 0) + c
        return JetExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return JetExpr({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            return JetExpr({m: c * other for m, c in self._terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return JetExpr(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def diff(self, j: int) -> "JetExpr":
        out = {}
        for m, c in self._terms.items():
            for idx, (s, a) in enumerate(m):
                rest = m[:idx] + ((s, a - 1),) + m[idx + 1:] if a > 1 else m[:idx] + m[idx + 1:]
                nm = _mono_mul(rest, ((_prolong(s, j), 1),))
                out[nm] = out.get(nm, 0) + c * a
        return JetExpr(out)

    def subs_zero(self, predicate) -> "JetExpr":
        """Drop every monomial containing a symbol for which ``predicate`` holds."""
        return JetExpr(
            {m: c for m, c in self._terms.items() if not any(predicate(s) for s, _ in m)}
        )

    def substitute(self, mu, V) -> Poly:
        """Instantiate mu-jets from the Poly list ``mu`` and V-jets from ``V``."""
        n = V.nvars
        cache = {}

        def value(sym):
            if sym not in cache:
                p = mu[sym[1]] if sym[0] == "mu" else V
                for k in sym[-1]:
                    p = p.diff(k)
                cache[sym] = p
            return cache[sym]

        total = Poly.zero(n)
        for m, c in self._terms.items():
            term = Poly.const(n, c)
            for s, a in m:
                term = term * value(s) ** a
            total = total + term
        return total

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in sorted(self._terms.items(), key=lambda t: [(s, a) for s, a in t[0]]):
            mono = "*".join(_sym_name(s) + (f"^{a}" if a > 1 else "") for s, a in m)
            cs = str(c)
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"JetExpr({self})"


def mu_jet(i: int, K=()) -> JetExpr:
    return JetExpr.symbol(("mu", i, tuple(sorted(K))))


def v_jet(K=()) -> JetExpr:
    return JetExpr.symbol(("V", tuple(sorted(K))))
