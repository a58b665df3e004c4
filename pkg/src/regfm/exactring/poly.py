"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational as _RationalABC

__all__ = ["Poly", "as_fraction"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class Poly:
    """Polynomial in ``nvars`` variables stored as ``{exponent tuple: Fraction}``.

    Instances are immutable; zero coefficients are never stored.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent {exps} does not match nvars={nvars}")
                c = as_fraction(c)
                if c:
                    clean[tuple(exps)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # terms already clean
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars, c):
        c = as_fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars, i, power=1):
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for nvars={nvars}")
        e = [0] * nvars
        e[i] = power
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def univariate(cls, nvars, i, coeffs):
        """sum_k coeffs[k] * x_i^k."""
        terms = {}
        for k, c in enumerate(coeffs):
            c = as_fraction(c)
            if c:
                e = [0] * nvars
                e[i] = k
                terms[tuple(e)] = c
        return cls._raw(nvars, terms)

    # -- inspection ---------------------------------------------------
    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def coeff(self, exps) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def depends_on(self, i) -> bool:
        return any(e[i] for e in self._terms)

    def variables(self):
        return sorted({i for e in self._terms for i, a in enumerate(e) if a})

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if _is_scalar(other):
            return Poly.const(self.nvars, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

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
            c = as_fraction(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly._raw(self.nvars, {e: a * c for e, a in self._terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (Fraction(1) / as_fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        if _is_scalar(other):
            return self._terms == ({(0,) * self.nvars: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus -----------------------------------------------------
    def diff(self, i: int) -> "Poly":
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for nvars={self.nvars}")
        out = {}
        for e, c in self._terms.items():
            a = e[i]
            if a:
                ne = e[:i] + (a - 1,) + e[i + 1:]
                out[ne] = c * a
        return Poly._raw(self.nvars, out)

    def antiderivative(self, i: int) -> "Poly":
        """Antiderivative in x_i with zero constant (no x_i-free terms added)."""
        out = {}
        for e, c in self._terms.items():
            a = e[i] + 1
            out[e[:i] + (a,) + e[i + 1:]] = c / a
        return Poly._raw(self.nvars, out)

    def subs_value(self, i: int, value) -> "Poly":
        """Set x_i = value; the result keeps ``nvars`` (x_i simply disappears)."""
        value = as_fraction(value)
        out = {}
        for e, c in self._terms.items():
            a = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            v = c * value**a if a else c
            out[ne] = out.get(ne, 0) + v
        return Poly._raw(self.nvars, {e: c for e, c in out.items() if c})

    def eval(self, point) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [as_fraction(x) for x in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, a in zip(pt, e):
                if a:
                    term *= x**a
            total += term
        return total

    def compose(self, polys) -> "Poly":
        """Substitute x_i -> polys[i]; the result lives in the ring of ``polys``."""
        if len(polys) != self.nvars:
            raise ValueError("compose needs one polynomial per variable")
        m = polys[0].nvars if polys else 0
        powers = [dict() for _ in polys]

        def pw(i, a):
            cache = powers[i]
            if a not in cache:
                cache[a] = polys[i] ** a
            return cache[a]

        result = Poly.zero(m)
        for e, c in self._terms.items():
            term = Poly.const(m, c)
            for i, a in enumerate(e):
                if a:
                    term = term * pw(i, a)
            result = result + term
        return result

    def shift(self, base) -> "Poly":
        """Rewrite in h = x - base, i.e. return q with q(h) = p(h + base)."""
        n = self.nvars
        return self.compose([Poly.var(n, i) + as_fraction(b) for i, b in enumerate(base)])

    def embed(self, nvars: int, mapping) -> "Poly":
        """Re-index variables: old variable i becomes new variable ``mapping[i]``."""
        out = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for i, a in enumerate(e):
                if a:
                    ne[mapping[i]] += a
            out[tuple(ne)] = c
        return Poly._raw(nvars, out)

    def truncate(self, order: int) -> "Poly":
        return Poly._raw(self.nvars, {e: c for e, c in self._terms.items() if sum(e) <= order})

    # -- text ---------------------------------------------------------
    def sorted_terms(self):
        """Terms in descending graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def to_literal(self, prefix: str = "r") -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            cs = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
            mono = "*".join(
                f"{prefix}{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a
            )
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    @classmethod
    def parse(cls, text: str, nvars: int | None = None, prefix: str = "r") -> "Poly":
        """Parse the literal format produced by :meth:`to_literal`.

        Also accepts ``-`` between terms, omitted coefficients and ``^1``.
        If ``nvars`` is None it is inferred from the largest variable index.
        """
        s = re.sub(r"\s+", "", text)
        if not s:
            raise ValueError("empty polynomial literal")
        s = re.sub(r"(?<=[^+*/^])-", "+-", s)
        var_re = re.compile(rf"^{re.escape(prefix)}(\d+)(?:\^(\d+))?$")
        num_re = re.compile(r"^-?\d+(?:/\d+)?$")
        parsed = []
        top = 0
        for term in s.split("+"):
            if not term:
                raise ValueError(f"malformed polynomial literal: {text!r}")
            coeff = Fraction(1)
            if term.startswith("-") and not num_re.match(term.split("*")[0]):
                coeff = Fraction(-1)
                term = term[1:]
            exps = {}
            for factor in term.split("*"):
                if num_re.match(factor):
                    coeff *= Fraction(factor)
                    continue
                m = var_re.match(factor)
                if not m:
                    raise ValueError(f"bad factor {factor!r} in {text!r}")
                idx = int(m.group(1)) - 1
                if idx < 0:
                    raise ValueError(f"variable index must start at 1 in {text!r}")
                exps[idx] = exps.get(idx, 0) + int(m.group(2) or 1)
                top = max(top, idx + 1)
            parsed.append((exps, coeff))
        if nvars is None:
            nvars = max(top, 1)
        elif top > nvars:
            raise ValueError(f"literal uses {prefix}{top} but nvars={nvars}")
        result = {}
        for exps, c in parsed:
            e = [0] * nvars
            for i, a in exps.items():
                e[i] = a
            e = tuple(e)
            result[e] = result.get(e, 0) + c
        return cls(nvars, result)

    def __repr__(self):
        return f"Poly({self.nvars}, {self.to_literal()!r})"

    __str__ = to_literal
