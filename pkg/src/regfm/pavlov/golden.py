"""Hand-transcribed closed forms of V for thirteen Jordan structures with mu = E.

Each entry is written out term by term, independently of the general
generator, so comparing the two is a genuine cross-check.  ``F[k]`` is F_{k+1};
derivatives are taken in the leading variable of the block the function
belongs to.
"""

from __future__ import annotations

from fractions import Fraction

from ..exactring import Poly
from ..fmanifold import JordanSpec

__all__ = ["GOLDEN", "golden_specs", "golden_V", "golden_text"]

_h = Fraction(1, 2)
_s = Fraction(1, 6)
_t = Fraction(1, 24)


def _tools(n):
    def r(i):
        return Poly.var(n, i - 1)

    def D(f, var, k=1):
        for _ in range(k):
            f = f.diff(var - 1)
        return f

    return r, D


def _v2(F, n):
    r, D = _tools(n)
    return F[0] * r(2) + F[1]


def _v3(F, n):
    r, D = _tools(n)
    return F[0] * r(3) + _h * D(F[0], 1) * r(2) ** 2 + F[1] * r(2) + F[2]


def _v21(F, n):
    r, D = _tools(n)
    return F[0] * r(2) + F[1] + F[2]


def _v4(F, n):
    r, D = _tools(n)
    return ((D(F[0], 1) * r(2) + F[1]) * r(3) + F[0] * r(4) + _s * D(F[0], 1, 2) * r(2) ** 3
            + _h * D(F[1], 1) * r(2) ** 2 + F[2] * r(2) + F[3])


def _v31(F, n):
    r, D = _tools(n)
    return F[0] * r(3) + _h * D(F[0], 1) * r(2) ** 2 + F[1] * r(2) + F[2] + F[3]


def _v22(F, n):
    r, D = _tools(n)
    return F[0] * r(2) + F[1] + F[2] * r(4) + F[3]


def _v211(F, n):
    r, D = _tools(n)
    return F[0] * r(2) + F[1] + F[2] + F[3]


def _v5(F, n):
    r, D = _tools(n)
    return ((D(F[0], 1) * r(2) + F[1]) * r(4) + F[0] * r(5) + _h * D(F[0], 1) * r(3) ** 2
            + (_h * D(F[0], 1, 2) * r(2) ** 2 + D(F[1], 1) * r(2) + F[2]) * r(3)
            + _t * D(F[0], 1, 3) * r(2) ** 4 + _s * D(F[1], 1, 2) * r(2) ** 3
            + _h * D(F[2], 1) * r(2) ** 2 + F[3] * r(2) + F[4])


def _v41(F, n):
    r, D = _tools(n)
    return ((D(F[0], 1) * r(2) + F[1]) * r(3) + F[0] * r(4) + _s * D(F[0], 1, 2) * r(2) ** 3
            + _h * D(F[1], 1) * r(2) ** 2 + F[2] * r(2) + F[3] + F[4])


def _v32(F, n):
    r, D = _tools(n)
    return F[0] * r(3) + _h * D(F[0], 1) * r(2) ** 2 + F[1] * r(2) + F[2] + F[3] * r(5) + F[4]


def _v311(F, n):
    r, D = _tools(n)
    return F[0] * r(3) + _h * D(F[0], 1) * r(2) ** 2 + F[1] * r(2) + F[2] + F[3] + F[4]


def _v221(F, n):
    r, D = _tools(n)
    return F[0] * r(2) + F[1] + F[2] * r(4) + F[3] + F[4]


def _v2111(F, n):
    r, D = _tools(n)
    return F[0] * r(2) + F[1] + F[2] + F[3] + F[4]


# spec text -> (builder, placeholder formula)
GOLDEN = {
    "2": (_v2, "F1(r1)*r2 + F2(r1)"),
    "3": (_v3, "F1(r1)*r3 + 1/2*F1'(r1)*r2^2 + F2(r1)*r2 + F3(r1)"),
    "2,1": (_v21, "F1(r1)*r2 + F2(r1) + F3(r3)"),
    "4": (_v4, "(F1'(r1)*r2 + F2(r1))*r3 + F1(r1)*r4 + 1/6*F1''(r1)*r2^3 + 1/2*F2'(r1)*r2^2"
               " + F3(r1)*r2 + F4(r1)"),
    "3,1": (_v31, "F1(r1)*r3 + 1/2*F1'(r1)*r2^2 + F2(r1)*r2 + F3(r1) + F4(r4)"),
    "2,2": (_v22, "F1(r1)*r2 + F2(r1) + F3(r3)*r4 + F4(r3)"),
    "2,1,1": (_v211, "F1(r1)*r2 + F2(r1) + F3(r3) + F4(r4)"),
    "5": (_v5, "(F1'(r1)*r2 + F2(r1))*r4 + F1(r1)*r5 + 1/2*F1'(r1)*r3^2"
               " + (1/2*F1''(r1)*r2^2 + F2'(r1)*r2 + F3(r1))*r3 + 1/24*F1'''(r1)*r2^4"
               " + 1/6*F2''(r1)*r2^3 + 1/2*F3'(r1)*r2^2 + F4(r1)*r2 + F5(r1)"),
    "4,1": (_v41, "(F1'(r1)*r2 + F2(r1))*r3 + F1(r1)*r4 + 1/6*F1''(r1)*r2^3 + 1/2*F2'(r1)*r2^2"
                  " + F3(r1)*r2 + F4(r1) + F5(r5)"),
    "3,2": (_v32, "F1(r1)*r3 + 1/2*F1'(r1)*r2^2 + F2(r1)*r2 + F3(r1) + F4(r4)*r5 + F5(r4)"),
    "3,1,1": (_v311, "F1(r1)*r3 + 1/2*F1'(r1)*r2^2 + F2(r1)*r2 + F3(r1) + F4(r4) + F5(r5)"),
    "2,2,1": (_v221, "F1(r1)*r2 + F2(r1) + F3(r3)*r4 + F4(r3) + F5(r5)"),
    "2,1,1,1": (_v2111, "F1(r1)*r2 + F2(r1) + F3(r3) + F4(r4) + F5(r5)"),
}


def golden_specs():
    return [JordanSpec.parse(k) for k in GOLDEN]


def golden_V(spec: JordanSpec, F) -> Poly:
    """Evaluate the transcribed formula for ``spec`` on F_1, F_2, ... (flat numbering)."""
    builder, _ = GOLDEN[str(spec)]
    return builder(list(F), spec.n)


def golden_text(spec: JordanSpec) -> str:
    return GOLDEN[str(spec)][1]
