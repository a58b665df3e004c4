"""Frolicher-Nijenhuis calculus in coordinates, for forms of degree <= 2.

Conventions: ``L[i][k] = L^i_k``; a 1-form is a tuple ``(w_1, ..., w_n)``; a
2-form is a dict ``{(j, k): w_jk}`` over ``j < k``; a torsion is a dict
``{(j, k): (N^1, ..., N^n)}`` over ``j < k`` holding the vector
``N_L(d_j, d_k)``.
"""

from __future__ import annotations

from .exactring import TruncSeries, is_zero, zero_like
from .fmanifold import OpMatrix, toeplitz_inverse

__all__ = [
    "gradient", "d_form1", "d_L_function", "dd_L_function", "d_L_form", "iota_L", "tau_L",
    "nijenhuis", "nijenhuis_coordinate", "lie_bracket", "torsion_is_zero", "form_is_zero",
    "torsion_contraction", "chain_obstruction", "inverse_operator",
]


def _sum(terms, zero):
    acc = None
    for t in terms:
        acc = t if acc is None else acc + t
    return zero if acc is None else acc


def _pairs(n):
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def _zero_of(L: OpMatrix, f=None):
    return zero_like(f) if f is not None else zero_like(L[0][0])


def gradient(f, n: int):
    return tuple(f.diff(k) for k in range(n))


def d_form1(omega):
    n = len(omega)
    return {(j, k): omega[k].diff(j) - omega[j].diff(k) for j, k in _pairs(n)}


def d_L_function(L: OpMatrix, f):
    """(d_L f)_k = L^h_k d_h f."""
    n = L.n
    grad = gradient(f, n)
    zero = _zero_of(L, f)
    return tuple(
        _sum((L[h][k] * grad[h] for h in range(n) if not is_zero(L[h][k]) and not is_zero(grad[h])), zero)
        for k in range(n)
    )


def dd_L_function(L: OpMatrix, f):
    return d_form1(d_L_function(L, f))


def d_L_form(L: OpMatrix, omega):
    """d_L of a 1-form from the invariant formula with the L-deformed bracket.

    (d_L w)(d_j, d_k) = (L d_j)(w_k) - (L d_k)(w_j) - w([d_j, d_k]_L), where
    [d_j, d_k]_L = [L d_j, d_k] + [d_j, L d_k] = (d_j L^h_k - d_k L^h_j) d_h.
    """
    n = L.n
    zero = zero_like(omega[0] * L[0][0])
    out = {}
    dw = [[omega[k].diff(h) for h in range(n)] for k in range(n)]
    for j, k in _pairs(n):
        terms = []
        for h in range(n):
            if not is_zero(L[h][j]):
                terms.append(L[h][j] * dw[k][h])
            if not is_zero(L[h][k]):
                terms.append(-(L[h][k] * dw[j][h]))
            br = L[h][k].diff(j) - L[h][j].diff(k)
            if not is_zero(br):
                terms.append(-(br * omega[h]))
        out[j, k] = _sum(terms, zero)
    return out


def iota_L(L: OpMatrix, form):
    """Insertion of L: slot-by-slot substitution X -> LX summed over slots."""
    n = L.n
    if isinstance(form, dict):
        def comp(a, b):
            if a == b:
                return None
            return form[a, b] if a < b else -form[b, a]
        out = {}
        for j, k in _pairs(n):
            terms = []
            for h in range(n):
                x = comp(h, k)
                if x is not None and not is_zero(L[h][j]):
                    terms.append(L[h][j] * x)
                y = comp(j, h)
                if y is not None and not is_zero(L[h][k]):
                    terms.append(L[h][k] * y)
            out[j, k] = _sum(terms, zero_like(L[0][0] * next(iter(form.values()))))
        return out
    return tau_L(L, form, 1)


def tau_L(L: OpMatrix, form, k: int):
    """(tau_L w)(X_1, ..., X_k) = w(L X_1, ..., L X_k) for k = 0, 1, 2."""
    n = L.n
    if k == 0:
        return form
    if k == 1:
        zero = zero_like(form[0] * L[0][0])
        return tuple(
            _sum((form[h] * L[h][c] for h in range(n) if not is_zero(L[h][c])), zero) for c in range(n)
        )
    if k == 2:
        zero = zero_like(L[0][0] * next(iter(form.values())))
        out = {}
        for j, c in _pairs(n):
            terms = []
            for a, b in _pairs(n):
                w = form[a, b]
                if is_zero(w):
                    continue
                # w_ab (L^a_j L^b_c - L^b_j L^a_c)
                det = L[a][j] * L[b][c] - L[b][j] * L[a][c]
                if not is_zero(det):
                    terms.append(w * det)
            out[j, c] = _sum(terms, zero)
        return out
    raise ValueError("forms of degree > 2 are not supported")


def lie_bracket(X, Y):
    n = len(X)
    zero = zero_like(X[0] * Y[0])
    return tuple(
        _sum(
            [X[a] * Y[i].diff(a) for a in range(n) if not is_zero(X[a])]
            + [-(Y[a] * X[i].diff(a)) for a in range(n) if not is_zero(Y[a])],
            zero,
        )
        for i in range(n)
    )


def nijenhuis(L: OpMatrix):
    """N_L(d_j, d_k) = [Ld_j, Ld_k] - L[Ld_j, d_k] - L[d_j, Ld_k] for j < k."""
    n = L.n
    cols = [L.column(k) for k in range(n)]
    zero = zero_like(L[0][0])
    unit = [tuple(zero + 1 if a == b else zero for a in range(n)) for b in range(n)]
    out = {}
    for j, k in _pairs(n):
        b1 = lie_bracket(cols[j], cols[k])
        b2 = L.apply(lie_bracket(cols[j], unit[k]))
        b3 = L.apply(lie_bracket(unit[j], cols[k]))
        out[j, k] = tuple(x - y - z for x, y, z in zip(b1, b2, b3))
    return out


def nijenhuis_coordinate(L: OpMatrix):
    """The index formula (d_jL^h_k - d_kL^h_j)L^i_h + L^h_k d_hL^i_j - L^h_j d_hL^i_k.

    This is the expression that appears as the obstruction to the chain
    recursion; as a vector it equals ``N_L(d_k, d_j)``, i.e. minus
    :func:`nijenhuis` at ``(j, k)``.
    """
    n = L.n
    zero = zero_like(L[0][0])
    dL = [[[L[i][k].diff(a) for k in range(n)] for i in range(n)] for a in range(n)]
    out = {}
    for j, k in _pairs(n):
        vec = []
        for i in range(n):
            terms = []
            for h in range(n):
                c = dL[j][h][k] - dL[k][h][j]
                if not is_zero(c) and not is_zero(L[i][h]):
                    terms.append(c * L[i][h])
                if not is_zero(L[h][k]):
                    terms.append(L[h][k] * dL[h][i][j])
                if not is_zero(L[h][j]):
                    terms.append(-(L[h][j] * dL[h][i][k]))
            vec.append(_sum(terms, zero))
        out[j, k] = tuple(vec)
    return out


def torsion_is_zero(N) -> bool:
    return all(is_zero(x) for vec in N.values() for x in vec)


def form_is_zero(form) -> bool:
    vals = form.values() if isinstance(form, dict) else form
    return all(is_zero(x) for x in vals)


def torsion_contraction(N, f):
    """2-form (j, k) -> N^i_{jk} d_i f."""
    out = {}
    for key, vec in N.items():
        n = len(vec)
        zero = zero_like(vec[0] * f)
        out[key] = _sum((vec[i] * f.diff(i) for i in range(n) if not is_zero(vec[i])), zero)
    return out


def chain_obstruction(L: OpMatrix, f):
    """Defect of lifting twice: d_j(L^h_k g_h) - d_k(L^h_j g_h) with g = d_L f.

    Second derivatives of the (assumed) intermediate potential are replaced
    by derivatives of g, so the result is the compatibility defect of the
    system d_k C' = L^h_k d_h C, d_h C = g_h.
    """
    n = L.n
    g = d_L_function(L, f)
    dg = [[g[a].diff(b) for b in range(n)] for a in range(n)]
    zero = zero_like(g[0] * L[0][0])
    out = {}
    for j, k in _pairs(n):
        terms = []
        for h in range(n):
            c = L[h][k].diff(j) - L[h][j].diff(k)
            if not is_zero(c):
                terms.append(c * g[h])
            if not is_zero(L[h][k]):
                terms.append(L[h][k] * dg[j][h])  # d_h g_j in place of d_j g_h
            if not is_zero(L[h][j]):
                terms.append(-(L[h][j] * dg[k][h]))
        out[j, k] = _sum(terms, zero)
    return out


def inverse_operator(spec, mu, base, order):
    """L^{-1} as a TruncSeries matrix (the only way d_{L^{-1}} is computed)."""
    return toeplitz_inverse(spec, mu, base, order)


def as_series_matrix(L: OpMatrix, base, order) -> OpMatrix:
    def ser(x):
        if isinstance(x, TruncSeries):
            return x
        return TruncSeries.from_poly(x, base, order)
    return L.map(ser)
