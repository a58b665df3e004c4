"""Eventual identities: the K tensor, its torsion characterisation and the compatible connection."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import AssumptionUnmet, Inconsistent, NonUnique, PreconditionFailed
from .exactring import Poly, as_fraction, is_zero, zero_like
from .fmanifold import (
    JordanSpec, mult_operator, regular_at, regularity_checklist, unit_field,
)
from .fn_calculus import nijenhuis, torsion_is_zero

__all__ = [
    "k_operator", "k_component", "is_eventual_identity", "torsion_equivalence_check",
    "bridge_residual", "block_locality_check", "solve_connection", "connection_residuals",
    "nabla_product_check",
    "EvIdReport", "Christoffel", "lie_derivative_product", "unit_bracket",
]


def unit_bracket(spec: JordanSpec, field):
    """[e, X] = e(X^i) d_i (the product and e are constant in these coordinates)."""
    lead = spec.unit_support
    zero = zero_like(field[0])
    out = []
    for comp in field:
        acc = zero
        for a in lead:
            acc = acc + comp.diff(a)
        out.append(acc)
    return tuple(out)


def lie_derivative_product(spec: JordanSpec, field, i: int, j: int):
    """(L_X o)(d_i, d_j) = [X, d_i o d_j] - [X, d_i] o d_j - d_i o [X, d_j]."""
    n = spec.n
    zero = zero_like(field[0])
    out = [zero] * n
    p = spec.product_index(i, j)
    if p is not None:
        for t in range(n):
            out[t] = out[t] - field[t].diff(p)
    for a in range(n):
        t = spec.product_index(a, j)
        if t is not None:
            out[t] = out[t] + field[a].diff(i)
        t = spec.product_index(i, a)
        if t is not None:
            out[t] = out[t] + field[a].diff(j)
    return tuple(out)


def k_component(spec: JordanSpec, field, i: int, j: int, bracket=None):
    """K(d_i, d_j) = (L_E o)(d_i, d_j) - [e, E] o d_i o d_j."""
    if bracket is None:
        bracket = unit_bracket(spec, field)
    lie = list(lie_derivative_product(spec, field, i, j))
    for b in range(spec.n):
        s = spec.product_index(b, i)
        if s is None:
            continue
        t = spec.product_index(s, j)
        if t is not None:
            lie[t] = lie[t] - bracket[b]
    return tuple(lie)


def k_operator(spec: JordanSpec, field):
    """All components {(i, j): K(d_i, d_j)} for i <= j (K is symmetric)."""
    bracket = unit_bracket(spec, field)
    return {
        (i, j): k_component(spec, field, i, j, bracket)
        for i in range(spec.n) for j in range(i, spec.n)
    }


def _k_lookup(K, i, j):
    return K[(i, j) if i <= j else (j, i)]


def _k_is_zero(K):
    return all(is_zero(x) for vec in K.values() for x in vec)


@dataclass
class EvIdReport:
    k_tensor: dict
    is_eventual: bool
    assumption_checklist: dict = field(default_factory=dict)

    def nonzero_components(self):
        return sorted(k for k, vec in self.k_tensor.items() if not all(is_zero(x) for x in vec))


def is_eventual_identity(spec: JordanSpec, field, base=None) -> EvIdReport:
    K = k_operator(spec, field)
    return EvIdReport(K, _k_is_zero(K), regularity_checklist(spec, field, base))


def bridge_residual(spec: JordanSpec, field, K=None, N=None):
    """N_L(d_i, d_j) - (K(L d_i, d_j) - K(d_i, L d_j)) for L = E o, as {(i, j): vector}."""
    n = spec.n
    L = mult_operator(spec, field)
    if K is None:
        K = k_operator(spec, field)
    if N is None:
        N = nijenhuis(L)
    out = {}
    for (i, j), nvec in N.items():
        res = list(nvec)
        for a in range(n):
            if not is_zero(L[a][i]):
                kv = _k_lookup(K, a, j)
                for t in range(n):
                    if not is_zero(kv[t]):
                        res[t] = res[t] - L[a][i] * kv[t]
            if not is_zero(L[a][j]):
                kv = _k_lookup(K, i, a)
                for t in range(n):
                    if not is_zero(kv[t]):
                        res[t] = res[t] + L[a][j] * kv[t]
        out[i, j] = tuple(res)
    return out


def torsion_equivalence_check(spec: JordanSpec, field, base=None) -> dict:
    """Compare K = 0 with N_{E o} = 0 and verify the bridge identity.

    Returns ``{"k_zero", "n_zero", "bridge_zero", "identity_residual",
    "regular", "checklist"}``.  If the regularity hypotheses fail at ``base``
    only ``k_zero => n_zero`` is meaningful; :class:`AssumptionUnmet` is
    raised with the full result attached as ``.result``.  Without ``base``
    the symbolic checks decide.
    """
    K = k_operator(spec, field)
    N = nijenhuis(mult_operator(spec, field))
    bridge = bridge_residual(spec, field, K, N)
    checklist = regularity_checklist(spec, field, base)
    result = {
        "k_zero": _k_is_zero(K),
        "n_zero": torsion_is_zero(N),
        "bridge_zero": all(is_zero(x) for v in bridge.values() for x in v),
        "identity_residual": bridge,
        "regular": regular_at(checklist),
        "checklist": checklist,
    }
    if not result["regular"]:
        result["one_way_holds"] = (not result["k_zero"]) or result["n_zero"]
        raise AssumptionUnmet("regularity hypotheses fail at the base point", result)
    result["equivalent"] = result["k_zero"] == result["n_zero"]
    return result


def block_locality_check(spec: JordanSpec, field) -> bool:
    """True iff every component of block a is independent of all other blocks."""
    if not torsion_is_zero(nijenhuis(mult_operator(spec, field))):
        raise PreconditionFailed("Nijenhuis torsion of the multiplication operator is non-zero")
    if not regularity_checklist(spec, field)["distinct_leading"]["symbolic"]:
        raise PreconditionFailed("leading components are not pairwise distinct")
    for a in range(spec.r):
        for p in spec.block_range(a):
            for b in range(spec.r):
                if b == a:
                    continue
                for q in spec.block_range(b):
                    if not is_zero(field[p].diff(q)):
                        return False
    return True


# -- connection -------------------------------------------------------------

@dataclass
class Christoffel:
    """Gamma^i_{jk} at a point, symmetric in (j, k); ``gamma[i][j][k]``."""

    n: int
    gamma: tuple
    point: tuple

    def __call__(self, i, j, k):
        return self.gamma[i][j][k]

    def is_zero(self):
        return all(x == 0 for a in self.gamma for b in a for x in b)


def _solve_exact(rows, rhs, nunknowns):
    """Gauss-Jordan over Fractions. Returns the unique solution or raises."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(nunknowns):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][-1] != 0:
            raise Inconsistent("connection conditions are inconsistent at this point")
    if r < nunknowns:
        raise NonUnique(f"connection conditions have rank {r} < {nunknowns} unknowns")
    sol = [Fraction(0)] * nunknowns
    for i, c in enumerate(pivots):
        sol[c] = m[i][-1]
    return sol


def solve_connection(spec: JordanSpec, mu, point) -> Christoffel:
    """Unique torsionless Gamma with nabla e = 0 and d_nabla(mu o) = 0 at ``point``."""
    n = spec.n
    point = tuple(as_fraction(x) for x in point)
    L = mult_operator(spec, mu)
    Lv = [[_value(L[i][k], point) for k in range(n)] for i in range(n)]
    dL = [[[_value(L[i][k].diff(a), point) for k in range(n)] for i in range(n)] for a in range(n)]
    e = [_value(x, point) for x in unit_field(spec)]

    index = {}
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                index[i, j, k] = len(index)

    def col(i, j, k):
        return index[(i, j, k) if j <= k else (i, k, j)]

    rows, rhs = [], []
    nu = len(index)
    # nabla e = 0:  d_j e^i + Gamma^i_{js} e^s = 0
    for i in range(n):
        for j in range(n):
            row = [Fraction(0)] * nu
            for s in range(n):
                if e[s]:
                    row[col(i, j, s)] += e[s]
            rows.append(row)
            rhs.append(Fraction(0))
    # d_nabla(L) = 0: d_jL^i_k - d_kL^i_j + Gamma^i_{js}L^s_k - Gamma^i_{ks}L^s_j = 0
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                row = [Fraction(0)] * nu
                for s in range(n):
                    if Lv[s][k]:
                        row[col(i, j, s)] += Lv[s][k]
                    if Lv[s][j]:
                        row[col(i, k, s)] -= Lv[s][j]
                rows.append(row)
                rhs.append(-(dL[j][i][k] - dL[k][i][j]))
    sol = _solve_exact(rows, rhs, nu)
    gamma = tuple(
        tuple(tuple(sol[col(i, j, k)] for k in range(n)) for j in range(n)) for i in range(n)
    )
    return Christoffel(n, gamma, point)


def connection_residuals(spec: JordanSpec, mu, conn: Christoffel):
    """Residuals of the two defining conditions at the connection's point (all exact)."""
    n = spec.n
    pt = conn.point
    L = mult_operator(spec, mu)
    Lv = [[_value(L[i][k], pt) for k in range(n)] for i in range(n)]
    dL = [[[_value(L[i][k].diff(a), pt) for k in range(n)] for i in range(n)] for a in range(n)]
    e = [_value(x, pt) for x in unit_field(spec)]
    g = conn.gamma
    flat = [sum(g[i][j][s] * e[s] for s in range(n)) for i in range(n) for j in range(n)]
    dnabla = [
        dL[j][i][k] - dL[k][i][j]
        + sum(g[i][j][s] * Lv[s][k] - g[i][k][s] * Lv[s][j] for s in range(n))
        for i in range(n) for j in range(n) for k in range(j + 1, n)
    ]
    return flat, dnabla


def _value(x, point):
    if isinstance(x, Poly):
        return x.eval(point)
    return as_fraction(x)


def nabla_product_check(spec: JordanSpec, field, points, connection_field=None):
    """Per point: nabla_E c and the defect of the identity
    nabla_E c^i_{jh} = L_E c^i_{hj} - c^i_{js} c^s_{ht} [e, E]^t.

    The connection is fixed by mu = ``connection_field`` (default: E itself).
    Since every Gamma-term is contracted with E, for E = e any connection
    with nabla e = 0 gives the same answer; e alone does not determine one.

    Returns a list of dicts sorted by point with keys ``point``,
    ``nabla_c_zero``, ``identity_zero``, ``nabla_c`` and ``identity_defect``.
    """
    n = spec.n
    bracket = unit_bracket(spec, field)
    Kfull = {}
    for h in range(n):
        for j in range(n):
            Kfull[h, j] = k_component(spec, field, h, j, bracket)
    results = []
    for point in sorted(tuple(as_fraction(x) for x in p) for p in points):
        conn = solve_connection(spec, field if connection_field is None else connection_field, point)
        g = conn.gamma
        Ev = [_value(x, point) for x in field]
        nabla = {}
        defect = {}
        for i, j, h in product(range(n), repeat=3):
            # (nabla_s c)^i_{jh} = G^i_{sa} c^a_{jh} - G^a_{sj} c^i_{ah} - G^a_{sh} c^i_{ja}
            val = Fraction(0)
            for s in range(n):
                if not Ev[s]:
                    continue
                acc = Fraction(0)
                p = spec.product_index(j, h)
                if p is not None:
                    acc += g[i][s][p]
                for a in range(n):
                    if spec.product_index(a, h) == i:
                        acc -= g[a][s][j]
                    if spec.product_index(j, a) == i:
                        acc -= g[a][s][h]
                val += Ev[s] * acc
            nabla[i, j, h] = val
            # L_E c^i_{hj} - c c [e,E] is K(d_h, d_j)^i
            defect[i, j, h] = val - _value(Kfull[h, j][i], point)
        results.append({
            "point": point,
            "nabla_c": nabla,
            "identity_defect": defect,
            "nabla_c_zero": all(v == 0 for v in nabla.values()),
            "identity_zero": all(v == 0 for v in defect.values()),
        })
    return results
