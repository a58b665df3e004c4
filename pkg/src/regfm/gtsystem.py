"""Classical and generalized Gibbons-Tsarev residuals, dKP reduction data and the jet-level
non-existence identities.

Residuals are polynomial: the classical equations are multiplied through by
their denominators.  The generalized residuals are written for any scalar ring
that supports ``+``, ``*`` and ``diff`` (Poly, TruncSeries, JetExpr), so the same
code evaluates concrete data and the formal jet identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import DegenerateVelocities, PreconditionFailed
from .exactring import JetExpr, Poly, integrate_closed_one_form, is_zero, mu_jet, v_jet, zero_like
from .fmanifold import JordanSpec, circ, mult_operator, unit_field
from .fn_calculus import d_L_function

__all__ = [
    "GTData", "classical_gt_residual", "generalized_gt_residual", "lambda_field",
    "dkp_w_reconstruct", "step1_identity_check", "oneblock_identity_check",
    "nonexistence_report", "jet_data", "residuals_vanish",
]


@dataclass(frozen=True)
class GTData:
    spec: JordanSpec
    mu: tuple
    V: object
    W: object = None
    lam: tuple = None


def classical_gt_residual(n: int, mu, V):
    """Cleared-denominator residuals ``{"res1": {(i, j): ...}, "res2": {...}}`` over i != j."""
    res1, res2 = {}, {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = mu[i] - mu[j]
            if is_zero(d):
                raise DegenerateVelocities(f"mu^{i + 1} and mu^{j + 1} coincide identically")
            Vi, Vj = V.diff(i), V.diff(j)
            res1[i, j] = d * mu[j].diff(i) - Vi
            res2[i, j] = d * d * Vi.diff(j) - 2 * Vi * Vj
    return {"res1": res1, "res2": res2}


def generalized_gt_residual(data: GTData):
    """Residuals of the generalized system in canonical coordinates.

    ``R2[i, j]`` is the (i, j) component of the first-order equation and
    ``R1[i, j]`` (i < j) the antisymmetric second-order one.
    """
    spec, mu, V = data.spec, data.mu, data.V
    n = spec.n
    pairs = spec.product_pairs  # (i, j, k) with c^i_{jk} = 1
    lead = spec.unit_support
    zero = zero_like(V)
    dmu = [[mu[k].diff(a) for a in range(n)] for k in range(n)]  # dmu[k][a] = d_a mu^k
    dV = [V.diff(a) for a in range(n)]
    eV = _acc((dV[a] for a in lead), zero)
    emu = [_acc((dmu[k][a] for a in lead), zero) for k in range(n)]  # e(mu^k)
    # mu o e(mu): (mu o e(mu))^s = c^s_{hk} mu^h e(mu^k)
    mu_emu = [zero] * n
    for s, h, k in pairs:
        mu_emu[s] = mu_emu[s] + mu[h] * emu[k]

    R2 = {}
    for i in range(n):
        for j in range(n):
            acc = zero
            for ii, h, k in pairs:
                if ii == i:
                    acc = acc + mu[h] * dmu[k][j]  # c^i_{hk} mu^h d_j mu^k
            for ii, jj, k in pairs:
                if ii == i and jj == j:
                    for h in range(n):
                        acc = acc + mu[h] * dmu[k][h]  # c^i_{jk} mu^h d_h mu^k
            for k, jj, h in pairs:
                if jj == j:
                    acc = acc - mu[h] * dmu[i][k]  # c^k_{jh} mu^h d_k mu^i
            for ii, jj, s in pairs:
                if ii == i and jj == j:
                    acc = acc - mu_emu[s]
            if i in lead:
                acc = acc + dV[j]
            if i == j:
                acc = acc - eV
            R2[i, j] = acc

    ddV = [[dV[a].diff(b) for b in range(n)] for a in range(n)]
    # (mu o)^s_i = c^s_{ti} mu^t
    Lmu = [[zero] * n for _ in range(n)]
    for s, t, i in pairs:
        Lmu[s][i] = Lmu[s][i] + mu[t]
    R1 = {}
    for i, j in combinations(range(n), 2):
        acc = zero
        for s in range(n):
            if not is_zero(Lmu[s][i]):
                acc = acc + Lmu[s][i] * ddV[s][j]
            if not is_zero(Lmu[s][j]):
                acc = acc - Lmu[s][j] * ddV[s][i]
        for m, jj, s in pairs:
            if jj == j:
                acc = acc - dmu[s][i] * dV[m]
            if jj == i:
                acc = acc + dmu[s][j] * dV[m]
        R1[i, j] = acc
    return {"R1": R1, "R2": R2}


def _acc(terms, zero):
    out = zero
    for t in terms:
        out = out + t
    return out


def residuals_vanish(res) -> bool:
    return all(is_zero(x) for part in res.values() for x in part.values())


def lambda_field(data: GTData):
    """lambda = mu o mu + V e."""
    sq = circ(data.spec, data.mu, data.mu)
    e = unit_field(data.spec, like=data.V)
    return tuple(a + data.V * b for a, b in zip(sq, e))


def dkp_w_reconstruct(data: GTData, base):
    """W with d_i W = d_k V c^k_{ij} mu^j and W(base) = 0; raises NotClosed otherwise."""
    omega = d_L_function(mult_operator(data.spec, data.mu), data.V)
    return integrate_closed_one_form(omega, base)


# -- jet identities --------------------------------------------------------

def jet_data(spec: JordanSpec) -> GTData:
    """Fully generic data: every mu^i and V is a formal jet symbol."""
    return GTData(spec, tuple(mu_jet(i) for i in range(spec.n)), v_jet())


def step1_identity_check(spec: JordanSpec, alpha: int, j: int) -> JetExpr:
    """Sum over s = 1..m-j+1 of R2^{s(alpha)}_{(j+s-1)(alpha)} for generic jets.

    ``alpha`` and ``j`` are 1-based block notation (block alpha, position j >= 2).
    The result is expected to be the single symbol d_{j(alpha)} V.
    """
    m = spec.block_sizes[alpha - 1]
    if m < 2 or not 2 <= j <= m:
        raise ValueError(f"need block size >= 2 and 2 <= j <= {m}, got j={j}, m={m}")
    R2 = generalized_gt_residual(jet_data(spec))["R2"]
    total = JetExpr()
    for s in range(1, m - j + 2):
        total = total + R2[spec.flat(alpha - 1, s - 1), spec.flat(alpha - 1, j + s - 2)]
    return total


def oneblock_identity_check(n: int):
    """Reduced forms of the diagonal sum and of R1(1, 2) on a single block of size n.

    Substitutions: every jet of V involving a direction >= 2 vanishes, and
    every jet of mu^1 involving a direction >= 3 vanishes.  Returns
    ``(diag_sum, r1_12)``; the first is expected to be
    ``n mu^2 d_2 mu^1 - (n-1) d_1 V`` and the second a multiple of
    ``(d_2 mu^1)(d_1 V)``.
    """
    if n < 2:
        raise ValueError("single block must have size >= 2")
    spec = JordanSpec((n,))
    res = generalized_gt_residual(jet_data(spec))

    def killed(sym):
        if sym[0] == "V":
            return any(k >= 1 for k in sym[-1])
        return sym[1] == 0 and any(k >= 2 for k in sym[-1])

    diag = JetExpr()
    for i in range(1, n):
        diag = diag + res["R2"][i, i]
    return diag.subs_zero(killed), res["R1"][0, 1].subs_zero(killed)


def nonexistence_report(data: GTData, samples=()):
    """Check the four consequences of vanishing generalized residuals.

    Exact symbolic checks; ``samples`` (points) additionally records the
    values of the leading-variable residuals there.  Also lists which
    partials of V vanish identically (triviality is reported, not decided).
    """
    spec, mu, V = data.spec, data.mu, data.V
    if not residuals_vanish(generalized_gt_residual(data)):
        raise PreconditionFailed("generalized Gibbons-Tsarev residuals do not vanish")
    n = spec.n
    items = {"i": [], "ii": [], "iii": [], "iv": []}
    for a in range(spec.r):
        m = spec.block_sizes[a]
        for p in range(1, m):
            q = spec.flat(a, p)
            items["i"].append({"block": a + 1, "pos": p + 1, "value": V.diff(q)})
            for b in range(spec.r):
                items["ii"].append(
                    {"block": b + 1, "direction": (a + 1, p + 1), "value": mu[spec.leading(b)].diff(q)}
                )
        if m >= 2:
            items["iv"].append({"block": a + 1, "value": V.diff(spec.leading(a))})
    for a in range(spec.r):
        for b in range(spec.r):
            if a == b:
                continue
            la, lb = spec.leading(a), spec.leading(b)
            d = mu[lb] - mu[la]
            Vb = V.diff(lb)
            g1 = d * mu[la].diff(lb) - Vb
            g2 = d * d * V.diff(la).diff(lb) - 2 * V.diff(la) * Vb
            entry = {"alpha": a + 1, "beta": b + 1, "gt1": g1, "gt2": g2}
            if samples and isinstance(g1, Poly):
                entry["samples"] = [(tuple(pt), g1.eval(pt), g2.eval(pt)) for pt in samples]
            items["iii"].append(entry)
    report = {}
    for key, entries in items.items():
        ok = all(
            is_zero(e.get("value", zero_like(V))) and is_zero(e.get("gt1", zero_like(V)))
            and is_zero(e.get("gt2", zero_like(V)))
            for e in entries
        )
        report[key] = {"holds": ok, "applicable": bool(entries), "entries": entries}
    report["vanishing_partials_of_V"] = [k + 1 for k in range(n) if is_zero(V.diff(k))]
    report["all_pass"] = all(report[k]["holds"] for k in ("i", "ii", "iii", "iv"))
    return report
