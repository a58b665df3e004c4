"""Chain densities C^alpha, the reduction operator and the a_k / V_k hierarchy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import PreconditionFailed
from ..eventual import is_eventual_identity
from ..exactring import DEFAULT_ORDER, Poly, TruncSeries, as_fraction, integrate_closed_one_form
from ..fmanifold import JordanSpec, OpMatrix, euler_field, mult_operator, parse_vfield, vfield_to_text
from ..fn_calculus import d_L_function, dd_L_function, form_is_zero, inverse_operator
from .gensol import FunctionFamily, generate_V

__all__ = [
    "chain_ascend", "chain_descend", "build_chain", "ChainFamily", "reduction_operator",
    "hierarchy_build", "Hierarchy", "chain_step_residual",
]


def chain_ascend(spec: JordanSpec, mu, C, base):
    """C' with dC' = d_L C and C'(base) = 0."""
    L = mult_operator(spec, mu)
    return integrate_closed_one_form(d_L_function(L, C), base)


def chain_descend(spec: JordanSpec, mu, C, base, order: int = DEFAULT_ORDER) -> TruncSeries:
    """C' with dC' = d_{L^{-1}} C and C'(base) = 0, as a series at ``base``."""
    Linv = inverse_operator(spec, mu, base, order)
    Cs = C if isinstance(C, TruncSeries) else TruncSeries.from_poly(C, base, order)
    return integrate_closed_one_form(d_L_function(Linv, Cs), base).truncate(order)


def chain_step_residual(L: OpMatrix, lower, upper):
    """Components d_k upper - L^h_k d_h lower (zero iff the step is a chain step)."""
    lifted = d_L_function(L, lower)
    return tuple(upper.diff(k) - lifted[k] for k in range(L.n))


@dataclass
class ChainFamily:
    spec: JordanSpec
    mu: tuple
    base: tuple
    order: int
    densities: dict = field(default_factory=dict)

    @property
    def indices(self):
        return sorted(self.densities)

    def __getitem__(self, alpha):
        return self.densities[alpha]

    def operator(self) -> OpMatrix:
        return mult_operator(self.spec, self.mu)

    def verify(self) -> dict:
        """Per consecutive pair (alpha, alpha+1): exact (or to-order) chain residual flags."""
        L = self.operator()
        out = {}
        idx = self.indices
        for a, b in zip(idx, idx[1:]):
            lo, up = self.densities[a], self.densities[b]
            if isinstance(lo, TruncSeries) or isinstance(up, TruncSeries):
                Ls = L.map(lambda x: TruncSeries.from_poly(x, self.base, self.order))
                if not isinstance(lo, TruncSeries):
                    lo = TruncSeries.from_poly(lo, self.base, self.order)
                if not isinstance(up, TruncSeries):
                    up = TruncSeries.from_poly(up, self.base, self.order)
                res = chain_step_residual(Ls, lo, up)
            else:
                res = chain_step_residual(L, lo, up)
            out[a, b] = all(x.is_zero() for x in res)
        gauge = all(
            (c.constant_term() if isinstance(c, TruncSeries) else c.eval(self.base)) == 0
            for a, c in self.densities.items() if a != 0
        )
        return {"pairs": out, "gauge": gauge, "ok": gauge and all(out.values())}

    # -- export ------------------------------------------------------------
    def to_dict(self) -> dict:
        dens = {}
        for a in self.indices:
            c = self.densities[a]
            if isinstance(c, TruncSeries):
                dens[str(a)] = {"kind": "series", "order": c.order, "terms": c.to_literal()}
            else:
                dens[str(a)] = {"kind": "poly", "terms": c.to_literal()}
        return {
            "spec": str(self.spec),
            "mu": vfield_to_text(self.mu).splitlines(),
            "base": [str(b) for b in self.base],
            "order": self.order,
            "densities": dens,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "ChainFamily":
        spec = JordanSpec.parse(d["spec"])
        mu = parse_vfield("\n".join(d["mu"]), spec)
        base = tuple(Fraction(b) for b in d["base"])
        dens = {}
        for key, v in d["densities"].items():
            if v["kind"] == "series":
                dens[int(key)] = TruncSeries(base, int(v["order"]), Poly.parse(v["terms"], spec.n, prefix="h"))
            else:
                dens[int(key)] = Poly.parse(v["terms"], spec.n)
        return cls(spec, mu, base, int(d["order"]), dens)

    @classmethod
    def from_json(cls, text: str) -> "ChainFamily":
        return cls.from_dict(json.loads(text))


def build_chain(spec: JordanSpec, family, mu=None, base=None, lo: int = 0, hi: int = 0,
                order: int = DEFAULT_ORDER) -> ChainFamily:
    """C^lo..C^hi (lo <= 0 <= hi) from V = generate_V(family), or from ``family`` if it is a Poly."""
    if not lo <= 0 <= hi:
        raise ValueError("index range must contain 0")
    mu = euler_field(spec) if mu is None else tuple(mu)
    base = tuple(as_fraction(b) for b in (base if base is not None else (0,) * spec.n))
    if not is_eventual_identity(spec, mu).is_eventual:
        raise PreconditionFailed("mu is not an eventual identity")
    V = generate_V(spec, family) if isinstance(family, FunctionFamily) else family
    L = mult_operator(spec, mu)
    # the closed form is only claimed for mu = E, so always re-check
    if not form_is_zero(dd_L_function(L, V)):
        raise PreconditionFailed("d d_L V does not vanish for this mu")
    chain = ChainFamily(spec, mu, base, order, {0: V})
    C = V
    for a in range(1, hi + 1):
        C = chain_ascend(spec, mu, C, base)
        chain.densities[a] = C
    C = V
    for a in range(-1, lo - 1, -1):
        C = chain_descend(spec, mu, C, base, order)
        chain.densities[a] = C
    return chain


def reduction_operator(spec: JordanSpec, mu, V) -> OpMatrix:
    """W = L - V I."""
    L = mult_operator(spec, mu)
    return OpMatrix(
        [[L[i][k] - V if i == k else L[i][k] for k in range(spec.n)] for i in range(spec.n)]
    )


@dataclass
class Hierarchy:
    a: list
    V: list

    def to_dict(self):
        return {
            "a": [x.to_literal() for x in self.a],
            "V": [m.to_literals() for m in self.V],
        }


def hierarchy_build(spec: JordanSpec, mu, a0, K: int, base) -> Hierarchy:
    """a_{k+1} from d a_{k+1} = d_L a_k - a_k d a_0 (gauge a_k(base) = 0) and V_{k+1} = V_k L - a_k I."""
    L = mult_operator(spec, mu)
    if not form_is_zero(dd_L_function(L, a0)):
        raise PreconditionFailed("d d_L a0 does not vanish")
    n = spec.n
    da0 = [a0.diff(k) for k in range(n)]
    a = [a0]
    for _ in range(K):
        ak = a[-1]
        lifted = d_L_function(L, ak)
        omega = [lifted[k] - ak * da0[k] for k in range(n)]
        a.append(integrate_closed_one_form(omega, base))
    Vs = [OpMatrix.identity(n, like=a0)]
    for k in range(K + 1):
        Vk = Vs[-1] @ L
        Vs.append(OpMatrix(
            [[Vk[i][j] - a[k] if i == j else Vk[i][j] for j in range(n)] for i in range(n)]
        ))
    return Hierarchy(a, Vs)
