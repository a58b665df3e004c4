"""Closed-form solutions V of d d_L V = 0 for L = E o in canonical coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import factorial

from ..exactring import Poly
from ..fmanifold import JordanSpec
from .. import randgen


@dataclass(frozen=True)
class FunctionFamily:
    """Per block, univariate polynomials F_1..F_m in that block's leading variable.

    ``blocks[a][p]`` holds F_{p+1} of block ``a`` as a Poly in all n variables.
    Across blocks the F's are numbered consecutively, so block a starts
    at F_{m_1+...+m_{a-1}+1}.
    """

    spec: JordanSpec
    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) != self.spec.r:
            raise ValueError("one list of functions per block is required")
        for a, fs in enumerate(self.blocks):
            if len(fs) != self.spec.block_sizes[a]:
                raise ValueError(f"block {a + 1} needs {self.spec.block_sizes[a]} functions")
            lead = self.spec.leading(a)
            for f in fs:
                if any(v != lead for v in f.variables()):
                    raise ValueError(f"F's of block {a + 1} may depend on r{lead + 1} only")

    @classmethod
    def random(cls, spec: JordanSpec, seed, degree: int = 4) -> "FunctionFamily":
        rng = randgen.rng_from(seed)
        return cls(spec, tuple(
            tuple(randgen.univariate(rng, spec.n, spec.leading(a), degree) for _ in range(m))
            for a, m in enumerate(spec.block_sizes)
        ))

    @classmethod
    def from_coefficients(cls, spec: JordanSpec, coeffs) -> "FunctionFamily":
        """``coeffs[a][p]`` is the coefficient list (constant term first) of F_{p+1} in block a."""
        return cls(spec, tuple(
            tuple(Poly.univariate(spec.n, spec.leading(a), c) for c in block)
            for a, block in enumerate(coeffs)
        ))

    def flat(self):
        """F_1, F_2, ... numbered consecutively across blocks."""
        return [f for fs in self.blocks for f in fs]

    def to_dict(self):
        return {"spec": str(self.spec), "F": [[f.to_literal() for f in fs] for fs in self.blocks]}

    @classmethod
    def from_dict(cls, d):
        spec = JordanSpec.parse(d["spec"])
        return cls(spec, tuple(tuple(Poly.parse(t, spec.n) for t in fs) for fs in d["F"]))


def generate_block_V(m: int, F, variables, nvars=None) -> Poly:
    """V = F_m + sum_{s>0} 1/s! sum_{k_i in 2..m} r^{k_1}...r^{k_s} D^{s-1} F_{m+s-sum k}.

    ``F[p]`` is F_{p+1} (a Poly in the leading variable ``variables[0]``);
    ``variables[p]`` is the flat index of r^{p+1} of the block.
    """
    if len(F) != m or len(variables) != m:
        raise ValueError("need exactly m functions and m variables")
    nvars = F[0].nvars if nvars is None else nvars
    x = variables[0]
    V = F[m - 1]
    # indices leave range once s > m - 1
    for s in range(1, m):
        acc = Poly.zero(nvars)
        for ks in product(range(2, m + 1), repeat=s):
            idx = m + s - sum(ks)
            if idx <= 0:
                continue
            g = F[idx - 1]
            for _ in range(s - 1):
                g = g.diff(x)
            if g.is_zero():
                continue
            mono = Poly.const(nvars, 1)
            for k in ks:
                mono = mono * Poly.var(nvars, variables[k - 1])
            acc = acc + mono * g
        V = V + acc / factorial(s)
    return V


def generate_V(spec: JordanSpec, family: FunctionFamily) -> Poly:
    V = Poly.zero(spec.n)
    for a, m in enumerate(spec.block_sizes):
        V = V + generate_block_V(m, list(family.blocks[a]), list(spec.block_range(a)), spec.n)
    return V
