"""Regular F-manifold algebra in David-Hertling canonical coordinates.

Coordinates are flat 0-based indices; block ``a`` occupies the flat range
``spec.block_range(a)`` and position ``p`` inside it corresponds to the
block label ``(p+1)(a+1)``.  In these coordinates the product is
``d_j o d_k = d_{j+k-1}`` inside a block (zero past the block end), the unit
is ``e = sum_a d_{1(a)}`` and the Euler field is ``E^i = u^i``.

Vector fields are plain tuples of scalars (Poly, TruncSeries or JetExpr).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .errors import SingularPivot
from .exactring import Poly, TruncSeries, as_fraction, is_zero, zero_like

__all__ = [
    "JordanSpec", "OpMatrix", "structure_constant", "circ", "mult_operator", "circ_power",
    "unit_field", "euler_field", "spanning_check", "toeplitz_inverse", "regularity_checklist",
    "coordinate_field", "parse_vfield", "vfield_to_text",
]


@dataclass(frozen=True)
class JordanSpec:
    block_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(m) for m in self.block_sizes)
        if not sizes:
            raise ValueError("a Jordan spec needs at least one block")
        if any(m < 1 for m in sizes):
            raise ValueError(f"block sizes must be positive: {sizes}")
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def parse(cls, text: str) -> "JordanSpec":
        try:
            return cls(tuple(int(t) for t in str(text).split(",") if t.strip()))
        except ValueError as exc:
            raise ValueError(f"bad Jordan spec {text!r}: {exc}") from None

    def __str__(self):
        return ",".join(map(str, self.block_sizes))

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    @property
    def r(self) -> int:
        return len(self.block_sizes)

    @cached_property
    def offsets(self):
        out, acc = [], 0
        for m in self.block_sizes:
            out.append(acc)
            acc += m
        return tuple(out)

    def block_range(self, a: int) -> range:
        return range(self.offsets[a], self.offsets[a] + self.block_sizes[a])

    def flat(self, block: int, pos: int) -> int:
        if not 0 <= pos < self.block_sizes[block]:
            raise IndexError(f"position {pos} outside block {block} of size {self.block_sizes[block]}")
        return self.offsets[block] + pos

    def coord(self, i: int):
        """(block, pos) of the flat index ``i``."""
        return self._coords[i]

    @cached_property
    def _coords(self):
        return tuple((a, p) for a, m in enumerate(self.block_sizes) for p in range(m))

    def leading(self, a: int) -> int:
        return self.offsets[a]

    @cached_property
    def _products(self):
        table = {}
        for j in range(self.n):
            aj, pj = self._coords[j]
            for k in range(self.n):
                ak, pk = self._coords[k]
                if aj == ak and pj + pk < self.block_sizes[aj]:
                    table[j, k] = self.offsets[aj] + pj + pk
        return table

    def product_index(self, j: int, k: int):
        """Flat index i with d_j o d_k = d_i, or None when the product vanishes."""
        return self._products.get((j, k))

    @cached_property
    def product_pairs(self):
        """All (i, j, k) with c^i_{jk} = 1."""
        return tuple((i, j, k) for (j, k), i in sorted(self._products.items()))

    def c(self, i: int, j: int, k: int) -> int:
        return 1 if self._products.get((j, k)) == i else 0

    @cached_property
    def unit_support(self):
        return tuple(self.offsets)

    def semisimple(self) -> bool:
        return all(m == 1 for m in self.block_sizes)


def structure_constant(spec: JordanSpec, i, j, k) -> int:
    """c^i_{jk} for flat indices or (block, pos) pairs."""
    def flat(x):
        return spec.flat(*x) if isinstance(x, tuple) else x
    return spec.c(flat(i), flat(j), flat(k))


class OpMatrix:
    """n x n matrix of scalars; ``L[i][k]`` is L^i_k (column k is L d_k)."""

    __slots__ = ("rows", "block_toeplitz")

    def __init__(self, rows, block_toeplitz: bool = False):
        self.rows = tuple(tuple(r) for r in rows)
        self.block_toeplitz = block_toeplitz

    @property
    def n(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __iter__(self):
        return iter(self.rows)

    @classmethod
    def identity(cls, n, like=None):
        one = (zero_like(like) + 1) if like is not None else Fraction(1)
        zero = zero_like(one)
        return cls([[one if i == k else zero for k in range(n)] for i in range(n)])

    def map(self, fn):
        return OpMatrix([[fn(x) for x in row] for row in self.rows], self.block_toeplitz)

    def __add__(self, other):
        return OpMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return OpMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def scale(self, s):
        return OpMatrix([[s * a for a in row] for row in self.rows], self.block_toeplitz)

    def __matmul__(self, other):
        n = self.n
        out = []
        for i in range(n):
            row = []
            for k in range(n):
                acc = None
                for h in range(n):
                    a, b = self.rows[i][h], other.rows[h][k]
                    if is_zero(a) or is_zero(b):
                        continue
                    acc = a * b if acc is None else acc + a * b
                row.append(acc if acc is not None else zero_like(self.rows[i][0]))
            out.append(row)
        return OpMatrix(out)

    def apply(self, vec):
        return tuple(_dot(self.rows[i], vec) for i in range(self.n))

    def column(self, k):
        return tuple(row[k] for row in self.rows)

    def is_zero(self) -> bool:
        return all(is_zero(x) for row in self.rows for x in row)

    def __eq__(self, other):
        if not isinstance(other, OpMatrix):
            return NotImplemented
        return self.n == other.n and all(
            is_zero(a - b) for r1, r2 in zip(self.rows, other.rows) for a, b in zip(r1, r2)
        )

    __hash__ = None

    def to_literals(self):
        return [[_literal(x) for x in row] for row in self.rows]

    def __repr__(self):
        return f"OpMatrix({self.to_literals()})"


def _literal(x):
    return x.to_literal() if hasattr(x, "to_literal") else str(x)


def _dot(row, vec):
    acc = None
    for a, b in zip(row, vec):
        if is_zero(a) or is_zero(b):
            continue
        acc = a * b if acc is None else acc + a * b
    return acc if acc is not None else zero_like(vec[0])


def unit_field(spec: JordanSpec, like=None):
    """e with e^{i(a)} = delta^i_1, in the ring of ``like`` (Poly in n vars by default)."""
    zero = zero_like(like) if like is not None else Poly.zero(spec.n)
    one = zero + 1
    lead = set(spec.unit_support)
    return tuple(one if i in lead else zero for i in range(spec.n))


def euler_field(spec: JordanSpec):
    return tuple(Poly.var(spec.n, i) for i in range(spec.n))


def coordinate_field(spec: JordanSpec, i: int, like=None):
    zero = zero_like(like) if like is not None else Poly.zero(spec.n)
    return tuple(zero + 1 if k == i else zero for k in range(spec.n))


def circ(spec: JordanSpec, X, Y):
    """(X o Y)^i = sum_{j+k-1=i} X^j Y^k per block."""
    out = [None] * spec.n
    for i, j, k in spec.product_pairs:
        if is_zero(X[j]) or is_zero(Y[k]):
            continue
        t = X[j] * Y[k]
        out[i] = t if out[i] is None else out[i] + t
    zero = zero_like(X[0])
    return tuple(zero if v is None else v for v in out)


def mult_operator(spec: JordanSpec, mu) -> OpMatrix:
    """Block-diagonal lower-triangular Toeplitz matrix of X -> mu o X."""
    n = spec.n
    zero = zero_like(mu[0])
    rows = [[zero] * n for _ in range(n)]
    for a, m in enumerate(spec.block_sizes):
        off = spec.offsets[a]
        for p in range(m):
            for q in range(p + 1):
                rows[off + p][off + q] = mu[off + p - q]
    return OpMatrix(rows, block_toeplitz=True)


def circ_power(spec: JordanSpec, field, p: int):
    if p < 0:
        raise ValueError("power must be non-negative")
    result = unit_field(spec, like=field[0])
    for _ in range(p):
        result = circ(spec, result, field)
    return result


def _det(matrix):
    """Exact determinant by cofactor expansion memoised over column subsets."""
    m = len(matrix)
    if m == 0:
        return Fraction(1)
    memo = {}

    def minor(row, cols):
        if row == m:
            return None  # empty product marker
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        for pos, col in enumerate(cols):
            a = matrix[row][col]
            if is_zero(a):
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            if sub is not None and is_zero(sub):
                continue
            t = a if sub is None else a * sub
            if pos % 2:
                t = -t
            acc = t if acc is None else acc + t
        if acc is None:
            acc = zero_like(matrix[0][0])
        memo[key] = acc
        return acc

    return minor(0, tuple(range(m)))


def spanning_check(spec: JordanSpec, field, block: int = 0):
    """Whether {field^{o k}}_{k < m} spans block ``block``; returns ``(spans, det)``.

    Columns of the determinant are the powers, rows the block coordinates.
    """
    rng = spec.block_range(block)
    m = len(rng)
    powers = [circ_power(spec, field, k) for k in range(m)]
    mat = [[powers[k][i] for k in range(m)] for i in rng]
    det = _det(mat)
    return (not is_zero(det)), det


def toeplitz_inverse(spec: JordanSpec, mu, base, order: int) -> OpMatrix:
    """L^{-1} for L = mu o as a matrix of TruncSeries expanded at ``base``.

    Per block L = p(I + N/p) with N strictly lower Toeplitz and nilpotent, so
    L^{-1} = sum_k (-1)^k N^k p^{-k-1}; only 1/p is expanded as a series.
    """
    base = tuple(as_fraction(b) for b in base)
    n = spec.n

    def ser(x):
        if isinstance(x, TruncSeries):
            return x.truncate(order)
        if isinstance(x, Poly):
            return TruncSeries.from_poly(x, base, order)
        return TruncSeries.const(base, order, x)

    zero = TruncSeries.const(base, order, 0)
    rows = [[zero] * n for _ in range(n)]
    for a, m in enumerate(spec.block_sizes):
        off = spec.offsets[a]
        lead = ser(mu[off])
        if not lead.constant_term():
            raise SingularPivot(
                f"leading component of block {a + 1} vanishes at base {[str(b) for b in base]}"
            )
        inv = lead.inverse()
        # Toeplitz symbol of N: (0, mu2, mu3, ...); powers by convolution
        nil = [zero] + [ser(mu[off + p]) for p in range(1, m)]
        power = [zero + 1] + [zero] * (m - 1)
        symbol = [zero] * m
        scale = inv
        for k in range(m):
            sign = -1 if k % 2 else 1
            for p in range(m):
                if not power[p].is_zero():
                    symbol[p] = symbol[p] + power[p] * scale * sign
            scale = scale * inv
            power = [
                sum((power[q] * nil[p - q] for q in range(p + 1) if not power[q].is_zero()), zero)
                for p in range(m)
            ]
        for p in range(m):
            for q in range(p + 1):
                rows[off + p][off + q] = symbol[p - q]
    return OpMatrix(rows, block_toeplitz=True)


def regularity_checklist(spec: JordanSpec, field, base=None) -> dict:
    """Symbolic and (optionally) pointwise regularity hypotheses for ``field``.

    Keys: ``distinct_leading`` (leading components pairwise distinct),
    ``nonzero_second`` (second component non-zero in every block of size >= 2),
    ``invertible`` (leading components non-zero).  Each maps to
    ``{"symbolic": bool, "pointwise": bool | None}``.
    """
    lead = [field[spec.leading(a)] for a in range(spec.r)]
    second = [field[spec.leading(a) + 1] for a in range(spec.r) if spec.block_sizes[a] >= 2]

    def val(x):
        return x.eval(base) if isinstance(x, Poly) else as_fraction(x)

    out = {
        "distinct_leading": {
            "symbolic": all(not is_zero(x - y) for x, y in combinations(lead, 2)),
            "pointwise": None,
        },
        "nonzero_second": {"symbolic": all(not is_zero(x) for x in second), "pointwise": None},
        "invertible": {"symbolic": all(not is_zero(x) for x in lead), "pointwise": None},
    }
    if base is not None:
        lv = [val(x) for x in lead]
        out["distinct_leading"]["pointwise"] = all(x != y for x, y in combinations(lv, 2))
        out["nonzero_second"]["pointwise"] = all(val(x) != 0 for x in second)
        out["invertible"]["pointwise"] = all(x != 0 for x in lv)
    return out


def regular_at(checklist: dict) -> bool:
    """Pointwise verdict for the two regularity hypotheses (authoritative when present)."""
    keys = ("distinct_leading", "nonzero_second")
    return all(
        checklist[k]["pointwise"] if checklist[k]["pointwise"] is not None else checklist[k]["symbolic"]
        for k in keys
    )


def parse_vfield(text: str, spec: JordanSpec):
    """One Poly literal per line in flat-index order; ``E`` / ``e`` name the standard fields."""
    t = text.strip()
    if t == "E":
        return euler_field(spec)
    if t == "e":
        return unit_field(spec)
    lines = [ln for ln in t.splitlines() if ln.strip()]
    if len(lines) != spec.n:
        raise ValueError(f"vector field needs {spec.n} components, got {len(lines)}")
    return tuple(Poly.parse(ln, spec.n) for ln in lines)


def vfield_to_text(field) -> str:
    return "\n".join(x.to_literal() for x in field) + "\n"
