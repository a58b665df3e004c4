"""Seeded generators shared by the unit and acceptance tests."""

from regfm import randgen
from regfm.exactring import Poly
from regfm.fmanifold import JordanSpec, euler_field, unit_field


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for m in range(min(n, largest), 0, -1):
        for rest in partitions(n - m, m):
            yield (m,) + rest


def all_specs(max_n):
    return [JordanSpec(p) for n in range(1, max_n + 1) for p in partitions(n)]


def affine_identity(rng, spec):
    """a e + b E + c with b != 0 and c a constant vector."""
    a = randgen.rational(rng)
    b = randgen.rational(rng, nonzero=True)
    e, E = unit_field(spec), euler_field(spec)
    return tuple(a * x + b * y + randgen.rational(rng) for x, y in zip(e, E))


def separated_field(rng, n, degree=3):
    """X^i = f^i(r^i) on the semisimple structure."""
    out = []
    for i in range(n):
        f = randgen.univariate(rng, n, i, degree)
        if f.diff(i).is_zero():
            f = f + Poly.var(n, i)
        out.append(f)
    return tuple(out)


def perturbed_euler(rng, spec):
    """E plus a non-linear term in the leading component of one block."""
    n = spec.n
    E = list(euler_field(spec))
    k = spec.leading(rng.randrange(spec.r))
    while True:
        p = randgen.poly(rng, n, 3, 3)
        if any(sum(exp) >= 2 and sum(exp) > exp[k] for exp, _ in p.items()):
            break
    E[k] = E[k] + p
    return tuple(E)


def positive_cases(rng, count, specs):
    out = []
    for t in range(count):
        spec = specs[t % len(specs)]
        if spec.semisimple() and t % 2:
            out.append((spec, separated_field(rng, spec.n)))
        else:
            out.append((spec, affine_identity(rng, spec)))
    return out


def negative_cases(rng, count, specs):
    specs = [s for s in specs if s.n >= 2]
    return [(specs[t % len(specs)], perturbed_euler(rng, specs[t % len(specs)])) for t in range(count)]
