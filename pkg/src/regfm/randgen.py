"""Seeded random rational data for property checks and randomized suites."""

from __future__ import annotations

import random
from fractions import Fraction

from .exactring import Poly


def rng_from(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def rational(rng, num=5, den=3, nonzero=False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-num, num), rng.randint(1, den))
        if q or not nonzero:
            return q


def poly(rng, nvars, degree=3, nterms=4, variables=None) -> Poly:
    """Random polynomial with at most ``nterms`` monomials of total degree <= ``degree``."""
    variables = list(range(nvars)) if variables is None else list(variables)
    terms = {}
    for _ in range(nterms):
        e = [0] * nvars
        for _ in range(rng.randint(0, degree)):
            e[rng.choice(variables)] += 1
        terms[tuple(e)] = terms.get(tuple(e), 0) + rational(rng)
    return Poly(nvars, terms)


def univariate(rng, nvars, var, degree=4) -> Poly:
    return Poly.univariate(nvars, var, [rational(rng) for _ in range(degree + 1)])


def point(rng, n, num=4, den=3, avoid_zero=True):
    return tuple(rational(rng, num, den, nonzero=avoid_zero) for _ in range(n))
