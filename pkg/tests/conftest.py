import random

import pytest

from regfm import randgen
from regfm.exactring import Poly
from regfm.fmanifold import JordanSpec


def P(text, n):
    return Poly.parse(text, n)


def rpoly(rng, n, degree=3, nterms=4):
    return randgen.poly(rng, n, degree, nterms)


def rfield(rng, n, degree=2, nterms=3):
    return tuple(randgen.poly(rng, n, degree, nterms) for _ in range(n))


SMALL_SPECS = [JordanSpec.parse(s) for s in ("1", "2", "3", "1,1", "2,1", "2,2", "3,1", "1,1,1")]


@pytest.fixture
def rng():
    return random.Random(20261014)
