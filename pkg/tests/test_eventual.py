import random
from fractions import Fraction

import pytest

from regfm import randgen
from regfm.errors import AssumptionUnmet, NonUnique, PreconditionFailed
from regfm.eventual import (
    block_locality_check, bridge_residual, connection_residuals, is_eventual_identity,
    k_operator, nabla_product_check, solve_connection, torsion_equivalence_check,
)
from regfm.exactring import Poly
from regfm.fmanifold import JordanSpec, euler_field, regular_at, regularity_checklist, unit_field

from cases import all_specs, negative_cases, perturbed_euler, positive_cases
from conftest import P

S2 = JordanSpec.parse("2")


def swapped():
    return (P("r2", 2), P("r1", 2))


def test_k_for_swapped_field():
    # sympy oracle: only K(d2, d2) = 2 d2 survives
    K = k_operator(S2, swapped())
    assert K[1, 1] == (Poly.zero(2), Poly.const(2, 2))
    assert K[0, 0] == K[0, 1] == (Poly.zero(2), Poly.zero(2))
    rep = is_eventual_identity(S2, swapped())
    assert not rep.is_eventual and rep.nonzero_components() == [(1, 1)]


@pytest.mark.parametrize("spec", all_specs(4), ids=str)
def test_euler_and_unit_are_eventual_identities(spec):
    assert is_eventual_identity(spec, euler_field(spec)).is_eventual
    assert is_eventual_identity(spec, unit_field(spec)).is_eventual


def test_equivalence_on_seeded_families():
    rng = random.Random(11)
    specs = all_specs(4)
    for spec, f in positive_cases(rng, 30, specs):
        r = torsion_equivalence_check(spec, f)
        assert r["k_zero"] and r["n_zero"] and r["bridge_zero"] and r["equivalent"]
    for spec, f in negative_cases(rng, 30, specs):
        r = torsion_equivalence_check(spec, f)
        assert not r["k_zero"] and not r["n_zero"] and r["bridge_zero"]


def test_bridge_identity_random_fields(rng):
    for _ in range(20):
        spec = rng.choice(all_specs(3))
        f = tuple(randgen.poly(rng, spec.n, 3, 4) for _ in range(spec.n))
        assert all(x.is_zero() for v in bridge_residual(spec, f).values() for x in v)


def test_irregular_base_raises_with_one_way_result():
    spec = JordanSpec.parse("2")
    with pytest.raises(AssumptionUnmet) as exc:
        torsion_equivalence_check(spec, euler_field(spec), base=(1, 0))
    assert exc.value.result["one_way_holds"]
    assert exc.value.result["k_zero"]


def test_block_locality():
    spec = JordanSpec.parse("2,1")
    E = euler_field(spec)
    assert block_locality_check(spec, E)
    with pytest.raises(PreconditionFailed):
        block_locality_check(spec, perturbed_euler(random.Random(2), spec))
    with pytest.raises(PreconditionFailed):
        block_locality_check(JordanSpec.parse("1,1"), (P("r1", 2), P("r1", 2)))


# -- connection -------------------------------------------------------------

def test_connection_values():
    assert solve_connection(JordanSpec.parse("1,1"), euler_field(JordanSpec.parse("1,1")), (1, 2)).is_zero()
    assert solve_connection(S2, euler_field(S2), (1, 2)).is_zero()
    g = solve_connection(S2, swapped(), (1, 2))
    nonzero = {(i, j, k): g(i, j, k) for i in range(2) for j in range(2) for k in range(2) if g(i, j, k)}
    assert nonzero == {(0, 1, 1): -1}


def test_connection_degenerate_point():
    # rank 4 of 6 at r2 = 0 (sympy oracle)
    with pytest.raises(NonUnique):
        solve_connection(S2, euler_field(S2), (1, 0))


def test_connection_residuals_random(rng):
    for text in ("2", "2,1", "1,1"):
        spec = JordanSpec.parse(text)
        done = 0
        while done < 5:
            mu = tuple(randgen.poly(rng, spec.n, 2, 3) for _ in range(spec.n))
            pt = randgen.point(rng, spec.n)
            if not regular_at(regularity_checklist(spec, mu, pt)):
                continue
            flat, dn = connection_residuals(spec, mu, solve_connection(spec, mu, pt))
            assert not any(flat) and not any(dn)
            done += 1


def test_nabla_product_matches_k():
    pts = [(Fraction(1), Fraction(2)), (Fraction(-1, 2), Fraction(3))]
    good = nabla_product_check(S2, euler_field(S2), pts)
    assert all(r["nabla_c_zero"] and r["identity_zero"] for r in good)
    bad = nabla_product_check(S2, swapped(), pts)
    assert all(r["identity_zero"] and not r["nabla_c_zero"] for r in bad)
    assert [r["point"] for r in bad] == sorted(pts)
    unit = nabla_product_check(S2, unit_field(S2), pts, connection_field=euler_field(S2))
    assert all(r["nabla_c_zero"] for r in unit)
