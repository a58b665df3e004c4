import copy
import math

import numpy as np
import pytest

from regfm import hydrosim as hs
from regfm.errors import BlowupDetected, CflViolation, PreconditionFailed
from regfm.exactring import Poly, TruncSeries
from regfm.fmanifold import JordanSpec, OpMatrix, euler_field
from regfm.pavlov import FunctionFamily, build_chain, reduction_operator

from conftest import P

S2 = JordanSpec.parse("2")
S11 = JordanSpec.parse("1,1")


def const_op(c):
    return OpMatrix([[Poly.const(1, c)]])


def test_ddx_fourth_order():
    errs = []
    for M in (32, 64, 128):
        g = hs.Grid1D(M)
        errs.append(np.max(np.abs(hs.ddx(np.sin(3 * g.x), g.dx) - 3 * np.cos(3 * g.x))))
    _, orders = hs.refinement_ratios(errs)
    assert min(orders) > 3.8


def test_grid_minimum():
    with pytest.raises(ValueError):
        hs.Grid1D(8)


def test_filter_keeps_low_modes():
    w = hs._filter_weights(64)
    k = np.arange(len(w))
    assert np.all(w[k <= 21] == 1.0)
    assert w[-1] < 1e-15


def test_compile_scalar_series_and_constant():
    r = np.array([[1.5, 2.0], [0.0, -1.0]])
    s = TruncSeries.from_poly(P("r1^2 + r2", 2), (1, 0), 4)
    assert np.allclose(hs.compile_scalar(s, 2)(r), r[0] ** 2 + r[1])
    assert np.allclose(hs.compile_scalar(3, 2)(r), 3.0)


def test_advection_order():
    errs = []
    for M in (32, 64, 128):
        g = hs.Grid1D(M)
        tr = hs.evolve(const_op(1), np.sin(g.x)[None], g, 1.0, cfl=0.8)
        errs.append(np.max(np.abs(tr.states[-1][0] - np.sin(g.x + 1.0))))
    _, orders = hs.refinement_ratios(errs)
    assert min(orders) >= 3.5


def test_backward_time_returns():
    g = hs.Grid1D(64)
    W = OpMatrix([[P("r1", 1)]])
    r0 = hs.smooth_initial_data(g, [1.0], 0.05)
    fwd = hs.evolve(W, r0, g, 0.2, dt=0.01)
    back = hs.evolve(W, fwd.states[-1], g, -0.2, dt=0.01)
    assert back.times[-1] == pytest.approx(-0.2)
    assert np.max(np.abs(back.states[-1] - r0)) < 1e-5


def test_cfl_violation():
    g = hs.Grid1D(64)
    with pytest.raises(CflViolation):
        hs.evolve(const_op(1), np.sin(g.x)[None], g, 1.0, dt=0.5)


def test_blowup_detected():
    g = hs.Grid1D(64)
    r0 = np.sin(g.x)[None]
    with pytest.raises(BlowupDetected):
        hs.evolve(OpMatrix([[P("r1", 1)]]), r0, g, 3.0, cfl=0.3, blowup=20)


def test_bad_horizon():
    g = hs.Grid1D(32)
    with pytest.raises(ValueError):
        hs.evolve(const_op(1), np.sin(g.x)[None], g, 0.25, dt=0.1)


def test_trajectory_round_trip():
    g = hs.Grid1D(32)
    tr = hs.evolve(const_op(1), np.sin(g.x)[None], g, 0.1, dt=0.05)
    again = hs.Trajectory.from_dict(tr.to_dict())
    assert again.to_json() == tr.to_json()
    assert tr.metadata["filter"]["alpha"] == hs.FILTER_ALPHA


def _pavlov_norms(chain, grids, T=0.25):
    W = reduction_operator(chain.spec, chain.mu, chain[0])
    out, dt0 = {}, None
    for M in grids:
        g = hs.Grid1D(M)
        r0 = hs.smooth_initial_data(g, [1, 0.5], 0.1, 0)
        if dt0 is None:
            tr = hs.evolve(W, r0, g, T, cfl=0.4)
            dt0 = tr.dt
        else:
            tr = hs.evolve(W, r0, g, T, dt=dt0 * grids[0] / M)
        for rec in hs.pavlov_pde_residual(tr, chain):
            out.setdefault(rec["alpha"], []).append(rec["maxNorm"])
    return out


@pytest.fixture(scope="module")
def quad_chain():
    fam = FunctionFamily(S2, ((Poly.const(2, 1), P("1/2*r1^2", 2)),))
    return build_chain(S2, fam, lo=0, hi=2)


def test_pavlov_residual_second_order(quad_chain):
    norms = _pavlov_norms(quad_chain, (64, 128, 256))
    for a, vals in norms.items():
        ratios, _ = hs.refinement_ratios(vals)
        assert min(ratios) >= 3.2, (a, vals)


def test_pavlov_residual_perturbed_stalls(quad_chain):
    bad = copy.deepcopy(quad_chain)
    bad.densities[1] = bad[1] + P("1/100*r1^2", 2)
    norms = _pavlov_norms(bad, (64, 128, 256))
    ratios, _ = hs.refinement_ratios(norms[1])
    assert max(ratios) < 1.5 and min(norms[1]) > 1e-3


def test_dkp_residual_and_control():
    spec = JordanSpec.parse("1")
    mu, V, W = (P("r1", 1),), P("r1", 1), P("1/2*r1^2", 1)
    good, bad = [], []
    for M in (64, 128):
        g = hs.Grid1D(M)
        r0 = hs.smooth_initial_data(g, [1], 0.1, 1)
        dt = 0.01 * 64 / M
        good.append(hs.dkp_residual(spec, mu, V, W, g, 0.1, r0=r0, dt=dt))
        bad.append(hs.dkp_residual(spec, mu, V, W, g, 0.1, r0=r0, dt=dt, lam=(P("r1^2", 1),)))
    for key in ("dkp1", "dkp2"):
        r, _ = hs.refinement_ratios([x[key]["maxNorm"] for x in good])
        assert r[0] >= 3.2
    r, _ = hs.refinement_ratios([x["dkp2"]["maxNorm"] for x in bad])
    assert r[0] < 1.5
    with pytest.raises(PreconditionFailed):
        hs.dkp_residual(S2, euler_field(S2), P("r2", 2), P("r2", 2), hs.Grid1D(32), 0.1)


def test_commuting_flows_discrepancy_scales_with_grid():
    mu = euler_field(S11)
    good = (P("r1^2", 2), P("r2^2", 2))
    bad = (P("r1^2 + r2", 2), P("r2^2", 2))
    d_good, d_bad = [], []
    for M in (32, 64):
        g = hs.Grid1D(M)
        d_good.append(hs.commute_check(S11, mu, good, g, 0.1, substeps=M // 8))
        d_bad.append(hs.commute_check(S11, mu, bad, g, 0.1, substeps=M // 8))
    assert d_good[0] / d_good[1] > 10
    assert 0.8 < d_bad[0] / d_bad[1] < 1.25
    assert d_bad[1] > 50 * d_good[1]


def test_refinement_ratios():
    ratios, orders = hs.refinement_ratios([4.0, 1.0, 0.25])
    assert ratios == [4.0, 4.0] and orders == [2.0, 2.0]
    _, orders = hs.refinement_ratios([1.0, 0.0])
    assert orders == [math.inf]


def test_commute_identical_flows_exact():
    spec = JordanSpec.parse("1")
    e = (Poly.const(1, 1),)
    assert hs.commute_check(spec, e, e, hs.Grid1D(64), 0.01) == 0.0


def test_commute_scalar_family_is_discretisation_error():
    # for n = 1 any two flows commute; what remains is the discrete commutator,
    # quadratic in delta and fourth order in dx
    spec = JordanSpec.parse("1")
    mu, lam = (P("r1", 1),), (P("r1^2 + r1", 1),)
    d = {M: [hs.commute_check(spec, mu, lam, hs.Grid1D(M), s) for s in (1e-2, 5e-3)] for M in (64, 128)}
    assert 3.5 < d[64][0] / d[64][1] < 4.5
    assert d[64][0] / d[128][0] > 10
