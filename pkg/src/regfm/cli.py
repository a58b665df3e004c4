"""Batch driver: ``regfm run`` executes JSON-configured jobs, ``regfm emit-fixtures`` writes golden files.

Exit codes: 0 every check passed, 1 some check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import AssumptionUnmet, ConfigError, RegfmError
from .eventual import bridge_residual, is_eventual_identity, torsion_equivalence_check
from .exactring import Poly, TruncSeries, is_zero
from .fmanifold import JordanSpec, OpMatrix, euler_field, mult_operator, parse_vfield
from .fn_calculus import dd_L_function, form_is_zero, nijenhuis, nijenhuis_coordinate, torsion_is_zero
from .gtsystem import (
    GTData, classical_gt_residual, generalized_gt_residual, nonexistence_report,
    oneblock_identity_check, step1_identity_check,
)
from .exactring import v_jet

TASKS = (
    "check-nijenhuis", "check-eventual-identity", "gt-residual", "nonexistence", "gen-v",
    "build-chain", "verify-chain", "simulate", "dkp-verify", "identity-suite",
)
RANDOMIZED = {"gen-v"}
CONVERGENCE_RATIO = 0.8 * 4  # within 20% of 2^2
EXACT_FLOOR = 1e-11


# -- JSON helpers ---------------------------------------------------------

def jsonable(x):
    if isinstance(x, Poly):
        return x.to_literal()
    if isinstance(x, TruncSeries):
        return x.to_dict()
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, OpMatrix):
        return x.to_literals()
    if isinstance(x, dict):
        return {(_key(k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if hasattr(x, "symbols") and hasattr(x, "diff"):  # JetExpr
        return str(x)
    return x


def _key(k):
    if isinstance(k, tuple):
        return ",".join(str(i + 1) if isinstance(i, int) else str(i) for i in k)
    return str(k)


class Checks:
    def __init__(self):
        self.items = []

    def add(self, name, ok, **detail):
        self.items.append({"name": name, "status": "pass" if ok else "fail", **jsonable(detail)})
        return ok

    def fail(self, name, message):
        self.items.append({"name": name, "status": "fail", "message": message})

    @property
    def failures(self):
        return [c["name"] for c in self.items if c["status"] != "pass"]


# -- config parsing -------------------------------------------------------

def _req(cfg, name):
    if name not in cfg or cfg[name] is None:
        raise ConfigError(f"missing required field '{name}' for task '{cfg.get('task')}'", field=name)
    return cfg[name]


def _spec(cfg) -> JordanSpec:
    raw = _req(cfg, "spec")
    try:
        return JordanSpec.parse(str(raw)) if not isinstance(raw, list) else JordanSpec(tuple(raw))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad spec {raw!r}: {exc}", field="spec") from exc


def _field(cfg, name, spec, default=None):
    raw = cfg.get(name, default)
    if raw is None:
        raise ConfigError(f"missing required field '{name}'", field=name)
    text = "\n".join(raw) if isinstance(raw, list) else str(raw)
    try:
        return parse_vfield(text, spec)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad vector field in '{name}': {exc}", field=name) from exc


def _scalar(cfg, name, spec, default=None):
    raw = cfg.get(name, default)
    if raw is None:
        raise ConfigError(f"missing required field '{name}'", field=name)
    try:
        return Poly.parse(str(raw), spec.n)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad polynomial literal in '{name}': {exc}", field=name) from exc


def _point(cfg, name, spec, default=None):
    raw = cfg.get(name, default)
    if raw is None:
        return None
    try:
        pt = tuple(Fraction(str(v)) for v in raw)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad point in '{name}': {exc}", field=name) from exc
    if len(pt) != spec.n:
        raise ConfigError(f"'{name}' needs {spec.n} coordinates", field=name)
    return pt


def _int(cfg, name, default=None):
    raw = cfg.get(name, default)
    if raw is None:
        raise ConfigError(f"missing required field '{name}'", field=name)
    try:
        return int(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"field '{name}' must be an integer", field=name) from exc


def _float(cfg, name, default):
    try:
        return float(cfg.get(name, default))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"field '{name}' must be a number", field=name) from exc


def _grids(cfg, default):
    raw = cfg.get("grid", default)
    grids = raw if isinstance(raw, list) else [raw]
    try:
        grids = [int(g) for g in grids]
    except (ValueError, TypeError) as exc:
        raise ConfigError("field 'grid' must be an integer or a list of integers", field="grid") from exc
    if any(g < 16 for g in grids):
        raise ConfigError("grid sizes must be >= 16", field="grid")
    return grids


def _family(cfg, spec):
    from .pavlov import FunctionFamily
    if "F" in cfg:
        raw = cfg["F"]
        try:
            return FunctionFamily.from_dict({"spec": str(spec), "F": raw})
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"bad function family 'F': {exc}", field="F") from exc
    seed = _int(cfg, "seed")
    return FunctionFamily.random(spec, seed, _int(cfg, "degrees", 4))


# -- tasks ----------------------------------------------------------------

def task_check_nijenhuis(cfg, checks):
    spec = _spec(cfg)
    field = _field(cfg, "field", spec, "E")
    L = mult_operator(spec, field)
    N = nijenhuis(L)
    NC = nijenhuis_coordinate(L)
    zero = torsion_is_zero(N)
    expect = bool(cfg.get("expect", True))
    checks.add("nijenhuis_zero", zero == expect, value=zero, expected=expect)
    agree = all(is_zero(a + b) for key in N for a, b in zip(N[key], NC[key]))
    checks.add("coordinate_formula_matches", agree)
    return {"torsion": {k: list(v) for k, v in N.items()}}


def task_check_eventual(cfg, checks):
    spec = _spec(cfg)
    field = _field(cfg, "field", spec, "E")
    base = _point(cfg, "base", spec)
    rep = is_eventual_identity(spec, field, base)
    expect = bool(cfg.get("expect", True))
    checks.add("eventual_identity", rep.is_eventual == expect, value=rep.is_eventual, expected=expect)
    bridge = bridge_residual(spec, field)
    checks.add("bridge_identity", all(is_zero(x) for v in bridge.values() for x in v))
    try:
        eq = torsion_equivalence_check(spec, field, base)
        checks.add("torsion_equivalence", eq["equivalent"], k_zero=eq["k_zero"], n_zero=eq["n_zero"])
    except AssumptionUnmet as exc:
        res = exc.result
        checks.add("torsion_equivalence_one_way", res["one_way_holds"], k_zero=res["k_zero"],
                   n_zero=res["n_zero"], note=str(exc))
    return {"nonzero_K": rep.nonzero_components(), "checklist": rep.assumption_checklist}


def task_gt_residual(cfg, checks):
    spec = _spec(cfg)
    mu = _field(cfg, "mu", spec)
    V = _scalar(cfg, "V", spec)
    res = generalized_gt_residual(GTData(spec, mu, V))
    zero = all(is_zero(x) for part in res.values() for x in part.values())
    expect = bool(cfg.get("expect", True))
    checks.add("generalized_residual_zero", zero == expect, value=zero, expected=expect)
    out = {"R1": res["R1"], "R2": res["R2"]}
    if spec.semisimple() and spec.n > 1:
        cl = classical_gt_residual(spec.n, mu, V)
        out["classical"] = cl
        czero = all(is_zero(x) for part in cl.values() for x in part.values())
        checks.add("classical_agrees", czero == zero, classical_zero=czero)
    return out


def task_nonexistence(cfg, checks):
    spec = _spec(cfg)
    mu = _field(cfg, "mu", spec)
    V = _scalar(cfg, "V", spec)
    samples = [tuple(Fraction(str(v)) for v in p) for p in cfg.get("samples", [])]
    rep = nonexistence_report(GTData(spec, mu, V), samples)
    for item in ("i", "ii", "iii", "iv"):
        checks.add(f"item_{item}", rep[item]["holds"], applicable=rep[item]["applicable"])
    return {"vanishing_partials_of_V": rep["vanishing_partials_of_V"]}


def task_gen_v(cfg, checks):
    from .pavlov import GOLDEN, generate_V, golden_V
    spec = _spec(cfg)
    fam = _family(cfg, spec)
    V = generate_V(spec, fam)
    L = mult_operator(spec, euler_field(spec))
    checks.add("dd_L_V_zero", form_is_zero(dd_L_function(L, V)))
    if str(spec) in GOLDEN:
        checks.add("matches_closed_form", V == golden_V(spec, fam.flat()))
    return {"V": V, "F": fam.to_dict()["F"]}


def _chain_from_cfg(cfg):
    from .pavlov import build_chain
    spec = _spec(cfg)
    mu = _field(cfg, "mu", spec, "E")
    base = _point(cfg, "base", spec, [0] * spec.n)
    lo, hi = cfg.get("range", [0, 2])
    order = _int(cfg, "order", 10)
    if "V" in cfg:
        src = _scalar(cfg, "V", spec)
    else:
        src = _family(cfg, spec)
    return build_chain(spec, src, mu, base, int(lo), int(hi), order)


def task_build_chain(cfg, checks):
    chain = _chain_from_cfg(cfg)
    ver = chain.verify()
    checks.add("chain_relations", all(ver["pairs"].values()), pairs=ver["pairs"])
    checks.add("gauge", ver["gauge"])
    if cfg.get("chain_out"):
        Path(cfg["chain_out"]).write_text(chain.to_json() + "\n")
    return {"chain": chain.to_dict()}


def task_verify_chain(cfg, checks):
    from .pavlov import ChainFamily
    src = _req(cfg, "chain")
    try:
        data = src if isinstance(src, dict) else json.loads(Path(src).read_text())
        chain = ChainFamily.from_dict(data)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load chain: {exc}", field="chain") from exc
    ver = chain.verify()
    checks.add("chain_relations", all(ver["pairs"].values()), pairs=ver["pairs"])
    checks.add("gauge", ver["gauge"])
    return {"indices": chain.indices}


def _converges(norms):
    from .hydrosim import refinement_ratios
    if all(v < EXACT_FLOOR for v in norms):
        return True, [], []
    ratios, orders = refinement_ratios(norms)
    return all(r >= CONVERGENCE_RATIO for r in ratios), ratios, orders


def task_simulate(cfg, checks):
    from . import hydrosim as hs
    from .pavlov import reduction_operator
    cfg = dict(cfg)
    cfg.setdefault("range", [0, 3])
    chain = _chain_from_cfg(cfg)
    spec = chain.spec
    grids = _grids(cfg, [256, 512, 1024])
    T = _float(cfg, "T", 0.25)
    cfl = _float(cfg, "cfl", 0.4)
    state = [float(Fraction(str(v))) for v in cfg.get("state", [1] + [0.5] * (spec.n - 1))]
    W = reduction_operator(spec, chain.mu, chain[0])
    records, dt0 = [], None
    for M in grids:
        g = hs.Grid1D(M)
        r0 = hs.smooth_initial_data(g, state, _float(cfg, "amplitude", 0.1), _int(cfg, "seed", 0))
        if dt0 is None:
            tr = hs.evolve(W, r0, g, T, cfl=cfl)
            dt0 = tr.dt
        else:
            tr = hs.evolve(W, r0, g, T, dt=dt0 * grids[0] / M)
        records.extend(hs.pavlov_pde_residual(tr, chain))
        if cfg.get("trajectory_out") and M == grids[-1]:
            Path(cfg["trajectory_out"]).write_text(tr.to_json() + "\n")
    for a in sorted({r["alpha"] for r in records}):
        norms = [r["maxNorm"] for r in records if r["alpha"] == a]
        ok, ratios, orders = _converges(norms)
        checks.add(f"pavlov_alpha_{a}_order_ge_2", ok, ratios=ratios, orders=orders)
    return {"records": records}


def task_dkp_verify(cfg, checks):
    from . import hydrosim as hs
    cfg = dict(cfg)
    cfg.setdefault("spec", "1")
    spec = _spec(cfg)
    mu = _field(cfg, "mu", spec, "E")
    V = _scalar(cfg, "V", spec, "r1" if spec.n == 1 else None)
    W = _scalar(cfg, "W", spec, "1/2*r1^2" if spec.n == 1 else None)
    lam = _field(cfg, "lambda", spec) if "lambda" in cfg else None
    grids = _grids(cfg, [256, 512, 1024])
    T = _float(cfg, "T", 0.2)
    dt = _float(cfg, "dt", 0.01)
    state = [float(Fraction(str(v))) for v in cfg.get("state", [1] * spec.n)]
    out = []
    for M in grids:
        g = hs.Grid1D(M)
        r0 = hs.smooth_initial_data(g, state, _float(cfg, "amplitude", 0.1), _int(cfg, "seed", 1))
        out.append(hs.dkp_residual(spec, mu, V, W, g, T, r0=r0, dt=dt * grids[0] / M, lam=lam))
    for key in ("dkp1", "dkp2"):
        ok, ratios, orders = _converges([o[key]["maxNorm"] for o in out])
        checks.add(f"{key}_order_ge_2", ok, ratios=ratios, orders=orders)
    return {"records": out}


def task_identity_suite(cfg, checks):
    spec = _spec(cfg)
    for a, m in enumerate(spec.block_sizes):
        for j in range(2, m + 1):
            got = step1_identity_check(spec, a + 1, j)
            checks.add(f"step1_block{a + 1}_j{j}", got == v_jet((spec.flat(a, j - 1),)), value=str(got))
    from .exactring import mu_jet
    for m in sorted({m for m in spec.block_sizes if m >= 2}):
        diag, r12 = oneblock_identity_check(m)
        expect = m * mu_jet(1) * mu_jet(0, (1,)) - (m - 1) * v_jet((0,))
        checks.add(f"oneblock_{m}_identity_I", diag == expect, value=str(diag))
        prod = mu_jet(0, (1,)) * v_jet((0,))
        ok = any(r12 == c * prod for c in (1, -1))
        checks.add(f"oneblock_{m}_identity_II", ok, value=str(r12))
    return {}


DISPATCH = {
    "check-nijenhuis": task_check_nijenhuis,
    "check-eventual-identity": task_check_eventual,
    "gt-residual": task_gt_residual,
    "nonexistence": task_nonexistence,
    "gen-v": task_gen_v,
    "build-chain": task_build_chain,
    "verify-chain": task_verify_chain,
    "simulate": task_simulate,
    "dkp-verify": task_dkp_verify,
    "identity-suite": task_identity_suite,
}


def validate(cfg):
    if not isinstance(cfg, dict):
        raise ConfigError("a job must be a JSON object")
    task = cfg.get("task")
    if task not in DISPATCH:
        raise ConfigError(f"unknown task {task!r}; expected one of {', '.join(TASKS)}", field="task")
    if task in RANDOMIZED and "F" not in cfg and "seed" not in cfg:
        raise ConfigError(f"task '{task}' is randomized and needs 'seed'", field="seed")


def run(cfg) -> dict:
    """Execute one job and return its report. Raises ConfigError on invalid configs."""
    validate(cfg)
    checks = Checks()
    start = time.perf_counter()
    result = {}
    try:
        result = DISPATCH[cfg["task"]](cfg, checks)
    except ConfigError:
        raise
    except RegfmError as exc:
        checks.fail(type(exc).__name__, str(exc))
    elapsed = time.perf_counter() - start
    return {
        "config": cfg,
        "checks": checks.items,
        "status": "pass" if not checks.failures else "fail",
        "failures": checks.failures,
        "result": jsonable(result),
        "timing": {"seconds": round(elapsed, 6)},
        "tool": {"name": "regfm", "version": __version__},
    }


def load_config(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


# -- fixtures -------------------------------------------------------------

def emit_fixtures(target) -> list:
    """Write golden V formulas, canonical L matrices and reference chains into ``target``."""
    from .pavlov import FunctionFamily, GOLDEN, build_chain, golden_text, generate_V
    target = Path(target)
    written = []
    for sub in ("golden", "operators", "chains"):
        (target / sub).mkdir(parents=True, exist_ok=True)
    for i, key in enumerate(GOLDEN):
        spec = JordanSpec.parse(key)
        fam = FunctionFamily.random(spec, 1000 + i, degree=3)
        doc = {
            "spec": key,
            "formula": golden_text(spec),
            "instance": {"F": [f.to_literal() for f in fam.flat()], "V": generate_V(spec, fam).to_literal()},
        }
        written.append(_write(target / "golden" / f"V_{key.replace(',', '_')}.json", doc))
        L = mult_operator(spec, euler_field(spec))
        written.append(_write(target / "operators" / f"L_{key.replace(',', '_')}.json",
                              {"spec": key, "field": "E", "L": L.to_literals()}))
    refs = {
        "2": [[[1], [0, 0, Fraction(1, 2)]]],
        "3": [[[1], [0, 1], [0, 0, Fraction(1, 2)]]],
    }
    for key, coeffs in refs.items():
        spec = JordanSpec.parse(key)
        chain = build_chain(spec, FunctionFamily.from_coefficients(spec, coeffs), None,
                            (0,) * spec.n, 0, 4)
        path = target / "chains" / f"chain_{key}.json"
        path.write_text(chain.to_json() + "\n")
        written.append(path)
    return written


def _write(path, doc):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


# -- entry point ----------------------------------------------------------

def _parser():
    p = argparse.ArgumentParser(prog="regfm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command")
    r = sub.add_parser("run", help="run one job or a batch of jobs")
    r.add_argument("--config", help="JSON job, or {\"jobs\": [...]} batch")
    r.add_argument("--task", choices=TASKS)
    r.add_argument("--spec", help="block sizes, e.g. 3,1,1")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="write the report here instead of stdout")
    r.add_argument("--order", type=int, help="series truncation order")
    r.add_argument("--grid", type=int, help="grid size (single-grid override)")
    r.add_argument("--cfl", type=float)
    e = sub.add_parser("emit-fixtures", help="write golden fixture files")
    e.add_argument("target")
    return p


def _overrides(args):
    out = {}
    for name in ("task", "spec", "seed", "order", "grid", "cfl"):
        v = getattr(args, name)
        if v is not None:
            out[name] = v
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0].startswith("-"):
        argv = ["run"] + argv
    args = _parser().parse_args(argv)
    if args.command == "emit-fixtures":
        for path in emit_fixtures(args.target):
            print(path)
        return 0
    try:
        cfg = load_config(args.config) if args.config else {}
        over = _overrides(args)
        if isinstance(cfg, dict) and "jobs" in cfg:
            jobs = [dict(j, **over) for j in cfg["jobs"]]
            reports = []
            for i, job in enumerate(jobs):
                try:
                    reports.append(run(job))
                except ConfigError as exc:
                    err = ConfigError(f"job {i}: {exc}")
                    err.field = exc.field
                    raise err from exc
            doc = {"reports": reports, "status": "pass" if all(r["status"] == "pass" for r in reports) else "fail"}
            status = doc["status"]
        else:
            doc = run(dict(cfg, **over))
            status = doc["status"]
    except ConfigError as exc:
        err = {"status": "config-error", "message": str(exc), "field": exc.field}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    text = dumps(doc) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if status == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
