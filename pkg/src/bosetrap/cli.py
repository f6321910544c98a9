"""Configuration-driven command line entry point.

Commands: ideal, solve, tc, xi, slope, hartree, compare, props, sweep.
A run is described by a JSON config document; every field can be overridden
on the command line.  Primary result payloads are deterministic (sorted
keys, no timestamps) and cached under a stable hash of the command, the
resolved parameters and the package version.

Exit codes: 0 success, 2 config error, 3 solver non-convergence,
4 potential admissibility failure.
"""

import argparse
import csv
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import hartree as hartree_mod
from . import ideal as ideal_mod
from . import scf, tc
from .potentials import load_table_potential, make_gaussian_potential, validate_assumption

UNITS_LINE = ("units: trap frequency omega sets the scales "
              "(energy: omega, length: omega^-1/2, beta: 1/omega); "
              "particle mass 1/2, hbar = N^-1/3 in finite-N runs")

DEFAULTS = {
    "command": None,
    "beta": None,
    "omega": 1.0,
    "lambda": 0.0,
    "lambdas": None,
    "betas": None,
    "n_particles": 1024,
    "n_list": None,
    "potential": "gaussian:amplitude=1,width=1",
    "seed": 0,
    "tol": 1e-9,
    "output_dir": "results",
    "cache": True,
    "suite": "all",
    "workers": 4,
}


class ConfigError(ValueError):
    pass


def parse_potential(spec):
    """'gaussian:amplitude=1,width=1' or 'table:/path/to/file'."""
    if ":" not in spec:
        raise ConfigError(f"malformed potential spec: {spec!r}")
    kind, _, rest = spec.partition(":")
    if kind == "gaussian":
        params = {}
        for item in rest.split(","):
            key, _, val = item.partition("=")
            params[key.strip()] = float(val)
        return make_gaussian_potential(params.get("amplitude", 1.0),
                                       params.get("width", 1.0))
    if kind == "table":
        if not Path(rest).exists():
            raise ConfigError(f"potential table not found: {rest}")
        return load_table_potential(rest)
    raise ConfigError(f"unknown potential kind: {kind}")


def _float_list(text):
    return [float(x) for x in str(text).split(",") if x != ""]


def resolve_config(args):
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            cfg.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    for key in ("beta", "omega", "tol"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.lambda_ is not None:
        cfg["lambda"] = args.lambda_
    if args.lambdas is not None:
        cfg["lambdas"] = _float_list(args.lambdas)
    if args.betas is not None:
        cfg["betas"] = _float_list(args.betas)
    if args.n is not None:
        cfg["n_particles"] = int(args.n)
    if args.n_list is not None:
        cfg["n_list"] = [int(x) for x in _float_list(args.n_list)]
    if args.potential is not None:
        cfg["potential"] = args.potential
    if args.seed is not None:
        cfg["seed"] = int(args.seed)
    if args.output_dir is not None:
        cfg["output_dir"] = args.output_dir
    if args.suite is not None:
        cfg["suite"] = args.suite
    if args.no_cache:
        cfg["cache"] = False
    cfg["command"] = args.command
    if cfg.get("tol", 0) <= 0:
        raise ConfigError("tolerances must be positive")
    return cfg


def cache_key(cfg):
    payload = {k: v for k, v in sorted(cfg.items()) if k not in ("cache", "output_dir")}
    payload["version"] = __version__
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:24]


def cache_dir():
    return Path(os.environ.get("BOSETRAP_CACHE_DIR", "cache"))


def _dump_json(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# {UNITS_LINE}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _require_beta(cfg):
    if cfg["beta"] is None:
        raise ConfigError("this command requires --beta")
    return float(cfg["beta"])


def run_ideal(cfg, outdir):
    beta = _require_beta(cfg)
    state = ideal_mod.ideal_state(beta, cfg["omega"])
    payload = {"g0": state.g0, "mu0": state.mu0, "free_energy": state.free_energy,
               "beta": beta, "omega": cfg["omega"]}
    _write_csv(outdir / "ideal_density.csv", ["r", "rho"],
               zip(state.rho0.grid, state.rho0.values))
    return payload, {}


def run_solve(cfg, outdir):
    beta = _require_beta(cfg)
    v = parse_potential(cfg["potential"])
    state = scf.solve_selfconsistent(beta, cfg["omega"], v, cfg["lambda"],
                                     scf.SCOptions(tol=cfg["tol"]))
    _write_csv(outdir / "sc_density.csv", ["r", "rho"],
               zip(state.rho_thermal.grid, state.rho_thermal.values))
    return state.to_dict(), {}


def run_tc(cfg, outdir):
    v = parse_potential(cfg["potential"])
    res = tc.find_tc(cfg["lambda"], cfg["omega"], v)
    _write_csv(outdir / "tc_density.csv", ["r", "rho"],
               zip(res.rho_c.grid, res.rho_c.values))
    return res.to_dict(), {}


def run_xi(cfg, _outdir):
    v = parse_potential(cfg["potential"])
    xi = tc.xi_coefficient(cfg["omega"], v)
    return {"xi": xi, "omega": cfg["omega"]}, {}


def run_slope(cfg, outdir):
    v = parse_potential(cfg["potential"])
    lams = cfg["lambdas"] or [0.04, 0.02, 0.01]
    rep = tc.tc_slope_check(cfg["omega"], v, lams)
    beta0 = rep.details["beta0"]
    rows = [(lam, bc, bc / beta0, s)
            for lam, bc, s in zip(rep.lambdas, rep.beta_cs, rep.slopes)]
    _write_csv(outdir / "slope.csv",
               ["lambda", "beta_c", "beta_c_over_beta0", "slope_estimate"], rows)
    return rep.to_dict(), {}


def run_hartree(cfg, outdir):
    beta = _require_beta(cfg)
    lam = cfg["lambda"]
    v = parse_potential(cfg["potential"]) if lam > 0 else None
    state = hartree_mod.solve_hartree(int(cfg["n_particles"]), beta, cfg["omega"],
                                      v, lam)
    _write_csv(outdir / "hartree_density.csv", ["r", "rho"],
               zip(state.r, state.rho.values))
    return state.summary(), {}


def run_compare(cfg, _outdir):
    beta = _require_beta(cfg)
    lam = cfg["lambda"]
    v = parse_potential(cfg["potential"])
    scs = scf.solve_selfconsistent(beta, cfg["omega"], v, lam)
    out = []
    for n in (cfg["n_list"] or [int(cfg["n_particles"])]):
        hst = hartree_mod.solve_hartree(int(n), beta, cfg["omega"],
                                        v if lam > 0 else None, lam)
        out.append(hartree_mod.compare_to_semiclassical(hst, scs).to_dict())
    return {"g_sc": scs.g, "reports": out}, {}


def run_sweep(cfg, outdir):
    v = parse_potential(cfg["potential"])
    betas = cfg["betas"]
    if not betas:
        raise ConfigError("sweep requires --betas")
    lam = cfg["lambda"]

    def solve_one(beta):
        st = scf.solve_selfconsistent(float(beta), cfg["omega"], v, lam,
                                      scf.SCOptions(tol=cfg["tol"]))
        return (lam, beta, st.g, st.mu, st.free_energy, st.residual,
                st.iterations)

    # independent points fan out over a bounded pool; the single CSV write
    # below serializes the results in beta order
    from concurrent.futures import ThreadPoolExecutor
    workers = max(1, min(int(cfg.get("workers", 4)), len(betas)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(solve_one, betas))
    _write_csv(outdir / "sweep.csv",
               ["lambda", "beta", "g", "mu", "free_energy", "residual", "iters"],
               rows)
    return {"rows": [list(map(float, r[:6])) + [int(r[6])] for r in rows]}, {}


def run_props(cfg, _outdir):
    from . import inequalities as ineq
    rng = np.random.default_rng(int(cfg["seed"]))
    v = parse_potential(cfg["potential"])
    report = {"seed": int(cfg["seed"]), "suites": {}}
    suite = cfg["suite"]
    known = ("all", "resolution", "berezin_lieb", "trace_convexity",
             "coercivity", "positive_type")
    if suite not in known:
        raise ConfigError(f"unknown props suite {suite!r}; choose from {known}")
    tol = 1e-8
    failed = False

    def want(name):
        return suite in ("all", name)

    if want("resolution"):
        defects = [ineq.coherent_resolution_check(0.5, ineq.HermiteProbe.mode(*m))
                   for m in [(0, 0, 0), (1, 0, 0), (2, 1, 0)]]
        defects.append(ineq.coherent_resolution_check(
            0.5, ineq.HermiteProbe.random_superposition(5, rng)))
        report["suites"]["resolution"] = {"max_defect": max(defects)}
        failed |= max(defects) > 1e-5
    if want("berezin_lieb"):
        margins = []
        for _ in range(20):
            sym = ineq.bose_symbol(rng.uniform(1.5, 2.5), shift=rng.uniform(0, 1))
            margins.append(ineq.berezin_lieb_check(sym, np.square,
                                                   hbar=rng.uniform(0.6, 1.0)))
        report["suites"]["berezin_lieb"] = {"min_margin": min(margins)}
        failed |= min(margins) < -tol
    if want("trace_convexity"):
        margins = []
        for _ in range(200):
            d = int(rng.integers(4, 24))
            m = rng.standard_normal((d, d))
            a = m @ m.T / d
            u, _ = np.linalg.qr(rng.standard_normal((d, d)))
            k = int(rng.integers(1, d))
            q = u[:, :k] @ u[:, :k].T
            margins.append(ineq.trace_convexity_check(a, q, np.square))
        report["suites"]["trace_convexity"] = {"min_margin": min(margins)}
        failed |= min(margins) < -1e-10
    if want("coercivity"):
        ratios = [ineq.phase_coercivity_ratio(ineq.random_phase_samples(rng))
                  for _ in range(200)]
        op_ratios = [ineq.operator_coercivity_ratio(
            *ineq.random_operator_pair(rng, int(rng.integers(2, 9))))
            for _ in range(200)]
        report["suites"]["coercivity"] = {"min_phase_ratio": min(ratios),
                                          "min_operator_ratio": min(op_ratios)}
        failed |= min(ratios) <= 0 or min(op_ratios) <= 0
    if want("positive_type"):
        from .potentials import RadialDensity
        from .quadrature import RadialGrid
        grid = RadialGrid.graded(8.0, 64)
        margins = []
        for _ in range(50):
            width = rng.uniform(0.5, 1.5)
            mass = rng.uniform(0.5, 5.0)
            eta = RadialDensity.on_grid(
                grid, mass * (2 * np.pi * width**2) ** -1.5
                * np.exp(-grid.r**2 / (2 * width**2)))
            pts = rng.normal(0.0, 1.5, size=(int(rng.integers(2, 21)), 3))
            margins.append(ineq.positive_type_bound_check(pts, eta, v))
        report["suites"]["positive_type"] = {"min_margin": min(margins)}
        failed |= min(margins) < -tol
    report["passed"] = not failed
    return report, {"exit_nonzero": failed}


RUNNERS = {
    "ideal": run_ideal,
    "solve": run_solve,
    "tc": run_tc,
    "xi": run_xi,
    "slope": run_slope,
    "hartree": run_hartree,
    "compare": run_compare,
    "sweep": run_sweep,
    "props": run_props,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="bosetrap", description=__doc__)
    parser.add_argument("command", choices=sorted(RUNNERS))
    parser.add_argument("--config", help="JSON config document")
    parser.add_argument("--beta", type=float)
    parser.add_argument("--omega", type=float)
    parser.add_argument("--lambda", dest="lambda_", type=float)
    parser.add_argument("--lambdas", help="comma-separated couplings")
    parser.add_argument("--betas", help="comma-separated inverse temperatures")
    parser.add_argument("--n", type=int, help="particle number")
    parser.add_argument("--n-list", help="comma-separated particle numbers")
    parser.add_argument("--potential", help="gaussian:amplitude=..,width=.. or table:path")
    parser.add_argument("--tol", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--suite", help="props suite selector")
    parser.add_argument("--output-dir")
    parser.add_argument("--no-cache", action="store_true")
    parser.add_argument("--dump-config", action="store_true",
                        help="echo the fully resolved config and exit")
    return parser


def run(cfg):
    """Execute a resolved config; returns (payload, flags)."""
    outdir = Path(cfg["output_dir"])
    key = cache_key(cfg)
    cpath = cache_dir() / f"{key}.json"
    if cfg.get("cache", True) and cpath.exists():
        return json.loads(cpath.read_text()), {"cached": True}
    payload, flags = RUNNERS[cfg["command"]](cfg, outdir)
    payload = json.loads(json.dumps(payload, sort_keys=True))  # normalize types
    if cfg.get("cache", True):
        _dump_json(cpath, payload)
    return payload, flags


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.dump_config:
        print(json.dumps(cfg, sort_keys=True, indent=2))
        return 0
    try:
        if cfg["command"] in ("solve", "tc", "slope", "hartree", "compare", "sweep"):
            v = parse_potential(cfg["potential"])
            lam = max([cfg["lambda"]] + (cfg["lambdas"] or [0.0]))
            if lam > 0 and not validate_assumption(v, cfg["omega"], lam).passed:
                print("potential fails the admissibility conditions", file=sys.stderr)
                return 4
        payload, flags = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (scf.SolverError, tc.ContractionError, hartree_mod.HartreeError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        _dump_json(Path(cfg["output_dir"]) / "failure.json",
                   {"command": cfg["command"], "error": str(exc)})
        return 3
    except ValueError as exc:
        if "admissibility" in str(exc):
            print(str(exc), file=sys.stderr)
            return 4
        raise
    outdir = Path(cfg["output_dir"])
    _dump_json(outdir / f"{cfg['command']}.json",
               {"units": UNITS_LINE, "config": {k: v for k, v in sorted(cfg.items())},
                "result": payload})
    print(json.dumps(payload, sort_keys=True))
    return 1 if flags.get("exit_nonzero") else 0


if __name__ == "__main__":
    sys.exit(main())
