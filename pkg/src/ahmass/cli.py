"""Command-line front end.

Every subcommand reads an optional JSON config, overlays the command-line
flags, writes ``report.json`` (with the fully resolved config embedded) plus
CSV tables into ``--out``, and puts wall-clock timings in a separate
``timings.json`` so that reports are bit-identical across runs.

Exit codes: 0 success, 2 tolerance failure, 3 config error, 4 divergence.
"""

import argparse
import copy
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .charts import Chart
from .constraints import (
    ConstraintValues,
    InitialDataSet,
    ah_lambda,
    ah_to_ae_shift,
    constraint_operator,
    graph_initial_data,
    hyperboloid_graph,
    interpolating_graph,
    random_trig_graph,
    write_constraint_csv,
    zero_tensor,
)
from .errors import AHMassError, ConfigError, DivergenceError
from .gluing import GluingScenario, MomentumFamily, default_epsilon_grid, epsilon_threshold, write_trace_csv
from .lorentz import (
    BoostParams,
    act_on_sphere,
    boost,
    conjugate_boost,
    conjugate_closed_form,
    lorentz_defect,
    rotation_pi,
)
from .mass import (
    RadiusSchedule,
    causal_character,
    energy_momentum,
    momentum_from_aspect,
    write_convergence_csv,
)
from .models import conformal_perturbation, hyperbolic_metric, schwarzschild_ads
from .quadrature import default_quadrature, monte_carlo, product_gauss
from .verify import SuiteResult, gauss_codazzi_suite, kid_suite, killing_suite, lorentz_suite, sample_half_space

EXIT_OK, EXIT_TOL, EXIT_CONFIG, EXIT_DIVERGENCE = 0, 2, 3, 4

DEFAULTS = {
    "mass": {
        "n": 3,
        "seed": 0,
        "tol": 1e-5,
        "metric": {
            "family": "hyperbolic",
            "chart": "ball",
            "mass": 1.0,
            "amplitude": 1e-3,
            "sigma": None,
            "direction": None,
            "lower_half": False,
            "coefficients": None,
        },
        "quadrature": {"kind": "auto", "order": 12, "samples": 1000000},
        "radii": {"kmin": 3, "kmax": 8},
        "region": "full",
    },
    "verify": {
        "n": 3,
        "seed": 0,
        "tol": 1e-10,
        "points": 1000,
        "graphs": 50,
        "mass_samples": 1000000,
        "corrupt_kid": 0.0,
    },
    "glue": {
        "n": 5,
        "seed": 0,
        "tol": 1e-12,
        "base": None,
        "base2": None,
        "correction": {"model": "strict-o", "C": 1.0, "p": None, "eta": 0.1, "rate": None},
        "eps_kmax": 20,
    },
    "constraints": {
        "n": 3,
        "seed": 0,
        "tol": 1e-5,
        "family": "random-graphs",
        "count": 50,
        "samples": 40,
        "box": 2.0,
        "R": 2.0,
    },
    "boost-demo": {
        "n": 3,
        "seed": 0,
        "tol": 1e-10,
        "eps": [0.3, 0.1, 0.03],
        "points": 16,
    },
}


# ---------------------------------------------------------------------------
# configuration


def _merge(defaults, given, path=""):
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(defaults[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            out[key] = _merge(defaults[key], val, path + key + ".")
        else:
            out[key] = val
    return out


def resolve_config(command, config_path=None, overrides=None):
    """Defaults, then the JSON file, then command-line overrides."""
    given = {}
    if config_path is not None:
        try:
            given = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(given, dict):
            raise ConfigError("config must be a JSON object")
        given.pop("command", None)
    cfg = _merge(DEFAULTS[command], given)
    for key, val in (overrides or {}).items():
        if val is not None:
            cfg[key] = val
    n, tol = cfg["n"], cfg["tol"]
    if not isinstance(n, int) or n < 3:
        raise ConfigError("dimension n must be an integer >= 3")
    if not (isinstance(tol, (int, float)) and tol > 0):
        raise ConfigError("tolerance must be positive")
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return cfg


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _write_report(out, report):
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    (out / "report.json").write_text(text, encoding="utf-8", newline="\n")


def _write_csv(out, name, writer, *args):
    out.mkdir(parents=True, exist_ok=True)
    with open(out / name, "w", encoding="utf-8", newline="") as fh:
        writer(*args, fh)


# ---------------------------------------------------------------------------
# commands


def _mass_metric(cfg):
    n, mcfg = cfg["n"], cfg["metric"]
    family = mcfg["family"]
    try:
        chart = Chart(mcfg["chart"])
    except ValueError as exc:
        raise ConfigError(f"unknown chart {mcfg['chart']!r}") from exc
    if family == "hyperbolic":
        return hyperbolic_metric(chart, n)
    if chart is not Chart.BALL:
        raise ConfigError(f"family {family!r} is only available in the ball chart")
    if family == "schwarzschild-ads":
        return schwarzschild_ads(n, float(mcfg["mass"]))
    if family == "perturbed":
        return conformal_perturbation(
            n, float(mcfg["amplitude"]), mcfg["sigma"], mcfg["direction"], bool(mcfg["lower_half"])
        )
    raise ConfigError(f"unknown metric family {family!r}")


def _quadrature(cfg):
    n, q = cfg["n"], cfg["quadrature"]
    kind = q["kind"]
    if kind == "auto":
        return default_quadrature(n, q["order"], q["samples"], cfg["seed"])
    if kind == "product-gauss":
        return product_gauss(n, q["order"])
    if kind == "monte-carlo":
        return monte_carlo(n, q["samples"], cfg["seed"])
    raise ConfigError(f"unknown quadrature kind {kind!r}")


def cmd_mass(cfg, out):
    n = cfg["n"]
    quad = _quadrature(cfg)
    region = cfg["region"]
    if region not in ("full", "upper", "lower"):
        raise ConfigError("region must be full, upper or lower")
    if region != "full":
        quad = quad.restrict(region)
    report = {"command": "mass", "config": cfg}
    if cfg["metric"]["family"] == "aspect":
        coef = cfg["metric"]["coefficients"]
        if coef is None or len(coef) != n + 1:
            raise ConfigError("aspect family needs n + 1 coefficients (mu = a_0 + a.x)")
        mu = coef[0] + quad.nodes @ np.asarray(coef[1:], float)
        m = momentum_from_aspect(mu, quad)
        report.update(m=m, error=np.zeros(n + 1), character=causal_character(m).value, passed=True)
        _write_report(out, report)
        return EXIT_OK
    r = cfg["radii"]
    if not r["kmin"] < r["kmax"]:
        raise ConfigError("radius schedule needs kmin < kmax")
    sched = RadiusSchedule.powers_of_two(r["kmin"], r["kmax"])
    try:
        res = energy_momentum(_mass_metric(cfg), quad, sched, tol=cfg["tol"])
    except DivergenceError as exc:
        report.update(error_message=str(exc), table=exc.table, passed=False)
        _write_report(out, report)
        return EXIT_DIVERGENCE
    scale = max(1.0, float(np.max(np.abs(res.m))))
    passed = bool(np.all(res.error <= cfg["tol"] * scale))
    report.update(
        m=res.m,
        error=res.error,
        stderr=res.stderr[-1],
        character=causal_character(res.m, tol=cfg["tol"] * scale).value,
        passed=passed,
    )
    _write_report(out, report)
    _write_csv(out, "convergence.csv", write_convergence_csv, res)
    return EXIT_OK if passed else EXIT_TOL


def _verify_mass_suite(cfg):
    n = cfg["n"]
    quad = default_quadrature(n, samples=cfg["mass_samples"], seed=cfg["seed"])
    res = energy_momentum(hyperbolic_metric(Chart.BALL, n), quad)
    return SuiteResult("hyperbolic-mass", float(np.max(np.abs(res.m))), 1e-6, {"nodes": len(quad)})


def cmd_verify(cfg, out):
    n = cfg["n"]
    pts = sample_half_space(n, cfg["points"], cfg["seed"])
    tol = cfg["tol"]
    suites = [
        kid_suite(n, pts, corrupt=cfg["corrupt_kid"], tol=tol),
        kid_suite(n, pts, fd=True, corrupt=cfg["corrupt_kid"]),
        killing_suite(n, pts, tol=tol),
        lorentz_suite(n),
        gauss_codazzi_suite(n, cfg["graphs"], cfg["seed"]),
        _verify_mass_suite(cfg),
    ]
    passed = all(s.passed for s in suites)
    report = {
        "command": "verify",
        "config": cfg,
        "suites": [s.as_dict() for s in suites],
        "violations": [s.name for s in suites if not s.passed],
        "passed": passed,
    }
    _write_report(out, report)
    return EXIT_OK if passed else EXIT_TOL


def _base(n, given):
    if given is None:
        m = np.zeros(n + 1)
        m[0], m[1] = -1.0, 2.0
        return m
    m = np.asarray(given, float)
    if m.shape != (n + 1,):
        raise ConfigError(f"base momentum needs {n + 1} components")
    return m


def glue_scenario(cfg):
    n = cfg["n"]
    corr = cfg["correction"]
    m1 = _base(n, cfg["base"])
    m2 = m1 if cfg["base2"] is None else _base(n, cfg["base2"])
    model = corr["model"]
    if model == "strict-o":
        p = n / 2 if corr["p"] is None else float(corr["p"])
        rate = p + float(corr["eta"])
        if not corr["eta"] > 0:
            raise ConfigError("strict-o margin eta must be positive")
    elif model == "rate":
        if corr["rate"] is None:
            raise ConfigError("correction model 'rate' needs a rate")
        rate = float(corr["rate"])
    elif model == "none":
        rate = 0.0
    else:
        raise ConfigError(f"unknown correction model {model!r}")
    C = 0.0 if model == "none" else float(corr["C"])
    if C > 0:
        f1 = MomentumFamily.seeded(m1, C, rate, cfg["seed"])
        f2 = MomentumFamily.seeded(m2, C, rate, cfg["seed"] + 1)
    else:
        f1, f2 = MomentumFamily(tuple(m1)), MomentumFamily(tuple(m2))
    return GluingScenario(f1, f2, default_epsilon_grid(int(cfg["eps_kmax"])))


def cmd_glue(cfg, out):
    scenario = glue_scenario(cfg)
    res = epsilon_threshold(scenario)
    report = {
        "command": "glue",
        "config": cfg,
        "threshold": res.threshold if res.found else "none found",
        "remainder_decays": res.remainder_decays,
        "rate": scenario.rate,
        "smallest_eps": {
            k: (v.value if hasattr(v, "value") else v) for k, v in res.rows[-1].items()
        },
        "passed": res.found,
    }
    _write_report(out, report)
    _write_csv(out, "trace.csv", write_trace_csv, res)
    return EXIT_OK if res.found else EXIT_TOL


def _constraint_families(cfg, rng):
    n, family = cfg["n"], cfg["family"]
    if family == "random-graphs":
        return [graph_initial_data(random_trig_graph(n, rng)) for _ in range(cfg["count"])], "euclidean"
    if family == "hyperboloid":
        return [graph_initial_data(hyperboloid_graph(n))], "euclidean"
    if family == "interpolating":
        return [graph_initial_data(interpolating_graph(float(cfg["R"]), n))], "euclidean"
    if family in ("hyperbolic", "shifted-hyperbolic"):
        data = InitialDataSet(hyperbolic_metric(Chart.HALF_SPACE, n), zero_tensor(n), ah_lambda(n))
        return [ah_to_ae_shift(data) if family.startswith("shifted") else data], "half-space"
    raise ConfigError(f"unknown constraint family {family!r}")


def cmd_constraints(cfg, out):
    rng = np.random.default_rng(cfg["seed"])
    families, chart = _constraint_families(cfg, rng)
    rows, vals, worst = [], [], 0.0
    for data in families:
        if chart == "euclidean":
            x = rng.uniform(-cfg["box"], cfg["box"], (cfg["samples"], cfg["n"]))
        else:
            x = sample_half_space(cfg["n"], cfg["samples"], int(rng.integers(2**32)))
        cv = constraint_operator(data, x)
        rows.append(x)
        vals.append(cv)
        worst = max(worst, float(np.max(np.abs(cv.rho) + cv.J_norm)))
    pts = np.concatenate(rows)
    merged = ConstraintValues(
        np.concatenate([v.rho for v in vals]),
        np.concatenate([v.J for v in vals]),
        np.concatenate([v.g for v in vals]),
    )
    dec = bool(np.all(merged.dec(tol=cfg["tol"])))
    passed = worst < cfg["tol"]
    report = {
        "command": "constraints",
        "config": cfg,
        "worst_residual": worst,
        "dec_everywhere": dec,
        "passed": passed,
    }
    _write_report(out, report)
    _write_csv(out, "constraints.csv", write_constraint_csv, pts, merged)
    return EXIT_OK if passed else EXIT_TOL


def _boost_rows(n, eps, points):
    en = np.eye(n)[-1]
    params = BoostParams.from_cap(en, eps)
    L = boost(params)
    phi = 2 * np.pi * np.arange(points) / points
    x = np.zeros((points, n))
    x[:, 0], x[:, 1], x[:, -1] = np.sin(eps) * np.cos(phi), np.sin(eps) * np.sin(phi), np.cos(eps)
    return params, L, x, act_on_sphere(L, x)


def cmd_boost_demo(cfg, out):
    n = cfg["n"]
    R = rotation_pi(n)
    items, csv_rows = [], []
    for eps in cfg["eps"]:
        if not 0 < eps <= np.pi / 2:
            raise ConfigError("cap angles must lie in (0, pi/2]")
        params, L, x, y = _boost_rows(n, float(eps), int(cfg["points"]))
        g2 = params.gamma**2
        items.append({
            "eps": eps,
            "v": params.v,
            "gamma": params.gamma,
            "lorentz_defect_over_gamma2": lorentz_defect(L) / g2,
            "conjugation_error_over_gamma2": float(
                np.max(np.abs(conjugate_boost(boost(BoostParams.from_cap(np.eye(n)[0], eps)), R)
                              - conjugate_closed_form(n, params.v, params.gamma)))
            ) / g2,
            "max_abs_image_xn": float(np.max(np.abs(y[:, -1]))),
            "max_norm_defect": float(np.max(np.abs(np.linalg.norm(y, axis=1) - 1))),
        })
        for xi, yi in zip(x, y):
            csv_rows.append([eps, params.v, params.gamma, *xi, *yi])
    worst = max(
        max(it["lorentz_defect_over_gamma2"], it["conjugation_error_over_gamma2"],
            it["max_abs_image_xn"], it["max_norm_defect"])
        for it in items
    )
    passed = worst < cfg["tol"]
    _write_report(out, {"command": "boost-demo", "config": cfg, "caps": items, "passed": passed})

    def writer(rows, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["eps", "v", "gamma"] + [f"x{i}" for i in range(n)] + [f"y{i}" for i in range(n)])
        for r in rows:
            w.writerow([repr(float(a)) for a in r])

    _write_csv(out, "boost.csv", writer, csv_rows)
    return EXIT_OK if passed else EXIT_TOL


COMMANDS = {
    "mass": cmd_mass,
    "verify": cmd_verify,
    "glue": cmd_glue,
    "constraints": cmd_constraints,
    "boost-demo": cmd_boost_demo,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="ahmass", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--dim", type=int, help="dimension n of the hyperbolic space")
        p.add_argument("--tol", type=float, help="tolerance")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = resolve_config(args.command, args.config, {"n": args.dim, "seed": args.seed, "tol": args.tol})
        start = time.perf_counter()
        code = COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except AHMassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOL
    timing = {"command": args.command, "seconds": time.perf_counter() - start}
    (out / "timings.json").write_text(json.dumps(timing) + "\n", encoding="utf-8")
    print(f"{args.command}: {'pass' if code == EXIT_OK else 'fail'} (exit {code}); report in {out}/report.json")
    return code


if __name__ == "__main__":
    sys.exit(main())
