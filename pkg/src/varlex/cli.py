"""varlex: batch front-end.

JSON in (config files + flags), JSON out (stdout, schema-version "1"),
optional CSV artifacts via --out.  Exit codes: 0 completed run (verdicts of
"false" are still completed runs), 2 config error, 3 numerical failure.
Output is byte-identical for identical (config, seed) pairs: keys are
sorted and nothing time- or path-dependent is emitted.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import almost_automorphy as aa
from . import composition as comp
from . import convolution as conv
from . import exponents, fractional, functions, stepanov
from . import modular as modular_mod
from .config import build_exponent, build_function, build_grid, require
from .errors import ConfigError, ContractError, DivergenceError, DomainError

SCHEMA_VERSION = "1"

#: every public operation must be reachable from a command (coverage-tested)
OPERATION_COVERAGE = {
    "ml": ["fractional.mittag_leffler", "fractional.g_kernel"],
    "norm": ["modular.luxemburg_norm", "exponents.essential_bounds",
             "exponents.conjugate", "functions.evaluate", "functions.translate"],
    "modular": ["modular.modular", "modular.phi"],
    "stepanov": ["stepanov.stepanov_norm", "stepanov.window_norm",
                 "stepanov.ergodic_mean_test", "stepanov.c0_decay_test"],
    "ap-scan": ["almost_automorphy.epsilon_period_scan"],
    "aa-test": ["almost_automorphy.bochner_shift_test",
                "almost_automorphy.asymptotic_decompose",
                "almost_automorphy.exponent_sweep_experiment",
                "functions.reflect", "functions.sign_of"],
    "counterexample": ["almost_automorphy.counterexample_divergence"],
    "convolve": ["convolution.line_convolution", "convolution.finite_convolution",
                 "convolution.tail_constant_M", "convolution.m_t_series",
                 "convolution.ergodic_component_classify"],
    "solve-dfp": ["convolution.solve_dfp", "fractional.resolvent_eval",
                  "fractional.decay_check", "fractional.caputo_derivative",
                  "fractional.weyl_derivative"],
    "compose-test": ["composition.compose", "composition.lipschitz_window_check",
                     "composition.composition_membership_test",
                     "composition.asymptotic_composition_test",
                     "exponents.composition_exponent", "modular.holder_check",
                     "modular.embedding_check"],
    "reproduce": [],
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def emit(report: dict, out=None):
    report = dict(report)
    report["schema_version"] = SCHEMA_VERSION
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2)
    print(text)
    if out and out.endswith(".json"):
        with open(out, "w") as fh:
            fh.write(text + "\n")


def write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _load_config(args) -> dict:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            return json.load(fh)
    return {}


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("VARLEX_THREADS", "1")))
    except ValueError:
        return 1


# -- commands --------------------------------------------------------------------


def cmd_ml(args):
    info = fractional.mittag_leffler_detailed(args.alpha, args.beta, args.z)
    emit(info, args.out)


def cmd_norm(args):
    cfg = _load_config(args)
    f = build_function(require(cfg, "function"))
    p = build_exponent(require(cfg, "exponent"))
    interval = tuple(cfg.get("interval", (0.0, 1.0)))
    res = modular_mod.luxemburg_norm(f, p, interval,
                                 rel_tol=float(cfg.get("tolerance", 1e-10)))
    emit({"value": res.value, "bracket": list(res.bracket),
          "iterations": res.iterations, "modular_at_value": res.modular_at_value,
          "diagnostic": res.diagnostic}, args.out)


def cmd_modular(args):
    cfg = _load_config(args)
    f = build_function(require(cfg, "function"))
    p = build_exponent(require(cfg, "exponent"))
    interval = tuple(cfg.get("interval", (0.0, 1.0)))
    lam = float(cfg.get("scale", getattr(args, "scale", 1.0) or 1.0))
    res = modular_mod.ModularPlan(f, p, interval).rho_result(lam)
    emit({"value": res.value, "divergent": res.divergent, "reason": res.reason,
          "quadrature_error_estimate": res.quadrature_error_estimate,
          "refinement_trace": [[int(n), v] for n, v in res.refinement_trace]},
         args.out)


def cmd_stepanov(args):
    cfg = _load_config(args)
    f = build_function(require(cfg, "function"))
    p = build_exponent(require(cfg, "exponent"))
    grid = build_grid(cfg.get("t_grid", "0:10:0.05"))
    series = stepanov.stepanov_norm(f, p, grid)
    if args.out and args.out.endswith(".csv"):
        write_csv(args.out, ["t", "norm"], zip(series.base_points, series.values))
    payload = {"sup_estimate": series.sup_estimate, "argmax": series.argmax,
               "n_points": int(series.base_points.size)}
    if cfg.get("ergodic_mean"):
        payload["ergodic_mean"] = stepanov.ergodic_mean_test(
            f, float(cfg.get("r_max", 128.0))).to_dict()
    if cfg.get("c0_decay"):
        payload["c0_decay"] = stepanov.c0_decay_test(
            f, p, float(cfg.get("horizon", 64.0))).to_dict()
    emit(payload, args.out)


def cmd_ap_scan(args):
    cfg = _load_config(args)
    f = build_function(require(cfg, "function"))
    p = build_exponent(cfg["exponent"]) if cfg.get("exponent") else None
    rep = aa.epsilon_period_scan(
        f, p, float(require(cfg, "epsilon")),
        float(cfg.get("interval_length", 50.0)), float(cfg.get("horizon", 500.0)))
    emit(rep.to_dict(), args.out)


def cmd_aa_test(args):
    cfg = _load_config(args)
    f = build_function(require(cfg, "function"))
    p = build_exponent(require(cfg, "exponent"))
    shifts = [float(s) for s in require(cfg, "shifts")]
    t_grid = build_grid(cfg.get("t_grid", "-2:2:0.5"))
    tol = float(cfg.get("tolerance", 0.1))
    if cfg.get("sweep_exponents"):
        sweep = [build_exponent(s) for s in cfg["sweep_exponents"]]
        emit(aa.exponent_sweep_experiment(f, shifts, sweep, t_grid), args.out)
        return
    if cfg.get("aa_part"):
        g = build_function(cfg["aa_part"])
        rep = aa.asymptotic_decompose(f, p, g, shifts=shifts, t_grid=t_grid,
                                      tolerance=tol,
                                      horizon=float(cfg.get("horizon", 100.0)))
        emit(rep.to_dict(), args.out)
        return
    rep = aa.bochner_shift_test(f, p, shifts, t_grid, tolerance=tol)
    emit({"verdict": rep.verdict, "chosen_subsequence": rep.chosen_subsequence,
          "forward_residuals": rep.forward_residuals,
          "backward_residuals": rep.backward_residuals,
          "t_grid": rep.t_grid, "details": rep.details}, args.out)


def cmd_counterexample(args):
    lams = [args.lam] if args.lam is not None else [0.5, 0.6, 0.7, 0.7358, 0.8]
    a, b = aa.find_saturated_window_pair()
    rows = []
    traces = []
    for lam in lams:
        res = aa.counterexample_divergence(lam, a, b)
        rows.append({"lambda": lam, "divergent": res.divergent, "value": res.value,
                     "reason": res.reason})
        traces.extend([lam, int(n), v] for n, v in res.refinement_trace)
    if args.out and args.out.endswith(".csv"):
        write_csv(args.out, ["lambda", "panels", "value"], traces)
    emit({"shift_pair": [a, b], "threshold": 2.0 / math.e, "sweep": rows}, args.out)


def cmd_convolve(args):
    cfg = _load_config(args)
    rf = _build_kernel(require(cfg, "kernel"))
    grid = build_grid(require(cfg, "grid"))
    p = build_exponent(cfg.get("exponent", {"name": "constant", "value": 2}))
    mode = cfg.get("mode", "finite")
    if mode == "line":
        g = build_function(require(cfg, "forcing"))
        res = conv.line_convolution(rf, g, p, grid,
                                    tol=float(cfg.get("tolerance", 1e-8)))
    elif mode == "finite":
        f = build_function(require(cfg, "forcing"))
        decomp = None
        if "aa_part" in cfg and "perturbation" in cfg:
            decomp = (build_function(cfg["aa_part"]), build_function(cfg["perturbation"]))
        res = conv.finite_convolution(rf, f, grid, decomposition=decomp, p=p)
    elif mode == "tail-constant":
        M, rem = conv.tail_constant_M(rf, p, int(cfg.get("K", 40)))
        emit({"M": M, "remainder_bound": rem}, args.out)
        return
    elif mode == "m-t":
        mt = conv.m_t_series(rf, p, grid, int(cfg.get("K", 40)))
        if args.out and args.out.endswith(".csv"):
            write_csv(args.out, ["t", "m_t", "remainder_bound"],
                      zip(mt["t_grid"], mt["values"], mt["remainder_bounds"]))
        emit({"fitted_slope": mt["fitted_slope"], "K": mt["K"],
              "values": mt["values"]}, args.out)
        return
    else:
        raise ConfigError(f"unknown convolution mode {mode!r}")
    if args.out and args.out.endswith(".csv"):
        write_csv(args.out, ["t"] + [f"u{j+1}" for j in range(res.values.shape[1])]
                  + ["tail_bound"],
                  [[t, *row, tb] for t, row, tb in
                   zip(res.t_grid, res.values, res.tail_bounds)])
    payload = {"t_grid": res.t_grid, "values": res.values,
               "tail_bounds": res.tail_bounds, "truncation_K": res.truncation_K}
    if res.decomposition is not None:
        payload["identity_defect"] = res.decomposition["identity_defect"]
        if "classify" in cfg:
            r1 = build_exponent(cfg["classify"]["r1"])
            r2 = build_exponent(cfg["classify"]["r2"])
            q = exponents.conjugate(p)
            payload["classification"] = conv.ergodic_component_classify(
                res, rf, r1, r2, q).to_dict()
    emit(payload, args.out)


def cmd_solve_dfp(args):
    cfg = _load_config(args)
    gamma = float(args.gamma if args.gamma is not None else cfg.get("gamma", 1.0))
    gen = args.a if args.a is not None else cfg.get("a", 1.0)
    gen = [float(x) for x in np.atleast_1d(gen)]
    x0 = args.x0 if args.x0 is not None else cfg.get("x0", 0.0)
    x0 = [float(x) for x in np.atleast_1d(x0)]
    fspec = {"name": args.f} if args.f else require(cfg, "forcing")
    f = build_function(fspec if isinstance(fspec, dict) else {"name": fspec})
    grid = build_grid(args.grid if args.grid else require(cfg, "grid"))
    res = conv.solve_dfp(gamma, gen, x0, f, grid)
    if args.out and args.out.endswith(".csv"):
        write_csv(args.out, ["t"] + [f"u{j+1}" for j in range(res.values.shape[1])]
                  + ["tail_bound"],
                  [[t, *row, tb] for t, row, tb in
                   zip(res.t_grid, res.values, res.tail_bounds)])
    emit({"t_grid": res.t_grid, "values": res.values, "gamma": gamma,
          "decay": fractional.decay_check(
              fractional.ResolventFamily("S", gamma, tuple(gen))).to_dict()},
         args.out)


def cmd_compose_test(args):
    cfg = _load_config(args)
    fname = cfg.get("two_parameter", "sin-gain")
    table = {"sin-gain": comp.product_two_parameter, "identity-y": comp.identity_in_y,
             "two-sine-tanh": comp.tanh_gain}
    if fname not in table:
        raise ConfigError(f"unknown two-parameter function {fname!r} in field 'two_parameter'")
    f2 = table[fname]()
    u = build_function(require(cfg, "state"))
    p = build_exponent(require(cfg, "p"))
    r = build_exponent(require(cfg, "r"))
    shifts = [float(s) for s in require(cfg, "shifts")]
    rep = comp.composition_membership_test(
        f2, u, p, r, shifts, tolerance=float(cfg.get("tolerance", 0.1)),
        y_samples=cfg.get("y_samples"))
    emit({"verdict": rep.verdict,
          "q_bounds": rep.q_exponent.essential_bounds(),
          "details": rep.details}, args.out)


def _build_kernel(spec) -> fractional.ResolventFamily:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("kernel spec must carry a 'kind' field")
    kind = spec["kind"]
    if kind == "exponential":
        return fractional.exponential_kernel(float(spec.get("rate", 1.0)))
    if kind in ("S", "P", "R"):
        return fractional.ResolventFamily(
            kind, float(spec.get("gamma", 1.0)),
            tuple(float(x) for x in np.atleast_1d(spec.get("a", 1.0))),
            float(spec.get("beta", 1.0)))
    raise ConfigError(f"unknown kernel kind {kind!r}")


# -- reproduction recipes ----------------------------------------------------------


def recipe_example_3_sign(out=None):
    """Divergence sweep for the sign(two-sine) specimen at p = 1 - ln x."""
    a, b = aa.find_saturated_window_pair()
    rows = []
    for lam in (0.5, 0.6, 0.7, 0.7358, 0.8):
        res = aa.counterexample_divergence(lam, a, b)
        c = 2.0 / lam
        oracle = math.inf if math.log(c) >= 1.0 else c / (1.0 - math.log(c))
        rows.append({"lambda": lam, "divergent": res.divergent,
                     "value": res.value, "oracle": oracle,
                     "matches": (res.divergent and math.isinf(oracle)) or
                                (not res.divergent and math.isfinite(oracle) and
                                 abs(res.value - oracle) <= 1e-4 * oracle)})
    return {"recipe": "example-3-sign", "shift_pair": [a, b],
            "threshold": 2.0 / math.e, "table": rows,
            "all_match": all(r["matches"] for r in rows)}


def recipe_prop_5_1(out=None):
    """Infinite convolution of sin against the unit exponential kernel."""
    ts = np.linspace(0.0, 20.0, 81)
    res = conv.line_convolution(fractional.exponential_kernel(1.0),
                                functions.make_sin(), exponents.constant(2.0), ts)
    oracle = (np.sin(ts) - np.cos(ts)) / 2.0
    err = float(np.max(np.abs(res.component() - oracle)))
    if out and out.endswith(".csv"):
        write_csv(out, ["t", "G", "oracle"], zip(ts, res.component(), oracle))
    return {"recipe": "prop-5-1-exp-sin", "max_error": err,
            "tail_bound": float(res.tail_bounds[0]), "K": res.truncation_K,
            "passes": err < 1e-6}


def recipe_example_5_4(out=None):
    """m_t decay for the subordinated kernel at gamma = 1/2."""
    R = fractional.ResolventFamily("R", 0.5, (1.0,))
    grid = np.arange(1.0, 51.0, 2.0)
    mt = conv.m_t_series(R, exponents.constant(1.5), grid, K=60)
    nu, gamma = 0.3, 0.5
    bound = nu * (-1.0 - gamma)
    if out and out.endswith(".csv"):
        write_csv(out, ["t", "m_t"], zip(mt["t_grid"], mt["values"]))
    return {"recipe": "example-5-4-mt-decay", "fitted_slope": mt["fitted_slope"],
            "claimed_exponent": bound, "nu": nu,
            "passes": mt["fitted_slope"] <= bound + 0.1}


RECIPES = {
    "example-3-sign": recipe_example_3_sign,
    "prop-5-1-exp-sin": recipe_prop_5_1,
    "example-5-4-mt-decay": recipe_example_5_4,
}


def cmd_reproduce(args):
    if args.name not in RECIPES:
        raise ConfigError(f"unknown reproduction id {args.name!r}; "
                          f"known: {sorted(RECIPES)}")
    emit(RECIPES[args.name](args.out), args.out)


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varlex",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **extra):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config path")
        p.add_argument("--out", help="artifact path (.json or .csv)")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(handler=fn)
        return p

    p = add("ml", cmd_ml)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--z", type=float, required=True)

    add("norm", cmd_norm)
    p = add("modular", cmd_modular)
    p.add_argument("--scale", type=float, help="evaluate the modular of f/scale")
    add("stepanov", cmd_stepanov)
    add("ap-scan", cmd_ap_scan)
    add("aa-test", cmd_aa_test)
    p = add("counterexample", cmd_counterexample)
    p.add_argument("--lambda", dest="lam", type=float,
                   help="single scaling; default sweeps the built-in ladder")
    add("convolve", cmd_convolve)
    p = add("solve-dfp", cmd_solve_dfp)
    p.add_argument("--gamma", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--x0", type=float)
    p.add_argument("--f", help="forcing registry name")
    p.add_argument("--grid", help="a:b:step")
    add("compose-test", cmd_compose_test)
    p = add("reproduce", cmd_reproduce)
    p.add_argument("name")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.handler(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ContractError, DomainError, DivergenceError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
