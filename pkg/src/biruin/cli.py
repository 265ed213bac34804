"""Command-line front end.

    biruin <command> --config <path> [--set key=value]... [--out <path>]

Commands: ``simulate`` (Monte Carlo estimates as CSV), ``asymptotics``
(formula values as CSV), ``study`` (capital-sweep ratio table as CSV),
``verify`` (structural invariant suite, pass/fail per check).

The config file is one flat JSON object with dotted keys in the
``model.*``, ``claims.*``, ``premium.*``, ``sim.*``, ``mc.*`` and
``study.*`` namespaces (schema in the README).  Unknown keys are hard
errors.  ``--set key=value`` overrides file values; the BIRUIN_WORKERS
environment variable overrides the worker count last.

Every run prints the fully resolved configuration to stderr so outputs are
self-describing.  CSV floats are printed with 17 significant digits for
round-trip fidelity.  Exit codes: 0 success, 1 config error, 2 numerical
failure (quadrature non-convergence), 3 verify-suite failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .asymptotics import (
    QuadratureError,
    psi_and_upper,
    psi_max_asym,
    psi_min_asym,
    psi_sum_asym,
    tail_integral,
)
from .distributions import Exponential, Lognormal, Pareto, Weibull
from .montecarlo import (
    RUIN_TYPES,
    convergence_study,
    dependence_probe,
    estimate_ruin,
    sum_reduction_probe,
)
from .process import ModelConfig

__all__ = ["RunSpec", "ConfigError", "parse_config", "run", "main"]

_DIST_KINDS = {
    "pareto": (Pareto, 2, "alpha, xm"),
    "weibull": (Weibull, 2, "shape, scale"),
    "lognormal": (Lognormal, 2, "mu, s"),
    "exponential": (Exponential, 1, "rate"),
}

_REQUIRED_KEYS = (
    "model.u1", "model.u2", "model.r", "model.rho",
    "model.sigma1", "model.sigma2", "model.lambda1", "model.lambda2", "model.T",
    "claims.kind1", "claims.params1", "claims.kind2", "claims.params2",
)

_OPTIONAL_KEYS = {
    "model.common_shock": False,
    "model.c1": 0.0,
    "model.c2": 0.0,
    "premium.mode": "linear",
    "premium.rate1": 0.0,
    "premium.rate2": 0.0,
    "premium.jump_kind1": None,
    "premium.jump_params1": None,
    "premium.jump_kind2": None,
    "premium.jump_params2": None,
    "sim.h": None,
    "sim.bridge": True,
    "mc.n_paths": 100_000,
    "mc.seed": 0,
    "mc.workers": None,
    "study.u_grid": None,
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class RunSpec:
    command: str
    config_path: str
    overrides: tuple[str, ...] = ()
    out_path: str | None = None


def _coerce_number(key: str, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return kind(value)


def _coerce_bool(key: str, value):
    if not isinstance(value, bool):
        raise ConfigError(f"{key}: expected true or false, got {value!r}")
    return value


def _build_dist(kv: dict, kind_key: str, params_key: str):
    kind = kv[kind_key]
    if kind not in _DIST_KINDS:
        raise ConfigError(f"{kind_key}: unknown kind {kind!r}; expected one of {sorted(_DIST_KINDS)}")
    cls, n_params, names = _DIST_KINDS[kind]
    params = kv[params_key]
    if not isinstance(params, list) or len(params) != n_params or any(
        isinstance(p, bool) or not isinstance(p, (int, float)) for p in params
    ):
        raise ConfigError(f"{params_key}: {kind} expects a list of {n_params} numbers ({names})")
    try:
        return cls(*[float(p) for p in params])
    except ValueError as exc:
        raise ConfigError(f"{params_key}: {exc}") from exc


def _parse_override(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, _, raw = item.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings allowed, e.g. premium.mode=linear
    return key.strip(), value


def parse_config(text: str, overrides: tuple[str, ...] = ()) -> dict:
    """Parse and validate a config document; returns the resolved key map.

    The returned dict maps every known key to its final value and
    additionally carries "_model" (the validated ModelConfig).
    """
    try:
        kv = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(kv, dict):
        raise ConfigError("config must be a JSON object of key: value pairs")

    for item in overrides:
        key, value = _parse_override(item)
        kv[key] = value

    known = set(_REQUIRED_KEYS) | set(_OPTIONAL_KEYS)
    for key in kv:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}")
    for key in _REQUIRED_KEYS:
        if key not in kv:
            raise ConfigError(f"missing required key {key!r}")
    for key, default in _OPTIONAL_KEYS.items():
        kv.setdefault(key, default)

    num = lambda k: _coerce_number(k, kv[k])
    checks = [
        ("model.u1", kv["model.u1"], lambda v: v >= 0, ">= 0"),
        ("model.u2", kv["model.u2"], lambda v: v >= 0, ">= 0"),
        ("model.r", kv["model.r"], lambda v: v >= 0, ">= 0"),
        ("model.rho", kv["model.rho"], lambda v: -1 <= v <= 1, "in [-1, 1]"),
        ("model.sigma1", kv["model.sigma1"], lambda v: v >= 0, ">= 0"),
        ("model.sigma2", kv["model.sigma2"], lambda v: v >= 0, ">= 0"),
        ("model.lambda1", kv["model.lambda1"], lambda v: v > 0, "> 0"),
        ("model.lambda2", kv["model.lambda2"], lambda v: v > 0, "> 0"),
        ("model.c1", kv["model.c1"], lambda v: v >= 0, ">= 0"),
        ("model.c2", kv["model.c2"], lambda v: v >= 0, ">= 0"),
        ("model.T", kv["model.T"], lambda v: v > 0, "> 0"),
    ]
    for key, value, ok, rng_txt in checks:
        v = _coerce_number(key, value)
        if not ok(v):
            raise ConfigError(f"{key}: value {v!r} out of range, must be {rng_txt}")
        kv[key] = v

    kv["model.common_shock"] = _coerce_bool("model.common_shock", kv["model.common_shock"])
    kv["sim.bridge"] = _coerce_bool("sim.bridge", kv["sim.bridge"])
    if kv["sim.h"] is not None:
        h = _coerce_number("sim.h", kv["sim.h"])
        if not 0 < h <= kv["model.T"]:
            raise ConfigError(f"sim.h: value {h!r} out of range, must be in (0, T]")
        kv["sim.h"] = h
    n_paths = _coerce_number("mc.n_paths", kv["mc.n_paths"], int)
    if n_paths < 1:
        raise ConfigError("mc.n_paths: must be >= 1")
    kv["mc.n_paths"] = n_paths
    kv["mc.seed"] = _coerce_number("mc.seed", kv["mc.seed"], int)

    if kv["mc.workers"] is None:
        kv["mc.workers"] = os.cpu_count() or 1
    workers = _coerce_number("mc.workers", kv["mc.workers"], int)
    if workers < 1:
        raise ConfigError("mc.workers: must be >= 1")
    kv["mc.workers"] = workers

    if kv["premium.mode"] not in ("linear", "compound_poisson"):
        raise ConfigError("premium.mode: must be 'linear' or 'compound_poisson'")
    jump1 = jump2 = None
    if kv["premium.mode"] == "compound_poisson":
        for k in ("premium.rate1", "premium.rate2"):
            v = _coerce_number(k, kv[k])
            if v <= 0:
                raise ConfigError(f"{k}: must be > 0 in compound_poisson mode")
            kv[k] = v
        for k in ("premium.jump_kind1", "premium.jump_params1",
                  "premium.jump_kind2", "premium.jump_params2"):
            if kv[k] is None:
                raise ConfigError(f"missing required key {k!r} (compound_poisson mode)")
        jump1 = _build_dist(kv, "premium.jump_kind1", "premium.jump_params1")
        jump2 = _build_dist(kv, "premium.jump_kind2", "premium.jump_params2")

    if kv["study.u_grid"] is not None:
        grid = kv["study.u_grid"]
        if (
            not isinstance(grid, list)
            or not grid
            or any(not isinstance(p, list) or len(p) != 2 for p in grid)
        ):
            raise ConfigError("study.u_grid: expected a nonempty list of [u1, u2] pairs")
        kv["study.u_grid"] = [(float(a), float(b)) for a, b in grid]

    dist1 = _build_dist(kv, "claims.kind1", "claims.params1")
    dist2 = _build_dist(kv, "claims.kind2", "claims.params2")
    try:
        model = ModelConfig(
            u1=kv["model.u1"],
            u2=kv["model.u2"],
            r=kv["model.r"],
            rho=kv["model.rho"],
            sigma1=kv["model.sigma1"],
            sigma2=kv["model.sigma2"],
            lambda1=kv["model.lambda1"],
            lambda2=kv["model.lambda2"],
            dist1=dist1,
            dist2=dist2,
            T=kv["model.T"],
            common_shock=kv["model.common_shock"],
            c1=kv["model.c1"],
            c2=kv["model.c2"],
            premium_mode=kv["premium.mode"],
            premium_rate1=kv["premium.rate1"],
            premium_rate2=kv["premium.rate2"],
            premium_jump1=jump1,
            premium_jump2=jump2,
            h=kv["sim.h"],
            bridge=kv["sim.bridge"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    kv["sim.h"] = model.h
    kv["_model"] = model
    return kv


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _print_resolved(kv: dict, err) -> None:
    print("# resolved configuration", file=err)
    for key in sorted(k for k in kv if not k.startswith("_")):
        value = kv[key]
        if key == "study.u_grid" and value is not None:
            value = json.dumps([[a, b] for a, b in value])
        print(f"# {key} = {_fmt(value)}", file=err)


def _cmd_simulate(kv: dict, out) -> int:
    est = estimate_ruin(kv["_model"], kv["mc.n_paths"], kv["mc.seed"], workers=kv["mc.workers"])
    print("ruin_type,n,p_hat,ci_lo,ci_hi", file=out)
    for t in RUIN_TYPES:
        e = est[t]
        print(f"{t},{e.n},{_fmt(e.p_hat)},{_fmt(e.ci_lo)},{_fmt(e.ci_hi)}", file=out)
    return 0


def _cmd_asymptotics(kv: dict, out) -> int:
    model = kv["_model"]
    u1, u2 = model.u1, model.u2
    rows = [
        psi_max_asym(model, u1, u2),
        psi_min_asym(model, u1, u2),
        psi_sum_asym(model, u1, u2),
        psi_and_upper(model, u1, u2),
    ]
    print("case_id,u1,u2,value,warn_gt_one", file=out)
    for res in rows:
        print(
            f"{res.case_id},{_fmt(u1)},{_fmt(u2)},{_fmt(res.value)},{_fmt(res.warn_gt_one)}",
            file=out,
        )
    return 0


def _cmd_study(kv: dict, out) -> int:
    if kv["study.u_grid"] is None:
        raise ConfigError("missing required key 'study.u_grid' (study command)")
    rows = convergence_study(
        kv["_model"], kv["study.u_grid"], kv["mc.n_paths"], kv["mc.seed"], workers=kv["mc.workers"]
    )
    print("u1,u2,ruin_type,n,p_hat,ci_lo,ci_hi,asym,ratio", file=out)
    for r in rows:
        print(
            f"{_fmt(r.u1)},{_fmt(r.u2)},{r.ruin_type},{r.n},{_fmt(r.p_hat)},"
            f"{_fmt(r.ci_lo)},{_fmt(r.ci_hi)},{_fmt(r.asym)},{_fmt(r.ratio)}",
            file=out,
        )
    return 0


def _cmd_verify(kv: dict, out) -> int:
    """Fast structural checks: exact pathwise identities, quadrature
    cross-checks, dependence inequalities, the sum-reduction variance."""
    model = kv["_model"]
    seed = kv["mc.seed"]
    n = min(kv["mc.n_paths"], 20_000)
    failures = 0

    def report(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        if ok:
            print(f"PASS {name}", file=out)
        else:
            failures += 1
            print(f"FAIL {name}: {detail}", file=out)

    est = estimate_ruin(model, n, seed, workers=kv["mc.workers"])
    c = est.counts
    report(
        "pathwise identity count(min)+count(and) == count(comp1)+count(comp2)",
        c["min"] + c["and"] == c["comp1"] + c["comp2"],
        f"counts {c}",
    )
    report(
        "ordering count(max) <= count(and) <= count(min)",
        c["max"] <= c["and"] <= c["min"],
        f"counts {c}",
    )
    report("ordering count(sum) <= count(min)", c["sum"] <= c["min"], f"counts {c}")

    ok_quad = True
    detail = ""
    for alpha in (0.8, 1.5, 2.5):
        for u in (2.0, 10.0, 50.0):
            dist = Pareto(alpha, 1.0)
            closed = tail_integral(dist, u, 0.05, 2.0)
            quad = _simpson_of_tail(dist, u, 0.05, 2.0)
            if abs(closed - quad) > 1e-10 * abs(closed):
                ok_quad = False
                detail = f"alpha={alpha} u={u}: closed={closed!r} quad={quad!r}"
    report("Pareto tail integral: closed form vs quadrature (1e-10 rel)", ok_quad, detail)

    probe_n = 20_000
    pr_neg = dependence_probe(-0.6, 1.0, 1.0, 1.0, probe_n, seed, mode="sup", steps=2_000)
    se = 3.0 * math.sqrt(max(pr_neg.joint.p_hat * (1 - pr_neg.joint.p_hat), 1e-12) / probe_n)
    report(
        "negative-correlation suprema: joint <= product + 3se",
        pr_neg.joint.p_hat <= pr_neg.marg1.p_hat * pr_neg.marg2.p_hat + se,
        f"joint={pr_neg.joint.p_hat} product={pr_neg.marg1.p_hat * pr_neg.marg2.p_hat}",
    )
    pr_pos = dependence_probe(0.6, 1.0, 1.0, 1.0, probe_n, seed, mode="sup", steps=2_000)
    se = 3.0 * math.sqrt(max(pr_pos.joint.p_hat * (1 - pr_pos.joint.p_hat), 1e-12) / probe_n)
    report(
        "positive-correlation suprema: joint >= product - 3se",
        pr_pos.joint.p_hat >= pr_pos.marg1.p_hat * pr_pos.marg2.p_hat - se,
        f"joint={pr_pos.joint.p_hat} product={pr_pos.marg1.p_hat * pr_pos.marg2.p_hat}",
    )

    sr = sum_reduction_probe(model.sigma1, model.sigma2, model.rho, model.r, model.T, 100_000, seed)
    report(
        "sum-reduction variance |z| < 4",
        abs(sr.z_score) < 4.0,
        f"z={sr.z_score} sample={sr.sample_var} theory={sr.theory_var}",
    )
    return 3 if failures else 0


def _simpson_of_tail(dist, u: float, r: float, T: float) -> float:
    # Plain fixed-grid Simpson of r*T*tail(u e^{rTz}) over [0,1]; verify-time
    # cross-check that is independent of the adaptive path.
    m = 2048
    z = np.linspace(0.0, 1.0, m + 1)
    f = np.asarray(dist.tail(u * np.exp(r * T * z))) * r * T
    wgt = np.ones(m + 1)
    wgt[1:-1:2] = 4.0
    wgt[2:-1:2] = 2.0
    return float((f * wgt).sum() / (3.0 * m))


def run(spec: RunSpec) -> int:
    """Execute one parsed command; returns the process exit code."""
    err = sys.stderr
    try:
        with open(spec.config_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=err)
        return 1

    try:
        kv = parse_config(text, spec.overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return 1

    env_workers = os.environ.get("BIRUIN_WORKERS")
    if env_workers is not None:
        try:
            kv["mc.workers"] = max(1, int(env_workers))
        except ValueError:
            print(f"error: BIRUIN_WORKERS: expected an integer, got {env_workers!r}", file=err)
            return 1

    _print_resolved(kv, err)

    commands = {
        "simulate": _cmd_simulate,
        "asymptotics": _cmd_asymptotics,
        "study": _cmd_study,
        "verify": _cmd_verify,
    }
    out = sys.stdout
    close_out = False
    try:
        if spec.out_path is not None and spec.out_path != "-":
            out = open(spec.out_path, "w", encoding="utf-8", newline="\n")
            close_out = True
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # hypothesis-violation warnings go to results, not stderr
            return commands[spec.command](kv, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return 1
    except QuadratureError as exc:
        print(f"error: numerical failure: {exc}", file=err)
        return 2
    finally:
        if close_out:
            out.close()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="biruin",
        description="Finite-time ruin probabilities of a two-line surplus process",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_txt in [
        ("simulate", "Monte Carlo estimates of all six ruin probabilities (CSV)"),
        ("asymptotics", "large-capital formula values for the configured model (CSV)"),
        ("study", "capital sweep: estimates vs asymptotics with ratios (CSV)"),
        ("verify", "run the structural invariant suite and report pass/fail"),
    ]:
        p = sub.add_parser(name, help=help_txt)
        p.add_argument("--config", required=True, help="path to the JSON config file")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            dest="overrides",
            help="override a config key (repeatable)",
        )
        p.add_argument("--out", default=None, help="output path (default: stdout)")
    args = parser.parse_args(argv)
    spec = RunSpec(
        command=args.command,
        config_path=args.config,
        overrides=tuple(args.overrides),
        out_path=args.out,
    )
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
