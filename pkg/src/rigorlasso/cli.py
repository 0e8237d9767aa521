"""Command-line front end.

Subcommands: fit, effects, iv, treat, supscore, simulate.  Input is a
headered numeric CSV; column lists accept comma-separated names and
numeric-suffix ranges like "x1..x100".  Output is a fixed-width table or a
single JSON object with a stable schema version.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys

import numpy as np

from . import report
from .dataio import DataError, Dataset, DesignSpec, expand_design, load_csv
from .inference import confidence_band, effects_batch
from .iv import rlasso_iv_select_x, rlasso_iv_select_xz, rlasso_iv_select_z, tsls
from .rlasso import PenaltyConfig, rlasso_fit, sup_score_test
from .simkit import RngStream, SparseDgpConfig, gen_causes_controls, gen_sparse_linear
from .treatment import rlasso_ate, rlasso_atet, rlasso_late, rlasso_latet

DEFAULT_SEED = 12345
SCHEMA_VERSION = 1

_RANGE_RE = re.compile(r"^(?P<prefix>.*?)(?P<start>\d+)\.\.(?P=prefix)?(?P<stop>\d+)$")


def expand_column_list(spec: str) -> list:
    """Expand "a,b,x1..x3" into ["a", "b", "x1", "x2", "x3"]."""
    names = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        m = _RANGE_RE.match(token)
        if m and ".." in token:
            prefix = m.group("prefix")
            start, stop = int(m.group("start")), int(m.group("stop"))
            if stop < start:
                raise DataError(f"bad column range {token!r}")
            names.extend(f"{prefix}{i}" for i in range(start, stop + 1))
        else:
            names.append(token)
    return names


def _penalty_from_args(args) -> PenaltyConfig:
    homo = {"true": True, "false": False, "none": "none"}[args.homoscedastic]
    return PenaltyConfig(
        c=args.c,
        gamma=args.gamma,
        homoscedastic=homo,
        x_dependent=args.x_dependent,
        lambda_start=args.lambda_start,
        num_sim=args.num_sim,
    )


def _add_penalty_args(sub):
    sub.add_argument("--c", type=float, default=None, help="penalty constant (default 1.1 post, 0.5 lasso)")
    sub.add_argument("--gamma", type=float, default=0.1)
    sub.add_argument("--homoscedastic", choices=["true", "false", "none"], default="false")
    sub.add_argument("--x-dependent", action="store_true", dest="x_dependent")
    sub.add_argument("--lambda-start", type=float, default=None, dest="lambda_start")
    sub.add_argument("--num-sim", type=int, default=5000, dest="num_sim")


def _add_common_args(sub):
    sub.add_argument("--input", required=True)
    sub.add_argument("--outcome", required=True)
    sub.add_argument("--format", choices=["table", "json"], default="table")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--na-policy", choices=["reject", "drop_rows"], default="reject")
    default_threads = int(os.environ.get("RIGORLASSO_THREADS", "1"))
    sub.add_argument("--threads", type=int, default=default_threads,
                     help="worker cap (current build is single-process)")


def _emit(args, payload: dict, table: str) -> None:
    if args.format == "json":
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        print(json.dumps(payload, sort_keys=True))
    else:
        print(table)


def _load(args) -> Dataset:
    return load_csv(args.input, na_policy=args.na_policy)


def _cmd_fit(args) -> int:
    ds = _load(args)
    controls = expand_column_list(args.controls)
    spec = DesignSpec(outcome=args.outcome, controls=tuple(controls))
    dm = expand_design(ds, spec)
    y = ds.column(args.outcome)
    cfg = _penalty_from_args(args)
    rng = RngStream(args.seed)
    fit = rlasso_fit(dm.X, y, cfg, post=args.post, intercept=True, rng=rng.child(1),
                     column_names=dm.column_names)
    ss = sup_score_test(dm.X, y, num_boot=args.num_boot, alpha=0.05, rng=rng.child(2))
    payload = {
        "subcommand": "fit",
        "fit": fit.to_dict(include_loadings=False),
        "sup_score": {
            "statistic": ss.statistic,
            "critical_value": ss.critical_value,
            "p_value": ss.p_value,
        },
    }
    _emit(args, payload, report.rlasso_summary(fit, ss))
    return 0


def _cmd_effects(args) -> int:
    ds = _load(args)
    controls = expand_column_list(args.controls) if args.controls else []
    targets = expand_column_list(args.targets)
    spec = DesignSpec(outcome=args.outcome, targets=tuple(targets), controls=tuple(controls))
    dm = expand_design(ds, spec)
    y = ds.column(args.outcome)
    target_idx = dm.indices_with_role("target")
    cfg = _penalty_from_args(args)
    rng = RngStream(args.seed)
    method = args.method.replace("-", "_")
    es = effects_batch(dm.X, y, target_idx, method=method, cfg=cfg,
                       rng=rng.child(1), column_names=dm.column_names)
    band = confidence_band(es, level=args.level, joint=args.joint,
                           num_boot=args.num_boot, rng=rng.child(2))
    payload = {
        "subcommand": "effects",
        "estimates": [
            {
                "target": e.target_name,
                "estimate": e.alpha_hat,
                "se": e.se,
                "t": e.t_stat,
                "p": e.p_value,
            }
            for e in es.estimates
        ],
        "band": {
            "level": band.level,
            "joint": band.joint,
            "critical_value": band.critical_value,
            "lower": [float(v) for v in band.lower],
            "upper": [float(v) for v in band.upper],
        },
        "failures": [{"target": n, "error": m} for n, m in es.failures],
    }
    table = report.effects_table(es) + "\n\n" + report.band_table(es, band)
    _emit(args, payload, table)
    return 0


def _cmd_iv(args) -> int:
    ds = _load(args)
    controls = expand_column_list(args.controls) if args.controls else []
    instruments = expand_column_list(args.instruments)
    spec = DesignSpec(
        outcome=args.outcome,
        targets=(args.treatment,),
        controls=tuple(controls),
        instruments=tuple(instruments),
    )
    dm = expand_design(ds, spec)
    y = ds.column(args.outcome)
    d = ds.column(args.treatment)
    x = dm.columns_with_role("control")
    z = dm.columns_with_role("instrument")
    cfg = _penalty_from_args(args)
    rng = RngStream(args.seed)
    if args.select_x and args.select_z:
        fit = rlasso_iv_select_xz(x, d, y, z, cfg, rng)
    elif args.select_z:
        fit = rlasso_iv_select_z(x, d, y, z, cfg, rng)
    elif args.select_x:
        fit = rlasso_iv_select_x(x, d, y, z, cfg, rng)
    else:
        fit = tsls(y, d, x, z, intercept=True)
    lo, hi = fit.confint(0.95)
    payload = {
        "subcommand": "iv",
        "regime": fit.regime,
        "estimate": fit.alpha_hat,
        "se": fit.se,
        "t": fit.t_stat,
        "p": fit.p_value,
        "confint_95": [lo, hi],
    }
    _emit(args, payload, report.iv_table(fit, name=args.treatment))
    return 0


def _cmd_treat(args) -> int:
    ds = _load(args)
    controls = expand_column_list(args.controls)
    spec = DesignSpec(outcome=args.outcome, controls=tuple(controls))
    dm = expand_design(ds, spec)
    y = ds.column(args.outcome)
    d = ds.column(args.treatment)
    cfg = _penalty_from_args(args)
    rng = RngStream(args.seed)
    kwargs = dict(cfg=cfg, bootstrap_kind=args.bootstrap, nRep=args.nrep, rng=rng)
    if args.effect in ("late", "latet"):
        if not args.instrument:
            raise DataError(f"effect {args.effect} requires --instrument")
        z = ds.column(args.instrument)
        fn = rlasso_late if args.effect == "late" else rlasso_latet
        fit = fn(dm.X, d, y, z, **kwargs)
    else:
        fn = rlasso_ate if args.effect == "ate" else rlasso_atet
        fit = fn(dm.X, d, y, **kwargs)
    lo, hi = fit.confint(0.95)
    payload = {
        "subcommand": "treat",
        "effect": fit.effect,
        "estimate": fit.alpha_hat,
        "se": fit.se,
        "t": fit.t_stat,
        "p": fit.p_value,
        "bootstrap": fit.bootstrap,
        "confint_95": [lo, hi],
    }
    _emit(args, payload, report.treatment_table(fit))
    return 0


def _cmd_supscore(args) -> int:
    ds = _load(args)
    controls = expand_column_list(args.controls)
    spec = DesignSpec(outcome=args.outcome, controls=tuple(controls))
    dm = expand_design(ds, spec)
    y = ds.column(args.outcome)
    ss = sup_score_test(
        dm.X,
        y,
        num_boot=args.num_boot,
        alpha=args.alpha,
        rng=RngStream(args.seed),
        studentize=not args.raw_supscore,
    )
    payload = {
        "subcommand": "supscore",
        "statistic": ss.statistic,
        "critical_value": ss.critical_value,
        "p_value": ss.p_value,
        "alpha": ss.alpha,
        "reject": ss.reject,
    }
    table = (
        f"sup-score statistic: {report.format_number(ss.statistic)}\n"
        f"critical value ({1 - ss.alpha:g}): {report.format_number(ss.critical_value)}\n"
        f"p-value: {report.format_number(ss.p_value)}\n"
        f"reject joint nullity at level {ss.alpha:g}: {ss.reject}"
    )
    _emit(args, payload, table)
    return 0


def _write_csv(path, names, columns) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])


def _cmd_simulate(args) -> int:
    rng = RngStream(args.seed)
    if args.design == "sparse":
        cfg = SparseDgpConfig(n=args.n, p=args.p, s=args.s, beta_value=args.beta,
                              noise_sd=args.noise_sd)
        X, y, _ = gen_sparse_linear(cfg, rng)
        names = ["y"] + [f"x{j + 1}" for j in range(args.p)]
    else:
        X, y, _roles = gen_causes_controls(args.n, args.p1, args.p2, args.alpha1,
                                           args.beta1, rng)
        names = ["y"] + [f"d{j + 1}" for j in range(args.p1)] + [
            f"w{j + 1}" for j in range(args.p2)
        ]
    columns = [y] + [X[:, j] for j in range(X.shape[1])]
    _write_csv(args.out, names, columns)
    print(f"wrote {len(y)} rows x {len(names)} columns to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigorlasso")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_fit = sub.add_parser("fit", help="rigorous Lasso regression")
    _add_common_args(p_fit)
    _add_penalty_args(p_fit)
    p_fit.add_argument("--controls", required=True)
    post = p_fit.add_mutually_exclusive_group()
    post.add_argument("--post", dest="post", action="store_true", default=True)
    post.add_argument("--no-post", dest="post", action="store_false")
    p_fit.add_argument("--num-boot", type=int, default=1000, dest="num_boot")
    p_fit.set_defaults(func=_cmd_fit)

    p_eff = sub.add_parser("effects", help="inference on target coefficients")
    _add_common_args(p_eff)
    _add_penalty_args(p_eff)
    p_eff.add_argument("--targets", required=True)
    p_eff.add_argument("--controls", default="")
    p_eff.add_argument("--method", choices=["partialling-out", "double-selection"],
                       default="partialling-out")
    p_eff.add_argument("--joint", action="store_true")
    p_eff.add_argument("--level", type=float, default=0.95)
    p_eff.add_argument("--num-boot", type=int, default=1000, dest="num_boot")
    p_eff.set_defaults(func=_cmd_effects)

    p_iv = sub.add_parser("iv", help="instrumental-variables estimation")
    _add_common_args(p_iv)
    _add_penalty_args(p_iv)
    p_iv.add_argument("--treatment", required=True)
    p_iv.add_argument("--controls", default="")
    p_iv.add_argument("--instruments", required=True)
    for dim in ("x", "z"):
        grp = p_iv.add_mutually_exclusive_group()
        grp.add_argument(f"--select-{dim}", dest=f"select_{dim}", action="store_true", default=False)
        grp.add_argument(f"--no-select-{dim}", dest=f"select_{dim}", action="store_false")
    p_iv.set_defaults(func=_cmd_iv)

    p_tr = sub.add_parser("treat", help="treatment-effect estimation")
    _add_common_args(p_tr)
    _add_penalty_args(p_tr)
    p_tr.add_argument("--effect", choices=["ate", "atet", "late", "latet"], required=True)
    p_tr.add_argument("--treatment", required=True)
    p_tr.add_argument("--instrument", default=None)
    p_tr.add_argument("--controls", required=True)
    p_tr.add_argument("--bootstrap", choices=["none", "normal", "bayes", "wild"], default="none")
    p_tr.add_argument("--nrep", type=int, default=500)
    p_tr.set_defaults(func=_cmd_treat)

    p_ss = sub.add_parser("supscore", help="joint significance test")
    _add_common_args(p_ss)
    p_ss.add_argument("--controls", required=True)
    p_ss.add_argument("--num-boot", type=int, default=1000, dest="num_boot")
    p_ss.add_argument("--alpha", type=float, default=0.05)
    p_ss.add_argument("--raw-supscore", action="store_true", dest="raw_supscore")
    p_ss.set_defaults(func=_cmd_supscore)

    p_sim = sub.add_parser("simulate", help="generate synthetic datasets")
    p_sim.add_argument("design", choices=["sparse", "causes"])
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--p", type=int, default=100)
    p_sim.add_argument("--s", type=int, default=3)
    p_sim.add_argument("--beta", type=float, default=5.0)
    p_sim.add_argument("--noise-sd", type=float, default=1.0, dest="noise_sd")
    p_sim.add_argument("--p1", type=int, default=20)
    p_sim.add_argument("--p2", type=int, default=20)
    p_sim.add_argument("--alpha1", type=float, default=5.0)
    p_sim.add_argument("--beta1", type=float, default=5.0)
    p_sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ValueError) as exc:
        print(f"error in {args.subcommand}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
