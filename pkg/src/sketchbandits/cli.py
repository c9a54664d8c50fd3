"""Command-line entry point: ``sketchbandits {run,grid,bench,pca-compare,check,ingest-info}``."""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import oracle
from .confidence import ConfidenceConfig
from .environments import SyntheticEnvSpec, ingest_csv
from .harness import (
    OFUL_GRID,
    PCA_FRACTIONS,
    TS_GRID,
    DatasetSource,
    RunConfig,
    bench_scaling,
    compare_pca,
    grid_search,
    play,
    read_run_csv,
    run,
)
from .sketch import InvSqrtMode, SketchState, inv_apply, inv_sqrt_apply


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _seeds(text):
    # "4" means seeds 0..3, "1,5,9" lists them
    vals = _ints(text)
    return list(range(vals[0])) if len(vals) == 1 and "," not in text else vals


def _add_run_flags(p):
    p.add_argument("--config", help="JSON file mirroring RunConfig; flags override it")
    p.add_argument("--policy", choices=["oful", "soful", "lints", "slints"])
    p.add_argument("--dataset", help="CSV file with a header row")
    p.add_argument("--label-col")
    p.add_argument("--target-class")
    p.add_argument("--normalization", choices=["global_max_norm", "none"])
    p.add_argument("--d", type=int, help="synthetic ambient dimension")
    p.add_argument("--k", type=int, help="synthetic actions per round")
    p.add_argument("--rank", type=int, help="synthetic context subspace dimension")
    p.add_argument("--noise", type=float, help="synthetic Gaussian noise scale R")
    p.add_argument("--m", type=int, help="sketch size")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beta-mult", type=float)
    p.add_argument("--radius", choices=["theory", "constant"])
    p.add_argument("--delta", type=float)
    p.add_argument("--seeds", type=_seeds, help="count (e.g. 4) or comma list of seeds")
    p.add_argument("--horizon", type=int)
    p.add_argument("--inv-sqrt", choices=[m.value for m in InvSqrtMode])
    p.add_argument("--out", help="output directory")
    p.add_argument("--no-timing", action="store_true", help="record update_ns as 0 for byte-stable output")


def build_config(args):
    if args.config:
        with open(args.config) as fh:
            config = RunConfig.from_json(json.load(fh))
    else:
        config = RunConfig()
    env = config.env
    if args.dataset:
        env = DatasetSource(path=args.dataset)
    if isinstance(env, DatasetSource):
        changes = {
            k: v
            for k, v in (
                ("label_col", args.label_col),
                ("target_class", args.target_class),
                ("normalization", args.normalization),
            )
            if v is not None
        }
        env = replace(env, **changes)
    else:
        changes = {
            k: v
            for k, v in (("d", args.d), ("K", args.k), ("rank", args.rank), ("R", args.noise))
            if v is not None
        }
        if "d" in changes and "rank" not in changes and env.rank > changes["d"]:
            changes["rank"] = changes["d"]
        env = replace(env, **changes)
    overrides = {
        "policy": args.policy,
        "m": args.m,
        "lam": args.lam,
        "beta_mult": args.beta_mult,
        "radius": args.radius,
        "delta": args.delta,
        "seeds": args.seeds,
        "horizon": args.horizon,
        "inv_sqrt": args.inv_sqrt,
        "out": args.out,
    }
    config = replace(config, env=env, **{k: v for k, v in overrides.items() if v is not None})
    if args.no_timing:
        config = replace(config, timing=False)
    return config


def cmd_run(args):
    config = build_config(args)
    output = run(config, jobs=args.jobs)
    summary = output.summary()
    if args.save_actions and config.out:
        for r in output.results:
            np.save(Path(config.out) / f"{config.tag}_seed{r.seed}_actions.npy", r.actions)
    print(json.dumps({k: v for k, v in summary.items() if k != "config"}, indent=2))
    return 0


def cmd_grid(args):
    config = build_config(args)
    default = TS_GRID if config.policy.sampling else OFUL_GRID
    betas = _floats(args.beta_grid) if args.beta_grid else default[0]
    lams = _floats(args.lambda_grid) if args.lambda_grid else default[1]
    result = grid_search(replace(config, out=None), betas, lams, args.validation_rounds)
    text = json.dumps(result.to_json(), indent=2)
    if config.out:
        Path(config.out).mkdir(parents=True, exist_ok=True)
        (Path(config.out) / f"{config.tag}_grid.json").write_text(text)
    print(text)
    return 0


def cmd_bench(args):
    rows = bench_scaling(ds=_ints(args.dims), m=args.m, rounds=args.rounds, seed=args.seed)
    header = f"{'d':>6} {'m':>4} {'exact ns':>12} {'sketched ns':>12} {'exact x':>8} {'sketch x':>8}"
    print(header)
    for r in rows:
        print(
            f"{r['d']:>6} {r['m']:>4} {r['exact_mom_ns']:>12.0f} {r['sketched_mom_ns']:>12.0f}"
            f" {r.get('exact_ratio', float('nan')):>8.2f} {r.get('sketched_ratio', float('nan')):>8.2f}"
        )
        if r["m"] >= r["d"] - 1:
            print(f"       (m close to d={r['d']}: overhead regime, no speedup expected)")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "bench.json").write_text(json.dumps(rows, indent=2))
    return 0


def cmd_pca_compare(args):
    config = build_config(args)
    fractions = _floats(args.fractions) if args.fractions else PCA_FRACTIONS
    tables = compare_pca(config, fractions)
    for c in tables:
        a = c.exact_on_pca.summary()["mean_total_reward"]
        b = c.sketched.summary()["mean_total_reward"]
        print(f"fraction={c.fraction:g} m={c.m}: exact-on-PCA reward={a:.2f} sketched reward={b:.2f}")
    if config.out:
        Path(config.out).mkdir(parents=True, exist_ok=True)
        (Path(config.out) / "pca_compare.json").write_text(json.dumps([c.table() for c in tables]))
    return 0


def _woodbury_report(path):
    with open(path) as fh:
        state = SketchState.from_json(json.load(fh))
    rng = np.random.default_rng(0)
    S = state.S
    V = S.T @ S + state.lam * np.eye(state.d)
    worst_inv = worst_sqrt = 0.0
    for _ in range(20):
        v = rng.standard_normal(state.d)
        dense = np.linalg.solve(V, v)
        worst_inv = max(worst_inv, np.linalg.norm(inv_apply(state, v) - dense) / np.linalg.norm(dense))
        twice = inv_sqrt_apply(state, inv_sqrt_apply(state, v))
        worst_sqrt = max(worst_sqrt, np.linalg.norm(twice - dense) / np.linalg.norm(dense))
    worst = max(worst_inv, worst_sqrt)
    return oracle.LemmaReport(
        "woodbury",
        state.t,
        float(oracle.TOL - worst),
        bool(worst <= oracle.TOL),
        {"inv_rel_err": worst_inv, "inv_sqrt_twice_rel_err": worst_sqrt},
    )


def cmd_check(args):
    lemma = args.lemma
    if lemma == "woodbury":
        if not args.state:
            raise SystemExit("check woodbury needs --state FILE")
        report = _woodbury_report(args.state)
    elif lemma == "coverage":
        config = build_config(args)
        env = config.env
        if not isinstance(env, SyntheticEnvSpec):
            raise SystemExit("coverage needs a synthetic environment")
        stream = config.make_stream(0)
        cfg = replace(config.confidence(stream), horizon=config.horizon or env.horizon)
        rep = oracle.coverage_mc(cfg, env, runs=args.runs, radius_scale=args.radius_scale)
        print(json.dumps(rep.to_json(), indent=2))
        return 0 if rep.rate >= rep.target or args.radius_scale != 1.0 else 1
    else:
        config = build_config(args)
        if args.actions:
            actions = np.load(args.actions)
            quad = read_run_csv(args.log)["quad_norm"] if args.log else None
            stream = None
        else:
            stream = config.make_stream(config.seeds[0])
            res = play(stream, config.make_policy(stream, config.seeds[0]), timing=False)
            actions, quad = res.actions, res.quad_norm
        cfg = config.confidence(stream) if stream is not None else None
        if cfg is None:
            norms = np.linalg.norm(actions, axis=1)
            cfg = ConfidenceConfig(
                d=actions.shape[1],
                m=config.m,
                lam=config.lam,
                L=max(norms.max(), 1e-12),
                horizon=max(len(actions), 1),
            )
        if lemma == "sandwich":
            report = oracle.check_fd_sandwich(actions, cfg.m, cfg.lam)
        elif lemma == "prop-ve":
            report = oracle.check_prop_ve(actions, cfg.m, cfg.lam)
        elif lemma == "det-trace":
            report = oracle.check_det_trace(actions, cfg)
        else:
            if quad is None:
                raise SystemExit("leverage check from --actions also needs --log CSV")
            report = oracle.check_leverage(actions, quad, cfg)
    text = report.to_json()
    if args.report:
        Path(args.report).write_text(text)
    print(text)
    return 0 if report.passed else 1


def cmd_ingest_info(args):
    data = ingest_csv(args.dataset, args.label_col, args.normalization or "global_max_norm")
    sizes = data.class_sizes()
    info = {
        "name": data.name,
        "instances": data.n,
        "features": data.d,
        "classes": data.K,
        "class_names": data.class_names,
        "class_sizes": sizes.tolist(),
        "horizon": int(sizes.min()),
        "max_norm": float(np.linalg.norm(data.features, axis=1).max()),
    }
    print(json.dumps(info, indent=2))
    return 0


def make_parser():
    parser = argparse.ArgumentParser(prog="sketchbandits", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a policy over one or more seeds")
    _add_run_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel seed cells")
    p.add_argument("--save-actions", action="store_true", help="also write chosen actions as .npy")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("grid", help="grid search (beta, lambda) on the first validation rounds")
    _add_run_flags(p)
    p.add_argument("--beta-grid")
    p.add_argument("--lambda-grid")
    p.add_argument("--validation-rounds", type=int, default=100)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("bench", help="per-update latency, exact vs sketched")
    p.add_argument("--dims", default="256,512,1024")
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pca-compare", help="exact policy on PCA subspace vs sketched policy")
    _add_run_flags(p)
    p.add_argument("--fractions")
    p.set_defaults(func=cmd_pca_compare)

    p = sub.add_parser("check", help="run an oracle lemma checker")
    _add_run_flags(p)
    p.add_argument("--lemma", required=True,
                   choices=["sandwich", "prop-ve", "det-trace", "leverage", "coverage", "woodbury"])
    p.add_argument("--actions", help=".npy of chosen actions from `run --save-actions`")
    p.add_argument("--log", help="run CSV (quad_norm column) for the leverage check")
    p.add_argument("--state", help="SketchState JSON for the woodbury check")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--radius-scale", type=float, default=1.0)
    p.add_argument("--report", help="write the LemmaReport JSON here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ingest-info", help="summarize a CSV dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--label-col", required=True)
    p.add_argument("--normalization", choices=["global_max_norm", "none"])
    p.set_defaults(func=cmd_ingest_info)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
