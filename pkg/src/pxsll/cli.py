"""Command-line interface: run experiment batteries, scalability sweeps,
brute-force oracle queries, and CSV aggregation."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import harness, oracle, sll
from .core import RngStream
from .optimizers import OPTIMIZER_NAMES


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", default="trap-concat")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--overlap", type=int, default=None)
    p.add_argument("--fixture", default=None)
    p.add_argument("--path", default=None, help="instance file for loader kinds")
    p.add_argument("--instance-seed", type=int, default=None)


def _config_from_args(args) -> harness.ExperimentConfig:
    if args.config:
        cfg = harness.config_from_ini(args.config, args.set or [])
    else:
        cfg = harness.ExperimentConfig()
        for item in args.set or []:
            cfg = harness.apply_override(cfg, item)
    updates = {}
    for attr, fieldname in (
        ("kind", "kind"),
        ("n", "n"),
        ("k", "k"),
        ("overlap", "overlap"),
        ("fixture", "fixture"),
        ("path", "path"),
        ("instance_seed", "instance_seed"),
        ("optimizer", "optimizer"),
        ("ffe_limit", "ffe_limit"),
        ("output", "output"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            updates[fieldname] = value
    if getattr(args, "seeds", None):
        updates["seeds"] = harness._parse_seeds(args.seeds)
    cfg = replace(cfg, **updates)
    cfg.validate()
    return cfg


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    records = harness.run(cfg)
    rate = harness.success_rate(records)
    med = harness.median_success_ffe(records)
    share = harness.px_mask_share(records)
    print(f"runs {len(records)}  success_rate {rate:.4f}  "
          f"median_success_ffe {med if med is not None else 'none'}")
    if share is not None:
        print(f"px_mask_share_median {share:.6f}")
    if cfg.output:
        print(f"wrote {cfg.output}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    sizes = [int(t) for t in args.sizes.split(",") if t.strip()]
    report = harness.sweep(cfg, sizes, success_threshold=args.threshold)
    print(report.table(), end="")
    if cfg.output:
        print(f"wrote {cfg.output}")
    return 0


def _oracle_instance(args):
    cfg = harness.ExperimentConfig(
        kind=args.kind,
        n=args.n if args.n is not None else 6,
        k=args.k if args.k is not None else 3,
        overlap=args.overlap if args.overlap is not None else 0,
        fixture=args.fixture,
        path=args.path,
        instance_seed=args.instance_seed if args.instance_seed is not None else 1,
        seeds=(1,),
    )
    return harness.build_instance(cfg)


def _cmd_oracle(args) -> int:
    if args.what == "pop-sizes":
        for targets in ("one", "two", "all-three"):
            m = oracle.hybrid_presence_population_size(args.ph, args.confidence, targets)
            print(f"{targets} {m}")
        return 0
    instance = _oracle_instance(args)
    if args.what == "local-optima":
        optima = oracle.enumerate_local_optima(instance)
        for s in optima:
            print("".join(str(b) for b in s.bits), format(s.fitness, ".10g"))
        return 0
    dist = oracle.fihc_endpoint_distribution(
        instance, mode=args.mode, rng=RngStream(args.seed), samples=args.samples
    )
    if args.what == "endpoints":
        for state, pr in sorted(dist.items(), key=lambda kv: -kv[1]):
            bits = format(state, f"0{instance.n}b")[::-1]  # variable 0 first
            print(bits, format(pr, ".6f"))
        return 0
    if args.what == "theoretical-dsm":
        dsm = oracle.theoretical_dsm(instance, dist)
        print(sll.dump_dsm(dsm), end="")
        return 0
    raise ValueError(args.what)


def _cmd_analyze(args) -> int:
    print(harness.analyze(args.csvs), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pxsll",
        description="Linkage-learning pseudo-boolean optimization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a seed battery from a config")
    p_run.add_argument("--config", default=None, help="INI config file")
    p_run.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    p_run.add_argument("--optimizer", choices=OPTIMIZER_NAMES, default=None)
    p_run.add_argument("--seeds", default=None, help="count or comma list")
    p_run.add_argument("--ffe-limit", dest="ffe_limit", type=int, default=None)
    p_run.add_argument("--output", default=None)
    _add_problem_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="scalability sweep over sizes")
    p_sweep.add_argument("--config", default=None)
    p_sweep.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    p_sweep.add_argument("--optimizer", choices=OPTIMIZER_NAMES, default=None)
    p_sweep.add_argument("--seeds", default=None)
    p_sweep.add_argument("--ffe-limit", dest="ffe_limit", type=int, default=None)
    p_sweep.add_argument("--output", default=None)
    p_sweep.add_argument("--sizes", required=True, help="ascending comma list")
    p_sweep.add_argument("--threshold", type=float, default=0.8)
    _add_problem_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="brute-force ground-truth queries")
    p_oracle.add_argument(
        "what",
        choices=("local-optima", "endpoints", "theoretical-dsm", "pop-sizes"),
    )
    _add_problem_flags(p_oracle)
    p_oracle.add_argument("--mode", choices=("montecarlo", "exhaustive"), default="montecarlo")
    p_oracle.add_argument("--samples", type=int, default=1_000_000)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--ph", type=float, default=None, help="hybrid probability")
    p_oracle.add_argument("--confidence", type=float, default=0.99)
    p_oracle.set_defaults(func=_cmd_oracle)

    p_an = sub.add_parser("analyze", help="aggregate run CSVs into summary tables")
    p_an.add_argument("csvs", nargs="+")
    p_an.set_defaults(func=_cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
