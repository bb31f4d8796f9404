"""Experiment harness: config files, seed batteries, CSV reporting, scalability
sweeps, and the PX-mask-share instrumentation metric.

A config plus the code version determines every output byte: run records are
computed per seed from independent derived RNG streams and merged in seed
order, so the CSV is identical regardless of worker scheduling.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .core import EvalBudget, RngStream
from .mixing import MaskShareStats
from .noise import NoiseConfig, default_level, draw_noise_vars, noised_instance
from .optimizers import OPTIMIZER_NAMES, run_optimizer
from . import problems

NOISE_PERCENT_CHOICES = (0, 30, 50, 70, 100)

CSV_COLUMNS = (
    "seed",
    "optimizer",
    "kind",
    "n",
    "noise_percent",
    "ffe_limit",
    "success",
    "ffe_at_success",
    "best_fitness",
    "ffe_used",
    "px_mask_share",
    "masks_applied",
    "px_matches",
)

FIXTURES = {
    "bim4-triple-sum": lambda n: problems.bim4_triple_overlap_sum(),
    "bim4-triple-product": lambda n: problems.bim4_triple_overlap_product(),
    "double-trap4-spiked": lambda n: problems.double_trap4_spiked(),
    "onemax": problems.onemax,
    "onemax-squared": problems.onemax_squared,
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "trap-concat"
    n: int = 50
    k: int = 5
    overlap: int = 0
    instance_seed: int = 1
    path: str | None = None
    fixture: str | None = None
    noise_percent: int = 0
    noise_level: float | None = None
    noise_modulus: int = 2
    noise_seed: int = 1234
    optimizer: str = "p3"
    ffe_limit: int = 1_000_000
    seeds: tuple[int, ...] = tuple(range(1, 31))
    target: float | None = None
    instrument: bool = False
    output: str | None = None

    def validate(self) -> None:
        if self.optimizer not in OPTIMIZER_NAMES:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.noise_percent not in NOISE_PERCENT_CHOICES:
            raise ValueError(f"noise percent must be one of {NOISE_PERCENT_CHOICES}")
        if self.kind not in problems.KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if not self.seeds:
            raise ValueError("need at least one seed")


def _parse_seeds(text: str) -> tuple[int, ...]:
    text = text.strip()
    if "," in text:
        return tuple(int(t) for t in text.split(",") if t.strip())
    return tuple(range(1, int(text) + 1))


_SECTION_KEYS = {
    ("problem", "kind"): ("kind", str),
    ("problem", "n"): ("n", int),
    ("problem", "k"): ("k", int),
    ("problem", "overlap"): ("overlap", int),
    ("problem", "seed"): ("instance_seed", int),
    ("problem", "path"): ("path", str),
    ("problem", "fixture"): ("fixture", str),
    ("noise", "size_percent"): ("noise_percent", int),
    ("noise", "level"): ("noise_level", float),
    ("noise", "modulus"): ("noise_modulus", int),
    ("noise", "seed"): ("noise_seed", int),
    ("optimizer", "name"): ("optimizer", str),
    ("run", "ffe_limit"): ("ffe_limit", int),
    ("run", "seeds"): ("seeds", _parse_seeds),
    ("run", "target"): ("target", float),
    ("run", "instrument"): ("instrument", lambda t: t.lower() in ("1", "true", "yes", "on")),
    ("run", "output"): ("output", str),
}


def config_from_ini(path_or_text: str, overrides: list[str] | None = None) -> ExperimentConfig:
    """Load a config from an INI file (or literal INI text); ``overrides`` are
    ``section.key=value`` strings that take precedence over file values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if os.path.exists(path_or_text):
        parser.read(path_or_text)
    else:
        parser.read_string(path_or_text)
    values: dict = {}
    for section in parser.sections():
        for key, raw in parser[section].items():
            spec = _SECTION_KEYS.get((section, key))
            if spec is None:
                raise ValueError(f"unknown config key [{section}] {key}")
            fieldname, conv = spec
            if raw.strip() != "":
                values[fieldname] = conv(raw)
    cfg = ExperimentConfig(**values)
    for item in overrides or []:
        cfg = apply_override(cfg, item)
    cfg.validate()
    return cfg


def apply_override(cfg: ExperimentConfig, item: str) -> ExperimentConfig:
    try:
        dotted, raw = item.split("=", 1)
        section, key = dotted.strip().split(".")
    except ValueError:
        raise ValueError(f"override must look like section.key=value, got {item!r}")
    spec = _SECTION_KEYS.get((section, key))
    if spec is None:
        raise ValueError(f"unknown config key [{section}] {key}")
    fieldname, conv = spec
    return replace(cfg, **{fieldname: conv(raw)})


def build_instance(cfg: ExperimentConfig, n: int | None = None) -> problems.ProblemInstance:
    """Construct the (possibly noised) problem instance a config describes."""
    n = cfg.n if n is None else n
    kind = cfg.kind
    if kind == "trap-concat":
        _check_divisible(n, cfg.k)
        inner = problems.trap_concatenation(cfg.k, n // cfg.k)
    elif kind == "cyclic-trap":
        _check_divisible(n, cfg.k - cfg.overlap)
        inner = problems.trap_ring(cfg.k, cfg.overlap, n // (cfg.k - cfg.overlap))
    elif kind == "bimodal-concat":
        _check_divisible(n, cfg.k)
        inner = problems.bimodal_concatenation(cfg.k, n // cfg.k)
    elif kind == "bimodal-cyclic":
        _check_divisible(n, cfg.k - cfg.overlap)
        inner = problems.bimodal_ring(cfg.k, cfg.overlap, n // (cfg.k - cfg.overlap))
    elif kind == "nk-landscape":
        if cfg.path:
            inner = problems.load_nk(cfg.path)
        else:
            inner = problems.generate_nk(n, cfg.k, cfg.instance_seed)
    elif kind == "ising-spin-glass":
        if cfg.path:
            inner = problems.load_isg(cfg.path)
        else:
            side = math.isqrt(n)
            if side * side != n:
                raise ValueError("ising-spin-glass size must be a perfect square")
            inner = problems.generate_isg(side, cfg.instance_seed)
    elif kind == "max3sat":
        if not cfg.path:
            raise ValueError("max3sat requires an instance file path")
        inner = problems.load_max3sat(cfg.path)
    elif kind == "example-fixture":
        if cfg.fixture not in FIXTURES:
            raise ValueError(f"unknown fixture {cfg.fixture!r}; pick from {sorted(FIXTURES)}")
        inner = FIXTURES[cfg.fixture](n)
    else:  # pragma: no cover - validate() screens kinds
        raise ValueError(f"unhandled kind {kind!r}")

    if cfg.noise_percent == 0:
        return inner
    level = cfg.noise_level if cfg.noise_level is not None else default_level(inner)
    noise_cfg = NoiseConfig(
        noise_vars=draw_noise_vars(inner.n, cfg.noise_percent, cfg.noise_seed),
        level=level,
        modulus=cfg.noise_modulus,
        seed=cfg.noise_seed,
    )
    return noised_instance(inner, noise_cfg)


def _check_divisible(n: int, step: int) -> None:
    if n % step != 0:
        raise ValueError(f"size {n} is not a multiple of the block step {step}")


@dataclass
class RunRecord:
    seed: int
    success: bool
    ffe_at_success: int | None
    best_fitness: float | None
    ffe_used: int
    px_mask_share: float | None
    masks_applied: int
    px_matches: int
    wall_time: float


def _execute_seed(cfg: ExperimentConfig, seed: int, n: int | None = None) -> RunRecord:
    instance = build_instance(cfg, n)
    target = cfg.target if cfg.target is not None else instance.known_optimum
    budget = EvalBudget(cfg.ffe_limit, target=target)
    stats = None
    if cfg.instrument and instance.ground_truth_vig is not None and cfg.optimizer.startswith("p3"):
        stats = MaskShareStats(instance.ground_truth_vig)
    started = time.perf_counter()
    run_optimizer(cfg.optimizer, instance, RngStream(seed), budget, stats=stats)
    wall = time.perf_counter() - started
    return RunRecord(
        seed=seed,
        success=budget.ffe_at_target is not None,
        ffe_at_success=budget.ffe_at_target,
        best_fitness=budget.best_fitness,
        ffe_used=budget.used,
        px_mask_share=stats.share if stats is not None else None,
        masks_applied=stats.applied if stats is not None else 0,
        px_matches=stats.px_matches if stats is not None else 0,
        wall_time=wall,
    )


def run(cfg: ExperimentConfig, n: int | None = None) -> list[RunRecord]:
    """Execute the config's seed battery; one record per seed, in seed order.

    The instance is validated up front so a missing file fails before anything
    is written. With ``PXSLL_WORKERS`` > 1 the (instance, seed) runs execute in
    a process pool; each run owns its budget, RNG, and instance copy.
    """
    cfg.validate()
    build_instance(cfg, n)  # fail fast on bad problem definitions / missing files
    workers = int(os.environ.get("PXSLL_WORKERS", "1"))
    if workers > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute_seed, *zip(*[(cfg, s, n) for s in cfg.seeds])))
    else:
        records = [_execute_seed(cfg, s, n) for s in cfg.seeds]
    if cfg.output:
        write_csv(cfg, records, cfg.output, n)
    return records


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def csv_rows(cfg: ExperimentConfig, records: list[RunRecord], n: int | None = None):
    size = cfg.n if n is None else n
    for r in records:
        yield {
            "seed": _fmt(r.seed),
            "optimizer": cfg.optimizer,
            "kind": cfg.kind,
            "n": _fmt(size),
            "noise_percent": _fmt(cfg.noise_percent),
            "ffe_limit": _fmt(cfg.ffe_limit),
            "success": _fmt(r.success),
            "ffe_at_success": _fmt(r.ffe_at_success),
            "best_fitness": _fmt(r.best_fitness),
            "ffe_used": _fmt(r.ffe_used),
            "px_mask_share": _fmt(r.px_mask_share),
            "masks_applied": _fmt(r.masks_applied),
            "px_matches": _fmt(r.px_matches),
        }


def write_csv(cfg, records, path_or_buf, n: int | None = None) -> None:
    own = isinstance(path_or_buf, (str, os.PathLike))
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in csv_rows(cfg, records, n):
            writer.writerow(row)
    finally:
        if own:
            fh.close()


def csv_text(cfg, records, n: int | None = None) -> str:
    buf = io.StringIO()
    write_csv(cfg, records, buf, n)
    return buf.getvalue()


def success_rate(records: list[RunRecord]) -> float:
    return sum(1 for r in records if r.success) / len(records)


def median_success_ffe(records: list[RunRecord]) -> float | None:
    ffes = [r.ffe_at_success for r in records if r.success]
    return float(statistics.median(ffes)) if ffes else None


def px_mask_share(records: list[RunRecord]) -> float | None:
    """Cross-seed median of the per-run PX-mask share; None when the metric was
    not collected (no ground-truth VIG)."""
    shares = [r.px_mask_share for r in records if r.px_mask_share is not None]
    return float(statistics.median(shares)) if shares else None


@dataclass
class SweepReport:
    sizes: list[int]
    rates: dict[int, float] = field(default_factory=dict)
    median_ffe: dict[int, float | None] = field(default_factory=dict)
    records: dict[int, list[RunRecord]] = field(default_factory=dict)
    threshold: float = 0.8

    @property
    def largest_passing(self) -> int | None:
        passing = [s for s in self.sizes if self.rates[s] >= self.threshold]
        return max(passing) if passing else None

    def table(self) -> str:
        lines = ["size success_rate median_success_ffe"]
        for s in self.sizes:
            med = self.median_ffe[s]
            lines.append(f"{s} {self.rates[s]:.4f} {'' if med is None else format(med, '.10g')}")
        lines.append(f"largest_passing {self.largest_passing if self.largest_passing is not None else 'none'}")
        return "\n".join(lines) + "\n"


def sweep(cfg: ExperimentConfig, sizes: list[int], success_threshold: float = 0.8) -> SweepReport:
    """Run the seed battery at each size (ascending) and report the largest
    size meeting the success threshold, with per-size curves.

    Success need not be monotone in size; the report states the largest
    passing size exactly as defined, with no interpolation.
    """
    if sorted(sizes) != list(sizes):
        raise ValueError("sizes must be ascending")
    report = SweepReport(sizes=list(sizes), threshold=success_threshold)
    for s in sizes:
        records = run(replace(cfg, output=None), n=s)
        report.records[s] = records
        report.rates[s] = success_rate(records)
        report.median_ffe[s] = median_success_ffe(records)
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for s in sizes:
                for row in csv_rows(cfg, report.records[s], s):
                    writer.writerow(row)
    return report


def analyze(paths: list[str]) -> str:
    """Aggregate run CSVs into a capability summary: per (kind, optimizer,
    noise percent), the largest size with >= 80% success and the median
    success-FFE at that size."""
    groups: dict[tuple, dict[int, list[dict]]] = {}
    for path in paths:
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                key = (row["kind"], row["optimizer"], int(row["noise_percent"]))
                groups.setdefault(key, {}).setdefault(int(row["n"]), []).append(row)
    lines = ["kind optimizer noise_percent largest_passing opt_percent ffe_median"]
    for key in sorted(groups):
        kind, opt, noise = key
        best_n, best_rows = None, None
        for size, rows in sorted(groups[key].items()):
            rate = sum(1 for r in rows if r["success"] == "1") / len(rows)
            if rate >= 0.8:
                best_n, best_rows = size, rows
        if best_n is None:
            lines.append(f"{kind} {opt} {noise} none - -")
        else:
            rate = sum(1 for r in best_rows if r["success"] == "1") / len(best_rows)
            ffes = [int(r["ffe_at_success"]) for r in best_rows if r["success"] == "1"]
            med = statistics.median(ffes)
            lines.append(
                f"{kind} {opt} {noise} {best_n} {100 * rate:.0f} {format(med, '.6g')}"
            )
    return "\n".join(lines) + "\n"
