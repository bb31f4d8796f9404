"""Black-box pseudo-boolean optimization with statistical-linkage-learning-driven
partition-crossover mixing: benchmark problems, deterministic noise injection,
direct dependency checks, DSM/linkage-tree machinery, PX-like linkage trees and
optimal mixing, full optimizers (P3, LT-GOMEA, and variants), a brute-force
oracle suite, and a reproducible experiment harness."""

from .core import (
    EPS,
    BudgetExhausted,
    EvalBudget,
    OptimumReached,
    RngStream,
    Solution,
    evaluate,
    unitation,
)
from .dependency import (
    Vig,
    exhaustive_vig,
    fihc,
    fihc_with_ll,
    nonlinearity_check,
    nonmonotonicity_check,
)
from .mixing import MaskShareStats, MixOutcome, om_step, px_om
from .noise import NoiseConfig, default_level, draw_noise_vars, noised_instance, shortfall
from .optimizers import OPTIMIZER_NAMES, LtGomea, P3, run_optimizer
from .pxlt import build_px_lt, ltop_ws, px_masks
from .sll import Dsm, LinkageTree, build_lt, estimate_dsm, is_perfect

__all__ = [
    "EPS",
    "BudgetExhausted",
    "EvalBudget",
    "OptimumReached",
    "RngStream",
    "Solution",
    "evaluate",
    "unitation",
    "Vig",
    "exhaustive_vig",
    "fihc",
    "fihc_with_ll",
    "nonlinearity_check",
    "nonmonotonicity_check",
    "MaskShareStats",
    "MixOutcome",
    "om_step",
    "px_om",
    "NoiseConfig",
    "default_level",
    "draw_noise_vars",
    "noised_instance",
    "shortfall",
    "OPTIMIZER_NAMES",
    "LtGomea",
    "P3",
    "run_optimizer",
    "build_px_lt",
    "ltop_ws",
    "px_masks",
    "Dsm",
    "LinkageTree",
    "build_lt",
    "estimate_dsm",
    "is_perfect",
]
