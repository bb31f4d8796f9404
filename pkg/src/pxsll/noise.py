"""Deterministic noise injection with a hidden dependency structure.

The wrapper lifts the fitness of a gated solution up to a threshold: whenever
the unitation restricted to a hidden random variable subset is divisible by
the modulus, the shortfall below the threshold is added. Solutions at or above
the threshold are never disturbed, so the top of the landscape (and every
high-quality local optimum) is preserved while the gate manufactures
non-monotonic dependencies between the hidden subset and the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import ProblemInstance


@dataclass(frozen=True)
class NoiseConfig:
    """Hidden noise structure, fixed at construction: the noised instance is a
    deterministic function of the bits."""

    noise_vars: tuple[int, ...]
    level: float
    modulus: int = 2
    seed: int | None = None

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("noise modulus must be >= 1")
        if len(set(self.noise_vars)) != len(self.noise_vars):
            raise ValueError("noise variables must be distinct")

    @property
    def size(self) -> int:
        return len(self.noise_vars)


def draw_noise_vars(n: int, size_percent: int, seed: int) -> tuple[int, ...]:
    """Uniformly draw ``round(n * size_percent / 100)`` distinct variable
    indices as the hidden noise subset."""
    if not 0 <= size_percent <= 100:
        raise ValueError("size_percent must be in [0, 100]")
    size = int(round(n * size_percent / 100.0))
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return tuple(sorted(int(i) for i in rng.choice(n, size=size, replace=False)))


def shortfall(f_true_value: float, level: float) -> float:
    """Amount missing up to the threshold: 0 at or above it."""
    return 0.0 if f_true_value >= level else level - f_true_value


def default_level(instance: ProblemInstance) -> float:
    """Midpoint between the known optimum and the fully-deceived fitness.

    Keeps every solution at or above the deceptive attractors' midpoint
    noise-free, so the top optima keep their true values.
    """
    if instance.known_optimum is None or instance.deceptive_level is None:
        raise ValueError(
            "instance has no analytic optimum/deceptive level; set noise level explicitly"
        )
    return (instance.known_optimum + instance.deceptive_level) / 2.0


def noised_instance(inner: ProblemInstance, cfg: NoiseConfig) -> ProblemInstance:
    """Wrap ``inner`` with the unitation-gated shortfall noise.

    The wrapped instance keeps the inner optimum (the lift never exceeds the
    threshold) and carries the inner ground-truth VIG as the hidden structure.
    An empty noise subset means no noise at all (the inner instance is
    returned as-is, rather than letting the empty unitation gate fire
    everywhere).
    """
    if any(not 0 <= v < inner.n for v in cfg.noise_vars):
        raise ValueError("noise variables out of range")
    if cfg.size == 0:
        return inner
    vars_idx = np.array(cfg.noise_vars, dtype=np.intp)
    level = float(cfg.level)
    modulus = int(cfg.modulus)

    def value(bits):
        f = inner.value(bits)
        if int(bits[vars_idx].sum()) % modulus == 0 and f < level:
            return level
        return f

    def value_batch(mat):
        f = inner.value_batch(mat)
        gated = (mat[:, vars_idx].sum(axis=1) % modulus == 0) & (f < level)
        return np.where(gated, level, f)

    return ProblemInstance(
        inner.n,
        inner.kind,
        value,
        params={**inner.params, "noise": cfg},
        known_optimum=inner.known_optimum,
        deceptive_level=inner.deceptive_level,
        ground_truth_vig=inner.ground_truth_vig,
        value_batch_fn=value_batch,
    )


def noised_evaluate(cfg: NoiseConfig, inner: ProblemInstance, bits) -> float:
    """One-off noised fitness of ``bits`` (the functional form of the wrapper)."""
    return noised_instance(inner, cfg).value(bits)
