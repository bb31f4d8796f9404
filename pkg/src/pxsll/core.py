"""Solutions, seeded randomness, and the budget-counted fitness evaluation gateway.

Every fitness value consumed by an optimizer run passes through :func:`evaluate`,
which charges exactly one fitness function evaluation (FFE) against an
:class:`EvalBudget`. The budget doubles as the run monitor: it tracks the best
solution seen so far and, when a target fitness is known, signals success the
moment an evaluation reaches it.
"""

from __future__ import annotations

import numpy as np

#: Tolerance used for fitness equality throughout (the benchmark functions are
#: rationally valued; this absorbs float summation error without flipping
#: comparisons).
EPS = 1e-9


class BudgetExhausted(Exception):
    """Raised by :func:`evaluate` when the FFE budget is spent."""


class OptimumReached(Exception):
    """Raised by :func:`evaluate` when the budget's target fitness is hit."""


class RngStream:
    """Deterministic, splittable random stream (PCG64 over a numpy SeedSequence).

    Identical seeds give identical draw sequences across runs and platforms.
    Components derive independent child streams via :meth:`child`, so local
    changes to one component's draws do not perturb the others.
    """

    __slots__ = ("seq", "gen")

    def __init__(self, seed: int | np.random.SeedSequence):
        if isinstance(seed, np.random.SeedSequence):
            self.seq = seed
        else:
            self.seq = np.random.SeedSequence(int(seed))
        self.gen = np.random.Generator(np.random.PCG64(self.seq))

    def child(self) -> "RngStream":
        """Spawn an independent substream; successive calls give distinct streams."""
        return RngStream(self.seq.spawn(1)[0])


class Solution:
    """A fixed-length bit vector with a cached fitness.

    The cache is invalidated whenever the bits mutate, so a present fitness
    always equals re-evaluation on the same (deterministic) instance.
    """

    __slots__ = ("bits", "_fitness")

    def __init__(self, bits, fitness: float | None = None):
        self.bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if self.bits.ndim != 1:
            raise ValueError("solution bits must be a 1-D vector")
        self._fitness = fitness

    @classmethod
    def random(cls, n: int, rng: RngStream) -> "Solution":
        return cls(rng.gen.integers(0, 2, size=n, dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def fitness(self) -> float | None:
        return self._fitness

    def invalidate(self) -> None:
        self._fitness = None

    def flip(self, i: int) -> None:
        self.bits[i] ^= 1
        self._fitness = None

    def write_mask(self, mask, source_bits) -> None:
        """Copy ``source_bits`` into this solution at the given index mask."""
        self.bits[mask] = source_bits[mask]
        self._fitness = None

    def copy(self) -> "Solution":
        return Solution(self.bits.copy(), self._fitness)

    def key(self) -> bytes:
        return self.bits.tobytes()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        s = "".join("1" if b else "0" for b in self.bits)
        return f"Solution({s}, fitness={self._fitness})"


class EvalBudget:
    """FFE accounting plus best-so-far tracking for one run.

    ``used`` never decreases and never exceeds ``limit``. When ``target`` is
    set, the first evaluation reaching it (within ``EPS``) records
    ``ffe_at_target`` and, if ``stop_at_target``, raises :class:`OptimumReached`
    to unwind the optimizer loop.
    """

    __slots__ = (
        "limit",
        "used",
        "target",
        "stop_at_target",
        "best_fitness",
        "best_bits",
        "ffe_of_best",
        "ffe_at_target",
    )

    def __init__(self, limit: int, target: float | None = None, stop_at_target: bool = True):
        if limit < 0:
            raise ValueError("budget limit must be non-negative")
        self.limit = int(limit)
        self.used = 0
        self.target = target
        self.stop_at_target = stop_at_target
        self.best_fitness: float | None = None
        self.best_bits: np.ndarray | None = None
        self.ffe_of_best: int | None = None
        self.ffe_at_target: int | None = None

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def note(self, fitness: float, bits: np.ndarray) -> None:
        if self.best_fitness is None or fitness > self.best_fitness:
            self.best_fitness = fitness
            self.best_bits = bits.copy()
            self.ffe_of_best = self.used
        if (
            self.target is not None
            and self.ffe_at_target is None
            and fitness >= self.target - EPS
        ):
            self.ffe_at_target = self.used
            if self.stop_at_target:
                raise OptimumReached


def evaluate(instance, s: Solution, budget: EvalBudget) -> float:
    """Evaluate ``s`` on ``instance``, charging one FFE.

    Caches the fitness in ``s``. Raises :class:`BudgetExhausted` (before
    evaluating) when the budget is spent, and :class:`OptimumReached` when the
    budget's target is hit.
    """
    if s.n != instance.n:
        raise ValueError(f"solution length {s.n} != instance size {instance.n}")
    if budget.used >= budget.limit:
        raise BudgetExhausted
    f = float(instance.value(s.bits))
    budget.used += 1
    s._fitness = f
    budget.note(f, s.bits)
    return f


def unitation(bits) -> int:
    """Number of ones in a bit vector."""
    return int(np.asarray(bits).sum())


def bits_from_int(x: int, n: int) -> np.ndarray:
    """Decode an integer into a bit vector; bit ``i`` of ``x`` is variable ``i``."""
    return np.array([(x >> i) & 1 for i in range(n)], dtype=np.uint8)


def int_from_bits(bits) -> int:
    """Inverse of :func:`bits_from_int`."""
    out = 0
    for i, b in enumerate(np.asarray(bits, dtype=np.uint8)):
        if b:
            out |= 1 << i
    return out
