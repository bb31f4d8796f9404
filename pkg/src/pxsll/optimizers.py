"""Full optimizer assemblies.

P3 keeps a pyramid of populations: every iteration hill-climbs a fresh random
solution, then tries to improve it against each level in turn; a strict
improvement at level i promotes the solution into level i+1 and re-estimates
that level's linkage model. LT-GOMEA is an interleaved multistart of
generational optimal mixing with doubling population sizes, where population i
receives four generations for every one of population i+1.

Variants swap the entry hill climber (plain FIHC vs FIHC with linkage
learning) and the mixing operator (tree-wide optimal mixing vs per-pair
PX-like optimal mixing).
"""

from __future__ import annotations

import numpy as np

from .core import (
    BudgetExhausted,
    EPS,
    EvalBudget,
    OptimumReached,
    RngStream,
    Solution,
    evaluate,
)
from .dependency import Vig, fihc, fihc_with_ll
from .mixing import MaskShareStats, om_step, px_om
from .sll import Dsm, LinkageTree, build_lt, estimate_dsm

OPTIMIZER_NAMES = (
    "p3",
    "p3-fihcwll",
    "p3-px-om-ltopws",
    "p3-px-om-all",
    "ltgomea",
    "ltgomea-fihcwll",
)


class _Level:
    """One pyramid level: members plus the linkage model estimated from them."""

    def __init__(self, n: int, build_tree: bool):
        self.n = n
        self.build_tree = build_tree
        self.members: list[Solution] = []
        self.matrix = np.empty((0, n), dtype=np.uint8)
        self.dsm: Dsm | None = None
        self.tree: LinkageTree | None = None

    def add(self, solution: Solution) -> None:
        self.members.append(solution)
        self.matrix = np.vstack([self.matrix, solution.bits[None, :]])
        self.dsm = estimate_dsm(self.matrix)
        if self.build_tree:
            self.tree = build_lt(self.dsm)


class P3:
    """Parameter-less population pyramid."""

    def __init__(
        self,
        instance,
        rng: RngStream,
        budget: EvalBudget,
        variant: str = "p3",
        stats: MaskShareStats | None = None,
    ):
        if variant not in ("p3", "p3-fihcwll", "p3-px-om-ltopws", "p3-px-om-all"):
            raise ValueError(f"unknown P3 variant {variant!r}")
        self.instance = instance
        self.budget = budget
        self.variant = variant
        self.stats = stats
        self.rng_new = rng.child()
        self.rng_entry = rng.child()
        self.rng_mix = rng.child()
        self.uses_px = variant.startswith("p3-px-om")
        self.uses_ll = variant == "p3-fihcwll"
        self.evig = Vig(instance.n) if self.uses_ll else None
        self.levels: list[_Level] = []
        self.seen: set[bytes] = set()
        self.iterations = 0

    def _entry_climb(self, s: Solution) -> Solution:
        if self.uses_ll:
            s, _ = fihc_with_ll(self.instance, s, self.evig, self.rng_entry, self.budget)
            return s
        return fihc(self.instance, s, self.rng_entry, self.budget)

    def _add_to_level(self, index: int, s: Solution) -> None:
        while index >= len(self.levels):
            self.levels.append(_Level(self.instance.n, build_tree=not self.uses_px))
        if s.key() not in self.seen:
            self.seen.add(s.key())
            self.levels[index].add(s.copy())

    def _mix_at_level(self, s: Solution, level: _Level) -> None:
        if self.uses_px:
            differs = (level.matrix != s.bits).any(axis=1)
            eligible = np.flatnonzero(differs)
            if eligible.size == 0:
                return
            donor_bits = level.matrix[eligible[int(self.rng_mix.gen.integers(eligible.size))]]
            mode = "ltopws" if self.variant == "p3-px-om-ltopws" else "all"
            px_om(
                self.instance,
                level.dsm,
                s,
                Solution(donor_bits.copy()),
                self.rng_mix,
                self.budget,
                mask_mode=mode,
                stats=self.stats,
            )
        else:
            om_step(
                self.instance,
                s,
                level.matrix,
                level.tree,
                "shortest-first",
                self.rng_mix,
                self.budget,
                evig=self.evig,
                stats=self.stats,
            )

    def iteration(self) -> None:
        """One pyramid pass; budget exhaustion unwinds with the pyramid intact."""
        if self.budget.exhausted:
            raise BudgetExhausted
        s = Solution.random(self.instance.n, self.rng_new)
        evaluate(self.instance, s, self.budget)
        s = self._entry_climb(s)
        if self.budget.exhausted:
            raise BudgetExhausted
        self._add_to_level(0, s)
        i = 0
        while i < len(self.levels):
            level = self.levels[i]
            if level.members:
                f_before = s.fitness
                self._mix_at_level(s, level)
                if s.fitness > f_before + EPS:
                    self._add_to_level(i + 1, s)
            i += 1
        self.iterations += 1

    def run(self) -> EvalBudget:
        try:
            while True:
                self.iteration()
        except (BudgetExhausted, OptimumReached):
            pass
        return self.budget


class _GomeaPopulation:
    def __init__(self, size: int):
        self.size = size
        self.members: list[Solution] = []
        self.alive = True
        self.generations = 0

    @property
    def matrix(self) -> np.ndarray:
        return np.array([s.bits for s in self.members], dtype=np.uint8)

    @property
    def mean_fitness(self) -> float:
        return float(np.mean([s.fitness for s in self.members]))

    @property
    def converged(self) -> bool:
        first = self.members[0].key()
        return all(s.key() == first for s in self.members)


class LtGomea:
    """Interleaved-multistart gene-pool optimal mixing over linkage trees.

    Population i runs a generation at every multiple of 4**i scheduling ticks,
    so it executes four generations per generation of population i+1;
    population sizes double. Converged populations and populations whose mean
    fitness falls behind a larger one are terminated.
    """

    def __init__(self, instance, rng: RngStream, budget: EvalBudget, variant: str = "ltgomea"):
        if variant not in ("ltgomea", "ltgomea-fihcwll"):
            raise ValueError(f"unknown LT-GOMEA variant {variant!r}")
        self.instance = instance
        self.budget = budget
        self.uses_ll = variant == "ltgomea-fihcwll"
        self.evig = Vig(instance.n) if self.uses_ll else None
        self.rng_init = rng.child()
        self.rng_mix = rng.child()
        self.populations: list[_GomeaPopulation] = []
        self.tick = 0

    def _next_tick(self) -> tuple[int, int]:
        """Smallest tick after the current one whose owner can act.

        Tick ``t`` belongs to population ``j`` = largest power of 4 dividing
        ``t`` (so population i acts four times as often as population i+1);
        ticks owned by indices at or beyond the current population count
        create the next, doubled population. Dead populations' ticks are
        skipped without iteration.
        """
        best_tick, best_index = None, None
        for i, pop in enumerate(self.populations):
            if not pop.alive:
                continue
            m = self.tick // 4 ** i + 1
            if m % 4 == 0:  # that slot belongs to a larger population
                m += 1
            t = m * 4 ** i
            if best_tick is None or t < best_tick:
                best_tick, best_index = t, i
        count = len(self.populations)
        creation = (self.tick // 4 ** count + 1) * 4 ** count
        if best_tick is None or creation < best_tick:
            best_tick, best_index = creation, count
        return best_tick, best_index

    def _create_population(self) -> None:
        pop = _GomeaPopulation(1 << len(self.populations))
        for _ in range(pop.size):
            s = Solution.random(self.instance.n, self.rng_init)
            evaluate(self.instance, s, self.budget)
            if self.uses_ll:
                s, _ = fihc_with_ll(self.instance, s, self.evig, self.rng_init, self.budget)
            pop.members.append(s)
        self.populations.append(pop)

    def _generation(self, pop: _GomeaPopulation) -> None:
        matrix = pop.matrix
        if len(pop.members) > 1:
            dsm = estimate_dsm(matrix)
            tree = build_lt(dsm)
            for idx in range(len(pop.members)):
                src = pop.members[idx].copy()
                om_step(
                    self.instance,
                    src,
                    matrix,
                    tree,
                    "random",
                    self.rng_mix,
                    self.budget,
                    evig=self.evig,
                )
                pop.members[idx] = src
        pop.generations += 1
        if pop.converged:
            pop.alive = False

    def _cull(self) -> None:
        alive = [p for p in self.populations if p.alive]
        for i, p in enumerate(alive):
            if any(q.mean_fitness >= p.mean_fitness for q in alive[i + 1:]):
                p.alive = False

    def step(self) -> None:
        tick, index = self._next_tick()
        self.tick = tick
        if index == len(self.populations):
            self._create_population()
        else:
            self._generation(self.populations[index])
        self._cull()

    def run(self) -> EvalBudget:
        try:
            while True:
                self.step()
        except (BudgetExhausted, OptimumReached):
            pass
        return self.budget


def run_optimizer(
    name: str,
    instance,
    rng: RngStream,
    budget: EvalBudget,
    stats: MaskShareStats | None = None,
) -> EvalBudget:
    """Run a named optimizer configuration to success or budget exhaustion."""
    if name.startswith("p3"):
        return P3(instance, rng, budget, variant=name, stats=stats).run()
    if name.startswith("ltgomea"):
        if stats is not None:
            raise ValueError("PX-mask instrumentation is only wired for P3 variants")
        return LtGomea(instance, rng, budget, variant=name).run()
    raise ValueError(f"unknown optimizer {name!r}")
