"""Direct variable-dependency checks, interaction graphs, and hill climbers.

The four-point non-linearity check and the six-clause non-monotonicity check
both probe a single context ``x`` with at most four evaluations (the cached
fitness of ``x`` is reused). :func:`exhaustive_vig` aggregates a check over
every context of a small instance and is the ground-truth oracle the
statistical machinery is measured against.
"""

from __future__ import annotations

import numpy as np

from .core import EPS, BudgetExhausted, EvalBudget, RngStream, Solution, evaluate


class Vig:
    """Symmetric boolean variable-interaction graph over ``n`` variables."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, adj: np.ndarray | None = None):
        self.n = int(n)
        if adj is None:
            self.adj = np.zeros((n, n), dtype=bool)
        else:
            adj = np.asarray(adj, dtype=bool)
            if adj.shape != (n, n):
                raise ValueError("adjacency shape mismatch")
            if not np.array_equal(adj, adj.T) or adj.diagonal().any():
                raise ValueError("adjacency must be symmetric with empty diagonal")
            self.adj = adj.copy()

    @classmethod
    def from_edges(cls, n: int, edges) -> "Vig":
        g = cls(n)
        for a, b in edges:
            g.add_edge(a, b)
        return g

    @classmethod
    def from_blocks(cls, n: int, blocks) -> "Vig":
        """Union of cliques: every pair inside a block is dependent."""
        g = cls(n)
        for block in blocks:
            block = list(block)
            for i in range(len(block)):
                for j in block[i + 1:]:
                    g.add_edge(block[i], j)
        return g

    @classmethod
    def complete(cls, n: int) -> "Vig":
        adj = np.ones((n, n), dtype=bool)
        np.fill_diagonal(adj, False)
        return cls(n, adj)

    def add_edge(self, g: int, h: int) -> None:
        if g == h:
            raise ValueError("no self-loops")
        self.adj[g, h] = self.adj[h, g] = True

    def has_edge(self, g: int, h: int) -> bool:
        return bool(self.adj[g, h])

    def edges(self) -> list[tuple[int, int]]:
        gi, hi = np.nonzero(np.triu(self.adj, 1))
        return list(zip(gi.tolist(), hi.tolist()))

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    @property
    def density(self) -> float:
        pairs = self.n * (self.n - 1) // 2
        return self.edge_count / pairs if pairs else 0.0

    def is_subgraph_of(self, other: "Vig") -> bool:
        return bool(np.all(~self.adj | other.adj))

    def __eq__(self, other) -> bool:
        return isinstance(other, Vig) and self.n == other.n and np.array_equal(self.adj, other.adj)


def _four_point(instance, x: Solution, g: int, h: int, budget: EvalBudget):
    """Fitness at ``x`` and its three flip-neighbours ``x^g``, ``x^h``, ``x^{g,h}``."""
    if g == h:
        raise ValueError("check requires two distinct genes")
    f0 = x.fitness
    if f0 is None:
        f0 = evaluate(instance, x, budget)
    xg = x.copy()
    xg.flip(g)
    fg = evaluate(instance, xg, budget)
    xh = x.copy()
    xh.flip(h)
    fh = evaluate(instance, xh, budget)
    xg.flip(h)
    fgh = evaluate(instance, xg, budget)
    return f0, fg, fh, fgh


def nonlinearity_check(instance, x: Solution, g: int, h: int, budget: EvalBudget) -> bool:
    """True iff the four-point additivity identity fails at context ``x``."""
    f0, fg, fh, fgh = _four_point(instance, x, g, h, budget)
    return abs(f0 + fgh - fg - fh) > EPS


def _cmp(a: float, b: float) -> int:
    if abs(a - b) <= EPS:
        return 0
    return -1 if a < b else 1


def nonmonotonicity_check(instance, x: Solution, g: int, h: int, budget: EvalBudget) -> bool:
    """True iff any of the six order-reversal clauses holds among the four
    flip-neighbour fitnesses at context ``x``."""
    f0, fg, fh, fgh = _four_point(instance, x, g, h, budget)
    return _nonmono_clauses(f0, fg, fh, fgh)


def _nonmono_clauses(f0, fg, fh, fgh) -> bool:
    a = _cmp(f0, fg)
    b = _cmp(fh, fgh)
    if (a < 0 and b >= 0) or (a == 0 and b != 0) or (a > 0 and b <= 0):
        return True
    a = _cmp(f0, fh)
    b = _cmp(fg, fgh)
    return (a < 0 and b >= 0) or (a == 0 and b != 0) or (a > 0 and b <= 0)


def fitness_table(instance, chunk: int = 1 << 18) -> np.ndarray:
    """Fitness of every state of a small instance, indexed by the integer whose
    bit ``i`` is variable ``i``. Guarded to ``n <= 24``."""
    n = instance.n
    if n > 24:
        raise ValueError("fitness_table refused for n > 24")
    total = 1 << n
    out = np.empty(total, dtype=np.float64)
    shifts = np.arange(n)
    for start in range(0, total, chunk):
        ints = np.arange(start, min(start + chunk, total), dtype=np.int64)
        mat = ((ints[:, None] >> shifts) & 1).astype(np.uint8)
        out[start:start + len(ints)] = instance.value_batch(mat)
    return out


def exhaustive_vig(instance, check: str = "nonmonotonic") -> Vig:
    """Aggregate a direct check over all ``2**n`` contexts: edge ``(g, h)`` is
    present iff the check fires for at least one context."""
    if check not in ("nonlinear", "nonmonotonic"):
        raise ValueError("check must be 'nonlinear' or 'nonmonotonic'")
    n = instance.n
    if n > 24:
        raise ValueError("exhaustive_vig refused for n > 24")
    F = fitness_table(instance)
    X = np.arange(1 << n, dtype=np.int64)
    vig = Vig(n)
    for g in range(n):
        Fg = F[X ^ (1 << g)]
        for h in range(g + 1, n):
            Fh = F[X ^ (1 << h)]
            Fgh = F[X ^ (1 << g) ^ (1 << h)]
            if check == "nonlinear":
                fired = np.any(np.abs(F + Fgh - Fg - Fh) > EPS)
            else:
                fired = _nonmono_any(F, Fg, Fh, Fgh)
            if fired:
                vig.add_edge(g, h)
    return vig


def _nonmono_any(f0, fg, fh, fgh) -> bool:
    for a, b in ((fg, fh), (fh, fg)):
        lt = f0 < a - EPS
        eq = np.abs(f0 - a) <= EPS
        gt = f0 > a + EPS
        ge2 = b >= fgh - EPS
        eq2 = np.abs(b - fgh) <= EPS
        le2 = b <= fgh + EPS
        if np.any((lt & ge2) | (eq & ~eq2) | (gt & le2)):
            return True
    return False


def fihc(instance, s: Solution, rng: RngStream, budget: EvalBudget) -> Solution:
    """First-improvement hill climber: sweep a freshly shuffled index order,
    keeping strictly improving flips, until a full sweep changes nothing.

    On budget exhaustion the current (last accepted) state is returned.
    """
    return _fihc(instance, s, rng, budget, None, 0)[0]


def fihc_with_ll(
    instance,
    s: Solution,
    evig: Vig,
    rng: RngStream,
    budget: EvalBudget,
    pair_budget: int | None = None,
) -> tuple[Solution, Vig]:
    """FIHC that additionally spends up to ``pair_budget`` (default ``n``)
    non-monotonicity checks per climb, each pairing a just-flipped gene with a
    uniformly drawn partner at the current context. Discovered edges accumulate
    into ``evig``; edges are never removed."""
    if pair_budget is None:
        pair_budget = s.n
    return _fihc(instance, s, rng, budget, evig, pair_budget)


def _fihc(instance, s, rng, budget, evig, pair_budget):
    checks_left = pair_budget
    try:
        if s.fitness is None:
            evaluate(instance, s, budget)
        improved = True
        while improved:
            improved = False
            for i in rng.gen.permutation(s.n):
                old = s.fitness
                s.flip(i)
                try:
                    f = evaluate(instance, s, budget)
                except BudgetExhausted:
                    s.flip(i)
                    s._fitness = old
                    raise
                if f > old + EPS:
                    improved = True
                    if evig is not None and checks_left > 0 and s.n > 1:
                        checks_left -= 1
                        h = int(rng.gen.integers(s.n - 1))
                        if h >= i:
                            h += 1
                        if not evig.has_edge(i, h) and nonmonotonicity_check(
                            instance, s, i, h, budget
                        ):
                            evig.add_edge(i, h)
                else:
                    s.flip(i)
                    s._fitness = old
    except BudgetExhausted:
        pass
    return s, evig
