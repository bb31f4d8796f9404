"""Independent brute-force ground truth for desk-scale instances.

Everything here works on integer-encoded states (bit ``i`` of the integer is
variable ``i``) over an exhaustive fitness table, deliberately separate from
the optimizer code paths it is used to verify.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .core import RngStream, Solution, bits_from_int
from .dependency import fitness_table
from .sll import Dsm, dsm_from_distribution


def enumerate_local_optima(instance) -> list[Solution]:
    """All solutions with no strictly improving single-bit flip (n <= 24)."""
    n = instance.n
    if n > 24:
        raise ValueError("enumeration refused for n > 24")
    F = fitness_table(instance)
    X = np.arange(1 << n, dtype=np.int64)
    is_opt = np.ones(1 << n, dtype=bool)
    for g in range(n):
        is_opt &= F[X ^ (1 << g)] <= F
    return [Solution(bits_from_int(int(x), n), float(F[x])) for x in np.flatnonzero(is_opt)]


def _first_improvement_sweep(state: int, order, F) -> int:
    for g in order:
        cand = state ^ (1 << g)
        if F[cand] > F[state]:
            state = cand
    return state


def _mc_climbs(F: np.ndarray, n: int, starts: np.ndarray, rng: RngStream) -> np.ndarray:
    """Vectorized first-improvement hill climbs with per-climb reshuffled sweep
    orders; returns the endpoint of each start."""
    states = starts.astype(np.int64).copy()
    active = np.ones(states.shape[0], dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        cur = states[idx]
        perms = np.argsort(rng.gen.random((idx.size, n)), axis=1)
        changed = np.zeros(idx.size, dtype=bool)
        for j in range(n):
            cand = cur ^ (np.int64(1) << perms[:, j])
            better = F[cand] > F[cur]
            cur = np.where(better, cand, cur)
            changed |= better
        states[idx] = cur
        active[idx] = changed
    return states


def fihc_endpoint_distribution(
    instance,
    mode: str = "montecarlo",
    rng: RngStream | None = None,
    samples: int = 1_000_000,
    order_cap: int = 5040,
    tail_samples: int = 32,
) -> dict[int, float]:
    """Endpoint probabilities of first-improvement hill climbing from a uniform
    random start with uniformly random sweep orders.

    Exhaustive mode (n <= 12) enumerates every start and every first-sweep
    order exactly (orders are sampled once their count exceeds ``order_cap``);
    trajectories not converged after the first sweep continue by Monte Carlo.
    Monte Carlo mode runs ``samples`` independent climbs. Probabilities sum to
    1 up to float rounding either way.
    """
    n = instance.n
    if rng is None:
        rng = RngStream(0)
    if mode == "montecarlo":
        F = fitness_table(instance)
        counts: dict[int, int] = {}
        batch = 1 << 17
        done = 0
        while done < samples:
            m = min(batch, samples - done)
            starts = rng.gen.integers(0, 1 << n, size=m, dtype=np.int64)
            ends = _mc_climbs(F, n, starts, rng)
            vals, cnt = np.unique(ends, return_counts=True)
            for v, c in zip(vals.tolist(), cnt.tolist()):
                counts[v] = counts.get(v, 0) + c
            done += m
        return {v: c / samples for v, c in counts.items()}

    if mode != "exhaustive":
        raise ValueError("mode must be 'montecarlo' or 'exhaustive'")
    if n > 12:
        raise ValueError("exhaustive mode refused for n > 12")
    F = fitness_table(instance)
    facts = 1
    for i in range(2, n + 1):
        facts *= i
    if facts <= order_cap:
        orders = list(itertools.permutations(range(n)))
    else:
        orders = [tuple(rng.gen.permutation(n)) for _ in range(order_cap)]
    dist: dict[int, float] = {}
    weight = 1.0 / ((1 << n) * len(orders))
    pending: dict[int, float] = {}
    for start in range(1 << n):
        for order in orders:
            end = _first_improvement_sweep(start, order, F)
            if end == start or _is_local_opt(end, n, F):
                dist[end] = dist.get(end, 0.0) + weight
            else:
                pending[end] = pending.get(end, 0.0) + weight
    # Monte Carlo continuation for the (rare) trajectories still moving after
    # their first sweep.
    for state, w in pending.items():
        starts = np.full(tail_samples, state, dtype=np.int64)
        ends = _mc_climbs(F, n, starts, rng)
        for v in ends.tolist():
            dist[v] = dist.get(v, 0.0) + w / tail_samples
    return dist


def _is_local_opt(state: int, n: int, F: np.ndarray) -> bool:
    return all(F[state ^ (1 << g)] <= F[state] for g in range(n))


def theoretical_dsm(instance, dist: dict[int, float]) -> Dsm:
    """DSM of the endpoint distribution: pairwise marginals fed through the
    same normalized-information formula the statistical learner uses."""
    total = sum(dist.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {total}, expected 1")
    return dsm_from_distribution(dist, instance.n)


def hybrid_presence_population_size(ph: float, confidence: float, targets: str = "one") -> int:
    """Smallest population size m such that, with each of r fixed equiprobable
    endpoint patterns independently present with probability ``ph`` per
    member, all r appear somewhere with probability >= ``confidence``
    (inclusion-exclusion over the r missing events)."""
    r = {"one": 1, "two": 2, "all-three": 3}.get(targets)
    if r is None:
        raise ValueError("targets must be 'one', 'two', or 'all-three'")
    if not (0.0 < ph and r * ph <= 1.0):
        raise ValueError(f"need 0 < ph <= 1/{r} for {r} mutually exclusive patterns")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    m = 1
    while True:
        p_all = sum((-1) ** i * comb(r, i) * (1.0 - i * ph) ** m for i in range(r + 1))
        if p_all >= confidence:
            return m
        m += 1
