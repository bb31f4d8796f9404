"""Acceptance gate: one test per criterion, each printing a pass/fail line.

The desk-scale protocol replaces the original large-budget experiments:
criteria 1-9 are exact fixture/oracle checks, 10-12 are scaled-down
quantitative runs, 13 is a qualitative shape check.
"""

import statistics
import time

import numpy as np
import pytest

from pxsll import (
    Dsm,
    EvalBudget,
    MaskShareStats,
    RngStream,
    Vig,
    build_lt,
    build_px_lt,
    exhaustive_vig,
    is_perfect,
    ltop_ws,
    px_masks,
)
from pxsll import problems
from pxsll.core import int_from_bits
from pxsll.dependency import fitness_table
from pxsll.noise import NoiseConfig, default_level, draw_noise_vars, noised_instance
from pxsll.optimizers import run_optimizer
from pxsll.oracle import (
    enumerate_local_optima,
    fihc_endpoint_distribution,
    hybrid_presence_population_size,
    theoretical_dsm,
)

from conftest import bits, block_vig9, ref_dsm
from test_pxlt import theorem1_trials


def criterion(number, label):
    def wrap(fn):
        def run():
            started = time.perf_counter()
            try:
                fn()
            except BaseException:
                print(f"[ACCEPTANCE] criterion {number:2d} FAIL: {label}")
                raise
            elapsed = time.perf_counter() - started
            print(f"[ACCEPTANCE] criterion {number:2d} PASS: {label} ({elapsed:.1f}s)")

        run.__name__ = fn.__name__
        return run

    return wrap


@criterion(1, "PX worked example masks {2,3} and {5,6,8}")
def test_criterion_01_px_worked_example():
    p1, p2 = bits("111100101"), bits("100111111")
    masks = set(px_masks(block_vig9(), p1, p2))
    assert masks == {frozenset({1, 2}), frozenset({4, 5, 7})}


@criterion(2, "exhaustive VIGs match the 9-variable block structure")
def test_criterion_02_exhaustive_vigs():
    expected = block_vig9()
    assert exhaustive_vig(problems.bim4_triple_overlap_sum(), "nonlinear") == expected
    assert exhaustive_vig(problems.bim4_triple_overlap_product(), "nonmonotonic") == expected
    squared = problems.onemax_squared(9)
    assert exhaustive_vig(squared, "nonlinear") == Vig.complete(9)
    assert exhaustive_vig(squared, "nonmonotonic").edge_count == 0


@criterion(3, "standard LT merge order and missing {5,6,8} node")
def test_criterion_03_standard_lt_fixture():
    tree = build_lt(ref_dsm())
    internal = tree.internal_nodes()
    first = [tuple(v + 1 for v in nd.members) for nd in internal[:4]]
    assert first == [(1, 2), (3, 4), (7, 8), (3, 4, 6)]
    assert all(nd.strength == 0.99 for nd in internal[:3])
    assert internal[3].strength == pytest.approx(0.74, abs=1e-12)
    assert frozenset({4, 5, 7}) not in tree.node_sets()  # {5,6,8} 1-based


@criterion(4, "PX-LT contains both PX masks of the worked example")
def test_criterion_04_px_lt_fixture():
    tree = build_px_lt(ref_dsm(), bits("111100101"), bits("100111111"))
    sets = tree.node_sets()
    assert frozenset({1, 2}) in sets
    assert frozenset({4, 5, 7}) in sets


@criterion(5, "1000-trial randomized PX-mask containment (perfect DSMs)")
def test_criterion_05_theorem_property_suite():
    assert theorem1_trials(1000, seed=20240) == 0


@criterion(6, "exhaustive PX conservation and trichotomy at n = 9")
def test_criterion_06_conservation_and_trichotomy():
    vig = block_vig9()
    comps_by_diff = [
        [sum(1 << v for v in mask) for mask in px_masks(vig, bits_of(d), np.zeros(9, np.uint8))]
        for d in range(512)
    ]
    f_sum = fitness_table(problems.bim4_triple_overlap_sum())
    f_prod = fitness_table(problems.bim4_triple_overlap_product())
    a = np.arange(512, dtype=np.int64)
    for d in range(1, 512):
        b = a ^ d
        for comp in comps_by_diff[d]:
            o1, o2 = a ^ comp, b ^ comp
            # additive form: component exchange conserves the fitness sum
            assert np.all(np.abs(f_sum[o1] + f_sum[o2] - f_sum[a] - f_sum[b]) <= 1e-9)
            # multiplicative form: oppositely signed parent/offspring relations
            d1 = np.sign(f_prod[o1] - f_prod[a])
            d2 = np.sign(f_prod[o2] - f_prod[b])
            assert np.all(d1 == -d2)


def bits_of(x):
    return np.array([(x >> i) & 1 for i in range(9)], dtype=np.uint8)


def _ring_distribution(samples, seed, ring):
    return fihc_endpoint_distribution(ring, mode="montecarlo", rng=RngStream(seed), samples=samples)


@criterion(7, "hill-climb endpoint oracle matches the reference DSM values")
def test_criterion_07_endpoint_oracle():
    dec3 = problems.trap_ring(3, 1, 3)
    dist = _ring_distribution(1_200_000, 31, dec3)
    expected_states = {
        int_from_bits(bits(t)) for t in ("000000", "111111", "111000", "001110", "100011")
    }
    assert set(dist) == expected_states
    p0 = dist[int_from_bits(bits("000000"))]
    p1 = dist[int_from_bits(bits("111111"))]
    ph = statistics.mean(
        dist[int_from_bits(bits(t))] for t in ("111000", "001110", "100011")
    )
    assert abs(p0 + p1 + 3 * ph - 1.0) <= 1e-9
    dsm = theoretical_dsm(dec3, dist)
    assert dsm.entry(0, 1) == pytest.approx(0.47, abs=0.02)
    assert dsm.entry(0, 2) == pytest.approx(0.19, abs=0.02)
    assert dsm.entry(1, 3) == pytest.approx(0.17, abs=0.02)
    assert dsm.entry(0, 3) == pytest.approx(0.08, abs=0.02)

    dec4 = problems.trap_ring(4, 1, 3)
    dist4 = _ring_distribution(1_200_000, 37, dec4)
    dsm4 = theoretical_dsm(dec4, dist4)
    assert dsm4.entry(0, 1) == pytest.approx(0.34, abs=0.03)
    assert dsm4.entry(0, 3) == pytest.approx(0.15, abs=0.03)
    assert dsm4.entry(1, 2) == pytest.approx(1.0, abs=0.03)
    assert dsm4.entry(0, 4) == pytest.approx(0.02, abs=0.03)
    assert dsm4.entry(1, 4) == pytest.approx(0.02, abs=0.03)


@criterion(8, "hybrid presence population sizes 50 / 57 / 62")
def test_criterion_08_population_sizes():
    dec3 = problems.trap_ring(3, 1, 3)
    dist = _ring_distribution(2_000_000, 41, dec3)
    ph = statistics.mean(
        dist[int_from_bits(bits(t))] for t in ("111000", "001110", "100011")
    )
    assert hybrid_presence_population_size(ph, 0.99, "one") == 50
    assert hybrid_presence_population_size(ph, 0.99, "two") == 57
    assert hybrid_presence_population_size(ph, 0.99, "all-three") == 62


@criterion(9, "noise keeps the top of the landscape and adds exactly the cross edges")
def test_criterion_09_noise_invariants():
    spiked = problems.double_trap4_spiked()
    base = problems.trap_concatenation(4, 2)
    gained = exhaustive_vig(spiked, "nonmonotonic").adj & ~exhaustive_vig(base, "nonmonotonic").adj
    expected = np.zeros((8, 8), dtype=bool)
    for g in (1, 2):
        for h in (4, 5, 6, 7):
            expected[g, h] = expected[h, g] = True
    assert np.array_equal(gained, expected)
    spiked_optima = {s.key() for s in enumerate_local_optima(spiked)}
    for text in ("0000 0000", "0000 1111", "1111 0000", "1111 1111"):
        assert bits(text).tobytes() in spiked_optima

    inner = problems.trap_concatenation(4, 4)  # n = 16, exhaustive
    level = default_level(inner)
    cfg = NoiseConfig(
        noise_vars=draw_noise_vars(16, 50, seed=99), level=level, modulus=2, seed=99
    )
    noised = noised_instance(inner, cfg)
    ft, fn = fitness_table(inner), fitness_table(noised)
    above = ft >= level
    assert np.array_equal(fn[above], ft[above])


def _battery(opt, inst, seeds, limit, instrument=False):
    records = []
    for seed in seeds:
        budget = EvalBudget(limit, target=inst.known_optimum)
        stats = MaskShareStats(inst.ground_truth_vig) if instrument else None
        run_optimizer(opt, inst, RngStream(seed), budget, stats=stats)
        records.append((budget, stats))
    return records


def _success_rate(records):
    return sum(1 for b, _ in records if b.ffe_at_target is not None) / len(records)


@criterion(10, "P3 solves Dec5 at n = 50 (30 seeds, 1e6 FFE budget)")
def test_criterion_10_p3_baseline():
    inst = problems.trap_concatenation(5, 10)
    records = _battery("p3", inst, range(1, 31), 10 ** 6)
    assert _success_rate(records) >= 0.8
    ffes = [b.ffe_at_target for b, _ in records if b.ffe_at_target is not None]
    assert statistics.median(ffes) <= 10 ** 5


@criterion(11, "PX-OM-LTopWS matches P3 on the Dec5 family")
def test_criterion_11_px_om_effectiveness():
    for inst in (problems.trap_concatenation(5, 10), problems.trap_ring(5, 1, 13)):
        p3 = _success_rate(_battery("p3", inst, range(1, 31), 10 ** 6))
        px = _success_rate(_battery("p3-px-om-ltopws", inst, range(1, 31), 10 ** 6))
        assert px >= p3 >= 0.8


@criterion(12, "PX-mask share of PX-OM-LTopWS at least 10x classic OM's")
def test_criterion_12_mask_share_ratio():
    inst = problems.trap_concatenation(5, 10)
    classic = _battery("p3", inst, range(1, 31), 10 ** 6, instrument=True)
    px = _battery("p3-px-om-ltopws", inst, range(1, 31), 10 ** 6, instrument=True)
    med_classic = statistics.median(s.share for _, s in classic)
    med_px = statistics.median(s.share for _, s in px)
    assert med_px > 0
    ratio = float("inf") if med_classic == 0 else med_px / med_classic
    assert ratio >= 10.0, (
        f"median PX-mask share {med_px:.4f} vs classic {med_classic:.4f} "
        f"(ratio {ratio:.2f}, required >= 10)"
    )
