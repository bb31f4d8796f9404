import numpy as np
import pytest

from pxsll import (
    BudgetExhausted,
    EvalBudget,
    OptimumReached,
    RngStream,
    Solution,
    evaluate,
    unitation,
)
from pxsll.core import bits_from_int, int_from_bits
from pxsll import problems

from conftest import bits


def test_unitation():
    assert unitation(bits("0000")) == 0
    assert unitation(bits("1111")) == 4
    assert unitation(bits("0110")) == 2


def test_evaluate_dec5_concatenation():
    inst = problems.trap_concatenation(5, 2)
    budget = EvalBudget(10, target=None)
    assert evaluate(inst, Solution(np.ones(10, dtype=np.uint8)), budget) == 10.0
    assert evaluate(inst, Solution(np.zeros(10, dtype=np.uint8)), budget) == 8.0
    assert budget.used == 2


def test_evaluate_caches_fitness():
    inst = problems.onemax(4)
    budget = EvalBudget(5)
    s = Solution(bits("0110"))
    assert s.fitness is None
    evaluate(inst, s, budget)
    assert s.fitness == 2.0


def test_evaluate_budget_exhausted_at_limit():
    inst = problems.onemax(4)
    budget = EvalBudget(1)
    evaluate(inst, Solution(bits("0000")), budget)
    with pytest.raises(BudgetExhausted):
        evaluate(inst, Solution(bits("0001")), budget)
    assert budget.used == 1  # never exceeds the limit


def test_evaluate_length_mismatch():
    inst = problems.onemax(4)
    with pytest.raises(ValueError):
        evaluate(inst, Solution(bits("00000")), EvalBudget(5))


def test_budget_target_signal():
    inst = problems.onemax(3)
    budget = EvalBudget(10, target=3.0)
    evaluate(inst, Solution(bits("011")), budget)
    assert budget.ffe_at_target is None
    with pytest.raises(OptimumReached):
        evaluate(inst, Solution(bits("111")), budget)
    assert budget.ffe_at_target == 2
    assert budget.best_fitness == 3.0


def test_budget_best_tracking():
    inst = problems.onemax(3)
    budget = EvalBudget(10)
    for text in ("010", "111", "001"):
        evaluate(inst, Solution(bits(text)), budget)
    assert budget.best_fitness == 3.0
    assert list(budget.best_bits) == [1, 1, 1]
    assert budget.ffe_of_best == 2


def test_zero_budget_allowed():
    budget = EvalBudget(0)
    assert budget.exhausted
    with pytest.raises(BudgetExhausted):
        evaluate(problems.onemax(2), Solution(bits("00")), budget)


def test_solution_mutation_invalidates_cache():
    s = Solution(bits("0101"), fitness=2.0)
    s.flip(0)
    assert s.fitness is None
    s = Solution(bits("0101"), fitness=2.0)
    s.write_mask(np.array([1, 2]), bits("1111"))
    assert s.fitness is None


def test_solution_copy_is_independent():
    s = Solution(bits("0101"), fitness=2.0)
    c = s.copy()
    c.flip(0)
    assert list(s.bits) == [0, 1, 0, 1]
    assert s.fitness == 2.0


def test_rng_stream_reproducible():
    a = RngStream(42).gen.integers(0, 1000, size=8)
    b = RngStream(42).gen.integers(0, 1000, size=8)
    assert np.array_equal(a, b)


def test_rng_children_are_independent_and_deterministic():
    r1 = RngStream(7)
    c1, c2 = r1.child(), r1.child()
    r2 = RngStream(7)
    d1, d2 = r2.child(), r2.child()
    assert np.array_equal(c1.gen.random(4), d1.gen.random(4))
    assert np.array_equal(c2.gen.random(4), d2.gen.random(4))
    assert not np.array_equal(RngStream(7).child().gen.random(4), RngStream(8).child().gen.random(4))


def test_int_codec_roundtrip():
    for x in (0, 1, 5, 63, 64, 511):
        assert int_from_bits(bits_from_int(x, 10)) == x
    assert list(bits_from_int(6, 8)) == [0, 1, 1, 0, 0, 0, 0, 0]
