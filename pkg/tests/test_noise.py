import numpy as np
import pytest

from pxsll import NoiseConfig, default_level, draw_noise_vars, noised_instance, shortfall
from pxsll import problems
from pxsll.dependency import exhaustive_vig, fitness_table
from pxsll.oracle import enumerate_local_optima

from conftest import bits


def test_shortfall():
    assert shortfall(3, 5) == 2
    assert shortfall(5, 5) == 0
    assert shortfall(7.5, 5) == 0


def _flat3(n):
    # constant f_true = 3, so the gate's effect is fully visible
    return problems.ProblemInstance(
        n, "example-fixture", lambda b: 3.0,
        value_batch_fn=lambda m: np.full(m.shape[0], 3.0),
    )


def test_gate_lifts_when_unitation_divides():
    cfg = NoiseConfig(noise_vars=(0, 1, 2, 3), level=5.0, modulus=2)
    inst = noised_instance(_flat3(6), cfg)
    assert inst.value(bits("111100")) == 5.0  # u over noise vars = 4
    assert inst.value(bits("111000")) == 3.0  # u = 3, gate closed
    assert inst.value(bits("000000")) == 5.0  # u = 0 divides


def test_gate_never_disturbs_above_level():
    high = problems.ProblemInstance(4, "example-fixture", lambda b: 9.0,
                                    value_batch_fn=lambda m: np.full(m.shape[0], 9.0))
    cfg = NoiseConfig(noise_vars=(0, 1), level=5.0, modulus=2)
    inst = noised_instance(high, cfg)
    for text in ("0000", "1100", "0110"):
        assert inst.value(bits(text)) == 9.0


def test_zero_size_means_no_noise():
    inner = problems.trap_concatenation(4, 2)
    cfg = NoiseConfig(noise_vars=(), level=6.0)
    assert noised_instance(inner, cfg) is inner


def test_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(noise_vars=(1, 1), level=2.0)
    with pytest.raises(ValueError):
        NoiseConfig(noise_vars=(0,), level=2.0, modulus=0)
    with pytest.raises(ValueError):
        noised_instance(problems.onemax(3), NoiseConfig(noise_vars=(5,), level=2.0))


def test_draw_noise_vars():
    vs = draw_noise_vars(10, 50, seed=3)
    assert len(vs) == 5 and len(set(vs)) == 5
    assert vs == draw_noise_vars(10, 50, seed=3)
    assert draw_noise_vars(10, 100, seed=1) == tuple(range(10))
    assert draw_noise_vars(10, 0, seed=1) == ()
    with pytest.raises(ValueError):
        draw_noise_vars(10, 101, seed=1)


def test_default_level_midpoint():
    inst = problems.trap_concatenation(5, 10)  # optimum 50, fully deceived 40
    assert default_level(inst) == 45.0
    with pytest.raises(ValueError):
        default_level(problems.onemax_squared(4))  # no analytic deceptive level


def _noised_trap(n_blocks=3, percent=50):
    inner = problems.trap_concatenation(4, n_blocks)
    cfg = NoiseConfig(
        noise_vars=draw_noise_vars(inner.n, percent, seed=7),
        level=default_level(inner),
        modulus=2,
        seed=7,
    )
    return inner, noised_instance(inner, cfg)


def test_noised_equals_true_at_or_above_level_exhaustive():
    inner, noised = _noised_trap(n_blocks=4, percent=50)  # n = 16
    ft = fitness_table(inner)
    fn = fitness_table(noised)
    level = default_level(inner)
    above = ft >= level
    assert np.array_equal(fn[above], ft[above])
    assert np.all(fn >= ft)
    assert np.all(fn[~above] <= level)


def test_true_local_optima_at_or_above_level_persist():
    inner, noised = _noised_trap(n_blocks=3, percent=70)  # n = 12
    level = default_level(inner)
    true_opts = {s.key(): s.fitness for s in enumerate_local_optima(inner)}
    noised_opts = {s.key() for s in enumerate_local_optima(noised)}
    for key, fit in true_opts.items():
        if fit >= level:
            assert key in noised_opts
    assert noised.known_optimum == inner.known_optimum


def test_spiked_fixture_gains_exactly_the_cross_block_edges(fe_spiked):
    base = problems.trap_concatenation(4, 2)
    vig_true = exhaustive_vig(base, "nonmonotonic")
    vig_spiked = exhaustive_vig(fe_spiked, "nonmonotonic")
    gained = vig_spiked.adj & ~vig_true.adj
    expected = np.zeros((8, 8), dtype=bool)
    for g in (1, 2):          # the two variables identifying the spiked block
        for h in (4, 5, 6, 7):  # every variable of the other block
            expected[g, h] = expected[h, g] = True
    assert np.array_equal(gained, expected)
    assert vig_true.is_subgraph_of(vig_spiked)


def test_spiked_fixture_true_local_optima_persist(fe_spiked):
    opts = {s.key() for s in enumerate_local_optima(fe_spiked)}
    for text in ("0000 0000", "0000 1111", "1111 0000", "1111 1111"):
        assert bits(text).tobytes() in opts
