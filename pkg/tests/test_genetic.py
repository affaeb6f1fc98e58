import math

import numpy as np
import pytest

from sfqlink.genetic import GAConfig, ga_search, scan_register_size
from sfqlink.pulses import ClockGrid, PulsePattern, fitness, resonant_pattern
from sfqlink.transmon import ContractError, TransmonSpec, rotation_y

TARGET = rotation_y(math.pi / 2)


@pytest.fixture(scope="module")
def spec():
    return TransmonSpec.from_ghz(5.0, 200.0, levels=3)


def small(gens=15, seed=0, **kw):
    return GAConfig(population_size=20, generations=gens, rng_seed=seed, **kw)


def test_config_validation():
    with pytest.raises(ContractError):
        GAConfig(population_size=4, elite_count=5)
    with pytest.raises(ContractError):
        GAConfig(crossover_rate=1.5)
    with pytest.raises(ContractError):
        GAConfig(rng_seed=-1)
    GAConfig(population_size=4, elite_count=4)


def test_zero_generations_returns_seed(spec):
    grid = ClockGrid.for_qubit(spec, 4, 160)
    seed = resonant_pattern(spec, grid, math.pi / 2, math.pi / 40)
    res = ga_search(small(0), grid, spec, TARGET, math.pi / 40, [seed])
    # the seed is the best member of a population of its own single-bit mutants
    assert res.best_infidelity <= fitness(seed, spec, TARGET, math.pi / 40) + 1e-12
    assert len(res.history) == 1


def test_deterministic_and_thread_independent(spec):
    grid = ClockGrid.for_qubit(spec, 4, 120)
    a = ga_search(small(), grid, spec, TARGET, math.pi / 30)
    b = ga_search(small(), grid, spec, TARGET, math.pi / 30, threads=3)
    assert a.best_pattern.to_string() == b.best_pattern.to_string()
    assert a.history == b.history
    c = ga_search(small(seed=1), grid, spec, TARGET, math.pi / 30)
    assert c.history != a.history


def test_elitism_monotone(spec):
    grid = ClockGrid.for_qubit(spec, 4, 120)
    res = ga_search(small(30), grid, spec, TARGET, math.pi / 30)
    best = [h[1] for h in res.history]
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
    assert res.best_infidelity == pytest.approx(best[-1], abs=1e-10)


def test_all_elite_freezes(spec):
    grid = ClockGrid.for_qubit(spec, 4, 60)
    res = ga_search(GAConfig(population_size=6, generations=5, elite_count=6), grid, spec, TARGET, 0.1)
    assert len({h[2] for h in res.history}) == 1


def test_improves_over_resonant(spec):
    dth = 0.01596
    grid = ClockGrid.for_qubit(spec, 8, 800)
    seed = resonant_pattern(spec, grid, math.pi / 2, dth)
    res = ga_search(GAConfig(population_size=40, generations=25, rng_seed=0), grid, spec, TARGET, dth, [seed])
    assert res.best_infidelity < fitness(seed, spec, TARGET, dth) / 5


def test_scan_monotone(spec):
    rows = scan_register_size(spec, [math.pi / 20], [4], [40, 80, 120], small(8), TARGET)
    inf = [r.infidelity for r in rows]
    assert [r.register_bits for r in rows] == [40, 80, 120]
    assert all(b <= a + 1e-12 for a, b in zip(inf, inf[1:]))
    assert rows[1].duration_periods == 20


def test_resonant_scaling_slope(spec):
    ns = np.array([25, 50, 100, 200])
    inf = []
    for n in ns:
        grid = ClockGrid.for_qubit(spec, 2, 2 * n)
        p = resonant_pattern(spec, grid, math.pi / 2, math.pi / (2 * n))
        inf.append(fitness(p, spec, TARGET, math.pi / (2 * n)))
    slope = np.polyfit(np.log(ns), np.log(inf), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)
