"""Genetic-algorithm search over clock-gridded SFQ bit patterns."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from sfqlink.pulses import CapacityError, ClockGrid, GridEvaluator, PulsePattern, resonant_pattern
from sfqlink.transmon import ContractError, FidelityReport, TransmonSpec, gate_report, propagate_sequence
from sfqlink.pulses import pattern_to_events


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    generations: int = 500
    crossover_rate: float = 0.7
    mutation_rate_per_bit: float | None = None  # None -> 1/N
    elite_count: int = 2
    tournament_size: int = 3
    rng_seed: int = 0
    init_density: float | None = None  # None -> 1/substeps for unseeded members

    def __post_init__(self):
        if self.population_size < 1 or self.tournament_size < 1 or self.generations < 0:
            raise ContractError("population, tournament and generations must be positive")
        if not (0 <= self.elite_count <= self.population_size):
            raise ContractError("elite_count cannot exceed population_size")
        if not 0 <= self.crossover_rate <= 1:
            raise ContractError("crossover_rate must be in [0, 1]")
        if self.mutation_rate_per_bit is not None and not 0 <= self.mutation_rate_per_bit <= 1:
            raise ContractError("mutation_rate_per_bit must be in [0, 1]")
        if not 0 <= self.rng_seed < 2**64:
            raise ContractError("rng_seed must be an unsigned 64-bit integer")


@dataclass
class OptimizationResult:
    best_pattern: PulsePattern
    best_report: FidelityReport
    history: list[tuple[int, float, float]] = field(default_factory=list)
    evaluations: int = 0

    @property
    def best_infidelity(self) -> float:
        return self.best_report.infidelity


class _CachedFitness:
    """Bit-string keyed cache in front of a batch evaluator; chunked over threads."""

    def __init__(self, evaluate: Callable[[np.ndarray], np.ndarray], threads: int = 1, chunk: int = 25):
        self.evaluate = evaluate
        self.threads = max(1, threads)
        self.chunk = chunk
        self.cache: dict[bytes, float] = {}
        self.evaluations = 0

    def __call__(self, pop: np.ndarray) -> np.ndarray:
        keys = [row.tobytes() for row in pop]
        todo = []
        seen = set()
        for i, k in enumerate(keys):
            if k not in self.cache and k not in seen:
                todo.append(i)
                seen.add(k)
        if todo:
            rows = pop[todo]
            parts = [rows[i:i + self.chunk] for i in range(0, len(rows), self.chunk)]
            if self.threads > 1 and len(parts) > 1:
                with ThreadPoolExecutor(self.threads) as ex:
                    vals = list(ex.map(self.evaluate, parts))
            else:
                vals = [self.evaluate(p) for p in parts]
            for i, v in zip(todo, np.concatenate(vals)):
                self.cache[keys[i]] = float(v)
            self.evaluations += len(todo)
        return np.array([self.cache[k] for k in keys])


def _ranking(pop: np.ndarray, fit: np.ndarray) -> list[int]:
    # equal fitness -> lexicographically smaller bit string first
    return sorted(range(len(pop)), key=lambda i: (fit[i], pop[i].tobytes()))


def ga_search(config: GAConfig, grid: ClockGrid, spec: TransmonSpec, target: np.ndarray,
              delta_theta: float, seed_patterns: Sequence[PulsePattern] | None = None,
              threads: int = 1, on_generation: Callable[[int, float, float], None] | None = None
              ) -> OptimizationResult:
    """Tournament selection, single-point crossover, per-bit mutation, elitism.

    Seed patterns enter the initial population verbatim; the remaining members
    are mutated copies of the seeds (or random bit strings when unseeded).
    Fitness is a pure function of the bit string, so the result does not
    depend on `threads`.
    """
    n = grid.n_ticks
    size = config.population_size
    pm = config.mutation_rate_per_bit if config.mutation_rate_per_bit is not None else 1.0 / n
    rng = np.random.default_rng(config.rng_seed)
    evaluate = _CachedFitness(GridEvaluator(spec, grid, target, delta_theta), threads)

    seeds = [p.bits for p in (seed_patterns or [])]
    for s in seeds:
        if s.size != n:
            raise ContractError("seed pattern does not match the grid")
    pop = np.empty((size, n), dtype=np.uint8)
    for i in range(size):
        if i < len(seeds):
            pop[i] = seeds[i]
        elif seeds:
            base = seeds[i % len(seeds)]
            flip = rng.random(n) < max(pm, 1.0 / n)
            pop[i] = base ^ flip
        else:
            density = config.init_density
            if density is None:
                density = 1.0 / float(grid.substeps_per_period)
            pop[i] = rng.random(n) < density

    fit = evaluate(pop)
    order = _ranking(pop, fit)
    history = [(0, float(fit[order[0]]), float(fit.mean()))]
    if on_generation:
        on_generation(*history[-1])

    for gen in range(1, config.generations + 1):
        rank = np.empty(size, dtype=np.int64)
        rank[order] = np.arange(size)
        children = [pop[i].copy() for i in order[:config.elite_count]]
        while len(children) < size:
            picks = rng.integers(0, size, size=(2, config.tournament_size))
            p1 = pop[picks[0][np.argmin(rank[picks[0]])]]
            p2 = pop[picks[1][np.argmin(rank[picks[1]])]]
            c1, c2 = p1.copy(), p2.copy()
            if n > 1 and rng.random() < config.crossover_rate:
                cut = int(rng.integers(1, n))
                c1[cut:], c2[cut:] = p2[cut:], p1[cut:]
            for c in (c1, c2):
                if pm > 0:
                    c ^= (rng.random(n) < pm).astype(np.uint8)
                if len(children) < size:
                    children.append(c)
        pop = np.array(children, dtype=np.uint8)
        fit = evaluate(pop)
        order = _ranking(pop, fit)
        history.append((gen, float(fit[order[0]]), float(fit.mean())))
        if on_generation:
            on_generation(*history[-1])

    best = PulsePattern(grid, pop[order[0]])
    u = propagate_sequence(spec, pattern_to_events(best), delta_theta, grid.duration)
    report = gate_report(spec, u, target, grid.duration)
    return OptimizationResult(best, report, history, evaluations=evaluate.evaluations)


@dataclass(frozen=True)
class ScanRow:
    tip_angle_rad: float
    substeps: Fraction
    register_bits: int
    duration_periods: float
    infidelity: float


def scan_register_size(spec: TransmonSpec, tip_angles: Iterable[float], substeps: Iterable,
                       sizes: Iterable[int], ga: GAConfig, target: np.ndarray,
                       target_angle: float = math.pi / 2, threads: int = 1) -> list[ScanRow]:
    """Best GA infidelity over a (tip angle, clock substeps, register size) grid.

    Sizes are visited in increasing order; each run is seeded with the
    resonant pattern when it fits and with the previous size's best pattern
    zero-padded at the end (trailing idle ticks do not change the gate in the
    rotating frame), so larger registers never do worse.
    """
    tips, subs, sz = list(tip_angles), [Fraction(s) for s in substeps], sorted(sizes)
    if not (tips and subs and sz):
        raise ContractError("scan lists must be non-empty")
    rows = []
    for tip in tips:
        for s in subs:
            prev = None
            for n in sz:
                grid = ClockGrid.for_qubit(spec, s, n)
                seeds = []
                if prev is not None:
                    padded = np.zeros(n, dtype=np.uint8)
                    padded[:prev.size] = prev[:n]
                    seeds.append(PulsePattern(grid, padded))
                try:
                    seeds.append(resonant_pattern(spec, grid, target_angle, tip))
                except CapacityError:
                    pass
                res = ga_search(ga, grid, spec, target, tip, seeds or None, threads=threads)
                prev = res.best_pattern.bits
                rows.append(ScanRow(tip, s, n, grid.periods, res.best_infidelity))
    return rows
