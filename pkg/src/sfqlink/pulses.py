"""Clock-gridded SFQ bit patterns, their fitness, and jitter Monte Carlo."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from sfqlink.transmon import (
    ContractError,
    PulseEvent,
    TransmonSpec,
    gate_report,
    propagate_sequence,
    sfq_kick_unitary,
    spectrum,
)

MAX_TICKS = 100_000


class CapacityError(ContractError):
    """The clock grid is too short for the requested pulse train."""


@dataclass(frozen=True)
class ClockGrid:
    clock_frequency: float
    substeps_per_period: Fraction
    n_ticks: int

    def __post_init__(self):
        object.__setattr__(self, "substeps_per_period", Fraction(self.substeps_per_period))
        if self.substeps_per_period <= 1:
            raise ContractError("clock must be faster than the qubit (substeps > 1)")
        if not (1 <= self.n_ticks <= MAX_TICKS):
            raise ContractError(f"n_ticks must be in [1, {MAX_TICKS}]")

    @classmethod
    def for_qubit(cls, spec: TransmonSpec, substeps, n_ticks: int) -> "ClockGrid":
        s = Fraction(substeps)
        return cls(float(s) * spec.omega01 / (2 * math.pi), s, n_ticks)

    @property
    def tick(self) -> float:
        return 1.0 / self.clock_frequency

    @property
    def duration(self) -> float:
        return self.n_ticks / self.clock_frequency

    @property
    def periods(self) -> float:
        return self.n_ticks / float(self.substeps_per_period)


@dataclass(frozen=True)
class PulsePattern:
    grid: ClockGrid
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8).copy()
        if bits.ndim != 1 or bits.size != self.grid.n_ticks:
            raise ContractError("bit count must equal grid.n_ticks")
        if np.any(bits > 1):
            raise ContractError("bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, grid: ClockGrid, text: str) -> "PulsePattern":
        return cls(grid, np.frombuffer(text.strip().encode(), dtype=np.uint8) - ord("0"))

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @property
    def n_pulses(self) -> int:
        return int(self.bits.sum())

    @property
    def duration(self) -> float:
        return self.grid.duration


def resonant_pattern(spec: TransmonSpec, grid: ClockGrid, target_angle: float,
                     delta_theta: float, n_pulses: int | None = None) -> PulsePattern:
    """One pulse at the tick nearest each multiple of the qubit period.

    The pulse count defaults to round(target_angle / delta_theta); ties in
    tick placement go to the earlier tick.
    """
    n = round(target_angle / delta_theta) if n_pulses is None else n_pulses
    if n < 0:
        raise ContractError("pulse count must be non-negative")
    s = grid.substeps_per_period
    if grid.n_ticks < n * s:
        raise CapacityError(f"grid of {grid.n_ticks} ticks holds {float(grid.n_ticks / s):.2f} "
                            f"periods, need {n}")
    bits = np.zeros(grid.n_ticks, dtype=np.uint8)
    for j in range(n):
        bits[math.ceil(j * s - Fraction(1, 2))] = 1
    return PulsePattern(grid, bits)


def pattern_to_events(pattern: PulsePattern, jitter_sigma: float = 0.0,
                      rng_seed: int | None = 0) -> list[PulseEvent]:
    """Events at tick_index/clock_frequency with independent Gaussian offsets.

    Offsets are sigma * z with z drawn from a generator seeded by rng_seed, so
    runs at different sigma with the same seed share the random numbers.
    """
    if jitter_sigma < 0:
        raise ContractError("jitter_sigma must be non-negative")
    idx = np.flatnonzero(pattern.bits)
    nominal = idx / pattern.grid.clock_frequency
    if jitter_sigma > 0:
        z = np.random.default_rng(rng_seed).standard_normal(idx.size)
        offsets = jitter_sigma * z
    else:
        offsets = np.zeros(idx.size)
    events = [PulseEvent(float(t), float(o)) for t, o in zip(nominal, offsets)]
    events.sort(key=lambda e: e.time)
    return events


def fitness(pattern: PulsePattern, spec: TransmonSpec, target: np.ndarray, delta_theta: float) -> float:
    """Gate infidelity of the pattern against a 2x2 rotating-frame target."""
    u = propagate_sequence(spec, pattern_to_events(pattern), delta_theta, pattern.duration)
    return 1.0 - gate_report(spec, u, target, pattern.duration).avg_gate_fidelity


class GridEvaluator:
    """Vectorized infidelity of many bit patterns sharing one clock grid.

    Equivalent to `fitness` for every row, but propagates only the two
    computational columns and steps a whole population tick by tick.
    """

    def __init__(self, spec: TransmonSpec, grid: ClockGrid, target: np.ndarray, delta_theta: float):
        self.spec, self.grid = spec, grid
        self.target = np.asarray(target, dtype=complex)
        self.kick = sfq_kick_unitary(spec, delta_theta)
        self.step = np.exp(-1j * spectrum(spec) * grid.tick)
        k = np.arange(spec.levels)
        self.frame = np.exp(1j * k * spec.omega01 * grid.duration)

    def __call__(self, bits: np.ndarray) -> np.ndarray:
        bits = np.atleast_2d(np.asarray(bits, dtype=bool))
        pop, n = bits.shape
        if n != self.grid.n_ticks:
            raise ContractError("pattern length does not match the grid")
        d = self.spec.levels
        state = np.zeros((pop, d, 2), dtype=complex)
        state[:, 0, 0] = 1
        state[:, 1, 1] = 1
        kick_t = self.kick.T
        # tick i: kick (if bit set) at t_i, then free evolution to t_{i+1}
        for i in range(n):
            col = bits[:, i]
            if col.any():
                rows = np.flatnonzero(col)
                state[rows] = np.einsum("jk,pjl->pkl", kick_t, state[rows])
            state *= self.step[None, :, None]
        state *= self.frame[None, :, None]
        m = np.einsum("ji,pjl->pil", self.target.conj(), state[:, :2, :])
        norm = np.sum(np.abs(m) ** 2, axis=(1, 2))
        tr = m[:, 0, 0] + m[:, 1, 1]
        f = np.clip((norm + np.abs(tr) ** 2) / 6, 0.0, 1.0)
        return 1.0 - f


@dataclass(frozen=True)
class JitterStats:
    mean: float
    std: float
    noiseless: float
    trials: int

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.trials)


def jitter_robustness(pattern: PulsePattern, spec: TransmonSpec, target: np.ndarray,
                      delta_theta: float, sigma: float, trials: int, rng_seed: int = 0) -> JitterStats:
    """Monte Carlo infidelity under Gaussian pulse-timing jitter.

    Trial i draws its offsets from a stream derived from (rng_seed, i).
    """
    if trials < 1:
        raise ContractError("trials must be >= 1")
    base = fitness(pattern, spec, target, delta_theta)
    if sigma == 0:
        return JitterStats(base, 0.0, base, trials)
    seeds = np.random.SeedSequence(rng_seed).spawn(trials)
    dur = pattern.duration
    vals = np.empty(trials)
    for i, ss in enumerate(seeds):
        ev = pattern_to_events(pattern, sigma, np.random.default_rng(ss))
        u = propagate_sequence(spec, ev, delta_theta, dur)
        vals[i] = 1.0 - gate_report(spec, u, target, dur).avg_gate_fidelity
    return JitterStats(float(vals.mean()), float(vals.std(ddof=1)) if trials > 1 else 0.0, base, trials)
