"""Behavioral model of the SFQ pattern generator, readout demodulator and MUX/DEMUX.

Everything here is integer/tick arithmetic; clocks are ideal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

# junctions per element, as used in the MUX/DEMUX cost estimates
JUNCTIONS = {
    "merger": 5,
    "splitter": 3,
    "ndro": 8,
    "squid_stack_stage": 2,
    "mux_overhead_per_channel": 1,
    "demux_receiver": 3,
}


class StitchingError(RuntimeError):
    """Two register outputs reached the merger in the same tick."""


class RegisterError(RuntimeError):
    pass


class ReadoutMode(str, Enum):
    MERGER_SYNC = "merger_sync"
    P2S = "p2s"


@dataclass(frozen=True)
class PGUConfig:
    register_bits: int
    register_count: int
    fast_clock: int  # Hz
    readout_mode: ReadoutMode = ReadoutMode.MERGER_SYNC

    def __post_init__(self):
        if self.register_bits < 1 or self.register_count < 1:
            raise ValueError("register_bits and register_count must be >= 1")
        object.__setattr__(self, "readout_mode", ReadoutMode(self.readout_mode))

    @property
    def readout_clock(self) -> Fraction:
        return Fraction(self.fast_clock) / self.register_bits


@dataclass
class S2PRegister:
    """NDRO-based serial-in/parallel-out register of fixed length."""

    n_bits: int
    cells: np.ndarray = field(default=None, repr=False)
    loaded: bool = False

    def __post_init__(self):
        if self.cells is None:
            self.cells = np.zeros(self.n_bits, dtype=np.uint8)

    @property
    def bits(self) -> np.ndarray:
        """Contents in load order (cell N-1 holds the first bit shifted in)."""
        return self.cells[::-1].copy()

    def read(self) -> np.ndarray:
        if not self.loaded:
            raise RegisterError("register read before load")
        # wave-pipelined readout starts from the last cell
        return self.cells[::-1].copy()


def load_pattern(reg: S2PRegister, bits) -> S2PRegister:
    """Serially shift `bits` into the register with the load clock."""
    bits = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
    if bits.size != reg.n_bits:
        raise RegisterError(f"pattern has {bits.size} bits, register holds {reg.n_bits}")
    if np.any(bits > 1):
        raise RegisterError("bits must be 0 or 1")
    cells = np.zeros(reg.n_bits, dtype=np.uint8)
    for b in bits:
        cells[1:] = cells[:-1].copy()
        cells[0] = b
    reg.cells = cells
    reg.loaded = True
    return reg


def merge(streams: Sequence[np.ndarray]) -> np.ndarray:
    """Asynchronous OR of equally long tick-aligned streams; collisions are errors."""
    stack = np.vstack(streams)
    hits = stack.sum(axis=0)
    bad = np.flatnonzero(hits > 1)
    if bad.size:
        raise StitchingError(f"{bad.size} merger collisions, first at tick {int(bad[0])}")
    return hits.astype(np.uint8)


def stream_pgu(config: PGUConfig, registers: Sequence[S2PRegister]) -> list[tuple[int, int]]:
    """Fast-clock output of the PGU as (tick, bit) pairs.

    Register m is released by its SYNC gate at tick m*N, so register windows
    abut without gap or overlap at the seams.
    """
    n, m = config.register_bits, config.register_count
    if len(registers) != m:
        raise RegisterError(f"expected {m} registers, got {len(registers)}")
    for r in registers:
        if r.n_bits != n:
            raise RegisterError("register length differs from config.register_bits")
        if not r.loaded:
            raise RegisterError("all registers must be loaded before streaming")
    total = n * m
    if config.readout_mode is ReadoutMode.MERGER_SYNC:
        lanes = []
        for k, r in enumerate(registers):
            lane = np.zeros(total, dtype=np.uint8)
            lane[k * n:(k + 1) * n] = r.read()
            lanes.append(lane)
        out = merge(lanes)
    else:
        # P2S: parallel load, then shift out one bit per fast-clock tick
        out = np.empty(total, dtype=np.uint8)
        for k, r in enumerate(registers):
            cells = r.read()[::-1]  # parallel-loaded, output cell at the end
            head = n - 1
            for i in range(n):
                out[k * n + i] = cells[head]
                head -= 1
    return list(enumerate(out.tolist()))


def p2s_junction_overhead(n_bits: int) -> int:
    if n_bits < 2:
        raise ValueError("P2S register needs at least 2 bits")
    return 3 * n_bits - 4


class MuxVariant(str, Enum):
    MERGER_TREE = "merger_tree"
    SQUID_STACK = "squid_stack"


@dataclass(frozen=True)
class MuxSpec:
    channels: int
    variant: MuxVariant = MuxVariant.MERGER_TREE

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError("channels must be >= 1")
        object.__setattr__(self, "variant", MuxVariant(self.variant))


@dataclass(frozen=True)
class DemuxSpec:
    channels: int

    def __post_init__(self):
        if self.channels < 1:
            raise ValueError("channels must be >= 1")


def mux_junctions(spec: MuxSpec) -> int:
    n = spec.channels
    per = JUNCTIONS["merger"] if spec.variant is MuxVariant.MERGER_TREE else JUNCTIONS["squid_stack_stage"]
    return per * n + JUNCTIONS["mux_overhead_per_channel"] * n


def demux_junctions(spec: DemuxSpec) -> int:
    n = spec.channels
    return JUNCTIONS["splitter"] * n + JUNCTIONS["ndro"] * n + JUNCTIONS["demux_receiver"]


class DemodBin(str, Enum):
    EVEN = "even_bin"
    ODD = "odd_bin"

    @property
    def bit(self) -> int:
        return 0 if self is DemodBin.EVEN else 1


@dataclass(frozen=True)
class DemodConfig:
    clock_period: float
    delay_threshold: float | None = None

    def __post_init__(self):
        if self.delay_threshold is None:
            object.__setattr__(self, "delay_threshold", self.clock_period / 2)
        if not (0 < self.delay_threshold < self.clock_period):
            raise ValueError("need 0 < delay_threshold < clock_period")


def jpm_delay_demod(config: DemodConfig, pulse_delay: float) -> DemodBin:
    """Race-arbiter binning of a probe pulse delay; the threshold itself goes to the odd bin."""
    if not (0 <= pulse_delay < config.clock_period):
        raise ValueError("pulse_delay must lie in [0, clock_period)")
    return DemodBin.ODD if pulse_delay >= config.delay_threshold else DemodBin.EVEN


def tff_divide(pulses: Iterable) -> list:
    """Toggle flip-flop: emits on every second input pulse (state starts at 0)."""
    out = []
    state = 0
    for p in pulses:
        state ^= 1
        if state == 0:
            out.append(p)
    return out


class FrameError(ValueError):
    pass


def timeslot_mux(channel_results: Iterable[tuple[int, int]], frame_length: int) -> list[int]:
    """Serialize (channel, bit) results into one frame of Manchester-coded slots.

    Slot i spans two time bins: a pulse in the even bin means bit 0, in the
    odd bin bit 1; an empty slot means channel i reported nothing.
    """
    stream = [0] * (2 * frame_length)
    used = set()
    for ch, bit in channel_results:
        if not 0 <= ch < frame_length:
            raise FrameError(f"channel {ch} outside frame of {frame_length} slots")
        if ch in used:
            raise FrameError(f"channel {ch} reported twice in one frame")
        if bit not in (0, 1):
            raise FrameError("bits must be 0 or 1")
        used.add(ch)
        stream[2 * ch + bit] = 1
    return stream


def timeslot_demux(stream: Sequence[int]) -> list[tuple[int, int]]:
    if len(stream) % 2:
        raise FrameError("stream length must be even")
    out = []
    for ch in range(len(stream) // 2):
        even, odd = stream[2 * ch], stream[2 * ch + 1]
        if even and odd:
            raise FrameError(f"slot {ch} has pulses in both bins")
        if even or odd:
            out.append((ch, int(odd)))
    return out
