"""Single-transmon dynamics under delta-function SFQ kicks.

Levels follow E_k = k*omega01 - alpha*k*(k-1)/2 (rad/s, E_0 = 0). Propagators
are computed in the lab frame; fidelities are evaluated after moving to the
frame co-rotating at omega01.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sfqlink.constants import CONSTANTS, PhysicalConstants

UNITARITY_TOL = 1e-10
MAX_LEVELS = 10


class ContractError(ValueError):
    """Raised when a caller violates an operation precondition."""


@dataclass(frozen=True)
class TransmonSpec:
    levels: int
    omega01: float
    anharmonicity_alpha: float
    self_capacitance: float = 100e-15
    coupling_capacitance: float = 100e-18

    def __post_init__(self):
        if not (2 <= self.levels <= MAX_LEVELS):
            raise ContractError(f"levels must be in [2, {MAX_LEVELS}], got {self.levels}")
        if not self.omega01 > 0:
            raise ContractError("omega01 must be positive")
        if not (0 <= self.anharmonicity_alpha < self.omega01):
            raise ContractError("anharmonicity must satisfy 0 <= alpha < omega01")
        if not (self.self_capacitance > 0 and self.coupling_capacitance >= 0):
            raise ContractError("self capacitance must be positive, coupling non-negative")

    @classmethod
    def from_ghz(cls, f01_ghz: float, alpha_mhz: float, levels: int = 3, **kw) -> "TransmonSpec":
        """Build a spec from cyclic frequencies (GHz for f01, MHz for alpha)."""
        return cls(levels, 2 * math.pi * f01_ghz * 1e9, 2 * math.pi * alpha_mhz * 1e6, **kw)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega01

    @property
    def total_capacitance(self) -> float:
        return self.self_capacitance + self.coupling_capacitance

    def with_levels(self, levels: int) -> "TransmonSpec":
        return TransmonSpec(levels, self.omega01, self.anharmonicity_alpha,
                            self.self_capacitance, self.coupling_capacitance)


@dataclass(frozen=True)
class PulseEvent:
    nominal_time: float
    jitter_offset: float = 0.0

    def __post_init__(self):
        if self.nominal_time < 0:
            raise ContractError("nominal_time must be non-negative")

    @property
    def time(self) -> float:
        return self.nominal_time + self.jitter_offset


@dataclass(frozen=True)
class FidelityReport:
    avg_gate_fidelity: float
    leakage: float
    duration: float

    @property
    def infidelity(self) -> float:
        return 1.0 - self.avg_gate_fidelity


def spectrum(spec: TransmonSpec) -> np.ndarray:
    k = np.arange(spec.levels, dtype=float)
    return k * spec.omega01 - spec.anharmonicity_alpha * k * (k - 1) / 2


def tip_angle(spec: TransmonSpec, constants: PhysicalConstants = CONSTANTS) -> float:
    """Bloch-sphere rotation from one SFQ pulse, in radians."""
    return spec.coupling_capacitance * constants.flux_quantum * math.sqrt(
        2 * spec.omega01 / (constants.reduced_planck * spec.self_capacitance)
    )


def pulse_energy(spec: TransmonSpec, constants: PhysicalConstants = CONSTANTS) -> tuple[float, float]:
    """Energy (J) coupled in by one pulse, and the same in units of hbar*omega01."""
    e1 = (spec.omega01 * spec.coupling_capacitance * constants.flux_quantum) ** 2 / (
        2 * spec.total_capacitance
    )
    return e1, e1 / (constants.reduced_planck * spec.omega01)


def lowering_operator(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels, dtype=float)), 1)


def assert_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> np.ndarray:
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise ArithmeticError(f"propagator not unitary: max|U^dag U - I| = {err:.3e}")
    return u


def kick_from_operator(op: np.ndarray, delta_theta: float) -> np.ndarray:
    """exp[(delta_theta/2)(op^dag - op)] via the Hermitian generator's eigenbasis."""
    if not math.isfinite(delta_theta):
        raise ContractError("delta_theta must be finite")
    if abs(delta_theta) >= math.pi:
        raise ContractError("|delta_theta| must be below pi")
    # i(op^dag - op) is Hermitian, so U = exp(-i (delta_theta/2) G) with G = i(op^dag - op)
    gen = 1j * (op.conj().T - op)
    w, v = np.linalg.eigh(gen)
    u = (v * np.exp(-0.5j * delta_theta * w)) @ v.conj().T
    return assert_unitary(u)


def sfq_kick_unitary(spec: TransmonSpec, delta_theta: float) -> np.ndarray:
    return kick_from_operator(lowering_operator(spec.levels), delta_theta)


def free_evolution(spec: TransmonSpec, duration: float) -> np.ndarray:
    if duration < 0:
        raise ContractError("duration must be non-negative")
    return np.diag(np.exp(-1j * spectrum(spec) * duration))


def _check_events(events: Sequence[PulseEvent], total_duration: float) -> np.ndarray:
    times = np.array([e.time for e in events], dtype=float)
    if times.size and np.any(np.diff(times) < 0):
        raise ContractError("events must be sorted by effective time")
    if events and max(e.nominal_time for e in events) > total_duration:
        raise ContractError("last event lies beyond total_duration")
    if total_duration < 0:
        raise ContractError("total_duration must be non-negative")
    return times


def propagate_sequence(spec: TransmonSpec, events: Sequence[PulseEvent], delta_theta: float,
                       total_duration: float) -> np.ndarray:
    """Lab-frame propagator of kicks at the event times plus free evolution up to total_duration."""
    times = _check_events(events, total_duration)
    energies = spectrum(spec)
    kick = sfq_kick_unitary(spec, delta_theta)
    u = np.eye(spec.levels, dtype=complex)
    t = 0.0
    # jittered events may sit slightly outside [0, total_duration]; the signed
    # free-evolution legs below are still exactly unitary
    for tj in times:
        u = kick @ (np.exp(-1j * energies * (tj - t))[:, None] * u)
        t = tj
    u = np.exp(-1j * energies * (total_duration - t))[:, None] * u
    return u


def to_rotating_frame(spec: TransmonSpec, u_lab: np.ndarray, duration: float) -> np.ndarray:
    """Remove the omega01 * n reference rotation accumulated over `duration`."""
    k = np.arange(u_lab.shape[0])
    return np.exp(1j * k * spec.omega01 * duration)[:, None] * u_lab


def rotation_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def average_gate_fidelity(actual: np.ndarray, target: np.ndarray, duration: float = 0.0) -> FidelityReport:
    """Two-level average gate fidelity of `actual` restricted to {|0>, |1>}.

    With M = P target^dag actual P, F = (Tr(M^dag M) + |Tr M|^2) / 6 and
    leakage = 1 - Tr(M^dag M) / 2.
    """
    actual = np.asarray(actual)
    target = np.asarray(target)
    if target.shape != (2, 2):
        raise ContractError("target must be a 2x2 unitary")
    if actual.ndim != 2 or actual.shape[0] != actual.shape[1] or actual.shape[0] < 2:
        raise ContractError("actual must be square with dim >= 2")
    m = target.conj().T @ actual[:2, :2]
    norm = float(np.sum(np.abs(m) ** 2))
    f = (norm + abs(np.trace(m)) ** 2) / 6
    leak = 1 - norm / 2
    return FidelityReport(min(max(f, 0.0), 1.0), min(max(leak, 0.0), 1.0), duration)


def gate_report(spec: TransmonSpec, u_lab: np.ndarray, target: np.ndarray, duration: float) -> FidelityReport:
    return average_gate_fidelity(to_rotating_frame(spec, u_lab, duration), target, duration)


def resonant_events(spec: TransmonSpec, n_pulses: int) -> list[PulseEvent]:
    """One pulse at the start of each of `n_pulses` consecutive qubit periods."""
    return [PulseEvent(j * spec.period) for j in range(n_pulses)]


def state_trajectory(spec: TransmonSpec, events: Sequence[PulseEvent], delta_theta: float,
                     sample_times: Sequence[float], psi0: np.ndarray | None = None) -> np.ndarray:
    """Rotating-frame states at increasing sample times (kicks at a sample time are applied first)."""
    energies = spectrum(spec)
    kick = sfq_kick_unitary(spec, delta_theta)
    psi = np.zeros(spec.levels, dtype=complex)
    if psi0 is None:
        psi[0] = 1
    else:
        psi[:] = psi0
    k = np.arange(spec.levels)
    times = [e.time for e in events]
    out = np.empty((len(sample_times), spec.levels), dtype=complex)
    t, j = 0.0, 0
    for i, ts in enumerate(sample_times):
        while j < len(times) and times[j] <= ts:
            psi = kick @ (np.exp(-1j * energies * (times[j] - t)) * psi)
            t = times[j]
            j += 1
        lab = np.exp(-1j * energies * (ts - t)) * psi
        out[i] = np.exp(1j * k * spec.omega01 * ts) * lab
    return out


def bloch_components(states: np.ndarray) -> np.ndarray:
    """Rows (x, y, z, leakage) from the {|0>,|1>} amplitudes; |0> is the north pole."""
    c0, c1 = states[:, 0], states[:, 1]
    cross = np.conj(c0) * c1
    leak = 1 - np.abs(c0) ** 2 - np.abs(c1) ** 2
    return np.column_stack([2 * cross.real, 2 * cross.imag, np.abs(c0) ** 2 - np.abs(c1) ** 2,
                            np.clip(leak, 0, 1)])
