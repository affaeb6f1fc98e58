"""Two capacitively coupled transmons and the SFQ-driven CZ protocol.

Product states are ordered |m n> with m indexing qubit A and n qubit B
(row-major, index m*d_b + n). The coupling term is J(a^dag b + a b^dag).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from sfqlink.transmon import (
    ContractError,
    PulseEvent,
    TransmonSpec,
    _check_events,
    assert_unitary,
    kick_from_operator,
    lowering_operator,
    spectrum,
)

MAX_DIM = 100


class DriveTarget(str, Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class TwoTransmonSpec:
    qubit_a: TransmonSpec
    qubit_b: TransmonSpec
    coupling_j: float
    drive_target: DriveTarget = DriveTarget.B

    def __post_init__(self):
        if self.coupling_j < 0:
            raise ContractError("coupling_j must be non-negative")
        if self.dim > MAX_DIM:
            raise ContractError(f"joint dimension {self.dim} exceeds {MAX_DIM}")
        object.__setattr__(self, "drive_target", DriveTarget(self.drive_target))

    @property
    def dim(self) -> int:
        return self.qubit_a.levels * self.qubit_b.levels

    def index(self, m: int, n: int) -> int:
        return m * self.qubit_b.levels + n


def cz_tuned_pair(f_b_ghz: float, alpha_b_mhz: float, alpha_a_mhz: float, j_mhz: float,
                  levels: int = 4) -> TwoTransmonSpec:
    """Pair with omega_A = omega_B - 2 alpha_B, so that E(|03>) = E(|12>) when uncoupled."""
    b = TransmonSpec.from_ghz(f_b_ghz, alpha_b_mhz, levels)
    f_a_ghz = f_b_ghz - 2 * alpha_b_mhz * 1e-3
    a = TransmonSpec.from_ghz(f_a_ghz, alpha_a_mhz, levels)
    return TwoTransmonSpec(a, b, 2 * math.pi * j_mhz * 1e6, DriveTarget.B)


def static_hamiltonian(spec: TwoTransmonSpec) -> np.ndarray:
    da, db = spec.qubit_a.levels, spec.qubit_b.levels
    ia, ib = np.eye(da), np.eye(db)
    a = np.kron(lowering_operator(da), ib)
    b = np.kron(ia, lowering_operator(db))
    h = np.kron(np.diag(spectrum(spec.qubit_a)), ib) + np.kron(ia, np.diag(spectrum(spec.qubit_b)))
    return h + spec.coupling_j * (a.T @ b + a @ b.T)


def drive_operator(spec: TwoTransmonSpec) -> np.ndarray:
    da, db = spec.qubit_a.levels, spec.qubit_b.levels
    if spec.drive_target is DriveTarget.A:
        return np.kron(lowering_operator(da), np.eye(db))
    return np.kron(np.eye(da), lowering_operator(db))


class _Dressed:
    """Eigendecomposition of the static Hamiltonian with bare-state labels."""

    def __init__(self, spec: TwoTransmonSpec):
        self.spec = spec
        self.energies, self.vectors = np.linalg.eigh(static_hamiltonian(spec))
        overlaps = np.abs(self.vectors) ** 2  # [bare, dressed]
        self._label = np.argmax(overlaps, axis=1)

    def dressed_index(self, m: int, n: int) -> int:
        return int(self._label[self.spec.index(m, n)])


def two_qubit_propagate(spec: TwoTransmonSpec, events: Sequence[PulseEvent], delta_theta: float,
                        total_duration: float, _dressed: _Dressed | None = None) -> np.ndarray:
    """Lab-frame propagator in the bare product basis."""
    times = _check_events(events, total_duration)
    dr = _dressed or _Dressed(spec)
    v, e = dr.vectors, dr.energies
    kick = v.conj().T @ kick_from_operator(drive_operator(spec), delta_theta) @ v
    u = np.eye(spec.dim, dtype=complex)
    t = 0.0
    for tj in times:
        u = kick @ (np.exp(-1j * e * (tj - t))[:, None] * u)
        t = tj
    u = np.exp(-1j * e * (total_duration - t))[:, None] * u
    return assert_unitary(v @ u @ v.conj().T, 1e-9)


@dataclass(frozen=True)
class CZResult:
    conditional_phase: float
    return_population: float
    n_pulses: int
    delta_theta: float
    drive_frequency: float
    duration: float
    populations: dict


def _wrap(phase: float) -> float:
    w = math.remainder(phase, 2 * math.pi)
    return math.pi if w == -math.pi else w


def doublet(spec: TwoTransmonSpec) -> tuple[int, int, _Dressed]:
    """Dressed indices of |+> (upper) and |-> (lower) formed from |12> and |03>."""
    dr = _Dressed(spec)
    i12, i03 = spec.index(1, 2), spec.index(0, 3)
    weight = np.abs(dr.vectors[i12]) ** 2 + np.abs(dr.vectors[i03]) ** 2
    pair = np.argsort(weight)[-2:]
    lo, hi = sorted(pair, key=lambda j: dr.energies[j])
    return int(hi), int(lo), dr


def cz_protocol(spec: TwoTransmonSpec, n2: int, clock_substeps: int = 16) -> CZResult:
    """Drive a full Rabi cycle |11> -> |+> -> |11> with n2 resonant SFQ pulses.

    Pulses are placed at the clock tick (qubit-B period / clock_substeps)
    nearest each multiple of the dressed |11> -> |+> period, and the tip angle
    is chosen so that n2 kicks complete a 2*pi rotation on that transition.
    Phases are read out in the interaction frame of the static coupled
    Hamiltonian, so idle ZZ accumulation is excluded.
    """
    for q in (spec.qubit_a, spec.qubit_b):
        if q.levels < 4:
            raise ContractError("CZ protocol needs at least 4 levels per qubit")
    if n2 < 1 or clock_substeps < 1:
        raise ContractError("n2 and clock_substeps must be positive")

    i_plus, _, dr = doublet(spec)
    i11 = dr.dressed_index(1, 1)
    w_drive = dr.energies[i_plus] - dr.energies[i11]
    if spec.coupling_j > 0 and n2 < w_drive / spec.coupling_j:
        warnings.warn(f"n2={n2} is not large compared with omega/J={w_drive / spec.coupling_j:.0f}",
                      stacklevel=2)

    op = dr.vectors.conj().T @ drive_operator(spec) @ dr.vectors
    coupling = abs(op[i11, i_plus])  # <+| c^dag |11>
    if coupling < 1e-6:
        raise ContractError("drive target does not couple |11> to the doublet")
    delta_theta = 2 * math.pi / (n2 * coupling)

    t_drive = 2 * math.pi / w_drive
    tick = spec.qubit_b.period / clock_substeps
    ticks = np.ceil(np.arange(n2) * t_drive / tick - 0.5)
    events = [PulseEvent(float(k * tick)) for k in ticks]
    total = float(math.ceil(n2 * t_drive / tick - 0.5) * tick)

    u = two_qubit_propagate(spec, events, delta_theta, total, _dressed=dr)
    u_int = np.exp(1j * dr.energies * total)[:, None] * (dr.vectors.conj().T @ u @ dr.vectors)

    labels = {"00": (0, 0), "01": (0, 1), "10": (1, 0), "11": (1, 1)}
    diag = {k: u_int[dr.dressed_index(*mn), dr.dressed_index(*mn)] for k, mn in labels.items()}
    phase = (np.angle(diag["11"]) - np.angle(diag["01"]) - np.angle(diag["10"])
             + np.angle(diag["00"]))
    pops = {k: float(abs(z) ** 2) for k, z in diag.items()}
    return CZResult(_wrap(float(phase)), pops["11"], n2, delta_theta, w_drive, total, pops)
