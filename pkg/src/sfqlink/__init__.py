"""Simulation and budgeting toolkit for SFQ-driven superconducting qubits."""

from sfqlink.constants import PhysicalConstants, CONSTANTS
from sfqlink.transmon import (
    TransmonSpec,
    PulseEvent,
    FidelityReport,
    spectrum,
    tip_angle,
    pulse_energy,
    sfq_kick_unitary,
    free_evolution,
    propagate_sequence,
    average_gate_fidelity,
    rotation_y,
)

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "TransmonSpec",
    "PulseEvent",
    "FidelityReport",
    "spectrum",
    "tip_angle",
    "pulse_energy",
    "sfq_kick_unitary",
    "free_evolution",
    "propagate_sequence",
    "average_gate_fidelity",
    "rotation_y",
]

__version__ = "0.1.0"
