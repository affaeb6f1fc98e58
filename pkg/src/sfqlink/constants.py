from dataclasses import dataclass

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    """Flux quantum (Wb) and reduced Planck constant (J s)."""

    flux_quantum: float = _sc.h / (2 * _sc.e)
    reduced_planck: float = _sc.hbar


CONSTANTS = PhysicalConstants()
