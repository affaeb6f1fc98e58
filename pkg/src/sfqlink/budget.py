"""Power, wiring heat-load and footprint budget of the SFQ control stack."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from scipy import integrate

from sfqlink.constants import CONSTANTS

MK_STAGE_CAPACITY_W = 10e-3
STAGE_3K_CAPACITY_W = 10.0

# kappa(T) = prefactor * (T/K)**exponent  in W/(m K)
MATERIALS = {
    "kapton_hn": (4.6e-3, 0.6),
    "nbti": (0.027, 2.0),
}


@dataclass(frozen=True)
class JunctionBias:
    critical_current: float
    bias_fraction: float = 0.75
    switch_rate: float = 0.0

    def __post_init__(self):
        if not 0 < self.bias_fraction < 1:
            raise ValueError("bias_fraction must be in (0, 1)")
        if self.critical_current <= 0 or self.switch_rate < 0:
            raise ValueError("critical current must be positive and switch rate non-negative")

    @property
    def bias_current(self) -> float:
        return self.bias_fraction * self.critical_current


def junction_power(j: JunctionBias) -> float:
    return CONSTANTS.flux_quantum * j.bias_current * j.switch_rate


@dataclass(frozen=True)
class SubsystemSpec:
    name: str
    junctions_per_channel: int
    channels: float
    clock: float
    duty_cycle: float
    activity: float
    junction: JunctionBias

    def __post_init__(self):
        for v in (self.duty_cycle, self.activity):
            if not 0 <= v <= 1:
                raise ValueError("duty_cycle and activity must be in [0, 1]")
        if self.junctions_per_channel < 0 or self.channels < 0 or self.clock < 0:
            raise ValueError("counts and clock must be non-negative")


def subsystem_power(s: SubsystemSpec) -> tuple[float, float]:
    """(power per channel, total power) in W."""
    j = JunctionBias(s.junction.critical_current, s.junction.bias_fraction, s.clock * s.activity)
    per_channel = s.junctions_per_channel * junction_power(j) * s.duty_cycle
    return per_channel, per_channel * s.channels


@dataclass(frozen=True)
class WiringSpec:
    material: str
    cross_section_area: float
    length: float = 1.0
    t_hot: float = 3.0
    t_cold: float = 0.0
    prefactor: float | None = None
    exponent: float | None = None

    def __post_init__(self):
        if not self.t_hot > self.t_cold >= 0:
            raise ValueError("need t_hot > t_cold >= 0")
        if self.cross_section_area < 0 or self.length <= 0:
            raise ValueError("area must be non-negative and length positive")
        self.conductivity_law()

    def conductivity_law(self) -> tuple[float, float]:
        if self.material == "custom":
            if self.prefactor is None or self.exponent is None:
                raise ValueError("custom material needs prefactor and exponent")
            return self.prefactor, self.exponent
        try:
            return MATERIALS[self.material]
        except KeyError:
            raise ValueError(f"unknown material {self.material!r}") from None


def wiring_heat(w: WiringSpec) -> float:
    """Conducted heat (W) with no intermediate heat sinking; closed-form power-law integral."""
    k0, n = w.conductivity_law()
    integral = k0 * (w.t_hot ** (n + 1) - w.t_cold ** (n + 1)) / (n + 1)
    return w.cross_section_area / w.length * integral


def wiring_heat_quadrature(w: WiringSpec) -> float:
    k0, n = w.conductivity_law()
    val, _ = integrate.quad(lambda t: k0 * t ** n, w.t_cold, w.t_hot, epsabs=0, epsrel=1e-12)
    return w.cross_section_area / w.length * val


def wiring_geometry(lines: float, trace_width: float, spacing: float, dielectric_thickness: float,
                    metal_thickness: float, groundplane_factor: float) -> tuple[float, float]:
    """(dielectric area, metal area) in m^2 for a flex ribbon of microstrips."""
    for v in (lines, trace_width, spacing, dielectric_thickness, metal_thickness, groundplane_factor):
        if v < 0:
            raise ValueError("dimensions must be non-negative")
    dielectric = lines * (trace_width + spacing) * dielectric_thickness
    metal = lines * trace_width * (1 + groundplane_factor) * metal_thickness
    return dielectric, metal


@dataclass(frozen=True)
class Technology:
    name: str
    kind: str  # "sfq" or "cmos"
    critical_current: float = 0.0
    static_ratio: float = 0.0
    bias_fraction: float = 0.75
    vdd: float = 0.5
    c_eff: float = 0.5e-15
    leakage: float = 1.5e-9


DEFAULT_TECHNOLOGIES = (
    Technology("cryoCMOS", "cmos"),
    Technology("RSFQ", "sfq", 250e-6, static_ratio=65.0),
    Technology("RSFQ_mK", "sfq", 10e-6, static_ratio=65.0),
    Technology("RQL/ERSFQ", "sfq", 10e-6),
)


def effective_activity(a: float) -> float:
    """Even logic/memory mix; memory saturates at activity 0.5."""
    return (a + min(a, 0.5)) / 2


def device_power(tech: Technology, activity: float, f_clk: float = 10e9) -> float:
    a_eff = effective_activity(activity)
    if tech.kind == "cmos":
        return tech.leakage * tech.vdd + a_eff * tech.c_eff * tech.vdd ** 2 * f_clk
    dyn_unit = CONSTANTS.flux_quantum * tech.bias_fraction * tech.critical_current * f_clk
    static = tech.static_ratio * dyn_unit * effective_activity(1.0)
    return static + dyn_unit * a_eff


def activity_curves(technologies: Sequence[Technology] = DEFAULT_TECHNOLOGIES,
                    activities: Iterable[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
                    f_clk: float = 10e9) -> list[tuple[str, float, float]]:
    """Rows (technology, activity, power per device in W)."""
    grid = list(activities)
    if not grid:
        raise ValueError("activity grid must be non-empty")
    return [(t.name, a, device_power(t, a, f_clk)) for t in technologies for a in grid]


@dataclass(frozen=True)
class HeterodyneReport:
    hemt_count: float
    hemt_total_w: float
    twpa_count: float
    twpa_total_w: float


def heterodyne_baseline(hemt_power: float, qubits_per_amp: float, amps_per_hemt: float,
                        twpa_pump_dissipation: float, qubits: float) -> HeterodyneReport:
    if qubits_per_amp <= 0 or amps_per_hemt <= 0:
        raise ValueError("multiplexing factors must be positive")
    twpas = qubits / qubits_per_amp
    hemts = twpas / amps_per_hemt
    return HeterodyneReport(hemts, hemts * hemt_power, twpas, twpas * twpa_pump_dissipation)


@dataclass(frozen=True)
class FootprintReport:
    cell_area: float
    array_area: float
    control_area_per_channel: float
    fits: bool


def footprint_report(qubit_cell: tuple[float, float], array: float,
                     interface_area: tuple[float, float]) -> FootprintReport:
    cell = qubit_cell[0] * qubit_cell[1]
    ctrl = interface_area[0] * interface_area[1]
    return FootprintReport(cell, cell * array, ctrl, ctrl <= cell)


@dataclass
class BudgetReport:
    """Stage-resolved budget. Totals are accumulated left to right in the
    order the line items are listed in `mk_items` / `k3_items`."""

    mk_items: dict[str, float] = field(default_factory=dict)
    k3_items: dict[str, float] = field(default_factory=dict)
    per_channel: dict[str, float] = field(default_factory=dict)
    junctions: dict[str, int] = field(default_factory=dict)
    heterodyne: HeterodyneReport | None = None
    footprint: FootprintReport | None = None
    notes: list[str] = field(default_factory=list)

    @staticmethod
    def _sum(items: dict[str, float]) -> float:
        total = 0.0
        for v in items.values():
            total += v
        return total

    @property
    def mk_total(self) -> float:
        return self._sum(self.mk_items)

    @property
    def k3_total(self) -> float:
        return self._sum(self.k3_items)

    @property
    def mk_headroom(self) -> float:
        return MK_STAGE_CAPACITY_W - self.mk_total

    @property
    def k3_headroom(self) -> float:
        return STAGE_3K_CAPACITY_W - self.k3_total

    def to_dict(self) -> dict:
        d = {
            "millikelvin": {**self.mk_items, "total_w": self.mk_total,
                            "capacity_w": MK_STAGE_CAPACITY_W, "headroom_w": self.mk_headroom},
            "stage_3k": {**self.k3_items, "total_w": self.k3_total,
                         "capacity_w": STAGE_3K_CAPACITY_W, "headroom_w": self.k3_headroom},
            "per_channel_w": dict(self.per_channel),
            "junctions": dict(self.junctions),
        }
        if self.heterodyne is not None:
            h = self.heterodyne
            d["heterodyne"] = {"hemt_count": h.hemt_count, "hemt_total_w": h.hemt_total_w,
                               "twpa_count": h.twpa_count, "twpa_total_w": h.twpa_total_w}
        if self.footprint is not None:
            f = self.footprint
            d["footprint"] = {"cell_area_m2": f.cell_area, "array_area_m2": f.array_area,
                              "control_area_per_channel_m2": f.control_area_per_channel,
                              "fits": f.fits}
        d["notes"] = list(self.notes)
        return d

    def table(self) -> str:
        lines = [f"{'stage':<12}{'item':<28}{'value':>14}"]
        for stage, items, total, cap in (
            ("mK", self.mk_items, self.mk_total, MK_STAGE_CAPACITY_W),
            ("3K", self.k3_items, self.k3_total, STAGE_3K_CAPACITY_W),
        ):
            for k, v in items.items():
                lines.append(f"{stage:<12}{k:<28}{v:>14.4g}")
            lines.append(f"{stage:<12}{'TOTAL (W)':<28}{total:>14.4g}")
            lines.append(f"{stage:<12}{'capacity (W)':<28}{cap:>14.4g}")
        for k, v in self.junctions.items():
            lines.append(f"{'junctions':<12}{k:<28}{v:>14d}")
        if self.heterodyne is not None:
            lines.append(f"{'heterodyne':<12}{'HEMT total (W)':<28}{self.heterodyne.hemt_total_w:>14.4g}")
            lines.append(f"{'heterodyne':<12}{'TWPA pump total (W)':<28}{self.heterodyne.twpa_total_w:>14.4g}")
        return "\n".join(lines)
