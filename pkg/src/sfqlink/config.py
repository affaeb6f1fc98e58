"""YAML run configuration: defaults, merging, validation and unit conversion.

Every physical key carries its unit in the name (``f01_ghz``,
``critical_current_ua``, ...). Conversion to SI happens only here.
"""

from __future__ import annotations

import copy
import math
from pathlib import Path
from typing import Any

import yaml

TWO_PI = 2 * math.pi

QUBIT_DEFAULTS = {
    "levels": 3,
    "f01_ghz": 5.0,
    "anharmonicity_mhz": 200.0,
    "self_capacitance_ff": 100.0,
    "coupling_capacitance_af": 100.0,
}

GA_DEFAULTS = {
    "population_size": 100,
    "generations": 500,
    "crossover_rate": 0.7,
    "mutation_rate_per_bit": None,
    "elite_count": 2,
    "tournament_size": 3,
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "simulate": {
        "qubit": QUBIT_DEFAULTS,
        "tip_angle_rad": None,  # None -> from capacitances
        "target_angle_rad": math.pi / 2,
        "substeps": 8,
        "periods": 100,
        "pattern": "resonant",  # or a pattern-file path
        "pulse_rounding": "best",  # nearest | up | best
        "jitter_ps": 0.0,
        "trajectory": True,
    },
    "optimize": {
        "qubit": QUBIT_DEFAULTS,
        "tip_angle_rad": None,
        "target_angle_rad": math.pi / 2,
        "substeps": 8,
        "register_bits": 800,
        "seed_resonant": True,
        "ga": GA_DEFAULTS,
        "scan": None,  # {tip_angles_rad: [...], substeps: [...], register_bits: [...]}
    },
    "pgu": {
        "pattern_file": None,
        "fast_clock_ghz": 40.0,
        "readout_mode": "merger_sync",
        "mux_channels": 100,
        "mux_variant": "merger_tree",
        "demux_channels": 10,
    },
    "measure": {
        "bright_mean_photons": math.log(24.0),
        "dark_residual_photons": 0.0,
        "per_photon_efficiency": 1.0,
        "dark_click_probability": 0.04,
        "coupling_g_mhz": 100.0,
        "detuning_mhz": 1000.0,
        "qubit_excited_prob": 0.5,
        "shots": 100_000,
        "rabi_points": 41,
        "rabi_theta_max_rad": 4 * math.pi,
        "rabi_shots": 2000,
    },
    "budget": {
        "interface": {
            "junctions_per_channel": 20,
            "channels": 1e8,
            "clock_ghz": 5.0,
            "duty_cycle": 0.1,
            "activity": 1.0,
            "critical_current_ua": 1.0,
            "bias_fraction": 0.75,
        },
        "pgu": {
            "junctions_per_channel": 1000,
            "channels": 1e8,
            "clock_ghz": 30.0,
            "duty_cycle": 0.1,
            "activity": 0.21,
            "critical_current_ua": 100.0,
            "bias_fraction": 0.75,
        },
        "wiring": {
            "lines": 1e7,
            "trace_width_um": 50.0,
            "spacing_um": 50.0,
            "dielectric_thickness_um": 13.0,
            "metal_thickness_nm": 100.0,
            "groundplane_factor": 2.0,
            "length_m": 1.0,
            "t_hot_k": 3.0,
            "t_cold_k": 0.0,
        },
        "heterodyne": {
            "hemt_power_mw": 10.0,
            "qubits_per_amp": 100,
            "amps_per_hemt": 100,
            "twpa_pump_nw": 100.0,
            "qubits": 1e8,
        },
        "footprint": {
            "qubit_cell_um": [100.0, 100.0],
            "array": 1e8,
            "interface_area_um": [20.0, 100.0],
        },
        "mux_channels": 100,
        "demux_channels": 10,
    },
}


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


def _merge(base: dict, override: dict, prefix: str) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        path = f"{prefix}.{k}" if prefix else k
        if k not in base:
            raise ConfigError(path, "unknown key")
        if isinstance(base[k], dict) and isinstance(v, dict):
            out[k] = _merge(base[k], v, path)
        elif isinstance(base[k], dict) and v is not None:
            raise ConfigError(path, "expected a mapping")
        else:
            out[k] = v
    return out


def load(command: str, path: str | Path | None) -> tuple[dict, int | None, Path]:
    """Resolved section for `command`, the file's top-level seed, and the file's directory."""
    data: dict = {}
    base_dir = Path.cwd()
    if path is not None:
        p = Path(path)
        try:
            data = yaml.safe_load(p.read_text()) or {}
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        except yaml.YAMLError as exc:
            raise ConfigError("--config", f"invalid YAML: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("--config", "top level must be a mapping")
        base_dir = p.resolve().parent
    seed = data.get("seed")
    section = data.get(command, {}) or {}
    if not isinstance(section, dict):
        raise ConfigError(command, "expected a mapping")
    extra = set(data) - {"seed", command} - set(DEFAULTS)
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown top-level key")
    return _merge(DEFAULTS[command], section, command), seed, base_dir


def number(cfg: dict, key: str, prefix: str, *, lo: float | None = None, hi: float | None = None,
           strict_lo: bool = False, integer: bool = False, optional: bool = False):
    v = cfg.get(key)
    name = f"{prefix}.{key}"
    if v is None and optional:
        return None
    if isinstance(v, str):
        # YAML 1.1 reads exponents without a sign (1.0e8) as strings
        try:
            v = float(v)
        except ValueError:
            pass
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(name, f"expected a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(name, "must be finite")
    if integer:
        if float(v) != int(v):
            raise ConfigError(name, "expected an integer")
        v = int(v)
    if lo is not None and (v <= lo if strict_lo else v < lo):
        raise ConfigError(name, f"must be {'>' if strict_lo else '>='} {lo}")
    if hi is not None and v > hi:
        raise ConfigError(name, f"must be <= {hi}")
    return v


def qubit_spec(cfg: dict, prefix: str):
    from sfqlink.transmon import TransmonSpec

    q = cfg["qubit"]
    p = f"{prefix}.qubit"
    return TransmonSpec(
        levels=number(q, "levels", p, lo=2, hi=10, integer=True),
        omega01=TWO_PI * 1e9 * number(q, "f01_ghz", p, lo=0, strict_lo=True),
        anharmonicity_alpha=TWO_PI * 1e6 * number(q, "anharmonicity_mhz", p, lo=0),
        self_capacitance=1e-15 * number(q, "self_capacitance_ff", p, lo=0, strict_lo=True),
        coupling_capacitance=1e-18 * number(q, "coupling_capacitance_af", p, lo=0),
    )


def ga_config(cfg: dict, prefix: str, seed: int):
    from sfqlink.genetic import GAConfig

    g = cfg["ga"]
    p = f"{prefix}.ga"
    pop = number(g, "population_size", p, lo=1, integer=True)
    return GAConfig(
        population_size=pop,
        generations=number(g, "generations", p, lo=0, integer=True),
        crossover_rate=number(g, "crossover_rate", p, lo=0, hi=1),
        mutation_rate_per_bit=number(g, "mutation_rate_per_bit", p, lo=0, hi=1, optional=True),
        elite_count=number(g, "elite_count", p, lo=0, hi=pop, integer=True),
        tournament_size=number(g, "tournament_size", p, lo=1, integer=True),
        rng_seed=seed,
    )
