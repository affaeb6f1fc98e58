"""Command-line entry point: ``sfqlink {simulate,optimize,pgu,measure,budget}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from sfqlink import budget as bud
from sfqlink import config as cfgmod
from sfqlink import coprocessor as cop
from sfqlink import io
from sfqlink import readout as ro
from sfqlink.config import ConfigError, number
from sfqlink.genetic import ga_search, scan_register_size
from sfqlink.pulses import CapacityError, ClockGrid, PulsePattern, fitness, pattern_to_events, resonant_pattern
from sfqlink.transmon import (
    bloch_components,
    gate_report,
    propagate_sequence,
    rotation_y,
    state_trajectory,
    tip_angle,
)


def _substeps(v, field: str) -> Fraction:
    try:
        s = Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(field, f"expected a number or ratio, got {v!r}") from None
    if s <= 1:
        raise ConfigError(field, "clock must be faster than the qubit (substeps > 1)")
    return s


def _n_ticks(periods, s: Fraction, field: str) -> int:
    n = Fraction(str(periods)) * s
    if n.denominator != 1 or n < 1:
        raise ConfigError(field, "periods * substeps must be a positive integer tick count")
    return int(n)


def _tip(cfg, spec, prefix):
    v = number(cfg, "tip_angle_rad", prefix, lo=0, strict_lo=True, optional=True)
    return tip_angle(spec) if v is None else v


def cmd_simulate(cfg: dict, seed: int, out: Path, fmt: str, threads: int, base_dir: Path) -> dict:
    p = "simulate"
    spec = cfgmod.qubit_spec(cfg, p)
    dth = _tip(cfg, spec, p)
    angle = number(cfg, "target_angle_rad", p)
    s = _substeps(cfg["substeps"], f"{p}.substeps")
    grid = ClockGrid.for_qubit(spec, s, _n_ticks(cfg["periods"], s, f"{p}.periods"))
    if cfg["pattern"] == "resonant":
        rounding = cfg["pulse_rounding"]
        ratio = angle / dth
        choices = {"nearest": [round(ratio)], "up": [math.ceil(ratio - 1e-12)],
                   "best": sorted({math.floor(ratio + 1e-12), math.ceil(ratio - 1e-12)})}
        if rounding not in choices:
            raise ConfigError(f"{p}.pulse_rounding", "expected 'nearest', 'up' or 'best'")
        try:
            cands = [resonant_pattern(spec, grid, angle, dth, n_pulses=n) for n in choices[rounding]]
        except CapacityError as exc:
            raise ConfigError(f"{p}.periods", str(exc)) from None
        # 'best': whichever of floor/ceil pulse counts gives the lower noiseless infidelity
        pattern = min(cands, key=lambda c: (fitness(c, spec, rotation_y(angle), dth), c.n_pulses))
    else:
        bits = io.read_pattern_file(base_dir / cfg["pattern"])[0]
        if bits.size != grid.n_ticks:
            raise ConfigError(f"{p}.pattern", f"pattern has {bits.size} bits, grid has {grid.n_ticks}")
        pattern = PulsePattern(grid, bits)
    jitter = 1e-12 * number(cfg, "jitter_ps", p, lo=0)
    events = pattern_to_events(pattern, jitter, seed)
    target = rotation_y(angle)
    u = propagate_sequence(spec, events, dth, grid.duration)
    rep = gate_report(spec, u, target, grid.duration)
    if cfg["trajectory"]:
        times = np.arange(grid.n_ticks + 1) / grid.clock_frequency
        comps = bloch_components(state_trajectory(spec, events, dth, times))
        io.write_rows(out / f"trajectory.{fmt}", ["time", "bloch_x", "bloch_y", "bloch_z", "pop_leak"],
                      [(t, *c) for t, c in zip(times, comps)], fmt)
    io.write_pattern_file(out / "pattern.txt", [pattern.bits])
    return {
        "avg_gate_fidelity": rep.avg_gate_fidelity,
        "infidelity": rep.infidelity,
        "leakage": rep.leakage,
        "duration_s": rep.duration,
        "n_pulses": pattern.n_pulses,
        "tip_angle_rad": dth,
    }


def cmd_optimize(cfg: dict, seed: int, out: Path, fmt: str, threads: int, base_dir: Path) -> dict:
    p = "optimize"
    spec = cfgmod.qubit_spec(cfg, p)
    dth = _tip(cfg, spec, p)
    angle = number(cfg, "target_angle_rad", p)
    s = _substeps(cfg["substeps"], f"{p}.substeps")
    n = number(cfg, "register_bits", p, lo=1, integer=True)
    grid = ClockGrid.for_qubit(spec, s, n)
    ga = cfgmod.ga_config(cfg, p, seed)
    target = rotation_y(angle)
    summary: dict = {"tip_angle_rad": dth, "register_bits": n, "duration_periods": grid.periods}

    seeds = []
    resonant = None
    try:
        resonant = resonant_pattern(spec, grid, angle, dth)
    except CapacityError:
        pass
    if resonant is not None:
        summary["resonant_infidelity"] = fitness(resonant, spec, target, dth)
        if cfg["seed_resonant"]:
            seeds.append(resonant)

    history = []
    res = ga_search(ga, grid, spec, target, dth, seeds or None, threads=threads,
                    on_generation=lambda g, b, m: history.append({"generation": g, "best": b, "mean": m}))
    io.write_jsonl(out / "history.jsonl", history)
    io.write_pattern_file(out / "best_pattern.txt", [res.best_pattern.bits])
    summary.update(best_infidelity=res.best_infidelity, best_leakage=res.best_report.leakage,
                   best_pulses=res.best_pattern.n_pulses, evaluations=res.evaluations)
    if resonant is not None and res.best_infidelity > 0:
        summary["gain_over_resonant"] = summary["resonant_infidelity"] / res.best_infidelity

    scan = cfg["scan"]
    if scan:
        try:
            tips = [float(x) for x in scan["tip_angles_rad"]]
            subs = [_substeps(x, f"{p}.scan.substeps") for x in scan["substeps"]]
            sizes = [int(x) for x in scan["register_bits"]]
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"{p}.scan", f"needs tip_angles_rad, substeps, register_bits lists ({exc})") from None
        rows = scan_register_size(spec, tips, subs, sizes, ga, target, angle, threads=threads)
        io.write_rows(out / f"scan.{fmt}",
                      ["tip_angle_rad", "substeps", "register_bits", "duration_periods", "infidelity"],
                      [(r.tip_angle_rad, r.substeps, r.register_bits, r.duration_periods, r.infidelity)
                       for r in rows], fmt)
        summary["scan_points"] = len(rows)
    return summary


def cmd_pgu(cfg: dict, seed: int, out: Path, fmt: str, threads: int, base_dir: Path) -> dict:
    p = "pgu"
    if not cfg["pattern_file"]:
        raise ConfigError(f"{p}.pattern_file", "required")
    path = base_dir / cfg["pattern_file"]
    if not path.exists():
        raise ConfigError(f"{p}.pattern_file", f"{path} does not exist")
    try:
        patterns = io.read_pattern_file(path)
    except ValueError as exc:
        raise ConfigError(f"{p}.pattern_file", str(exc)) from None
    n = patterns[0].size
    if any(x.size != n for x in patterns):
        raise ConfigError(f"{p}.pattern_file", "all register patterns must have the same length")
    fast = number(cfg, "fast_clock_ghz", p, lo=0, strict_lo=True)
    conf = cop.PGUConfig(n, len(patterns), int(round(fast * 1e9)), cfg["readout_mode"])
    regs = [cop.load_pattern(cop.S2PRegister(n), bits) for bits in patterns]
    stream = cop.stream_pgu(conf, regs)
    io.write_rows(out / f"stream.{fmt}", ["tick", "bit"], stream, fmt)
    counts = {
        "register_bits": n,
        "register_count": len(patterns),
        "readout_clock_hz": conf.readout_clock,
        "mux_channels": number(cfg, "mux_channels", p, lo=1, integer=True),
        "mux_variant": cfg["mux_variant"],
        "mux_junctions": cop.mux_junctions(cop.MuxSpec(cfg["mux_channels"], cfg["mux_variant"])),
        "demux_channels": number(cfg, "demux_channels", p, lo=1, integer=True),
        "demux_junctions": cop.demux_junctions(cop.DemuxSpec(cfg["demux_channels"])),
        "p2s_overhead_junctions": cop.p2s_junction_overhead(n) if n >= 2 else None,
    }
    io.write_json(out / "counts.json", counts)
    return {**counts, "stream_ticks": len(stream), "stream_pulses": sum(b for _, b in stream)}


def cmd_measure(cfg: dict, seed: int, out: Path, fmt: str, threads: int, base_dir: Path) -> dict:
    p = "measure"
    try:
        model = ro.JPMClickModel(
            number(cfg, "bright_mean_photons", p, lo=0),
            number(cfg, "dark_residual_photons", p, lo=0),
            number(cfg, "per_photon_efficiency", p, lo=0, hi=1),
            number(cfg, "dark_click_probability", p, lo=0, hi=1),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(p, str(exc)) from None
    summary = {
        "p_click_bright": ro.click_probability(model, ro.Pointer.BRIGHT),
        "p_click_dark": ro.click_probability(model, ro.Pointer.DARK),
        "single_shot_fidelity": ro.single_shot_fidelity(model),
    }
    det = number(cfg, "detuning_mhz", p)
    if det != 0:
        chi, ring = ro.dispersive_shift(ro.DispersiveParams(cfgmod.TWO_PI * 1e6 * number(cfg, "coupling_g_mhz", p),
                                                            cfgmod.TWO_PI * 1e6 * det))
        summary.update(chi_rad_s=chi, ringup_s=ring)
    p1 = number(cfg, "qubit_excited_prob", p, lo=0, hi=1)
    shots = number(cfg, "shots", p, lo=1, integer=True)
    c = ro.measurement_shot(model, p1, seed, shots)
    expect = ro.expected_click_rate(model, p1)
    summary.update(mc_shots=shots, mc_click_rate=c.click_rate, expected_click_rate=expect,
                   mc_sigma=math.sqrt(expect * (1 - expect) / shots))

    npts = number(cfg, "rabi_points", p, lo=2, integer=True)
    thetas = np.linspace(0.0, number(cfg, "rabi_theta_max_rad", p, lo=0), npts)
    rows = ro.rabi_scan(model, thetas, number(cfg, "rabi_shots", p, lo=1, integer=True), seed)
    io.write_rows(out / f"rabi.{fmt}", ["theta_rad", "click_rate", "shots"], rows, fmt)
    # least-squares fringe fit: rate = offset + visibility * sin^2(theta/2)
    a = np.column_stack([np.ones(npts), np.sin(thetas / 2) ** 2])
    coef, *_ = np.linalg.lstsq(a, np.array([r[1] for r in rows]), rcond=None)
    summary.update(rabi_offset=float(coef[0]), rabi_visibility=float(coef[1]))
    return summary


def budget_from_config(cfg: dict) -> bud.BudgetReport:
    p = "budget"

    def subsystem(name):
        s = cfg[name]
        q = f"{p}.{name}"
        return bud.SubsystemSpec(
            name,
            number(s, "junctions_per_channel", q, lo=0, integer=True),
            number(s, "channels", q, lo=0),
            1e9 * number(s, "clock_ghz", q, lo=0),
            number(s, "duty_cycle", q, lo=0, hi=1),
            number(s, "activity", q, lo=0, hi=1),
            bud.JunctionBias(1e-6 * number(s, "critical_current_ua", q, lo=0, strict_lo=True),
                             number(s, "bias_fraction", q, lo=0, strict_lo=True, hi=1)),
        )

    iface, pgu = subsystem("interface"), subsystem("pgu")
    iface_ch, iface_tot = bud.subsystem_power(iface)
    pgu_ch, pgu_tot = bud.subsystem_power(pgu)

    w = cfg["wiring"]
    q = f"{p}.wiring"
    diel, metal = bud.wiring_geometry(
        number(w, "lines", q, lo=0), 1e-6 * number(w, "trace_width_um", q, lo=0),
        1e-6 * number(w, "spacing_um", q, lo=0), 1e-6 * number(w, "dielectric_thickness_um", q, lo=0),
        1e-9 * number(w, "metal_thickness_nm", q, lo=0), number(w, "groundplane_factor", q, lo=0))
    length = number(w, "length_m", q, lo=0, strict_lo=True)
    t_hot, t_cold = number(w, "t_hot_k", q, lo=0), number(w, "t_cold_k", q, lo=0)
    if not t_hot > t_cold:
        raise ConfigError(f"{q}.t_hot_k", "must exceed t_cold_k")
    kapton = bud.wiring_heat(bud.WiringSpec("kapton_hn", diel, length, t_hot, t_cold))
    nbti = bud.wiring_heat(bud.WiringSpec("nbti", metal, length, t_hot, t_cold))

    h = cfg["heterodyne"]
    q = f"{p}.heterodyne"
    het = bud.heterodyne_baseline(1e-3 * number(h, "hemt_power_mw", q, lo=0),
                                  number(h, "qubits_per_amp", q, lo=0, strict_lo=True),
                                  number(h, "amps_per_hemt", q, lo=0, strict_lo=True),
                                  1e-9 * number(h, "twpa_pump_nw", q, lo=0), number(h, "qubits", q, lo=0))
    f = cfg["footprint"]
    cell = [1e-6 * float(x) for x in f["qubit_cell_um"]]
    area = [1e-6 * float(x) for x in f["interface_area_um"]]
    foot = bud.footprint_report((cell[0], cell[1]), number(f, "array", f"{p}.footprint", lo=0), (area[0], area[1]))

    mux_n = number(cfg, "mux_channels", p, lo=0, integer=True)
    demux_n = number(cfg, "demux_channels", p, lo=0, integer=True)
    junctions = {
        "mux_merger_tree": cop.mux_junctions(cop.MuxSpec(mux_n)) if mux_n else 0,
        "mux_squid_stack": cop.mux_junctions(cop.MuxSpec(mux_n, "squid_stack")) if mux_n else 0,
        "demux": cop.demux_junctions(cop.DemuxSpec(demux_n)) if demux_n else 0,
    }
    notes = []
    if pgu.activity != 1.0:
        notes.append(f"PGU junction activity {pgu.activity:g} is a calibration, not a measured value")
    return bud.BudgetReport(
        mk_items={"interface_power_w": iface_tot, "kapton_heat_w": kapton, "nbti_heat_w": nbti},
        k3_items={"pgu_power_w": pgu_tot},
        per_channel={"interface_w": iface_ch, "pgu_w": pgu_ch},
        junctions=junctions, heterodyne=het, footprint=foot, notes=notes,
    )


def cmd_budget(cfg: dict, seed: int, out: Path, fmt: str, threads: int, base_dir: Path) -> dict:
    report = budget_from_config(cfg)
    io.write_json(out / "budget.json", report.to_dict())
    print(report.table())
    return report.to_dict()


COMMANDS = {
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "pgu": cmd_pgu,
    "measure": cmd_measure,
    "budget": cmd_budget,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sfqlink", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="YAML config file")
        sp.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit), overrides the file")
        sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")
        sp.add_argument("--format", choices=["csv", "json"], default="csv", help="dataset format")
    return ap


def _fail(kind: str, message: str, field: str | None = None, code: int = 1) -> int:
    err = {"error": kind, "message": message}
    if field:
        err["field"] = field
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, file_seed, base_dir = cfgmod.load(args.command, args.config)
        seed = args.seed if args.seed is not None else (file_seed if file_seed is not None else 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
        args.out.mkdir(parents=True, exist_ok=True)
        summary = COMMANDS[args.command](cfg, seed, args.out, args.format, args.threads, base_dir)
    except ConfigError as exc:
        return _fail("config", exc.message, exc.field, code=2)
    except (ValueError, RuntimeError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc))
    resolved = {"command": args.command, "seed": seed, args.command: cfg}
    report = {"command": args.command, "result": summary, "config": resolved}
    io.write_json(args.out / "report.json", report)
    io.write_json(args.out / "config.resolved.json", resolved)
    if args.command != "budget":
        print(io.dumps(summary), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
