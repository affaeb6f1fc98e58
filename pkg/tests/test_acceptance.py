"""Acceptance gate: one PASS/FAIL line per criterion, at the contract tolerances.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from oracles import finite_width_propagator, richardson
from sfqlink import config as cfgmod
from sfqlink.budget import JunctionBias, WiringSpec, junction_power, wiring_heat, wiring_heat_quadrature
from sfqlink.cli import budget_from_config
from sfqlink.coprocessor import (
    DemodConfig,
    DemodBin,
    DemuxSpec,
    MuxSpec,
    PGUConfig,
    S2PRegister,
    demux_junctions,
    jpm_delay_demod,
    load_pattern,
    mux_junctions,
    p2s_junction_overhead,
    stream_pgu,
)
from sfqlink.coupled import cz_protocol, cz_tuned_pair
from sfqlink.genetic import GAConfig, ga_search
from sfqlink.pulses import ClockGrid, fitness, resonant_pattern
from sfqlink.readout import JPMClickModel, expected_click_rate, measurement_shot, single_shot_fidelity
from sfqlink.transmon import (
    PulseEvent,
    TransmonSpec,
    gate_report,
    propagate_sequence,
    pulse_energy,
    resonant_events,
    rotation_y,
    tip_angle,
)

LINES: dict[int, str] = {}
HALF_PI_Y = rotation_y(math.pi / 2)


def record(n: int, ok: bool, detail: str, elapsed: float, limit: float):
    ok = bool(ok) and elapsed < limit
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f} s / limit {limit:g} s]"
    LINES[n] = line
    print(line)
    assert ok, line


def qubit(levels=3):
    return TransmonSpec.from_ghz(5.0, 200.0, levels=levels)


def test_criterion_01_resonant_gate():
    t0 = time.perf_counter()
    spec = qubit()
    dth = tip_angle(spec)
    n = math.ceil((math.pi / 2) / dth)
    total = 100 * spec.period
    u = propagate_sequence(spec, resonant_events(spec, n), dth, total)
    rep = gate_report(spec, u, HALF_PI_Y, total)
    record(1, rep.avg_gate_fidelity >= 0.999,
           f"F = {rep.avg_gate_fidelity:.6f} (>= 0.999), {n} pulses, dtheta = {dth:.4e}, T = {total * 1e9:.1f} ns",
           time.perf_counter() - t0, 1)


def test_criterion_02_scaling():
    t0 = time.perf_counter()
    spec = qubit()
    ns = np.array([25, 50, 100, 200, 400])
    inf = []
    for n in ns:
        dth = math.pi / (2 * n)
        u = propagate_sequence(spec, resonant_events(spec, int(n)), dth, n * spec.period)
        inf.append(gate_report(spec, u, HALF_PI_Y, n * spec.period).infidelity)
    slope = np.polyfit(np.log(ns), np.log(inf), 1)[0]
    record(2, abs(slope + 2) <= 0.3, f"slope = {slope:.3f} (-2 +/- 0.3) over n = 25..400",
           time.perf_counter() - t0, 60)


def test_criterion_03_optimization_gain():
    t0 = time.perf_counter()
    spec = qubit()
    dth = tip_angle(spec)
    grid = ClockGrid.for_qubit(spec, 8, 800)  # 20 ns at 8 ticks per qubit period
    res_pat = resonant_pattern(spec, grid, math.pi / 2, dth)
    resonant = fitness(res_pat, spec, HALF_PI_Y, dth)
    best = ga_search(GAConfig(), grid, spec, HALF_PI_Y, dth, [res_pat]).best_infidelity
    record(3, best <= 0.1 * resonant,
           f"resonant {resonant:.3e} -> GA {best:.3e}, gain {resonant / best:.1f}x (>= 10x)",
           time.perf_counter() - t0, 1800)


def test_criterion_04_register_operating_point():
    t0 = time.perf_counter()
    spec = qubit()
    dth = math.pi / 50
    grid = ClockGrid.for_qubit(spec, 8, 200)
    res_pat = resonant_pattern(spec, grid, math.pi / 2, dth)
    best = ga_search(GAConfig(), grid, spec, HALF_PI_Y, dth, [res_pat]).best_infidelity
    record(4, best <= 1e-3, f"200-bit register, tip pi/50: infidelity {best:.3e} (<= 1e-3)",
           time.perf_counter() - t0, 1800)


def test_criterion_05_thermal_integrals():
    t0 = time.perf_counter()
    rep = budget_from_config(cfgmod.load("budget", None)[0])
    kapton, nbti = rep.mk_items["kapton_heat_w"], rep.mk_items["nbti_heat_w"]
    qk = wiring_heat_quadrature(WiringSpec("kapton_hn", 1.3e-2))
    qn = wiring_heat_quadrature(WiringSpec("nbti", 1.5e-4))
    ok = (abs(kapton / 220e-6 - 1) <= 0.15 and abs(nbti / 40e-6 - 1) <= 0.15
          and abs(qk / kapton - 1) <= 1e-6 and abs(qn / nbti - 1) <= 1e-6)
    record(5, ok, f"Kapton {kapton * 1e6:.1f} uW (220 +/- 15%), NbTi {nbti * 1e6:.2f} uW (40 +/- 15%), "
                  f"quadrature rel. diff {max(abs(qk / kapton - 1), abs(qn / nbti - 1)):.1e}",
           time.perf_counter() - t0, 1)


def test_criterion_06_counts():
    t0 = time.perf_counter()
    got = (mux_junctions(MuxSpec(100, "merger_tree")), mux_junctions(MuxSpec(100, "squid_stack")),
           demux_junctions(DemuxSpec(10)))
    p2s_ok = all(p2s_junction_overhead(n) == 3 * n - 4 for n in range(2, 2049))
    record(6, got == (600, 300, 113) and p2s_ok,
           f"MUX {got[0]}/{got[1]}, DEMUX {got[2]}, P2S 3N-4 for N = 2..2048: {p2s_ok}",
           time.perf_counter() - t0, 1)


def test_criterion_07_power():
    t0 = time.perf_counter()
    pj = junction_power(JunctionBias(100e-6, 0.75, 5e9))
    rep = budget_from_config(cfgmod.load("budget", None)[0])
    iface = rep.mk_items["interface_power_w"]
    het = rep.heterodyne
    ok = (abs(pj / 7.8e-10 - 1) < 0.01 and 2e-3 / 1.5 <= iface <= 2e-3 * 1.5
          and het.hemt_total_w == 100.0 and het.twpa_total_w == 0.1)
    record(7, ok, f"junction {pj:.3e} W, interface {iface * 1e3:.3f} mW, "
                  f"heterodyne {het.hemt_total_w:g} W / {het.twpa_total_w * 1e3:g} mW",
           time.perf_counter() - t0, 1)


def test_criterion_08_pulse_energy():
    t0 = time.perf_counter()
    _, quanta = pulse_energy(qubit())
    record(8, 0.5e-4 <= quanta <= 2e-4 and abs(quanta / 6.4e-5 - 1) <= 0.1,
           f"{quanta:.3e} quanta (6.4e-5 +/- 10%, within [5e-5, 2e-4])", time.perf_counter() - t0, 1)


def test_criterion_09_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(20):
        d = 2 + i % 4
        spec = qubit(d)
        n_ticks = 8 * 20
        ticks = np.sort(rng.choice(n_ticks, size=int(rng.integers(1, 25)), replace=False))
        times = ticks * spec.period / 8
        total = 20 * spec.period
        dth = float(rng.choice([math.pi / 50, math.pi / 100, 0.016]))
        u = propagate_sequence(spec, [PulseEvent(float(t)) for t in times], dth, total)
        widths = [spec.period / 10 ** k for k in (3, 4, 5)]
        vals = [finite_width_propagator(d, spec.omega01, spec.anharmonicity_alpha, times, dth, total, w)
                for w in widths]
        worst = max(worst, float(np.max(np.abs(richardson(vals, 10) - u))))
    record(9, worst <= 1e-6, f"max |U - U_oracle| = {worst:.2e} over 20 patterns, d = 2..5 (<= 1e-6)",
           time.perf_counter() - t0, 300)


def test_criterion_10_pgu_stream():
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    bad = 0
    for i in range(1000):
        m, n = int(rng.integers(1, 9)), int(rng.integers(2, 1025))
        pats = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
        # force pulses on both sides of every seam
        pats[:, 0] = 1
        pats[:, -1] = 1
        mode = "merger_sync" if i % 2 == 0 else "p2s"
        regs = [load_pattern(S2PRegister(n), p) for p in pats]
        out = stream_pgu(PGUConfig(n, m, 40_000_000_000, mode), regs)
        bits = np.array([b for _, b in out], dtype=np.uint8)
        ticks = [t for t, _ in out]
        if not (np.array_equal(bits, pats.reshape(-1)) and ticks == list(range(m * n))):
            bad += 1
    record(10, bad == 0, f"{1000 - bad}/1000 random loads (M <= 8, N <= 1024) bit-exact",
           time.perf_counter() - t0, 60)


def test_criterion_11_demod():
    t0 = time.perf_counter()
    cfg = DemodConfig(100e-12)
    got = [jpm_delay_demod(cfg, d) for d in (0.0, 75e-12, cfg.delay_threshold)]
    record(11, got == [DemodBin.EVEN, DemodBin.ODD, DemodBin.ODD],
           "delay 0 -> %s, 0.75 T -> %s, threshold -> %s" % tuple(b.value for b in got),
           time.perf_counter() - t0, 1)


def test_criterion_12_measurement():
    # The documented parameters are used literally. With the click model
    # P(click|bright) = 1 - (1 - p_d) exp(-eta n), eta n = ln 25 gives
    # F = 0.96 - 0.96/25 = 0.9216, not 0.92; the 0.92 point needs eta n = ln 24.
    t0 = time.perf_counter()
    model = JPMClickModel(math.log(25.0), 0.0, 1.0, 0.04)
    f = single_shot_fidelity(model)
    e = expected_click_rate(model, 0.5)
    c = measurement_shot(model, 0.5, rng_seed=12, shots=100_000)
    z = abs(c.click_rate - e) / math.sqrt(e * (1 - e) / c.shots)
    calibrated = single_shot_fidelity(JPMClickModel.operating_point())
    record(12, abs(f - 0.92) <= 1e-6 and z <= 3,
           f"closed form F = {f:.6f} (target 0.92 +/- 1e-6); Monte Carlo |z| = {z:.2f} (<= 3) at 1e5 shots; "
           f"calibrated eta*n = ln 24 gives F = {calibrated:.6f}",
           time.perf_counter() - t0, 10)


def test_criterion_13_cz():
    t0 = time.perf_counter()
    spec = cz_tuned_pair(5.0, 200.0, 200.0, 20.0, levels=4)  # J/2pi = 20 MHz
    res = cz_protocol(spec, n2=12000, clock_substeps=16)
    err = abs(abs(res.conditional_phase) - math.pi)
    record(13, err <= 0.05 and res.return_population >= 0.99,
           f"phi = {res.conditional_phase:.4f} (|phi - pi| = {err:.3f} <= 0.05), "
           f"P(11) = {res.return_population:.5f} (>= 0.99)",
           time.perf_counter() - t0, 300)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
