import math
import warnings

import numpy as np
import pytest

from sfqlink.coupled import (
    DriveTarget,
    TwoTransmonSpec,
    cz_protocol,
    cz_tuned_pair,
    doublet,
    static_hamiltonian,
    two_qubit_propagate,
)
from sfqlink.transmon import ContractError, PulseEvent, TransmonSpec, propagate_sequence


@pytest.fixture(scope="module")
def pair():
    return cz_tuned_pair(5.0, 200.0, 200.0, 20.0, levels=4)


def test_tuning(pair):
    # omega_A = omega_B - 2 alpha_B
    wa, wb = pair.qubit_a.omega01, pair.qubit_b.omega01
    assert wa == pytest.approx(wb - 2 * pair.qubit_b.anharmonicity_alpha)
    h0 = static_hamiltonian(TwoTransmonSpec(pair.qubit_a, pair.qubit_b, 0.0))
    assert h0[pair.index(0, 3), pair.index(0, 3)] == pytest.approx(h0[pair.index(1, 2), pair.index(1, 2)])


def test_hermitian_and_index(pair):
    h = static_hamiltonian(pair)
    np.testing.assert_allclose(h, h.conj().T)
    assert pair.index(1, 2) == 6 and pair.dim == 16


def test_doublet_splitting(pair):
    ip, im, dr = doublet(pair)
    split = dr.energies[ip] - dr.energies[im]
    # degenerate |03>,|12> mixed by J sqrt(3); second-order shifts from other levels are small
    assert split / pair.coupling_j == pytest.approx(2 * math.sqrt(3), rel=0.02)


def test_zero_coupling_factorizes():
    a = TransmonSpec.from_ghz(4.6, 200, levels=3)
    b = TransmonSpec.from_ghz(5.0, 250, levels=3)
    rng = np.random.default_rng(1)
    for target, (drv, idle) in ((DriveTarget.B, (b, a)), (DriveTarget.A, (a, b))):
        spec = TwoTransmonSpec(a, b, 0.0, target)
        times = np.sort(rng.uniform(0, 2e-9, 15))
        ev = [PulseEvent(t) for t in times]
        u = two_qubit_propagate(spec, ev, 0.05, 2e-9)
        u_drv = propagate_sequence(drv, ev, 0.05, 2e-9)
        u_idle = propagate_sequence(idle, [], 0.05, 2e-9)
        expected = np.kron(u_idle, u_drv) if target is DriveTarget.B else np.kron(u_drv, u_idle)
        np.testing.assert_allclose(u, expected, atol=1e-10)


def test_dim_guard():
    q = TransmonSpec.from_ghz(5, 200, levels=10)
    # per-qubit level cap keeps the joint space at or below 100
    assert TwoTransmonSpec(q, q, 1e6).dim == 100
    with pytest.raises(ContractError):
        TwoTransmonSpec(q, q, -1.0)


def test_levels_too_small():
    spec = cz_tuned_pair(5.0, 200.0, 200.0, 20.0, levels=3)
    with pytest.raises(ContractError):
        cz_protocol(spec, 12000)


def test_small_n2_warns(pair):
    with pytest.warns(UserWarning):
        cz_protocol(pair, 200)


@pytest.mark.parametrize("substeps", [16, 64])
def test_cz_fixture(pair, substeps):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = cz_protocol(pair, 12000, clock_substeps=substeps)
    assert abs(abs(res.conditional_phase) - math.pi) <= 0.05
    assert res.return_population >= 0.999
    # the other computational states are barely touched
    for k in ("00", "01", "10"):
        assert res.populations[k] > 0.999


def test_zero_coupling_no_conditional_phase():
    spec = cz_tuned_pair(5.0, 200.0, 200.0, 0.0, levels=4)
    res = cz_protocol(spec, 2000)
    assert abs(res.conditional_phase) < 1e-6
