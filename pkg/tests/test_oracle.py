import numpy as np
import pytest

from sshqed.band import SSHParams, dispersion
from sshqed.coupling import Geometry, parse_config
from sshqed.dynamics import evolve, initial_density
from sshqed.entanglement import ConcurrenceTrace
from sshqed.oracle import (
    HorizonError,
    PositionRangeError,
    build_hamiltonian,
    centered_cells,
    compare,
    default_horizon,
    evolve_exact,
    initial_state,
)
from sshqed.selfenergy import rates_and_shifts

P = SSHParams(xi=1.0, delta=0.3)
CFG = parse_config("AABB", Geometry(d=1), g=0.05)


def test_hamiltonian_is_symmetric():
    H = build_hamiltonian(CFG, 1.0, P, 128).toarray()
    assert np.max(np.abs(H - H.T)) == 0.0


def test_photon_block_reproduces_band_structure():
    # the cavity sub-block is independent of the atoms: its spectrum must be
    # the two SSH bands at the ring momenta
    p = SSHParams(xi=1.0, delta=0.2)
    L = 256
    H = build_hamiltonian(parse_config("AABB", Geometry(d=1), g=0.05), 1.0, p, L)
    photon = H.toarray()[2:, 2:]
    ev = np.sort(np.linalg.eigvalsh(photon))
    k = 2 * np.pi * np.arange(L) / L
    w = dispersion(k, p)
    ref = np.sort(np.concatenate([w, -w]))
    assert np.max(np.abs(ev - ref)) < 1e-10


def test_atom_rows_couple_only_designated_cavities():
    L = 128
    H = build_hamiltonian(CFG, 1.0, P, L).toarray()
    cells = centered_cells(CFG, L)
    for atom, (cell, letter) in ((0, (cells[0], "A")), (0, (cells[1], "A")),
                                 (1, (cells[2], "B")), (1, (cells[3], "B"))):
        site = 2 + 2 * cell + (0 if letter == "A" else 1)
        assert H[atom, site] == pytest.approx(CFG.g)
    assert H[0, 0] == pytest.approx(1.0)
    assert np.count_nonzero(H[0]) == 3  # detuning + two coupling points
    assert H[0, 1] == 0.0


def test_boundary_wrap_entry():
    Hp = build_hamiltonian(CFG, 1.0, P, 128, boundary="periodic").toarray()
    Ho = build_hamiltonian(CFG, 1.0, P, 128, boundary="open").toarray()
    b_last = 2 + 2 * 127 + 1
    a_first = 2
    assert Hp[b_last, a_first] == pytest.approx(P.t2)
    assert Ho[b_last, a_first] == 0.0
    with pytest.raises(ValueError):
        build_hamiltonian(CFG, 1.0, P, 128, boundary="twisted")


def test_lattice_size_validation():
    with pytest.raises(ValueError):
        build_hamiltonian(CFG, 1.0, P, 99)
    with pytest.raises(ValueError):
        build_hamiltonian(CFG, 1.0, P, 98)
    with pytest.raises(PositionRangeError):
        build_hamiltonian(parse_config("AABB", Geometry(d=40), g=0.05), 1.0, P, 100)


def test_initial_state_and_reduction_at_time_zero():
    L = 100
    traj = evolve_exact(CFG, 1.0, P, L, initial_state(L, "eg"), tmax=1.0)
    assert np.max(np.abs(traj.rhos[0] - initial_density("eg"))) < 1e-14
    with pytest.raises(ValueError):
        initial_state(L, "ee")


def test_norm_energy_and_trace_conservation():
    L = 100
    traj = evolve_exact(CFG, 1.0, P, L, initial_state(L, "ge"), tmax=10.0)
    assert traj.meta["max_norm_drift"] < 1e-9
    assert traj.meta["max_energy_drift"] < 1e-9
    traces = np.einsum("nii->n", traj.rhos).real
    assert np.max(np.abs(traces - 1.0)) < 1e-9


def test_compare_identical_traces_and_horizon_guard():
    t = np.linspace(0, 10, 101)
    v = np.abs(np.sin(t)) / 2
    trace = ConcurrenceTrace(times=t, values=v)
    assert compare(trace, trace, 10.0) == 0.0
    short = ConcurrenceTrace(times=t[:50], values=v[:50])
    with pytest.raises(HorizonError):
        compare(trace, short, 10.0)
    assert default_horizon(400, 500.0) == pytest.approx(160.0)
    assert default_horizon(400, 80.0) == pytest.approx(80.0)


def test_master_equation_matches_exact_lattice():
    # desk-scale version of the full validation: small ring, short window
    L, tmax = 200, 40.0
    se = rates_and_shifts(CFG, 1.0, P)
    master = evolve(initial_density("eg"), se, 1.0, tmax=tmax)
    exact = evolve_exact(CFG, 1.0, P, L, initial_state(L, "eg"), tmax=tmax)
    sup = compare(master.concurrence_trace(), exact.concurrence_trace(),
                  default_horizon(L, tmax))
    assert sup < 0.05


def test_ring_size_does_not_move_the_comparison():
    # inside the reflection horizon the comparison must be L-independent:
    # doubling the ring moves the sup discrepancy by far less than its size
    tmax = 80.0
    se = rates_and_shifts(CFG, 1.0, P)
    master = evolve(initial_density("eg"), se, 1.0, tmax=tmax).concurrence_trace()
    sups = {}
    for L in (400, 800):
        exact = evolve_exact(CFG, 1.0, P, L, initial_state(L, "eg"), tmax=tmax)
        sups[L] = compare(master, exact.concurrence_trace(), tmax)
    assert abs(sups[800] - sups[400]) < 0.005
