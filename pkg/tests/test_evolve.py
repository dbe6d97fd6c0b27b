import math

import numpy as np
import pytest
import scipy.linalg

from clustergen.basis import SpinBasis
from clustergen.evolve import (
    MODEL_KINDS,
    QuenchError,
    global_pulse,
    make_model,
    propagate,
    propagate_series,
    quench_omega,
    run_echo_ising,
    run_time_reversal,
    two_site_unitary_offdiag,
)
from clustergen.hamiltonian import HubbardParams, cluster_time, j_zz
from clustergen.lattice import LatticeGeometry
from clustergen.observables import fidelity
from clustergen.states import StateVector, spin_left_product

P = HubbardParams(J=1.0, U=56.0, Omega=66.0, dimensionality=1)


def chain(L, periodic=False):
    return LatticeGeometry(
        extents=(L, 1, 1), boundary=("periodic" if periodic else "open", "open", "open")
    )


def random_state(basis, seed=0):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return StateVector(basis, amps / np.linalg.norm(amps))


def test_propagate_matches_dense_expm():
    geom = chain(4)
    model = make_model("superexchange", geom, P)
    psi = random_state(model.basis, 3)
    t = 1.7
    expected = scipy.linalg.expm(-1j * t * model.hamiltonian().dense()) @ psi.amplitudes
    got = propagate(model.hamiltonian(), psi, t).amplitudes
    assert np.max(np.abs(got - expected)) < 1e-12


def test_propagate_series_consistency():
    geom = chain(4)
    model = make_model("superexchange", geom, P)
    psi = random_state(model.basis, 4)
    times = np.linspace(0.0, 3.0, 7)
    series = propagate_series(model.hamiltonian(), psi, times)
    for t, state in zip(times, series):
        direct = propagate(model.hamiltonian(), psi, float(t))
        assert abs(abs(np.vdot(state.amplitudes, direct.amplitudes)) - 1) < 1e-12


def test_quench_flips_jzz_sign():
    q = quench_omega(P)
    assert j_zz(q) == pytest.approx(-j_zz(P), rel=1e-14)


def test_quench_is_an_involution():
    q2 = quench_omega(quench_omega(P))
    assert q2.Omega == pytest.approx(P.Omega, rel=1e-14)


def test_quench_rejects_out_of_range_drive():
    with pytest.raises(QuenchError):
        quench_omega(HubbardParams(J=1.0, U=50.0, Omega=50.0 * math.sqrt(2) + 1))


def test_global_pulse_pi_about_x_flips_sz():
    geom = chain(3)
    model = make_model("superexchange", geom, P)
    psi = random_state(model.basis, 5)
    from clustergen.observables import collective_spin

    before = collective_spin(psi, "z")
    after = collective_spin(global_pulse(psi, "x", math.pi), "z")
    assert after == pytest.approx(-before, abs=1e-12)


def test_echo_equals_ising_for_zz_model():
    """With flip-flop off the echo removes fields exactly, leaving pure Ising."""
    geom = chain(5, periodic=False)
    model = make_model("superexchange_zz_only", geom, P)
    ising = make_model("ising", geom, P)
    psi0 = spin_left_product(model.basis)
    for t in (0.7, cluster_time(P)):
        echoed = run_echo_ising(model, psi0, t)
        direct = propagate(ising.hamiltonian(), psi0, t)
        assert 1 - fidelity(echoed, direct) < 1e-12


def test_time_reversal_returns_to_start_for_ising():
    geom = chain(5)
    model = make_model("ising", geom, P)
    psi0 = spin_left_product(model.basis)
    t = cluster_time(P)
    out = run_time_reversal(model, psi0, t, t)
    # forward echo then quenched echo at equal times undoes the Ising phase,
    # leaving only the two global pi-pulses = a 2pi rotation (global phase)
    assert abs(abs(np.vdot(out.amplitudes, psi0.amplitudes)) - 1) < 1e-10


def test_flip_flop_infidelity_scaling_slope():
    """1-F at t_c from the pair term scales as (J/U)^4: log-log slope -4."""
    geom = chain(4)
    pts = []
    for U, Om in ((50.0, 60.0), (100.0, 120.0), (200.0, 240.0)):
        p = HubbardParams(J=1.0, U=U, Omega=Om, dimensionality=1)
        model = make_model("superexchange", geom, p)
        ising = make_model("ising", geom, p)
        psi0 = spin_left_product(model.basis)
        t = cluster_time(p)
        err = 1 - fidelity(run_echo_ising(model, psi0, t), propagate(ising.hamiltonian(), psi0, t))
        pts.append((U, max(err, 1e-300)))
    slope = (math.log(pts[-1][1]) - math.log(pts[0][1])) / (math.log(pts[-1][0]) - math.log(pts[0][0]))
    assert slope == pytest.approx(-4.0, abs=0.35)


def test_two_site_offdiag_peak_scaling():
    for U, Om in ((50.0, 60.0), (100.0, 120.0)):
        p = HubbardParams(J=1.0, U=U, Omega=Om, dimensionality=1)
        period = 2 * math.pi / (Om * math.sqrt(1 + j_zz(p) / U))
        ts = np.linspace(0.0, 3 * period, 500)
        peak = max(two_site_unitary_offdiag(p, float(t)) for t in ts)
        assert peak == pytest.approx(2 * p.J**2 / (U * Om), rel=0.05)


def test_model_kind_dispatch():
    geom = chain(3)
    for kind in MODEL_KINDS:
        p = P if kind != "fermi_hubbard_literal" else P
        model = make_model(kind, geom, p, n_particles=3)
        H = model.hamiltonian()
        assert H.matrix.shape[0] == model.basis.dim


def test_hole_stays_localized_under_echo():
    """Large drive suppresses first-order hole motion (Fock model, one hole)."""
    geom = chain(5)
    p = HubbardParams(J=1.0, U=115.0, Omega=140.0, dimensionality=1)
    model = make_model("fermi_hubbard_gauged", geom, p, n_particles=4)
    from clustergen.observables import hole_density
    from clustergen.states import fock_left_product

    psi0 = fock_left_product(model.basis, vacancies=(0,))
    psi = run_echo_ising(model, psi0, cluster_time(p) / 2)
    assert hole_density(psi, 0) > 0.9
