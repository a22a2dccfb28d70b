"""Unitary and Lindblad propagation: accuracy, hygiene, and observables."""

import numpy as np
import pytest

from jcsim.cd import CdSpec, RampSchedule
from jcsim.errors import InvalidArgumentError
from jcsim.evolve import (
    DecoherenceRates,
    EvolutionConfig,
    evolve_lindblad,
    evolve_unitary,
    fidelity,
    observable_sxsx,
    ramp_values,
    reference_path,
    resolved_ground,
)
from jcsim.model import (
    LatticeParams,
    build_hamiltonian,
    coupling_vg,
    enumerate_basis,
    hopping_vj,
)

T_HALF = 0.5 * np.pi


def _config(
    n_sites=2,
    k=1,
    g=1.0,
    J=0.0,
    delta=1.0,
    parameter="J",
    shape="linear",
    start=0.0,
    target=2.0,
    T=T_HALF,
    cd="none",
    n_steps=1000,
    **kwargs,
):
    return EvolutionConfig(
        params=LatticeParams(n_sites, g, J, delta),
        ramp=RampSchedule(parameter, shape, start, target, T),
        n_excitations=k,
        cd=CdSpec(cd),
        n_steps=n_steps,
        **kwargs,
    )


def test_ramp_values_override_the_ramped_parameter():
    ts = np.linspace(0, T_HALF, 5)
    g_t, J_t, dlam = ramp_values(_config(), ts)
    assert np.allclose(g_t, 1.0)
    assert np.allclose(J_t, 2.0 * ts / T_HALF)
    assert np.allclose(dlam, 2.0 / T_HALF)
    g_t, J_t, _ = ramp_values(_config(parameter="g", target=1.0, J=2.0), ts)
    assert np.allclose(J_t, 2.0)
    assert np.allclose(g_t, ts / T_HALF)


def test_resolved_ground_picks_the_adiabatic_branch():
    basis = enumerate_basis(2, 1)
    h0 = build_hamiltonian(LatticeParams(2, 1.0, 0.0, 1.0), basis).matrix
    vop = hopping_vj(basis)
    v0 = resolved_ground(h0, vop)
    # continuing the ramp slightly must keep the overlap near one
    h1 = build_hamiltonian(LatticeParams(2, 1.0, 1e-6, 1.0), basis).matrix
    w, V = np.linalg.eigh(h1)
    assert abs(np.vdot(V[:, 0], v0)) > 1 - 1e-6


def test_reference_path_is_continuous_through_degeneracies():
    config = _config()
    ts = np.linspace(0, T_HALF, 400)
    basis = enumerate_basis(2, 1)
    h0 = build_hamiltonian(LatticeParams(2, 1.0, 0.0, 1.0), basis).matrix
    seed = resolved_ground(h0, hopping_vj(basis))
    refs = reference_path(config, ts, seed)
    steps = np.abs(np.einsum("ti,ti->t", refs[:-1].conj(), refs[1:]))
    assert np.min(steps) > 0.999


def test_unitary_norm_preservation_and_monotone_grid():
    traj = evolve_unitary(_config(record_states=True))
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(T_HALF)
    norms = np.linalg.norm(traj.states, axis=1)
    assert np.max(np.abs(norms - 1)) < 1e-10
    assert traj.fidelity[0] == pytest.approx(1.0, abs=1e-12)


def test_no_cd_run_loses_fidelity_but_cd_run_does_not():
    bare = evolve_unitary(_config())
    driven = evolve_unitary(_config(cd="simplified"))
    assert 1 - bare.fidelity[-1] > 0.01
    assert np.max(1 - driven.fidelity) < 1e-9


def test_exact_full_and_simplified_cd_agree_pointwise():
    exact = evolve_unitary(_config(cd="exact"))
    full = evolve_unitary(_config(cd="full_analytic"))
    simp = evolve_unitary(_config(cd="simplified"))
    assert np.max(np.abs(exact.fidelity - full.fidelity)) < 1e-10
    assert np.max(np.abs(exact.fidelity - simp.fidelity)) < 1e-10


def test_integrator_order_is_second():
    # global error of the midpoint-exponential rule scales as n^-2
    errors = []
    ns = [50, 100, 200, 400]
    ref = evolve_unitary(_config(n_steps=6400, record_states=True))
    psi_ref = ref.states[-1]
    for n in ns:
        traj = evolve_unitary(_config(n_steps=n, record_states=True))
        errors.append(np.linalg.norm(traj.states[-1] - psi_ref))
    slope = np.polyfit(np.log(ns), np.log(errors), 1)[0]
    assert abs(slope + 2.0) < 0.3


def test_explicit_initial_state_must_be_normalized():
    with pytest.raises(InvalidArgumentError):
        _config(initial_state=np.array([1.0, 1.0, 0.0, 0.0]))


def test_fidelity_conventions():
    v = np.array([1.0, 0.0], dtype=complex)
    w = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    assert fidelity(w, v) == pytest.approx(0.5)
    rho = np.outer(w, w.conj())
    assert fidelity(rho, v) == pytest.approx(0.5)
    with pytest.raises(InvalidArgumentError):
        fidelity(np.array([1.0, 0.0, 0.0]), v)


def test_sxsx_observable_on_the_initial_ground_state():
    traj = evolve_unitary(_config(cd="simplified", observables=("sxsx",)))
    start = traj.observables["sxsx"][0]
    assert start == pytest.approx((5 + np.sqrt(5)) / 10, abs=1e-10)
    # CD evolution keeps the witness on the ground-state curve
    dev = np.max(np.abs(traj.observables["sxsx"] - traj.observables["sxsx_ground"]))
    assert dev < 1e-6


def test_lindblad_zero_rates_match_unitary_evolution():
    unitary = evolve_unitary(_config(n_steps=300))
    master = evolve_lindblad(_config(n_steps=300), DecoherenceRates(0.0, 0.0))
    assert np.max(np.abs(unitary.fidelity - master.fidelity)) < 1e-9


def test_lindblad_trace_and_positivity():
    rates = DecoherenceRates(gamma=1e-3, kappa=1e-3)
    traj = evolve_lindblad(_config(n_steps=300, cd="simplified", record_states=True), rates)
    for rho in traj.states[:: 50]:
        assert abs(np.trace(rho).real - 1) < 1e-8
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-8


def test_lindblad_damping_reduces_fidelity():
    clean = evolve_lindblad(_config(n_steps=300, cd="simplified"), DecoherenceRates(0, 0))
    noisy = evolve_lindblad(
        _config(n_steps=300, cd="simplified"), DecoherenceRates(gamma=5e-3, kappa=5e-3)
    )
    assert noisy.fidelity[-1] < clean.fidelity[-1] - 1e-4


def test_negative_rates_rejected():
    with pytest.raises(InvalidArgumentError):
        DecoherenceRates(gamma=-1.0)


def test_self_protected_gramp_needs_no_cd():
    # coupling ramp at delta = J: the dangerous matrix element vanishes
    config = _config(parameter="g", J=2.0, delta=2.0, target=1.0, n_steps=2000)
    traj = evolve_unitary(config)
    assert np.max(1 - traj.fidelity) < 1e-8
    basis = enumerate_basis(2, 1)
    for Jv in [2.0]:
        for gv in np.linspace(0.01, 1.0, 100):
            H = build_hamiltonian(LatticeParams(2, gv, Jv, 2.0), basis)
            from jcsim.spectra import eigendecompose

            spec = eigendecompose(H)
            vg = coupling_vg(basis)
            table = np.abs(spec.states.conj().T @ vg @ spec.states)
            # lowest doublet transition element vanishes identically
            pos = np.argsort(spec.energies)
            assert table[pos[0], pos[1]] < 1e-12 or table[pos[0], 1] < 1e-12


def test_convergence_check_passes_on_a_smooth_run():
    traj = evolve_unitary(_config(cd="simplified", n_steps=500), check_convergence=True)
    assert np.max(1 - traj.fidelity) < 1e-9
