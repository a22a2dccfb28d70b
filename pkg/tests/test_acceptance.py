"""End-to-end acceptance checks with one pass/fail line per criterion."""

import numpy as np
import pytest

from jcsim.cd import (
    CdSpec,
    RampSchedule,
    cd_3s1e,
    subset_states_2s2e,
)
from jcsim.evolve import (
    DecoherenceRates,
    EvolutionConfig,
    evolve_lindblad,
    evolve_unitary,
)
from jcsim.model import (
    LatticeParams,
    build_hamiltonian,
    coupling_vg,
    enumerate_basis,
    hopping_vj,
    swap_permutation,
)
from jcsim.noise import NoiseConfig, run_ensemble
from jcsim.spectra import (
    analytic_spectrum_2s1e,
    analytic_spectrum_2s2e,
    eigendecompose,
    symmetry_adapted,
)

T_HALF = 0.5 * np.pi
RNG = np.random.default_rng(190844)


def _criterion(name: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def _config(g=1.0, J=0.0, delta=1.0, n_sites=2, k=1, parameter="J", shape="linear",
            start=0.0, target=2.0, T=T_HALF, cd="none", n_steps=4000, **kwargs):
    return EvolutionConfig(
        params=LatticeParams(n_sites, g, J, delta),
        ramp=RampSchedule(parameter, shape, start, target, T),
        n_excitations=k,
        cd=CdSpec(cd),
        n_steps=n_steps,
        **kwargs,
    )


def test_analytic_vs_numeric_spectrum():
    basis1 = enumerate_basis(2, 1)
    worst_e, worst_ov = 0.0, 1.0
    for _ in range(1000):
        g, J, delta = RNG.uniform(0.1, 3.0, 3)
        energies, vectors = analytic_spectrum_2s1e(g, J, delta)
        spec = eigendecompose(build_hamiltonian(LatticeParams(2, g, J, delta), basis1))
        worst_e = max(worst_e, float(np.max(np.abs(np.sort(energies) - spec.energies))))
        for i in range(4):
            j = int(np.argmin(np.abs(spec.energies - energies[i])))
            worst_ov = min(worst_ov, float(np.abs(np.vdot(spec.states[:, j], vectors[:, i]))))
    basis2 = enumerate_basis(2, 2)
    worst_e2 = 0.0
    for _ in range(1000):
        g, J = RNG.uniform(0.1, 3.0, 2)
        energies = np.sort(analytic_spectrum_2s2e(g, J))
        spec = eigendecompose(build_hamiltonian(LatticeParams(2, g, J, 0.0), basis2))
        worst_e2 = max(worst_e2, float(np.max(np.abs(energies - spec.energies))))
    _criterion(
        "analytic vs numeric spectrum (1000 random points per sector)",
        worst_e < 1e-10 and worst_ov > 1 - 1e-10 and worst_e2 < 1e-10,
        f"energy {max(worst_e, worst_e2):.2e}, overlap deficit {1 - worst_ov:.2e}",
    )


def test_ground_degeneracy_at_zero_hopping():
    worst = 0.0
    for g in np.linspace(0.1, 3.0, 15):
        for delta in np.linspace(-2.0, 2.0, 15):
            energies, _ = analytic_spectrum_2s1e(g, 0.0, delta)
            worst = max(worst, abs(energies[0] - energies[2]))
    _criterion("level pairing at J = 0 across the (g, delta) grid", worst < 1e-12,
               f"max |E1-E3| = {worst:.2e}")


def test_cd_exactness_on_the_hopping_ramp():
    worst_cd = 0.0
    worst_bare = 1.0
    for shape in ("linear", "quadratic"):
        for cd in ("exact", "simplified"):
            traj = evolve_unitary(_config(shape=shape, cd=cd))
            worst_cd = max(worst_cd, float(np.max(1 - traj.fidelity)))
        bare = evolve_unitary(_config(shape=shape))
        worst_bare = min(worst_bare, float(1 - bare.fidelity[-1]))
    _criterion(
        "hopping-ramp CD keeps max 1-F below 1e-9 while no-CD exceeds 0.01",
        worst_cd < 1e-9 and worst_bare > 0.01,
        f"CD {worst_cd:.2e}, no-CD {worst_bare:.3f}",
    )


def test_cd_variant_equivalence():
    worst = 0.0
    for kwargs in (
        dict(parameter="J", target=2.0, g=1.0, delta=1.0),
        dict(parameter="g", target=1.0, J=2.0, delta=1.0),
    ):
        traces = {
            cd: evolve_unitary(_config(cd=cd, **kwargs)).fidelity
            for cd in ("exact", "full_analytic", "simplified")
        }
        worst = max(worst, float(np.max(np.abs(traces["exact"] - traces["full_analytic"]))))
        worst = max(worst, float(np.max(np.abs(traces["full_analytic"] - traces["simplified"]))))
    _criterion("spectral, collective, and local CD give identical fidelity traces",
               worst < 1e-10, f"max trace gap {worst:.2e}")


def test_coupling_ramp_cd():
    traj = evolve_unitary(_config(parameter="g", target=1.0, J=2.0, delta=1.0, cd="simplified"))
    worst = float(np.max(1 - traj.fidelity))
    _criterion("coupling-ramp CD keeps max 1-F below 1e-9", worst < 1e-9, f"{worst:.2e}")


def test_self_protected_trajectory():
    traj = evolve_unitary(_config(parameter="g", target=1.0, J=2.0, delta=2.0))
    worst = float(np.max(1 - traj.fidelity))
    basis = enumerate_basis(2, 1)
    vg = coupling_vg(basis)
    worst_el = 0.0
    for gv in np.linspace(0.01, 1.0, 100):
        spec = eigendecompose(build_hamiltonian(LatticeParams(2, gv, 2.0, 2.0), basis))
        table = np.abs(spec.states.conj().T @ vg @ spec.states)
        # the two lowest levels form the protected doublet
        worst_el = max(worst_el, float(table[0, 1]))
    _criterion(
        "ramp at delta = J is self-protected without CD",
        worst < 1e-8 and worst_el < 1e-12,
        f"max 1-F {worst:.2e}, matrix element {worst_el:.2e}",
    )


def test_adiabatic_limit_of_the_bare_ramp():
    best = 1.0
    for T in np.geomspace(0.1 * np.pi, 8 * np.pi, 12):
        traj = evolve_unitary(_config(T=float(T)))
        best = min(best, float(1 - traj.fidelity[-1]))
    _criterion("bare-ramp final infidelity drops below 1e-3 at long times",
               best < 1e-3, f"min 1-F(T) = {best:.2e}")


def test_two_excitation_ramp():
    base = dict(g=1.0, delta=0.0, k=2, target=1.0)
    v3 = subset_states_2s2e(1.0, 0.0)[:, 1]
    bare = evolve_unitary(_config(**base))
    exact = evolve_unitary(_config(cd="exact", **base))
    subset_v7 = evolve_unitary(_config(cd="simplified", **base))
    subset_v3 = evolve_unitary(_config(cd="simplified", initial_state=v3, **base))
    bare_final = float(1 - bare.fidelity[-1])
    exact_max = float(np.max(1 - exact.fidelity))
    v3_max = float(np.max(1 - subset_v3.fidelity))
    trace_gap = float(np.max(np.abs(subset_v7.fidelity - bare.fidelity)))
    _criterion(
        "two-excitation ramp: bare > 0.4, exact CD < 1e-8, subset CD protects "
        "the decoupled state and leaves the ground trajectory untouched",
        bare_final > 0.4 and exact_max < 1e-8 and v3_max < 1e-9 and trace_gap < 1e-10,
        f"bare {bare_final:.3f}, exact {exact_max:.2e}, "
        f"subset-seeded {v3_max:.2e}, trace gap {trace_gap:.2e}",
    )


def test_two_excitation_subset_decoupling():
    basis = enumerate_basis(2, 2)
    P = swap_permutation(basis)
    vj = hopping_vj(basis)
    worst = 0.0
    for g in (0.5, 1.0, 1.5, 2.0):
        for J in (0.1, 0.5, 1.0, 1.9):
            spec = symmetry_adapted(
                eigendecompose(build_hamiltonian(LatticeParams(2, g, J, 0.0), basis)), P
            )
            S = subset_states_2s2e(g, J, basis)
            sub = [int(np.argmax(np.abs(spec.states.conj().T @ S[:, i]))) for i in range(3)]
            outside = [j for j in range(8) if j not in sub]
            table = np.abs(spec.states.conj().T @ vj @ spec.states)
            worst = max(worst, float(np.max(table[np.ix_(sub, outside)])))
    _criterion("hopping induces no transitions out of the three-state subset",
               worst < 1e-12, f"max element {worst:.2e}")


def test_three_site_cd_structure_and_evolution():
    basis = enumerate_basis(3, 1)
    g, J, delta = 1.0, 2.0, 1.0
    spec = eigendecompose(build_hamiltonian(LatticeParams(3, g, J, delta), basis))
    full = cd_3s1e(g, J, delta, 1.0).matrix
    E = spec.states.conj().T @ full @ spec.states
    mask = np.ones((6, 6), dtype=bool)
    mask[0, 3] = mask[3, 0] = mask[2, 5] = mask[5, 2] = False
    support = float(np.max(np.abs(E[mask])))
    traj = evolve_unitary(_config(n_sites=3, delta=1.0, target=2.0, cd="simplified"))
    worst = float(1 - traj.fidelity[-1])
    _criterion(
        "three-site CD lives on two eigen-blocks and its simplified form "
        "protects the ground trajectory",
        support < 1e-10 and worst < 1e-8,
        f"off-block {support:.2e}, 1-F(T) {worst:.2e}",
    )


def test_measurement_witness():
    one = evolve_unitary(_config(cd="simplified", observables=("sxsx",)))
    one_bare = evolve_unitary(_config(observables=("sxsx",)))
    ground = one.observables["sxsx_ground"]
    start_err = abs(ground[0] - 0.7236)
    end_err = abs(ground[-1] - 0.2764)
    track = float(np.max(np.abs(one.observables["sxsx"] - ground)))
    deviate = float(np.max(np.abs(one_bare.observables["sxsx"] - ground)))

    two = evolve_unitary(
        _config(g=1.0, delta=0.0, k=2, target=1.0, cd="exact", observables=("sxsx",))
    )
    ground2 = two.observables["sxsx_ground"]
    start2 = abs(ground2[0] - 0.0)
    end2 = abs(ground2[-1] - 0.3659)
    track2 = float(np.max(np.abs(two.observables["sxsx"] - ground2)))
    _criterion(
        "qubit-pair witness endpoints and CD tracking",
        start_err < 5e-4 and end_err < 5e-4 and track < 1e-6 and deviate > 0.01
        and start2 < 5e-4 and end2 < 5e-4 and track2 < 1e-6,
        f"endpoints {max(start_err, end_err, start2, end2):.1e}, "
        f"CD tracking {max(track, track2):.1e}, no-CD deviation {deviate:.3f}",
    )


def test_noise_robustness():
    alphas = np.round(np.arange(0.01, 0.1501, 0.01), 4)
    means = []
    errs = []
    for alpha in alphas:
        res = run_ensemble(
            _config(cd="simplified"),
            NoiseConfig(alpha=float(alpha), n_samples=100, seed=20240817),
        )
        means.append(1 - res.mean_F_T)
        errs.append(res.std_F_T / np.sqrt(100))
    means = np.array(means)
    errs = np.array(errs)
    monotone = all(
        means[i + 1] >= means[i] - 2 * np.hypot(errs[i], errs[i + 1])
        for i in range(len(means) - 1)
    )
    _criterion(
        "noise ensembles: mild, monotone degradation with CD applied",
        means[-1] < 0.1 and monotone,
        f"mean 1-F(T) at alpha=0.15: {means[-1]:.2e}",
    )


def test_decoherence_penalty():
    rates = DecoherenceRates(gamma=(5 / np.pi) * 1e-5, kappa=5e-5)
    clean = DecoherenceRates(0.0, 0.0)
    penalties = {}
    for T in (T_HALF, 5.5 * np.pi):
        damped = evolve_lindblad(_config(cd="simplified", T=T), rates)
        ref = evolve_lindblad(_config(cd="simplified", T=T), clean)
        penalties[T] = float((1 - damped.fidelity[-1]) - (1 - ref.fidelity[-1]))
    short, long_ = penalties[T_HALF], penalties[5.5 * np.pi]
    _criterion(
        "decoherence penalty is small at short times and grows at least 5x "
        "for the eleven-times-longer ramp",
        short < 1e-3 and long_ > 5 * short,
        f"penalty {short:.2e} vs {long_:.2e}",
    )


def test_numerical_hygiene():
    traj = evolve_unitary(_config(cd="simplified", record_states=True))
    norm_drift = float(np.max(np.abs(np.linalg.norm(traj.states, axis=1) - 1)))

    master = evolve_lindblad(
        _config(cd="simplified", n_steps=500, record_states=True),
        DecoherenceRates(gamma=1e-3, kappa=1e-3),
    )
    traces = np.array([np.trace(r).real for r in master.states])
    trace_drift = float(np.max(np.abs(traces - 1)))
    min_eig = min(float(np.min(np.linalg.eigvalsh(r))) for r in master.states[::25])

    from jcsim.cd import cd_from_eigensystem

    basis = enumerate_basis(2, 1)
    spec = eigendecompose(build_hamiltonian(LatticeParams(2, 1.0, 0.7, 1.0), basis))
    dh = 1.3 * hopping_vj(basis)
    ref = cd_from_eigensystem(spec.energies, spec.states, dh)
    gauge = 0.0
    for _ in range(20):
        phases = np.exp(1j * RNG.uniform(0, 2 * np.pi, 4))
        alt = cd_from_eigensystem(spec.energies, spec.states * phases[None, :], dh)
        gauge = max(gauge, float(np.max(np.abs(alt - ref))))

    ns = [50, 100, 200, 400]
    ref_state = evolve_unitary(_config(n_steps=6400, record_states=True)).states[-1]
    errors = [
        np.linalg.norm(evolve_unitary(_config(n_steps=n, record_states=True)).states[-1] - ref_state)
        for n in ns
    ]
    slope = float(np.polyfit(np.log(ns), np.log(errors), 1)[0])

    _criterion(
        "hygiene: norm, trace, positivity, gauge invariance, integrator order",
        norm_drift < 1e-10 and trace_drift < 1e-8 and min_eig > -1e-8
        and gauge < 1e-12 and abs(slope + 2.0) < 0.3,
        f"norm {norm_drift:.1e}, trace {trace_drift:.1e}, min-eig {min_eig:.1e}, "
        f"gauge {gauge:.1e}, slope {slope:.2f}",
    )
