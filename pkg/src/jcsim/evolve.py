"""Time evolution under the ramped lattice Hamiltonian with optional CD driving.

Pure states are propagated with an exponential midpoint rule (exact matrix
exponential of the midpoint Hamiltonian per step, second order, norm
preserving by construction).  Open-system dynamics exponentiate the full
Lindblad generator per step on the direct sum of excitation sectors 0..k,
which is closed under the lowering dissipators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from . import cd as cdmod
from .cd import CdSpec, RampSchedule, cd_from_eigensystem
from .errors import AccuracyError, InvalidArgumentError
from .model import (
    Basis,
    LatticeParams,
    build_operator,
    coupling_vg,
    direct_sum_basis,
    enumerate_basis,
    hopping_vj,
    operator_matrix,
    photon_number_total,
    sigma_x_pair,
)
from .spectra import gauge_fix

NORM_TOL = 1e-10
TRACE_TOL = 1e-6
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class DecoherenceRates:
    gamma: float = 0.0  # uniform qubit damping
    kappa: float = 0.0  # uniform cavity damping

    def __post_init__(self):
        if self.gamma < 0 or self.kappa < 0:
            raise InvalidArgumentError("decoherence rates must be non-negative")


@dataclass(frozen=True)
class EvolutionConfig:
    params: LatticeParams  # base values; the ramped parameter is overridden by the ramp
    ramp: RampSchedule
    n_excitations: int
    cd: CdSpec = CdSpec("none")
    n_steps: int = 4000
    initial_state: np.ndarray | None = None  # None: ground state at t = 0
    record_states: bool = False
    observables: tuple = ()

    def __post_init__(self):
        if self.n_steps < 1:
            raise InvalidArgumentError("n_steps must be >= 1")
        if self.initial_state is not None:
            v = np.asarray(self.initial_state, dtype=complex)
            if abs(np.linalg.norm(v) - 1) > 1e-8:
                raise InvalidArgumentError("explicit initial state must be unit norm")
            object.__setattr__(self, "initial_state", v)

    @property
    def total_time(self) -> float:
        return self.ramp.total_time


@dataclass
class Trajectory:
    times: np.ndarray
    fidelity: np.ndarray
    states: np.ndarray | None = None  # (n_times, dim) vectors or (n_times, dim, dim) matrices
    observables: dict = field(default_factory=dict)
    reference_states: np.ndarray | None = None


# ---------------------------------------------------------------------------
# scenario assembly


def ramp_values(config: EvolutionConfig, ts):
    """(g(t), J(t), dlambda/dt(t)) arrays for the configured ramp."""
    ts = np.asarray(ts, dtype=float)
    lam = np.asarray(config.ramp.value(ts), dtype=float)
    dlam = np.broadcast_to(np.asarray(config.ramp.derivative(ts), dtype=float), ts.shape).copy()
    if config.ramp.parameter == "J":
        g_t = np.full_like(ts, config.params.g)
        J_t = lam
    else:
        g_t = lam
        J_t = np.full_like(ts, config.params.J)
    return g_t, J_t, dlam


def lattice_operators(basis: Basis, boundary: str = "open"):
    return photon_number_total(basis), coupling_vg(basis), hopping_vj(basis, boundary)


def bare_hamiltonian_stack(basis: Basis, config: EvolutionConfig, g_t, J_t) -> np.ndarray:
    nph, vg, vj = lattice_operators(basis, config.params.boundary)
    return (
        config.params.delta * nph[None, :, :]
        + g_t[:, None, None] * vg[None, :, :]
        + J_t[:, None, None] * vj[None, :, :]
    )


def _scenario_key(config: EvolutionConfig):
    return (config.params.n_sites, config.n_excitations, config.ramp.parameter)


def _cd_generator_terms(config: EvolutionConfig, g_t, J_t, dlam, sector_stack=None):
    """CD driving as [(coeff(t), generator_builder)] pairs, or None for exact mode.

    Generator builders take a basis so the same physical operator can be
    realized on the fixed-excitation sector or on a direct sum of sectors.
    """
    mode = config.cd.mode
    key = _scenario_key(config)
    dm = config.params.delta - J_t
    dp = config.params.delta + J_t
    chim2 = dm**2 + 4 * g_t**2
    chip2 = dp**2 + 4 * g_t**2
    if key[:2] == (2, 1):
        num_full = (g_t, g_t) if key[2] == "J" else (dm, dp)
        num_local = g_t if key[2] == "J" else dm
        if mode == "full_analytic":
            return [
                (num_full[0] / (2 * chim2) * dlam,
                 lambda b: cdmod._collective_generator(b, +1)),
                ((num_full[1] / (2 * chip2) * dlam) * (-1 if key[2] == "J" else +1),
                 lambda b: cdmod._collective_generator(b, -1)),
            ]
        if mode == "simplified":
            return [(num_local / chim2 * dlam, cdmod.local_cd_generator)]
    if key == (2, 2, "J") and mode == "simplified":
        if config.params.delta != 0:
            raise InvalidArgumentError("two-excitation subset CD requires delta = 0")
        chi2sq = 2 * g_t**2 + J_t**2  # calibrated gap scale, see cd.calibrate_chi2
        return [(g_t / (2 * chi2sq) * dlam, cdmod._four_operator_generator)]
    if key == (3, 1, "J") and mode == "simplified":
        if sector_stack is None:
            raise InvalidArgumentError("three-site simplified CD needs the sector Hamiltonians")
        coeffs = cdmod.simplified_3s1e_coefficients(sector_stack, dlam)
        return [
            (coeffs[:, i, j],
             lambda b, i=i, j=j: cdmod._qubit_cavity_generators(b)[i, j])
            for i, j in cdmod._KEPT_PAIRS_3S
        ]
    if mode in ("exact", "full_analytic"):
        return None  # spectral construction
    raise InvalidArgumentError(
        f"no CD form for scenario {key} in mode {mode!r}"
    )


def total_hamiltonian_stack(
    basis: Basis, config: EvolutionConfig, ts, g_t=None, J_t=None
) -> np.ndarray:
    """H_r(t) + H_1(t) on the given basis at the given times."""
    if g_t is None or J_t is None:
        g_t, J_t, dlam = ramp_values(config, ts)
    else:
        _, _, dlam = ramp_values(config, ts)
    h = bare_hamiltonian_stack(basis, config, g_t, J_t)
    if config.cd.mode == "none":
        return h
    sector_basis = enumerate_basis(config.params.n_sites, config.n_excitations)
    sector_stack = (
        h if basis is sector_basis or basis == sector_basis
        else bare_hamiltonian_stack(sector_basis, config, g_t, J_t)
    )
    terms = _cd_generator_terms(config, g_t, J_t, dlam, sector_stack=sector_stack)
    if terms is not None:
        for coeff, builder in terms:
            h = h + coeff[:, None, None] * builder(basis)[None, :, :]
        return h
    # exact spectral CD, built per excitation sector
    if basis.n_excitations is not None:
        w, V = np.linalg.eigh(h)
        vop = hopping_vj(basis, config.params.boundary) if config.ramp.parameter == "J" \
            else coupling_vg(basis)
        h = h + cd_from_eigensystem(
            w, V, dlam[:, None, None] * vop[None, :, :], config.cd.dedupe_tolerance
        )
        return h
    # direct-sum basis: embed per-sector exact CD blocks
    offset = 0
    out = h.copy()
    for k in range(config.n_excitations + 1):
        sec = enumerate_basis(config.params.n_sites, k)
        d = len(sec)
        if d > 1:
            sl = slice(offset, offset + d)
            block = out[:, sl, sl]
            w, V = np.linalg.eigh(bare_hamiltonian_stack(sec, config, g_t, J_t))
            vop = hopping_vj(sec, config.params.boundary) if config.ramp.parameter == "J" \
                else coupling_vg(sec)
            out[:, sl, sl] = block + cd_from_eigensystem(
                w, V, dlam[:, None, None] * vop[None, :, :], config.cd.dedupe_tolerance
            )
        offset += d
    return out


# ---------------------------------------------------------------------------
# initial state and reference tracking


def resolved_ground(h0: np.ndarray, direction: np.ndarray, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Ground state at t = 0, resolved through degeneracy by the ramp direction.

    If the ground level is degenerate, the ramp perturbation is diagonalized
    inside the degenerate subspace and the branch with the lowest first-order
    energy is returned (the adiabatic continuation of the ground state).
    """
    w, V = np.linalg.eigh(h0)
    cluster = np.nonzero(w - w[0] < tol)[0]
    if len(cluster) == 1:
        return gauge_fix(V[:, :1])[:, 0]
    block = V[:, cluster]
    pert = block.conj().T @ direction @ block
    pw, pv = np.linalg.eigh(pert)
    return gauge_fix((block @ pv)[:, :1])[:, 0]


def reference_path(config: EvolutionConfig, ts, seed_state: np.ndarray) -> np.ndarray:
    """Tracked instantaneous eigenstate of the bare H_r along the ramp.

    Seeded from ``seed_state`` at ts[0]; continuity is enforced by maximal
    overlap with the previously tracked vector, re-phased to a real positive
    overlap.  Returns an array of column states, one row per time.
    """
    basis = enumerate_basis(config.params.n_sites, config.n_excitations)
    g_t, J_t, _ = ramp_values(config, ts)
    h = bare_hamiltonian_stack(basis, config, g_t, J_t)
    w, V = np.linalg.eigh(h)
    refs = np.empty((len(ts), len(basis)), dtype=complex)
    prev = np.asarray(seed_state, dtype=complex)
    for n in range(len(ts)):
        overlaps = V[n].conj().T @ prev
        j = int(np.argmax(np.abs(overlaps)))
        cluster = np.nonzero(np.abs(w[n] - w[n, j]) < DEGENERACY_TOL)[0]
        if len(cluster) > 1:
            # degenerate level: continue the previous reference by projection
            block = V[n][:, cluster]
            vec = block @ (block.conj().T @ prev)
            vec = vec / np.linalg.norm(vec)
        else:
            ov = overlaps[j]
            vec = V[n][:, j] * (ov / np.abs(ov) if np.abs(ov) > 0 else 1.0)
        refs[n] = vec
        prev = vec
    return refs


def _initial_and_seed(config: EvolutionConfig, basis: Basis):
    if config.initial_state is not None:
        psi0 = np.asarray(config.initial_state, dtype=complex)
        return psi0, psi0
    g0, J0, _ = ramp_values(config, np.array([0.0]))
    h0 = bare_hamiltonian_stack(basis, config, g0, J0)[0]
    vop = hopping_vj(basis, config.params.boundary) if config.ramp.parameter == "J" \
        else coupling_vg(basis)
    psi0 = resolved_ground(h0, vop)
    return psi0, psi0


# ---------------------------------------------------------------------------
# propagation


def step_propagators(h_stack: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) for a stack of Hermitian matrices, via batched eigh."""
    w, V = np.linalg.eigh(h_stack)
    phases = np.exp(-1j * dt * w)
    return np.einsum("tij,tj,tkj->tik", V, phases, V.conj())


def fidelity(state, reference) -> float:
    """|<ref|psi>|^2 for pure states, <ref|rho|ref> for density matrices."""
    ref = np.asarray(reference, dtype=complex)
    st = np.asarray(state, dtype=complex)
    if st.ndim == 1:
        if st.shape != ref.shape:
            raise InvalidArgumentError("state/reference dimension mismatch")
        return float(np.abs(np.vdot(ref, st)) ** 2)
    if st.shape != (ref.size, ref.size):
        raise InvalidArgumentError("state/reference dimension mismatch")
    return float(np.real(ref.conj() @ st @ ref))


def observable_sxsx(state, basis: Basis, site_a: int = 0, site_b: int = 1) -> float:
    """<sigma_x(a) sigma_x(b)> on a pure state or density matrix."""
    op = sigma_x_pair(basis, site_a, site_b)
    st = np.asarray(state, dtype=complex)
    if st.ndim == 1:
        return float(np.real(np.vdot(st, op @ st)))
    return float(np.real(np.trace(op @ st)))


def evolve_unitary(config: EvolutionConfig, check_convergence: bool = False) -> Trajectory:
    """Schroedinger propagation of the ramp scenario; records fidelity vs the
    tracked instantaneous reference eigenstate at every step."""
    basis = enumerate_basis(config.params.n_sites, config.n_excitations)
    traj = _evolve_unitary_once(config, basis)
    if check_convergence:
        cfg2 = EvolutionConfig(
            config.params, config.ramp, config.n_excitations, config.cd,
            2 * config.n_steps, config.initial_state, False, ()
        )
        traj2 = _evolve_unitary_once(cfg2, basis)
        if abs(traj.fidelity[-1] - traj2.fidelity[-1]) > 1e-10:
            raise AccuracyError("step-halving changed F(T) by more than 1e-10")
    return traj


def _evolve_unitary_once(config: EvolutionConfig, basis: Basis) -> Trajectory:
    n = config.n_steps
    T = config.total_time
    dt = T / n
    grid = np.linspace(0.0, T, n + 1)
    mids = grid[:-1] + dt / 2
    psi0, seed = _initial_and_seed(config, basis)
    h_mid = total_hamiltonian_stack(basis, config, mids)
    props = step_propagators(h_mid, dt)
    states = np.empty((n + 1, len(basis)), dtype=complex)
    states[0] = psi0
    psi = psi0
    for i in range(n):
        psi = props[i] @ psi
        states[i + 1] = psi
    norms = np.linalg.norm(states, axis=1)
    if np.max(np.abs(norms - 1)) > NORM_TOL:
        raise AccuracyError("norm drift exceeded 1e-10 during unitary evolution")
    refs = reference_path(config, grid, seed)
    fid = np.abs(np.einsum("ti,ti->t", refs.conj(), states)) ** 2
    obs = {}
    if "sxsx" in config.observables:
        op = sigma_x_pair(basis)
        obs["sxsx"] = np.real(np.einsum("ti,ij,tj->t", states.conj(), op, states))
        obs["sxsx_ground"] = np.real(np.einsum("ti,ij,tj->t", refs.conj(), op, refs))
    return Trajectory(
        times=grid,
        fidelity=fid,
        states=states if config.record_states else None,
        observables=obs,
        reference_states=refs,
    )


# ---------------------------------------------------------------------------
# open-system propagation


def _embed_sector_vector(vec: np.ndarray, n_sites: int, k: int, ds_basis: Basis) -> np.ndarray:
    sec = enumerate_basis(n_sites, k)
    out = np.zeros(len(ds_basis), dtype=complex)
    for amp, state in zip(vec, sec.states):
        out[ds_basis.index[state]] = amp
    return out


def lindblad_generator(h: np.ndarray, collapse: Sequence, rates: Sequence) -> np.ndarray:
    """Row-major vectorized Lindblad generator for fixed H and dissipators."""
    d = h.shape[0]
    eye = np.eye(d)
    L = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for c, rate in zip(collapse, rates):
        if rate == 0:
            continue
        cdc = c.conj().T @ c
        L += rate * (
            np.kron(c, c.conj()) - 0.5 * np.kron(cdc, eye) - 0.5 * np.kron(eye, cdc.T)
        )
    return L


def evolve_lindblad(config: EvolutionConfig, rates: DecoherenceRates) -> Trajectory:
    """Master-equation propagation on the direct sum of excitation sectors 0..k.

    Each step exponentiates the full Lindblad generator at the interval
    midpoint, so trace preservation and complete positivity hold exactly.
    Fidelity is <v1(t)|rho(t)|v1(t)> against the tracked sector-k reference.
    """
    n_sites, k = config.params.n_sites, config.n_excitations
    ds = direct_sum_basis(n_sites, k)
    sector = enumerate_basis(n_sites, k)
    n = config.n_steps
    T = config.total_time
    dt = T / n
    grid = np.linspace(0.0, T, n + 1)
    mids = grid[:-1] + dt / 2

    psi0_sec, seed = _initial_and_seed(config, sector)
    psi0 = _embed_sector_vector(psi0_sec, n_sites, k, ds)
    rho = np.outer(psi0, psi0.conj())

    h_mid = total_hamiltonian_stack(ds, config, mids)
    collapse, crates = [], []
    for j in range(n_sites):
        collapse.append(build_operator("sigma_minus", j, ds))
        crates.append(rates.gamma)
        collapse.append(build_operator("a", j, ds))
        crates.append(rates.kappa)

    dim = len(ds)
    record = np.empty((n + 1, dim, dim), dtype=complex) if config.record_states else None
    refs_sec = reference_path(config, grid, seed)
    refs = np.array([_embed_sector_vector(r, n_sites, k, ds) for r in refs_sec])
    fid = np.empty(n + 1)
    obs_series = np.empty(n + 1) if "sxsx" in config.observables else None
    sxx = sigma_x_pair(ds) if obs_series is not None else None

    def record_step(i, rho):
        fid[i] = float(np.real(refs[i].conj() @ rho @ refs[i]))
        if obs_series is not None:
            obs_series[i] = float(np.real(np.trace(sxx @ rho)))
        if record is not None:
            record[i] = rho

    record_step(0, rho)
    vec = rho.reshape(-1)
    for i in range(n):
        gen = lindblad_generator(h_mid[i], collapse, crates)
        vec = scipy.linalg.expm(gen * dt) @ vec
        rho = vec.reshape(dim, dim)
        record_step(i + 1, rho)
    if abs(np.real(np.trace(rho)) - 1) > TRACE_TOL:
        raise AccuracyError("trace drift exceeded 1e-6 during Lindblad evolution")
    obs = {}
    if obs_series is not None:
        obs["sxsx"] = obs_series
        obs["sxsx_ground"] = np.real(np.einsum("ti,ij,tj->t", refs.conj(), sxx, refs))
    return Trajectory(times=grid, fidelity=fid, states=record, observables=obs,
                      reference_states=refs)
