"""Gaussian control-error ensembles for the ramp scenarios.

The hopping and coupling constants acquire independent, piecewise-constant
Gaussian offsets delta_J(t) and delta_g(t) (standard deviations alpha * J_f
and alpha * g).  The noisy values enter everywhere the nominal ones do: the
lattice Hamiltonian and the CD coupling strengths alike.  Each sample draws
its own counter-based RNG stream keyed by (seed, sample_index), so ensembles
are reproducible and order-independent under parallel execution.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, InvalidArgumentError
from .evolve import (
    EvolutionConfig,
    Trajectory,
    _initial_and_seed,
    ramp_values,
    reference_path,
    step_propagators,
    total_hamiltonian_stack,
)
from .model import enumerate_basis

RNG_ALGORITHM = "numpy.random.Philox(4x64, key=[seed, sample_index])"
NORM_TOL = 1e-10


@dataclass(frozen=True)
class NoiseConfig:
    """Relative Gaussian fluctuation of the control parameters."""

    alpha: float
    n_samples: int = 100
    seed: int = 0
    resample_segments: int = 100

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidArgumentError("alpha must be in [0, 1]")
        if self.n_samples < 1:
            raise InvalidArgumentError("n_samples must be >= 1")
        if self.resample_segments < 1:
            raise InvalidArgumentError("resample_segments must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EnsembleResult:
    per_sample_final_fidelity: np.ndarray
    mean_F_T: float
    std_F_T: float
    traces: np.ndarray | None = None  # (n_samples, n_times) F(t), optional


def reference_scales(config: EvolutionConfig):
    """(J_f, g) reference magnitudes setting the fluctuation standard deviations."""
    if config.ramp.parameter == "J":
        return config.ramp.target_value, config.params.g
    return config.params.J, config.ramp.target_value


def sample_offsets(config: EvolutionConfig, noise: NoiseConfig, sample_index: int):
    """Per-segment (delta_J, delta_g) draws for one sample's stream."""
    rng = np.random.Generator(np.random.Philox(key=[noise.seed, sample_index]))
    J_ref, g_ref = reference_scales(config)
    dJ = rng.normal(0.0, noise.alpha * abs(J_ref), noise.resample_segments)
    dg = rng.normal(0.0, noise.alpha * abs(g_ref), noise.resample_segments)
    return dJ, dg


def _segment_lookup(offsets: np.ndarray, ts: np.ndarray, T: float) -> np.ndarray:
    idx = np.minimum((ts / T * len(offsets)).astype(int), len(offsets) - 1)
    return offsets[idx]


def noisy_trajectory(
    config: EvolutionConfig,
    noise: NoiseConfig,
    sample_index: int,
    reference_states: np.ndarray | None = None,
) -> Trajectory:
    """One noisy realization, scored against the noiseless target trajectory.

    ``reference_states`` lets ensemble runs share the (noise-independent)
    tracked eigenstate path instead of recomputing it per sample.
    """
    basis = enumerate_basis(config.params.n_sites, config.n_excitations)
    n = config.n_steps
    T = config.total_time
    dt = T / n
    grid = np.linspace(0.0, T, n + 1)
    mids = grid[:-1] + dt / 2

    dJ_seg, dg_seg = sample_offsets(config, noise, sample_index)
    g_mid, J_mid, _ = ramp_values(config, mids)
    g_mid = g_mid + _segment_lookup(dg_seg, mids, T)
    J_mid = J_mid + _segment_lookup(dJ_seg, mids, T)

    psi0, seed_state = _initial_and_seed(config, basis)
    h_mid = total_hamiltonian_stack(basis, config, mids, g_t=g_mid, J_t=J_mid)
    props = step_propagators(h_mid, dt)
    states = np.empty((n + 1, len(basis)), dtype=complex)
    states[0] = psi0
    psi = psi0
    for i in range(n):
        psi = props[i] @ psi
        states[i + 1] = psi
    if np.max(np.abs(np.linalg.norm(states, axis=1) - 1)) > NORM_TOL:
        raise AccuracyError("norm drift exceeded 1e-10 during noisy evolution")
    refs = reference_states
    if refs is None:
        refs = reference_path(config, grid, seed_state)
    fid = np.abs(np.einsum("ti,ti->t", refs.conj(), states)) ** 2
    return Trajectory(
        times=grid,
        fidelity=fid,
        states=states if config.record_states else None,
        reference_states=refs,
    )


def _worker_count(n_tasks: int) -> int:
    cap = os.environ.get("JCSIM_THREADS")
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError:
            raise InvalidArgumentError("JCSIM_THREADS must be an integer")
        if cap < 1:
            raise InvalidArgumentError("JCSIM_THREADS must be >= 1")
        return min(cap, n_tasks)
    return min(os.cpu_count() or 1, n_tasks)


def run_ensemble(
    config: EvolutionConfig, noise: NoiseConfig, keep_traces: bool = False
) -> EnsembleResult:
    """Final-fidelity statistics over n_samples independent noise streams.

    Samples run embarrassingly parallel (JCSIM_THREADS caps the worker pool);
    the aggregation is indexed, so the result is independent of completion
    order.
    """
    basis = enumerate_basis(config.params.n_sites, config.n_excitations)
    grid = np.linspace(0.0, config.total_time, config.n_steps + 1)
    _, seed_state = _initial_and_seed(config, basis)
    refs = reference_path(config, grid, seed_state)

    def one(i: int):
        return noisy_trajectory(config, noise, i, reference_states=refs)

    finals = np.empty(noise.n_samples)
    traces = np.empty((noise.n_samples, len(grid))) if keep_traces else None
    workers = _worker_count(noise.n_samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(noise.n_samples)))
    else:
        results = [one(i) for i in range(noise.n_samples)]
    for i, traj in enumerate(results):
        finals[i] = traj.fidelity[-1]
        if traces is not None:
            traces[i] = traj.fidelity
    return EnsembleResult(
        per_sample_final_fidelity=finals,
        mean_F_T=float(np.mean(finals)),
        std_F_T=float(np.std(finals)),
        traces=traces,
    )
