"""Scenario catalogue: default parameter sets and the sweep runners behind the CLI.

Each scenario resolves to a flat key = value config (overridable per key) and
produces one CSV table.  Defaults follow the reference figure parameters; the
sweep grids (point counts, log spacing) are declared here and echoed into the
run manifest.
"""

from __future__ import annotations

import numpy as np

from .cd import CdSpec, RampSchedule, subset_states_2s2e
from .config import (
    UnknownKeyError,
    get_float,
    get_float_list,
    get_int,
    get_str,
)
from .errors import InvalidArgumentError
from .evolve import (
    DecoherenceRates,
    EvolutionConfig,
    evolve_lindblad,
    evolve_unitary,
)
from .model import LatticeParams
from .noise import NoiseConfig, noisy_trajectory, run_ensemble
from .spectra import analytic_spectrum_2s1e, analytic_spectrum_2s2e

T_HALF_PI = 0.5 * np.pi
GAMMA_REF = (5 / np.pi) * 1e-5  # qubit damping matching a ~100 us coherence time
KAPPA_REF = 5e-5  # cavity decay for a 5 GHz mode at Q = 1e6


def _f(x) -> str:
    return format(float(x), ".17g")


_RAMP_1EXC = {
    "lattice.n_sites": "2",
    "lattice.g": "1",
    "lattice.J": "0",
    "lattice.delta": "1",
    "lattice.boundary": "open",
    "ramp.parameter": "J",
    "ramp.shape": "linear",
    "ramp.start": "0",
    "ramp.target": "2",
    "ramp.total_time": _f(T_HALF_PI),
    "run.n_excitations": "1",
    "run.n_steps": "4000",
    "cd.mode": "simplified",
}

_NOISE_KEYS = {
    "noise.alpha": "0.05",
    "noise.seed": "12345",
    "noise.resample_segments": "100",
}

SCENARIOS = {
    "spectrum_vs_J": {
        "figure": "Fig. 2(a)",
        "defaults": {
            "lattice.n_sites": "2",
            "lattice.g": "1",
            "lattice.delta": "1",
            "run.n_excitations": "1",
            "sweep.min": "0",
            "sweep.max": "4",
            "sweep.points": "401",
        },
    },
    "spectrum_vs_g": {
        "figure": "Fig. 2(b)",
        "defaults": {
            "lattice.n_sites": "2",
            "lattice.J": "2",
            "lattice.delta": "1",
            "run.n_excitations": "1",
            "sweep.min": "0",
            "sweep.max": "4",
            "sweep.points": "401",
        },
    },
    "ramp_infidelity_vs_t": {
        "figure": "Fig. 3(a)",
        "defaults": dict(_RAMP_1EXC),
    },
    "infidelity_vs_T": {
        "figure": "Fig. 3(b)",
        "defaults": {
            **{k: v for k, v in _RAMP_1EXC.items() if k != "ramp.total_time"},
            "sweep.min": _f(0.1 * np.pi),
            "sweep.max": _f(8 * np.pi),
            "sweep.points": "24",
        },
    },
    "two_exc_spectrum": {
        "figure": "Fig. 4(a)",
        "defaults": {
            "lattice.n_sites": "2",
            "lattice.g": "1",
            "lattice.delta": "0",
            "run.n_excitations": "2",
            "sweep.min": "0",
            "sweep.max": "2",
            "sweep.points": "401",
        },
    },
    "two_exc_infidelity": {
        "figure": "Fig. 4(b)",
        "defaults": {
            **_RAMP_1EXC,
            "lattice.delta": "0",
            "ramp.target": "1",
            "run.n_excitations": "2",
            "cd.mode": "simplified",
        },
    },
    "noise_single": {
        "figure": "Fig. 5(a)",
        "defaults": {
            **_RAMP_1EXC,
            **_NOISE_KEYS,
            "noise.sample_index": "0",
        },
    },
    "noise_sweep": {
        "figure": "Fig. 5(b)",
        "defaults": {
            **{k: v for k, v in _RAMP_1EXC.items()},
            **{k: v for k, v in _NOISE_KEYS.items() if k != "noise.alpha"},
            "noise.n_samples": "100",
            "sweep.min": "0.01",
            "sweep.max": "0.15",
            "sweep.step": "0.01",
        },
    },
    "decoherence_gamma_sweep": {
        "figure": "Fig. 5(c)",
        "defaults": {
            **_RAMP_1EXC,
            "rates.kappa": _f(KAPPA_REF),
            "sweep.min": _f(GAMMA_REF / 10),
            "sweep.max": _f(GAMMA_REF * 10),
            "sweep.points": "13",
            "sweep.times": ",".join(_f(x * np.pi) for x in (0.5, 3.0, 5.5)),
        },
    },
    "decoherence_kappa_sweep": {
        "figure": "Fig. 5(d)",
        "defaults": {
            **_RAMP_1EXC,
            "rates.gamma": _f(GAMMA_REF),
            "sweep.min": _f(KAPPA_REF / 10),
            "sweep.max": _f(KAPPA_REF * 10),
            "sweep.points": "13",
            "sweep.times": ",".join(_f(x * np.pi) for x in (0.5, 3.0, 5.5)),
        },
    },
    "sxsx_vs_t": {
        "figure": "Fig. 6(a)",
        "defaults": dict(_RAMP_1EXC),
    },
    "custom": {
        "figure": "(free-form single run)",
        "defaults": {
            **_RAMP_1EXC,
            "rates.gamma": "0",
            "rates.kappa": "0",
        },
    },
}


def scenario_ids():
    return list(SCENARIOS)


def resolve_config(scenario_id: str, overrides: dict) -> dict:
    """Scenario defaults merged with per-key overrides; unknown keys rejected."""
    if scenario_id not in SCENARIOS:
        raise UnknownKeyError(f"scenario = {scenario_id}")
    resolved = dict(SCENARIOS[scenario_id]["defaults"])
    for key, value in overrides.items():
        if key == "scenario":
            continue
        if key not in resolved:
            raise UnknownKeyError(key)
        resolved[key] = value
    return resolved


# ---------------------------------------------------------------------------
# builders


def _lattice(cfg: dict) -> LatticeParams:
    return LatticeParams(
        n_sites=get_int(cfg, "lattice.n_sites"),
        g=get_float(cfg, "lattice.g") if "lattice.g" in cfg else 0.0,
        J=get_float(cfg, "lattice.J") if "lattice.J" in cfg else 0.0,
        delta=get_float(cfg, "lattice.delta"),
        boundary=cfg.get("lattice.boundary", "open"),
    )


def _ramp(cfg: dict, total_time=None) -> RampSchedule:
    return RampSchedule(
        parameter=get_str(cfg, "ramp.parameter"),
        shape=get_str(cfg, "ramp.shape"),
        start_value=get_float(cfg, "ramp.start"),
        target_value=get_float(cfg, "ramp.target"),
        total_time=get_float(cfg, "ramp.total_time") if total_time is None else total_time,
    )


def build_evolution_config(
    cfg: dict,
    cd_mode=None,
    total_time=None,
    initial_state=None,
    observables=(),
) -> EvolutionConfig:
    return EvolutionConfig(
        params=_lattice(cfg),
        ramp=_ramp(cfg, total_time),
        n_excitations=get_int(cfg, "run.n_excitations"),
        cd=CdSpec(cd_mode if cd_mode is not None else get_str(cfg, "cd.mode")),
        n_steps=get_int(cfg, "run.n_steps"),
        initial_state=initial_state,
        observables=observables,
    )


def _noise(cfg: dict, n_samples=1) -> NoiseConfig:
    return NoiseConfig(
        alpha=get_float(cfg, "noise.alpha") if "noise.alpha" in cfg else 0.0,
        n_samples=get_int(cfg, "noise.n_samples") if "noise.n_samples" in cfg else n_samples,
        seed=get_int(cfg, "noise.seed"),
        resample_segments=get_int(cfg, "noise.resample_segments"),
    )


# ---------------------------------------------------------------------------
# runners: each returns (filename, header, rows)


def _sweep_grid(cfg: dict, log: bool = False) -> np.ndarray:
    lo, hi = get_float(cfg, "sweep.min"), get_float(cfg, "sweep.max")
    if "sweep.step" in cfg:
        step = get_float(cfg, "sweep.step")
        if step <= 0:
            raise InvalidArgumentError("sweep.step must be positive")
        return np.arange(lo, hi + step / 2, step)
    n = get_int(cfg, "sweep.points")
    if log:
        if lo <= 0:
            raise InvalidArgumentError("log-spaced sweep needs sweep.min > 0")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def run_spectrum_vs_J(cfg: dict):
    g = get_float(cfg, "lattice.g")
    delta = get_float(cfg, "lattice.delta")
    rows = []
    for J in _sweep_grid(cfg):
        energies, _ = analytic_spectrum_2s1e(g, float(J), delta)
        rows.append([J, *energies])
    return "spectrum_vs_J.csv", ["J", "E1", "E2", "E3", "E4"], rows


def run_spectrum_vs_g(cfg: dict):
    J = get_float(cfg, "lattice.J")
    delta = get_float(cfg, "lattice.delta")
    rows = []
    for g in _sweep_grid(cfg):
        energies, _ = analytic_spectrum_2s1e(float(g), J, delta)
        rows.append([g, *energies])
    return "spectrum_vs_g.csv", ["g", "E1", "E2", "E3", "E4"], rows


def run_two_exc_spectrum(cfg: dict):
    g = get_float(cfg, "lattice.g")
    if get_float(cfg, "lattice.delta") != 0:
        raise InvalidArgumentError("the two-excitation closed form requires lattice.delta = 0")
    rows = []
    for J in _sweep_grid(cfg):
        rows.append([J, *analytic_spectrum_2s2e(g, float(J))])
    return "two_exc_spectrum.csv", ["J"] + [f"E{i}" for i in range(1, 9)], rows


def run_ramp_infidelity_vs_t(cfg: dict):
    bare = evolve_unitary(build_evolution_config(cfg, cd_mode="none"))
    driven = evolve_unitary(build_evolution_config(cfg))
    T = bare.times[-1]
    rows = [
        [t / T, 1 - fb, 1 - fc]
        for t, fb, fc in zip(bare.times, bare.fidelity, driven.fidelity)
    ]
    return "ramp_infidelity_vs_t.csv", ["t_over_T", "infid_noCD", "infid_CD"], rows


def run_infidelity_vs_T(cfg: dict):
    rows = []
    for T in _sweep_grid(cfg, log=True):
        bare = evolve_unitary(build_evolution_config(cfg, cd_mode="none", total_time=float(T)))
        driven = evolve_unitary(build_evolution_config(cfg, total_time=float(T)))
        rows.append([T, 1 - bare.fidelity[-1], 1 - driven.fidelity[-1]])
    return "infidelity_vs_T.csv", ["T", "infid_noCD", "infid_CD"], rows


def run_two_exc_infidelity(cfg: dict):
    g = get_float(cfg, "lattice.g")
    J0 = get_float(cfg, "ramp.start")
    v3 = subset_states_2s2e(g, J0)[:, 1]
    runs = {
        "infid_v7_noCD": build_evolution_config(cfg, cd_mode="none"),
        "infid_v7_exactCD": build_evolution_config(cfg, cd_mode="exact"),
        "infid_v7_subsetCD": build_evolution_config(cfg, cd_mode="simplified"),
        "infid_v3_noCD": build_evolution_config(cfg, cd_mode="none", initial_state=v3),
        "infid_v3_subsetCD": build_evolution_config(cfg, cd_mode="simplified", initial_state=v3),
    }
    results = {name: evolve_unitary(c) for name, c in runs.items()}
    times = next(iter(results.values())).times
    T = times[-1]
    rows = []
    for i, t in enumerate(times):
        rows.append([t / T] + [1 - results[name].fidelity[i] for name in runs])
    return "two_exc_infidelity.csv", ["t_over_T", *runs], rows


def run_noise_single(cfg: dict):
    noise = _noise(cfg, n_samples=1)
    sample = get_int(cfg, "noise.sample_index")
    bare = noisy_trajectory(build_evolution_config(cfg, cd_mode="none"), noise, sample)
    driven = noisy_trajectory(build_evolution_config(cfg), noise, sample)
    T = bare.times[-1]
    rows = [
        [t / T, fb, fc]
        for t, fb, fc in zip(bare.times, bare.fidelity, driven.fidelity)
    ]
    return "noise_single.csv", ["t_over_T", "F_noCD", "F_CD"], rows


def run_noise_sweep(cfg: dict):
    rows = []
    for alpha in _sweep_grid(cfg):
        noise = NoiseConfig(
            alpha=float(alpha),
            n_samples=get_int(cfg, "noise.n_samples"),
            seed=get_int(cfg, "noise.seed"),
            resample_segments=get_int(cfg, "noise.resample_segments"),
        )
        bare = run_ensemble(build_evolution_config(cfg, cd_mode="none"), noise)
        driven = run_ensemble(build_evolution_config(cfg), noise)
        rows.append([alpha, bare.mean_F_T, bare.std_F_T, driven.mean_F_T, driven.std_F_T])
    return (
        "noise_sweep.csv",
        ["alpha", "mean_F_noCD", "std_F_noCD", "mean_F_CD", "std_F_CD"],
        rows,
    )


def _decoherence_sweep(cfg: dict, varied: str):
    fixed_key = "rates.kappa" if varied == "gamma" else "rates.gamma"
    fixed = get_float(cfg, fixed_key)
    times = get_float_list(cfg, "sweep.times")
    rows = []
    for value in _sweep_grid(cfg, log=True):
        if varied == "gamma":
            rates = DecoherenceRates(gamma=float(value), kappa=fixed)
        else:
            rates = DecoherenceRates(gamma=fixed, kappa=float(value))
        for T in times:
            bare = evolve_lindblad(
                build_evolution_config(cfg, cd_mode="none", total_time=T), rates
            )
            driven = evolve_lindblad(build_evolution_config(cfg, total_time=T), rates)
            rows.append([value, T, 1 - bare.fidelity[-1], 1 - driven.fidelity[-1]])
    return (
        f"decoherence_{varied}_sweep.csv",
        [varied, "T", "infid_noCD", "infid_CD"],
        rows,
    )


def run_decoherence_gamma_sweep(cfg: dict):
    return _decoherence_sweep(cfg, "gamma")


def run_decoherence_kappa_sweep(cfg: dict):
    return _decoherence_sweep(cfg, "kappa")


def run_sxsx_vs_t(cfg: dict):
    bare = evolve_unitary(build_evolution_config(cfg, cd_mode="none", observables=("sxsx",)))
    driven = evolve_unitary(build_evolution_config(cfg, observables=("sxsx",)))
    T = bare.times[-1]
    rows = [
        [t / T, ob, oc, og]
        for t, ob, oc, og in zip(
            bare.times,
            bare.observables["sxsx"],
            driven.observables["sxsx"],
            bare.observables["sxsx_ground"],
        )
    ]
    return "sxsx_vs_t.csv", ["t_over_T", "sxsx_noCD", "sxsx_CD", "sxsx_ground"], rows


def run_custom(cfg: dict):
    rates = DecoherenceRates(
        gamma=get_float(cfg, "rates.gamma"), kappa=get_float(cfg, "rates.kappa")
    )
    config = build_evolution_config(cfg)
    if rates.gamma > 0 or rates.kappa > 0:
        traj = evolve_lindblad(config, rates)
    else:
        traj = evolve_unitary(config)
    T = traj.times[-1]
    rows = [[t, t / T, f, 1 - f] for t, f in zip(traj.times, traj.fidelity)]
    return "custom.csv", ["t", "t_over_T", "fidelity", "infidelity"], rows


RUNNERS = {
    "spectrum_vs_J": run_spectrum_vs_J,
    "spectrum_vs_g": run_spectrum_vs_g,
    "ramp_infidelity_vs_t": run_ramp_infidelity_vs_t,
    "infidelity_vs_T": run_infidelity_vs_T,
    "two_exc_spectrum": run_two_exc_spectrum,
    "two_exc_infidelity": run_two_exc_infidelity,
    "noise_single": run_noise_single,
    "noise_sweep": run_noise_sweep,
    "decoherence_gamma_sweep": run_decoherence_gamma_sweep,
    "decoherence_kappa_sweep": run_decoherence_kappa_sweep,
    "sxsx_vs_t": run_sxsx_vs_t,
    "custom": run_custom,
}
