"""Command-line front end: scenario runs, scenario listing, and self-checks.

Exit codes: 0 success; 2 unknown/invalid config key; 3 numerical accuracy
failure; 4 operator-structure failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cd import (
    CdSpec,
    RampSchedule,
    calibrate_chi2,
    exact_cd,
    full_cd_2s1e_Jramp,
    simplified_cd_2s1e_Jramp,
)
from .config import (
    UnknownKeyError,
    format_config,
    parse_assignment,
    parse_config_text,
    write_csv,
    write_manifest,
)
from .errors import AccuracyError, InvalidArgumentError, StructureError
from .evolve import EvolutionConfig, evolve_unitary
from .model import LatticeParams, build_hamiltonian, enumerate_basis, hopping_vj
from .noise import RNG_ALGORITHM, NoiseConfig, noisy_trajectory
from .scenarios import RUNNERS, SCENARIOS, build_evolution_config, resolve_config
from .spectra import analytic_spectrum_2s1e, eigendecompose

INTEGRATOR = "exponential-midpoint"

EXIT_OK = 0
EXIT_BAD_KEY = 2
EXIT_ACCURACY = 3
EXIT_STRUCTURE = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcsim",
        description="Counter-diabatic state preparation in finite Jaynes-Cummings lattices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write CSV data plus a manifest")
    run.add_argument("--config", type=Path, help="config file (key = value lines)")
    run.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="key=value",
        help="override a config key (repeatable; beats file values)",
    )
    run.add_argument("--out", type=Path, default=Path("."), help="output directory")
    run.add_argument("--seed", type=int, help="override the noise RNG seed")
    run.add_argument("--scenario", help="scenario id (alternative to a config file)")

    sub.add_parser("list", help="list scenarios, their figure panels, and defaults")
    sub.add_parser("check", help="run the fast invariant suite")
    return parser


def _resolved_from_args(args) -> tuple:
    file_values: dict = {}
    if args.config is not None:
        file_values = parse_config_text(Path(args.config).read_text())
    overrides = dict(file_values)
    for item in args.overrides:
        key, value = parse_assignment(item)
        overrides[key] = value
    scenario = args.scenario or overrides.get("scenario")
    if scenario is None:
        raise InvalidArgumentError("no scenario selected (use --scenario or 'scenario = ...')")
    resolved = resolve_config(scenario, overrides)
    if args.seed is not None:
        if "noise.seed" not in resolved:
            raise UnknownKeyError("noise.seed")
        resolved["noise.seed"] = str(args.seed)
    return scenario, resolved


def cmd_run(args) -> int:
    scenario, resolved = _resolved_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.monotonic()
    filename, header, rows = RUNNERS[scenario](resolved)
    wall = time.monotonic() - start
    csv_path = write_csv(out_dir / filename, header, rows)
    manifest = {"scenario": scenario, **resolved}
    manifest_path = write_manifest(
        out_dir / "run_manifest.txt",
        tool_version=__version__,
        resolved_config=manifest,
        rng_algorithm=RNG_ALGORITHM,
        seed=resolved.get("noise.seed", "none"),
        integrator=INTEGRATOR,
        n_steps=resolved.get("run.n_steps", "none"),
        wall_clock_seconds=wall,
        output_paths=[csv_path],
    )
    print(f"wrote {csv_path}")
    print(f"wrote {manifest_path}")
    return EXIT_OK


def cmd_list(_args) -> int:
    width = max(len(s) for s in SCENARIOS)
    for name, info in SCENARIOS.items():
        print(f"{name:<{width}}  -> {info['figure']}")
        defaults = format_config(info["defaults"]).rstrip("\n").replace("\n", "; ")
        print(f"{'':<{width}}     defaults: {defaults if defaults else '(none)'}")
    return EXIT_OK


def _check(label: str, ok: bool, detail: str = "") -> bool:
    status = "ok" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"check {label}: {status}{suffix}")
    return ok


def cmd_check(_args) -> int:
    """Fast invariants: spectra, CD equivalences, propagation hygiene, RNG determinism."""
    ok = True
    rng = np.random.default_rng(20240817)
    basis = enumerate_basis(2, 1)

    worst = 0.0
    for _ in range(50):
        g, J, delta = rng.uniform(0.2, 3, 3)
        H = build_hamiltonian(LatticeParams(2, g, J, delta), basis)
        energies, vectors = analytic_spectrum_2s1e(g, J, delta)
        order = np.argsort(energies)
        spec = eigendecompose(H)
        worst = max(worst, float(np.max(np.abs(energies[order] - spec.energies))))
        resid = np.max(np.abs(H.matrix @ vectors - vectors * energies[None, :]))
        worst = max(worst, float(resid))
    ok &= _check("closed-form spectrum vs eigensolver", worst < 1e-10, f"max {worst:.2e}")

    worst = 0.0
    for _ in range(20):
        g, J, delta, dJ = rng.uniform(0.2, 3, 4)
        H = build_hamiltonian(LatticeParams(2, g, J, delta), basis)
        a = exact_cd(eigendecompose(H), dJ * hopping_vj(basis)).matrix
        b = full_cd_2s1e_Jramp(g, J, delta, dJ).matrix
        worst = max(worst, float(np.max(np.abs(a - b))))
    ok &= _check("closed-form CD vs spectral CD", worst < 1e-10, f"max {worst:.2e}")

    chi2 = calibrate_chi2(1.0, 0.5)
    ok &= _check("subset gap calibration", abs(chi2 - 2.25) < 1e-8, f"chi2^2 = {chi2:.12f}")

    config = EvolutionConfig(
        params=LatticeParams(2, 1.0, 0.0, 1.0),
        ramp=RampSchedule("J", "linear", 0.0, 2.0, 0.5 * np.pi),
        n_excitations=1,
        cd=CdSpec("simplified"),
        n_steps=500,
        record_states=True,
    )
    traj = evolve_unitary(config)
    drift = float(np.max(np.abs(np.linalg.norm(traj.states, axis=1) - 1)))
    ok &= _check("unitary norm preservation", drift < 1e-10, f"max drift {drift:.2e}")
    infid = float(np.max(1 - traj.fidelity))
    ok &= _check("CD run stays in the ground state", infid < 1e-8, f"max 1-F {infid:.2e}")

    noise = NoiseConfig(alpha=0.05, n_samples=1, seed=99)
    f1 = noisy_trajectory(config, noise, 3).fidelity
    f2 = noisy_trajectory(config, noise, 3).fidelity
    ok &= _check("noise stream determinism", bool(np.array_equal(f1, f2)))

    return EXIT_OK if ok else EXIT_ACCURACY


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "list":
            return cmd_list(args)
        return cmd_check(args)
    except UnknownKeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_KEY
    except StructureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except AccuracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_KEY


if __name__ == "__main__":
    sys.exit(main())
