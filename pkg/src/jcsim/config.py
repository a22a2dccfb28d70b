"""Flat key = value configuration files, CSV output, and run manifests.

The config format is plain text: one ``key = value`` per line, ``#`` comments,
blank lines ignored, dotted prefixes as sections (``ramp.shape = linear``).
CSV output is comma-separated with a header row, 17 significant digits, and
Unix newlines, so byte-identical regression across platforms is possible.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .errors import InvalidArgumentError


class UnknownKeyError(InvalidArgumentError):
    """A config key that the selected scenario does not define."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"unknown config key: {key}")


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into an ordered string-to-string dict."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"config line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise InvalidArgumentError(f"config line {lineno}: empty key")
        out[key] = value
    return out


def format_config(values: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in values.items())


def parse_assignment(text: str):
    """Split one ``key=value`` CLI override."""
    if "=" not in text:
        raise InvalidArgumentError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


# typed accessors -----------------------------------------------------------


def get_float(cfg: dict, key: str) -> float:
    try:
        return float(cfg[key])
    except ValueError:
        raise InvalidArgumentError(f"config key {key} must be a number, got {cfg[key]!r}")


def get_int(cfg: dict, key: str) -> int:
    try:
        return int(cfg[key])
    except ValueError:
        raise InvalidArgumentError(f"config key {key} must be an integer, got {cfg[key]!r}")


def get_str(cfg: dict, key: str) -> str:
    return cfg[key]


def get_float_list(cfg: dict, key: str) -> list:
    try:
        return [float(x) for x in cfg[key].split(",") if x.strip()]
    except ValueError:
        raise InvalidArgumentError(f"config key {key} must be comma-separated numbers")


# output files --------------------------------------------------------------


def format_csv(header, rows) -> str:
    """Comma-separated text: header row then 17-significant-digit values."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def _format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return format(float(v), ".17g")


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    path.write_bytes(format_csv(header, rows).encode("ascii"))
    return path


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(
    path: Path,
    tool_version: str,
    resolved_config: dict,
    rng_algorithm: str,
    seed,
    integrator: str,
    n_steps,
    wall_clock_seconds: float,
    output_paths,
) -> Path:
    """key = value manifest echoing the resolved run configuration."""
    lines = [f"tool = jcsim {tool_version}"]
    for k, v in resolved_config.items():
        lines.append(f"config.{k} = {v}")
    lines.append(f"rng.algorithm = {rng_algorithm}")
    lines.append(f"rng.seed = {seed}")
    lines.append(f"integrator = {integrator}")
    lines.append(f"integrator.n_steps = {n_steps}")
    lines.append(f"wall_clock_seconds = {wall_clock_seconds:.3f}")
    for p in output_paths:
        p = Path(p)
        lines.append(f"output.{p.name}.sha256 = {sha256_of(p)}")
    path = Path(path)
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return path
