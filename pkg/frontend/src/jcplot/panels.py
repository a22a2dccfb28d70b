"""Panel specifications, CSV schema validation, and rendering."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import style


class SchemaError(Exception):
    """The CSV does not match the panel's documented column schema."""


@dataclass(frozen=True)
class SeriesSpec:
    """One curve: which column to draw and how."""

    column: str
    label: str
    kind: str = "line"  # "line" (no-CD), "marker" (CD), or "ground" (dashed)
    err_column: str | None = None  # optional column drawn as error bars


@dataclass(frozen=True)
class PanelSpec:
    """Axis layout and series for one figure panel.

    ``group_by`` switches to long-format rendering: rows are grouped on that
    column and each group contributes one line/marker pair versus ``x_column``.
    """

    panel_id: str
    title: str
    x_column: str
    xlabel: str
    ylabel: str
    series: tuple[SeriesSpec, ...] = ()
    logx: bool = False
    logy: bool = False
    group_by: str | None = None


def _energy_series(n: int) -> tuple[SeriesSpec, ...]:
    return tuple(SeriesSpec(f"E{i}", f"$E_{{{i}}}$") for i in range(1, n + 1))


PANELS: dict[str, PanelSpec] = {
    "spectrum_vs_J": PanelSpec(
        "spectrum_vs_J",
        "Single-excitation spectrum vs hopping rate",
        "J",
        "$J$",
        "$E_n$",
        _energy_series(4),
    ),
    "spectrum_vs_g": PanelSpec(
        "spectrum_vs_g",
        "Single-excitation spectrum vs coupling",
        "g",
        "$g$",
        "$E_n$",
        _energy_series(4),
    ),
    "two_exc_spectrum": PanelSpec(
        "two_exc_spectrum",
        "Two-excitation spectrum vs hopping rate",
        "J",
        "$J$",
        "$E_n$",
        _energy_series(8),
    ),
    "ramp_infidelity_vs_t": PanelSpec(
        "ramp_infidelity_vs_t",
        "Infidelity along the hopping ramp",
        "t_over_T",
        "$t/T$",
        "$1-F$",
        (
            SeriesSpec("infid_noCD", "no CD", "line"),
            SeriesSpec("infid_CD", "with CD", "marker"),
        ),
        logy=True,
    ),
    "infidelity_vs_T": PanelSpec(
        "infidelity_vs_T",
        "Final infidelity vs ramp duration",
        "T",
        "$T$",
        "$1-F(T)$",
        (
            SeriesSpec("infid_noCD", "no CD", "line"),
            SeriesSpec("infid_CD", "with CD", "marker"),
        ),
        logx=True,
        logy=True,
    ),
    "two_exc_infidelity": PanelSpec(
        "two_exc_infidelity",
        "Two-excitation ramp infidelities",
        "t_over_T",
        "$t/T$",
        "$1-F$",
        (
            SeriesSpec("infid_v7_noCD", "ground, no CD", "line"),
            SeriesSpec("infid_v7_exactCD", "ground, exact CD", "marker"),
            SeriesSpec("infid_v7_subsetCD", "ground, subset CD", "marker"),
            SeriesSpec("infid_v3_noCD", "subset state, no CD", "line"),
            SeriesSpec("infid_v3_subsetCD", "subset state, subset CD", "marker"),
        ),
        logy=True,
    ),
    "noise_single": PanelSpec(
        "noise_single",
        "Fidelity for one control-noise realization",
        "t_over_T",
        "$t/T$",
        "$F$",
        (
            SeriesSpec("F_noCD", "no CD", "line"),
            SeriesSpec("F_CD", "with CD", "marker"),
        ),
    ),
    "noise_sweep": PanelSpec(
        "noise_sweep",
        "Ensemble-mean final fidelity vs noise amplitude",
        "alpha",
        r"$\alpha$",
        r"$\overline{F(T)}$",
        (
            SeriesSpec("mean_F_noCD", "no CD", "line", err_column="std_F_noCD"),
            SeriesSpec("mean_F_CD", "with CD", "marker", err_column="std_F_CD"),
        ),
    ),
    "decoherence_gamma_sweep": PanelSpec(
        "decoherence_gamma_sweep",
        "Final infidelity vs qubit decay rate",
        "gamma",
        r"$\gamma$",
        "$1-F(T)$",
        (
            SeriesSpec("infid_noCD", "no CD", "line"),
            SeriesSpec("infid_CD", "with CD", "marker"),
        ),
        logx=True,
        logy=True,
        group_by="T",
    ),
    "decoherence_kappa_sweep": PanelSpec(
        "decoherence_kappa_sweep",
        "Final infidelity vs cavity decay rate",
        "kappa",
        r"$\kappa$",
        "$1-F(T)$",
        (
            SeriesSpec("infid_noCD", "no CD", "line"),
            SeriesSpec("infid_CD", "with CD", "marker"),
        ),
        logx=True,
        logy=True,
        group_by="T",
    ),
    "sxsx_vs_t": PanelSpec(
        "sxsx_vs_t",
        "Qubit-pair correlation along the ramp",
        "t_over_T",
        "$t/T$",
        r"$\langle\sigma_{1x}\sigma_{2x}\rangle$",
        (
            SeriesSpec("sxsx_noCD", "no CD", "line"),
            SeriesSpec("sxsx_CD", "with CD", "marker"),
            SeriesSpec("sxsx_ground", "instantaneous ground state", "ground"),
        ),
    ),
    "custom": PanelSpec(
        "custom",
        "Fidelity trace",
        "t",
        "$t$",
        "$F$",
        (SeriesSpec("fidelity", "fidelity", "line"),),
    ),
}


def load_table(csv_path: str, spec: PanelSpec) -> dict[str, np.ndarray]:
    """Read a jcsim CSV and validate it against the panel's schema."""
    with open(csv_path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{csv_path}: empty file, expected a header row") from None
        rows = [row for row in reader if row]
    required = [spec.x_column]
    if spec.group_by:
        required.append(spec.group_by)
    for series in spec.series:
        required.append(series.column)
        if series.err_column:
            required.append(series.err_column)
    for column in required:
        if column not in header:
            raise SchemaError(
                f"{csv_path}: missing column '{column}' required by panel "
                f"'{spec.panel_id}' (found: {', '.join(header)})"
            )
    if not rows:
        raise SchemaError(f"{csv_path}: no data rows")
    try:
        data = np.array([[float(x) for x in row] for row in rows])
    except ValueError as err:
        raise SchemaError(f"{csv_path}: non-numeric cell ({err})") from None
    if data.shape[1] != len(header):
        raise SchemaError(f"{csv_path}: ragged rows do not match the header width")
    return {name: data[:, i] for i, name in enumerate(header)}


def _clip_for_log(values: np.ndarray, column: str) -> np.ndarray:
    bad = values <= 0
    if np.any(bad):
        warnings.warn(
            f"column '{column}': clipped {int(np.sum(bad))} non-positive value(s) "
            f"to {style.LOG_CLIP:g} for log-scale plotting",
            stacklevel=3,
        )
        values = np.where(bad, style.LOG_CLIP, values)
    return values


def _plot_series(ax, x, y, series: SeriesSpec, color: str, label: str, yerr=None):
    n = len(x)
    if series.kind == "marker":
        every = max(1, int(round(n * style.MARKER_EVERY_FRACTION))) if n > 50 else 1
        ax.plot(
            x[::every],
            y[::every],
            linestyle="none",
            marker=style.MARKER,
            markersize=style.MARKER_SIZE,
            markerfacecolor="none",
            color=color,
            label=label,
        )
    elif series.kind == "ground":
        ax.plot(
            x, y, linestyle=style.GROUND_LINESTYLE, linewidth=style.LINE_WIDTH,
            color=color, label=label,
        )
    else:
        ax.plot(x, y, linewidth=style.LINE_WIDTH, color=color, label=label)
    if yerr is not None:
        ax.errorbar(
            x, y, yerr=yerr, linestyle="none", color=color,
            capsize=style.ERRORBAR_CAPSIZE, elinewidth=1.0,
        )


def _render_axes(ax, spec: PanelSpec, table: dict[str, np.ndarray]):
    x = table[spec.x_column]
    if spec.logx:
        x = _clip_for_log(x, spec.x_column)
    color_cycle = iter(style.COLORS * 4)
    if spec.group_by:
        for group in np.unique(table[spec.group_by]):
            mask = table[spec.group_by] == group
            for series in spec.series:
                y = table[series.column][mask]
                if spec.logy:
                    y = _clip_for_log(y, series.column)
                label = f"{series.label}, {spec.group_by}={group:g}"
                _plot_series(ax, x[mask], y, series, next(color_cycle), label)
    else:
        for series in spec.series:
            y = table[series.column]
            if spec.logy:
                y = _clip_for_log(y, series.column)
            yerr = table[series.err_column] if series.err_column else None
            _plot_series(ax, x, y, series, next(color_cycle), series.label, yerr)
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.set_title(spec.title, fontsize=style.FONT_SIZE + 1)
    ax.legend(fontsize=style.LEGEND_FONT_SIZE)


def render(panel_id: str, csv_paths: list[str], out_path: str) -> None:
    """Render one panel (one subplot per input CSV) to an image file."""
    if panel_id not in PANELS:
        raise SchemaError(
            f"unknown panel '{panel_id}' (choose from: {', '.join(sorted(PANELS))})"
        )
    if not csv_paths:
        raise SchemaError("at least one --csv input is required")
    spec = PANELS[panel_id]
    tables = [load_table(path, spec) for path in csv_paths]
    width = style.FIGSIZE_SINGLE[0] + style.FIGSIZE_PER_EXTRA_PANEL * (len(tables) - 1)
    fig, axes = plt.subplots(
        1, len(tables), figsize=(width, style.FIGSIZE_SINGLE[1]), squeeze=False
    )
    with plt.rc_context({"font.size": style.FONT_SIZE}):
        for ax, table in zip(axes[0], tables):
            _render_axes(ax, spec, table)
    fig.tight_layout()
    fig.savefig(out_path, dpi=style.DPI, metadata=dict(style.PNG_METADATA))
    plt.close(fig)
