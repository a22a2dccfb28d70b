"""Render every panel from real jcsim scenario output and check error paths."""

import subprocess
import warnings

import pytest

from jcplot.cli import main
from jcplot.panels import PANELS, SchemaError, load_table, render

# scenario id -> fast-run overrides (CSV schema is unaffected by these)
SCENARIO_OVERRIDES = {
    "spectrum_vs_J": ["sweep.points=41"],
    "spectrum_vs_g": ["sweep.points=41"],
    "two_exc_spectrum": ["sweep.points=41"],
    "ramp_infidelity_vs_t": ["run.n_steps=300"],
    "infidelity_vs_T": ["sweep.points=6", "run.n_steps=300"],
    "two_exc_infidelity": ["run.n_steps=300"],
    "noise_single": ["run.n_steps=300"],
    "noise_sweep": ["noise.n_samples=4", "run.n_steps=200", "sweep.step=0.05"],
    "decoherence_gamma_sweep": ["sweep.points=3", "sweep.times=1.5707963", "run.n_steps=200"],
    "decoherence_kappa_sweep": ["sweep.points=3", "sweep.times=1.5707963", "run.n_steps=200"],
    "sxsx_vs_t": ["run.n_steps=300"],
    "custom": ["run.n_steps=200"],
}


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory):
    """One directory of CSVs produced by actual jcsim runs."""
    out = tmp_path_factory.mktemp("csvs")
    for scenario, overrides in SCENARIO_OVERRIDES.items():
        args = ["jcsim", "run", "--scenario", scenario, "--out", str(out / scenario)]
        for item in overrides:
            args += ["--set", item]
        subprocess.run(args, check=True, capture_output=True)
    return out


def _csv(csv_dir, scenario):
    return str(csv_dir / scenario / f"{scenario}.csv")


@pytest.mark.parametrize("panel_id", sorted(PANELS))
def test_every_panel_renders_from_scenario_output(csv_dir, tmp_path, panel_id):
    out = tmp_path / f"{panel_id}.png"
    code = main(["--panel", panel_id, "--csv", _csv(csv_dir, panel_id), "--out", str(out)])
    assert code == 0
    assert out.stat().st_size > 1000
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_two_csv_inputs_make_two_subplots(csv_dir, tmp_path):
    single = tmp_path / "one.png"
    double = tmp_path / "two.png"
    csv = _csv(csv_dir, "decoherence_gamma_sweep")
    assert main(["--panel", "decoherence_gamma_sweep", "--csv", csv, "--out", str(single)]) == 0
    assert (
        main(
            ["--panel", "decoherence_gamma_sweep", "--csv", csv, "--csv", csv,
             "--out", str(double)]
        )
        == 0
    )
    assert double.stat().st_size > single.stat().st_size


def test_rerender_is_byte_identical(csv_dir, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    csv = _csv(csv_dir, "ramp_infidelity_vs_t")
    render("ramp_infidelity_vs_t", [csv], str(a))
    render("ramp_infidelity_vs_t", [csv], str(b))
    assert a.read_bytes() == b.read_bytes()


def test_rendering_does_not_mutate_the_input(csv_dir, tmp_path):
    csv = _csv(csv_dir, "spectrum_vs_J")
    before = open(csv, "rb").read()
    render("spectrum_vs_J", [csv], str(tmp_path / "p.png"))
    assert open(csv, "rb").read() == before


def test_missing_column_names_the_column(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t_over_T,infid_noCD\n0.0,0.1\n")
    with pytest.raises(SchemaError, match="infid_CD"):
        load_table(str(bad), PANELS["ramp_infidelity_vs_t"])


def test_empty_and_header_only_csvs_are_schema_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["--panel", "custom", "--csv", str(empty), "--out", str(tmp_path / "x.png")]) == 2
    assert "empty" in capsys.readouterr().err
    header_only = tmp_path / "h.csv"
    header_only.write_text("t,t_over_T,fidelity,infidelity\n")
    assert (
        main(["--panel", "custom", "--csv", str(header_only), "--out", str(tmp_path / "y.png")])
        == 2
    )
    assert "no data rows" in capsys.readouterr().err


def test_unknown_panel_and_missing_csv_exit_2(tmp_path, capsys):
    assert main(["--panel", "nope", "--csv", "x.csv", "--out", str(tmp_path / "z.png")]) == 2
    assert "unknown panel" in capsys.readouterr().err
    assert (
        main(["--panel", "custom", "--csv", str(tmp_path / "missing.csv"),
              "--out", str(tmp_path / "z.png")])
        == 2
    )


def test_non_numeric_cell_is_a_schema_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,t_over_T,fidelity,infidelity\n0.0,zero,1.0,0.0\n")
    with pytest.raises(SchemaError, match="non-numeric"):
        load_table(str(bad), PANELS["custom"])


def test_nonpositive_values_clip_with_a_warning(tmp_path):
    csv = tmp_path / "ramp.csv"
    csv.write_text(
        "t_over_T,infid_noCD,infid_CD\n0.0,0.0,-1e-18\n0.5,0.01,1e-12\n1.0,0.05,2e-12\n"
    )
    with pytest.warns(UserWarning, match="clipped"):
        render("ramp_infidelity_vs_t", [str(csv)], str(tmp_path / "p.png"))


def test_clean_positive_data_renders_without_warnings(csv_dir, tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        render("spectrum_vs_g", [_csv(csv_dir, "spectrum_vs_g")], str(tmp_path / "p.png"))
