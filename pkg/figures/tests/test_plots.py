"""Smoke and schema tests for the figure scripts.

Inputs come from the simulator's acceptance artifacts when present (the
real CSV outputs of the fig2/fig4/fig5 runs); otherwise they are produced
on the fly with the simulator CLI in closed-form mode, plus a synthetic
pulse-spectra file.  The plotting package itself never imports the
simulator.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from figplots.cli import main
from figplots.plots import PlotSpec, _plot_fig2, _plot_fig4, _plot_fig5, plot_spectra
from figplots.schema import (
    SchemaError,
    load_pulse_csv,
    load_response_csv,
    load_spectrum_csv,
)

REPO = Path(__file__).resolve().parents[2]
ACCEPTANCE = REPO / "artifacts" / "acceptance"


def _mbslab(*args):
    return subprocess.run([sys.executable, "-m", "mbslab.cli", *args],
                          capture_output=True, text=True)


@pytest.fixture(scope="session")
def inputs(tmp_path_factory):
    """Paths for fig2 (3 spectra), fig4 (spectrum+response) and fig5 inputs."""
    work = tmp_path_factory.mktemp("csv")
    out = {}

    fig2 = []
    for name in ("fig2-low", "fig2-mid", "fig2-high"):
        real = ACCEPTANCE / name / "spectrum.csv"
        if real.exists():
            fig2.append(real)
        else:
            r = _mbslab("run", name, "--analytic-only", "--out",
                        str(work / name), "--quiet")
            assert r.returncode == 0, r.stderr
            fig2.append(work / name / "spectrum.csv")
    out["fig2"] = fig2

    real4 = ACCEPTANCE / "fig4" / "spectrum.csv"
    if real4.exists():
        out["fig4_spectrum"] = real4
    else:
        r = _mbslab("run", "fig4", "--analytic-only", "--out",
                    str(work / "fig4"), "--quiet")
        assert r.returncode == 0, r.stderr
        out["fig4_spectrum"] = work / "fig4" / "spectrum.csv"
    r = _mbslab("run", "fig4", "--analytic-only", "--out",
                str(work / "fig4-analytic"), "--quiet")
    assert r.returncode == 0, r.stderr
    out["fig4_response"] = work / "fig4-analytic" / "response.csv"
    out["fig4_overlay"] = work / "fig4-analytic" / "spectrum.csv"

    real5 = ACCEPTANCE / "fig5" / "pulse_spectra.csv"
    if real5.exists():
        out["fig5"] = real5
    else:
        delta = np.linspace(-60, 120, 1801)
        s_inc = np.exp(-((delta - 35.0) ** 2) / (2 * 32.0**2))
        s_tr = s_inc * np.exp(-((delta - 25.0) ** 2) / (2 * 3.0**2)) * 0.5
        path = work / "pulse_spectra.csv"
        with open(path, "w") as f:
            f.write("delta,omega,S_incident,S_transmitted,S_reflected\n")
            for d, si, st in zip(delta, s_inc, s_tr):
                f.write(f"{d:.9g},{3.04e15 + d * 1.05e12:.9g},{si:.9g},"
                        f"{st:.9g},{max(si - st, 0):.9g}\n")
        out["fig5"] = path
    return out


def test_fig2_three_panels_three_curves(inputs, tmp_path):
    spec = PlotSpec(csv_paths=[str(p) for p in inputs["fig2"]], layout="fig2",
                    out_path=str(tmp_path / "fig2.svg"))
    fig = _plot_fig2(spec)
    assert len(fig.axes) == 3
    for ax in fig.axes:
        assert len(ax.lines) == 3
        assert ax.get_xlim() == (-60.0, 80.0)
    out = plot_spectra(spec)
    assert out.exists() and out.stat().st_size > 0


def test_fig4_panels_and_overlay(inputs, tmp_path):
    spec = PlotSpec(csv_paths=[str(inputs["fig4_spectrum"])], layout="fig4",
                    out_path=str(tmp_path / "fig4.svg"),
                    response_csv=str(inputs["fig4_response"]),
                    overlay_csvs=[str(inputs["fig4_overlay"])])
    fig = _plot_fig4(spec)
    assert len(fig.axes) == 3
    assert len(fig.axes[0].lines) == 3  # T, R, dashed overlay
    assert len(fig.axes[1].lines) == 1  # |chi|^2
    assert len(fig.axes[2].lines) == 2  # Re n, Im n
    out = plot_spectra(spec)
    assert out.exists() and out.stat().st_size > 0


def test_fig5_single_panel_three_curves(inputs, tmp_path):
    spec = PlotSpec(csv_paths=[str(inputs["fig5"])], layout="fig5",
                    out_path=str(tmp_path / "fig5.svg"),
                    delta_range=(-60.0, 120.0))
    fig = _plot_fig5(spec)
    assert len(fig.axes) == 1
    assert len(fig.axes[0].lines) == 3
    out = plot_spectra(spec)
    assert out.exists() and out.stat().st_size > 0


def test_vacuum_flat_line_smoke(tmp_path):
    path = tmp_path / "vacuum.csv"
    with open(path, "w") as f:
        f.write("delta,omega,T,R,extinction\n")
        for d in np.linspace(-5, 5, 11):
            f.write(f"{d:.9g},{3.04e15 + d * 1.05e12:.9g},1,0,0\n")
    spec = PlotSpec(csv_paths=[str(path)], layout="fig2",
                    out_path=str(tmp_path / "vac.png"), delta_range=(-5, 5))
    out = plot_spectra(spec)
    assert out.exists() and out.stat().st_size > 0


def test_render_is_byte_stable(inputs, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for target in (a, b):
        plot_spectra(PlotSpec(csv_paths=[str(inputs["fig2"][0])], layout="fig2",
                              out_path=str(target)))
    assert a.read_bytes() == b.read_bytes()


def test_schema_rejects_wrong_header(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("delta,omega,T,R\n0,1,1,0\n")
    with pytest.raises(SchemaError):
        load_spectrum_csv(bad)
    with pytest.raises(SchemaError):
        load_response_csv(bad)
    with pytest.raises(SchemaError):
        load_pulse_csv(bad)


def test_schema_rejects_empty_band(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("delta,omega,T,R,extinction\n")
    with pytest.raises(SchemaError):
        load_spectrum_csv(empty)


def test_cli_success_and_failure(inputs, tmp_path):
    out = tmp_path / "cli.svg"
    code = main(["fig2", "--csv", *[str(p) for p in inputs["fig2"]],
                 "--out", str(out)])
    assert code == 0 and out.exists()
    assert main(["fig2", "--csv", str(tmp_path / "missing.csv"),
                 "--out", str(tmp_path / "x.svg")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["fig5", "--csv", str(bad), "--out", str(tmp_path / "y.svg")]) == 2
