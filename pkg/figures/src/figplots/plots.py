"""Multi-panel figure builders for the simulator's CSV artifacts.

Rendering is deterministic: fixed style, fixed SVG hash salt, no embedded
timestamps, so repeated runs on identical inputs produce identical bytes.
"""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .schema import load_pulse_csv, load_response_csv, load_spectrum_csv  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "figplots"
matplotlib.rcParams["figure.dpi"] = 120

LINSTYLES = ("-", "--", "-.", ":")


@dataclass
class PlotSpec:
    """What to draw: input CSVs, layout, detuning range, output target.

    layout:
        "fig2"   stacked extinction/transmission/reflection panels,
                 one curve per spectrum CSV
        "fig4"   T and R panel plus susceptibility and index panels
                 (needs exactly one spectrum CSV and one response CSV)
        "fig5"   incident/transmitted/reflected pulse power spectra
                 (needs one pulse CSV)
    overlay_csvs are drawn dashed on top of the first panel set (closed-form
    spectra over time-domain results).
    """

    csv_paths: list
    layout: str
    out_path: str
    delta_range: tuple = (-60.0, 80.0)
    labels: list = field(default_factory=list)
    overlay_csvs: list = field(default_factory=list)
    response_csv: str = ""

    def __post_init__(self):
        if self.layout not in ("fig2", "fig4", "fig5"):
            raise ValueError(f"unknown layout {self.layout!r}")
        if not self.csv_paths:
            raise ValueError("at least one input CSV required")


def _save(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Date": None} if out_path.suffix == ".svg" else None)
    plt.close(fig)
    return out_path


def _label(spec, i):
    if i < len(spec.labels):
        return spec.labels[i]
    return Path(spec.csv_paths[i]).parent.name or f"run {i + 1}"


def _plot_fig2(spec):
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.0, 7.5))
    panels = (("extinction", "extinction"), ("T", "transmission"),
              ("R", "reflection"))
    for i, path in enumerate(spec.csv_paths):
        data = load_spectrum_csv(path)
        for ax, (col, _) in zip(axes, panels):
            ax.plot(data["delta"], data[col], LINSTYLES[i % len(LINSTYLES)],
                    lw=1.2, label=_label(spec, i))
    for j, path in enumerate(spec.overlay_csvs):
        data = load_spectrum_csv(path)
        for ax, (col, _) in zip(axes, panels):
            ax.plot(data["delta"], data[col], "--", lw=0.9, color="0.3",
                    label="closed form" if (ax is axes[0] and j == 0) else None)
    for ax, (_, name) in zip(axes, panels):
        ax.set_ylabel(name)
        ax.set_xlim(*spec.delta_range)
        ax.set_ylim(-0.02, 1.05)
        ax.grid(alpha=0.25)
    axes[0].legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("reduced detuning")
    fig.align_ylabels(axes)
    return fig


def _plot_fig4(spec):
    if not spec.response_csv:
        raise ValueError("fig4 layout needs a response CSV")
    data = load_spectrum_csv(spec.csv_paths[0])
    resp = load_response_csv(spec.response_csv)
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.0, 7.5))
    axes[0].plot(data["delta"], data["T"], "-", lw=1.2, label="transmission")
    axes[0].plot(data["delta"], data["R"], "--", lw=1.2, label="reflection")
    for j, path in enumerate(spec.overlay_csvs):
        od = load_spectrum_csv(path)
        axes[0].plot(od["delta"], od["T"], ":", lw=0.9, color="0.3",
                     label="closed form" if j == 0 else None)
    axes[0].set_ylabel("probability")
    axes[0].set_ylim(-0.02, 1.05)
    axes[0].legend(loc="upper right", fontsize=8)

    chi_sq = resp["chi_re"] ** 2 + resp["chi_im"] ** 2
    axes[1].semilogy(resp["delta"], chi_sq, "-", lw=1.2)
    axes[1].set_ylabel("|chi|^2")

    axes[2].plot(resp["delta"], resp["n_re"], "-", lw=1.2, label="Re n")
    axes[2].plot(resp["delta"], resp["n_im"], "--", lw=1.2, label="Im n")
    axes[2].set_ylabel("refractive index")
    axes[2].legend(loc="upper right", fontsize=8)

    for ax in axes:
        ax.set_xlim(*spec.delta_range)
        ax.grid(alpha=0.25)
    axes[-1].set_xlabel("reduced detuning")
    fig.align_ylabels(axes)
    return fig


def _plot_fig5(spec):
    data = load_pulse_csv(spec.csv_paths[0])
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.plot(data["delta"], data["S_incident"], "-", lw=1.2, label="incident")
    ax.plot(data["delta"], data["S_transmitted"], "--", lw=1.2, label="transmitted")
    ax.plot(data["delta"], data["S_reflected"], "-.", lw=1.2, label="reflected")
    ax.set_xlim(*spec.delta_range)
    ax.set_xlabel("reduced detuning")
    ax.set_ylabel("pulse power spectrum")
    ax.grid(alpha=0.25)
    ax.legend(loc="upper right", fontsize=8)
    return fig


def plot_spectra(spec: PlotSpec):
    """Render the figure described by ``spec``; returns the output path."""
    if spec.layout == "fig2":
        fig = _plot_fig2(spec)
    elif spec.layout == "fig4":
        fig = _plot_fig4(spec)
    else:
        fig = _plot_fig5(spec)
    return _save(fig, spec.out_path)
