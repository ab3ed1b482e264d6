"""Matplotlib rendering of the report files' contents.

Figures are written next to the delimited output when a command runs with
``--plot``; the data files stay the primary interface. PNG metadata is
stripped so repeated runs stay byte-identical.
"""

from __future__ import annotations

import numpy as np


def _axes(nrows=1, figsize=(6.0, 4.0)):
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(nrows, 1, figsize=(figsize[0], figsize[1] * nrows), squeeze=False)
    return fig, axes[:, 0]


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None})
    import matplotlib.pyplot as plt

    plt.close(fig)


def spectrum_figure(path, response, title="mirror spectrum"):
    fig, (ax,) = _axes()
    ax.plot(response.wavelengths_nm, response.reflectance, label="R")
    ax.plot(response.wavelengths_nm, response.transmittance, label="T")
    ax.set_xlabel("wavelength (nm)")
    ax.set_ylabel("power fraction")
    ax.set_title(title)
    ax.legend()
    _save(fig, path)


def sweep_figure(path, curves):
    """Efficiency and Purcell factor against diameter, one line per Q_2D."""
    fig, (ax_eta, ax_fp) = _axes(nrows=2)
    for curve in curves:
        d = curve.column("diameter_um")
        label = f"$Q_{{2D}}$ = {curve.provenance['q_2d']:g}"
        ax_eta.plot(d, curve.column("eta"), label=label)
        ax_fp.plot(d, curve.column("f_p"), label=label)
    ax_eta.set_ylabel("source efficiency")
    ax_eta.set_ylim(0, 1)
    ax_eta.legend(fontsize=8)
    ax_fp.set_ylabel("Purcell factor")
    ax_fp.set_xlabel("pillar diameter (um)")
    ax_fp.legend(fontsize=8)
    _save(fig, path)


def fit_figure(path, measurements, d_grid, model_q_by_series, alpha):
    fig, (ax,) = _axes()
    series = sorted(model_q_by_series)
    colors = {}
    for i, name in enumerate(series):
        (line,) = ax.plot(d_grid, model_q_by_series[name], label=f"{name} (model)")
        colors[name] = line.get_color()
    for name in series:
        pts = [(m.diameter_um, m.q) for m in measurements if m.series == name]
        if pts:
            x, y = zip(*pts)
            ax.plot(x, y, "o", color=colors[name], label=f"{name} (data)")
    ax.set_xlabel("pillar diameter (um)")
    ax.set_ylabel("quality factor Q")
    ax.set_title(f"sidewall-scattering fit, alpha = {alpha:.4g}")
    ax.legend(fontsize=8)
    _save(fig, path)


def optimize_figure(path, per_q2d):
    fig, (ax_eta, ax_d) = _axes(nrows=2)
    q = [p.q_2d for p in per_q2d]
    ax_eta.semilogx(q, [p.eta for p in per_q2d], "o-")
    ax_eta.set_ylabel("best efficiency")
    ax_eta.set_ylim(0, 1)
    ax_d.semilogx(q, [p.diameter_um for p in per_q2d], "s-")
    ax_d.set_ylabel("best diameter (um)")
    ax_d.set_xlabel("planar quality factor $Q_{2D}$")
    _save(fig, path)


def mode_figure(path, rows):
    """rows: (d, v, u, w, n_eff, I_surf, overlap, area, conf, w0, theta)."""
    arr = np.asarray(rows, dtype=float)
    fig, (ax_i, ax_a) = _axes(nrows=2)
    ax_i.loglog(arr[:, 0], arr[:, 5], label="surface intensity I(a)/I(0)")
    ax_i.loglog(arr[:, 0], arr[:, 6], label="sidewall overlap")
    ax_i.set_ylabel("normalized intensity")
    ax_i.legend(fontsize=8)
    ax_a.semilogx(arr[:, 0], arr[:, 7], label="effective area (um^2)")
    ax_a.semilogx(arr[:, 0], arr[:, 8], label="confinement")
    ax_a.set_xlabel("pillar diameter (um)")
    ax_a.legend(fontsize=8)
    _save(fig, path)


def mc_figure(path, tally, probabilities):
    from .photon_mc import FATES

    fig, (ax,) = _axes()
    x = np.arange(len(FATES))
    observed = [tally.counts[f] / tally.total for f in FATES]
    expected = [probabilities[f] for f in FATES]
    ax.bar(x - 0.2, observed, width=0.4, label="simulated")
    ax.bar(x + 0.2, expected, width=0.4, label="analytic")
    ax.set_xticks(x, [f.replace("_", "\n") for f in FATES], fontsize=8)
    ax.set_ylabel("fraction of photons")
    ax.legend()
    _save(fig, path)
