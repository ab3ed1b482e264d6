"""Command-line front end.

Subcommands: dbr, cavity-q, mode, fit, sweep, optimize, mc. Each takes one
configuration file (positional or --config) plus flag overrides for scalar
parameters; precedence is flag > file > default. Outputs are deterministic
delimited text files with provenance headers; --plot additionally renders a
PNG figure next to each data file.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, figures, multilayer, report
from .config import RunConfig, load_config
from .coupling import beta as beta_factor
from .coupling import purcell_factor
from .efficiency import optimize, sweep_design
from .errors import ConfigError, PillarKitError
from .loss_budget import (
    ScatteringModel,
    compose,
    fit_alpha,
    load_q_measurements,
    mode_context,
)
from .photon_mc import FATES, ChannelRates, estimate_eta, simulate
from .pillar_mode import (
    PillarGeometry,
    far_field_divergence,
    solve_fundamental_mode,
)
from .stackfile import load_stack


def _file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]


def _out_path(cfg: RunConfig, command: str) -> Path:
    return Path(cfg.out if cfg.out else f"{command.replace('-', '_')}.txt")


def _require_stack(cfg: RunConfig):
    if not cfg.stack:
        raise ConfigError("this command needs a 'stack = <path>' entry in the config")
    return load_stack(cfg.stack)


def _planar_inputs(cfg: RunConfig):
    """Resolve (wavelength, effective length, core index) for sweeps.

    Taken from the transfer-matrix model of the configured stack; a config
    without a stack must state effective_length_nm directly.
    """
    if cfg.stack:
        stack = load_stack(cfg.stack)
        lam_res, q_tmm = multilayer.planar_cavity_q(stack, cfg.resonance_window_nm)
        _, cavity, _ = multilayer.split_at_cavity(stack)
        l_eff = cfg.effective_length_nm
        if l_eff is None:
            l_eff = multilayer.effective_cavity_length(stack, lam_res)
        return {
            "wavelength_nm": lam_res,
            "effective_length_nm": l_eff,
            "core_index": complex(cavity.refractive_index).real,
            "stack_digest": _file_digest(cfg.stack),
            "stack_q_tmm": q_tmm,
        }
    if cfg.effective_length_nm is None:
        raise ConfigError("need either 'stack' or 'effective_length_nm' in the config")
    return {
        "wavelength_nm": cfg.wavelength_nm,
        "effective_length_nm": cfg.effective_length_nm,
        "core_index": cfg.core_index,
    }


def cmd_dbr(cfg: RunConfig, plot: bool) -> int:
    stack = _require_stack(cfg)
    lo, hi = cfg.resonance_window_nm
    lam = np.linspace(lo, hi, 1001)
    response = multilayer.spectrum(stack, lam)
    t_center = multilayer.dbr_transmission(stack, cfg.wavelength_nm)

    out = _out_path(cfg, "dbr")
    pre = report.provenance_lines(
        "dbr",
        cfg.digest,
        {
            "stack": cfg.stack,
            "stack_digest": _file_digest(cfg.stack),
            "wavelength_nm": cfg.wavelength_nm,
            "window_nm": f"{lo:g}..{hi:g}",
            "t_center": t_center,
        },
    )
    rows = zip(
        response.wavelengths_nm,
        response.reflectance,
        response.transmittance,
        response.reflection_phase,
    )
    report.write_table(
        out, ["wavelength_nm", "reflectance", "transmittance", "reflection_phase_rad"], rows, pre
    )
    print(f"T({cfg.wavelength_nm:g} nm) = {t_center:.6g}")
    print(f"wrote {out}")
    if plot:
        figures.spectrum_figure(out.with_suffix(".png"), response)
        print(f"wrote {out.with_suffix('.png')}")
    return 0


def cmd_cavity_q(cfg: RunConfig, plot: bool) -> int:
    stack = _require_stack(cfg)
    lam_res, q_2d = multilayer.planar_cavity_q(stack, cfg.resonance_window_nm)
    top, cavity, bottom = multilayer.split_at_cavity(stack)
    t_top = multilayer.transmittance(top, lam_res)
    t_bottom = multilayer.transmittance(bottom, lam_res)
    top_frac, bottom_frac = multilayer.escape_fractions(t_top, t_bottom)
    pen_top = multilayer.phase_penetration_depth(top, lam_res)
    pen_bottom = multilayer.phase_penetration_depth(bottom, lam_res)
    l_eff = cavity.thickness_nm + pen_top + pen_bottom

    out = _out_path(cfg, "cavity-q")
    pre = report.provenance_lines(
        "cavity-q",
        cfg.digest,
        {"stack": cfg.stack, "stack_digest": _file_digest(cfg.stack)},
    )
    cols = [
        "resonance_nm",
        "q_2d",
        "t_top",
        "t_bottom",
        "top_fraction",
        "bottom_fraction",
        "pen_top_nm",
        "pen_bottom_nm",
        "effective_length_nm",
    ]
    row = [lam_res, q_2d, t_top, t_bottom, top_frac, bottom_frac, pen_top, pen_bottom, l_eff]
    report.write_table(out, cols, [row], pre)
    print(f"resonance = {lam_res:.4f} nm, Q_2D = {q_2d:.1f}")
    print(f"escape split top/bottom = {top_frac:.4f}/{bottom_frac:.4f}, L_eff = {l_eff:.1f} nm")
    print(f"wrote {out}")
    if plot:
        lo, hi = cfg.resonance_window_nm
        figures.spectrum_figure(
            out.with_suffix(".png"),
            multilayer.spectrum(stack, np.linspace(lo, hi, 2001)),
            title=f"cavity resonance near {lam_res:.2f} nm",
        )
        print(f"wrote {out.with_suffix('.png')}")
    return 0


def cmd_mode(cfg: RunConfig, plot: bool) -> int:
    rows = []
    for d in cfg.diameter_grid():
        geom = PillarGeometry(d, cfg.core_index, cfg.cladding_index, cfg.wavelength_nm)
        m = solve_fundamental_mode(geom)
        rows.append(
            (
                d,
                m.v_number,
                m.u,
                m.w,
                m.effective_index,
                m.surface_intensity,
                m.sidewall_overlap,
                m.effective_area_um2,
                m.confinement_factor,
                m.mode_field_radius_um,
                far_field_divergence(m, geom),
            )
        )
    out = _out_path(cfg, "mode")
    pre = report.provenance_lines(
        "mode",
        cfg.digest,
        {
            "wavelength_nm": cfg.wavelength_nm,
            "core_index": cfg.core_index,
            "cladding_index": cfg.cladding_index,
        },
    )
    cols = [
        "diameter_um",
        "v_number",
        "u",
        "w",
        "effective_index",
        "surface_intensity",
        "sidewall_overlap",
        "effective_area_um2",
        "confinement_factor",
        "mode_field_radius_um",
        "divergence_deg",
    ]
    report.write_table(out, cols, rows, pre)
    print(f"wrote {out} ({len(rows)} diameters)")
    if plot:
        figures.mode_figure(out.with_suffix(".png"), rows)
        print(f"wrote {out.with_suffix('.png')}")
    return 0


def cmd_fit(cfg: RunConfig, plot: bool) -> int:
    if not cfg.fit_data:
        raise ConfigError("fit needs a 'fit_data = <csv path>' entry")
    if not cfg.q2d_by_series:
        raise ConfigError("fit needs per-series planar values, e.g. 'q2d.high = 5000'")
    measurements = load_q_measurements(cfg.fit_data, known_series=set(cfg.q2d_by_series))
    solver = mode_context(cfg.wavelength_nm, cfg.core_index, cfg.cladding_index)
    result = fit_alpha(measurements, cfg.q2d_by_series, solver, per_series=cfg.per_series)

    print(f"alpha = {result.alpha:.10g}")
    for extra_series, a in result.alpha_by_series.items():
        print(f"alpha[{extra_series}] = {a:.10g}")
    print("residuals (model 1/Q - measured 1/Q):")
    for m, r in zip(measurements, result.residuals):
        print(f"  d = {m.diameter_um:7.3f} um  series = {m.series:<10s} residual = {r:+.6e}")

    d_grid = cfg.diameter_grid()
    model = ScatteringModel(result.alpha)
    series = sorted(cfg.q2d_by_series)
    curves = {}
    for name in series:
        inv_q2d = 1.0 / cfg.q2d_by_series[name]
        curves[name] = [
            1.0 / (inv_q2d + result.alpha * solver(d).sidewall_overlap) for d in d_grid
        ]
    out = _out_path(cfg, "fit")
    params = {
        "fit_data": cfg.fit_data,
        "data_digest": _file_digest(cfg.fit_data),
        "alpha": result.alpha,
        "wavelength_nm": cfg.wavelength_nm,
        "core_index": cfg.core_index,
        "cladding_index": cfg.cladding_index,
    }
    params.update({f"q2d.{name}": cfg.q2d_by_series[name] for name in series})
    pre = report.provenance_lines("fit", cfg.digest, params)
    cols = ["diameter_um"] + [f"q_model_{name}" for name in series]
    rows = [[d] + [curves[name][i] for name in series] for i, d in enumerate(d_grid)]
    report.write_table(out, cols, rows, pre)
    print(f"wrote {out}")
    if plot:
        figures.fit_figure(out.with_suffix(".png"), measurements, d_grid, curves, result.alpha)
        print(f"wrote {out.with_suffix('.png')}")
    return 0


def cmd_sweep(cfg: RunConfig, plot: bool) -> int:
    planar = _planar_inputs(cfg)
    grid = cfg.diameter_grid()
    scattering = ScatteringModel(cfg.alpha)
    curves = []
    for q_2d in cfg.q_2d:
        curves.append(
            sweep_design(
                grid,
                q_2d,
                scattering,
                wavelength_nm=planar["wavelength_nm"],
                effective_length_nm=planar["effective_length_nm"],
                core_index=planar["core_index"],
                cladding_index=cfg.cladding_index,
                q_ext=cfg.q_ext,
                gamma=cfg.gamma,
                degenerate_mode=cfg.mode_degeneracy,
            )
        )
    out = _out_path(cfg, "sweep")
    params = dict(planar)
    params.update(
        {
            "alpha": cfg.alpha,
            "gamma": cfg.gamma,
            "q_ext": cfg.q_ext,
            "mode_degeneracy": cfg.mode_degeneracy,
            "q_2d_list": " ".join(f"{q:g}" for q in cfg.q_2d),
        }
    )
    pre = report.provenance_lines("sweep", cfg.digest, params)
    blocks = []
    for curve in curves:
        rows = [
            (p.diameter_um, p.q_total, p.f_p, p.beta, p.eta) for p in curve.points
        ]
        blocks.append(([f"# q_2d = {curve.provenance['q_2d']:g}"], rows))
    report.write_blocks(out, ["diameter_um", "q_total", "f_p", "beta", "eta"], blocks, pre)
    for curve in curves:
        etas = curve.column("eta")
        i = int(np.argmax(etas))
        print(
            f"q_2d = {curve.provenance['q_2d']:>6g}: peak eta = {etas[i]:.4f} "
            f"at d = {curve.points[i].diameter_um:.3f} um"
        )
    print(f"wrote {out}")
    if plot:
        figures.sweep_figure(out.with_suffix(".png"), curves)
        print(f"wrote {out.with_suffix('.png')}")
    return 0


def cmd_optimize(cfg: RunConfig, plot: bool) -> int:
    planar = _planar_inputs(cfg)
    result = optimize(
        cfg.q_2d,
        (cfg.d_min_um, cfg.d_max_um),
        ScatteringModel(cfg.alpha),
        wavelength_nm=planar["wavelength_nm"],
        effective_length_nm=planar["effective_length_nm"],
        core_index=planar["core_index"],
        cladding_index=cfg.cladding_index,
        q_ext=cfg.q_ext,
        gamma=cfg.gamma,
        degenerate_mode=cfg.mode_degeneracy,
    )
    out = _out_path(cfg, "optimize")
    params = dict(planar)
    params.update(
        {
            "alpha": cfg.alpha,
            "gamma": cfg.gamma,
            "q_ext": cfg.q_ext,
            "mode_degeneracy": cfg.mode_degeneracy,
            "d_range_um": f"{cfg.d_min_um:g}..{cfg.d_max_um:g}",
        }
    )
    pre = report.provenance_lines("optimize", cfg.digest, params)
    best = result.best
    pre.append(
        f"# global best: q_2d = {best.q_2d:g}, d = {report.fmt(best.diameter_um)} um, "
        f"eta = {report.fmt(best.eta)}"
    )
    for w in result.warnings:
        pre.append(f"# warning: {w}")
    cols = ["q_2d", "d_star_um", "eta", "f_p", "beta", "q_total", "boundary"]
    rows = [
        (p.q_2d, p.diameter_um, p.eta, p.f_p, p.beta, p.q_total, p.boundary)
        for p in result.per_q2d
    ]
    report.write_table(out, cols, rows, pre)
    for p in result.per_q2d:
        flag = "  [boundary]" if p.boundary else ""
        print(f"q_2d = {p.q_2d:>6g}: d* = {p.diameter_um:.3f} um, eta* = {p.eta:.4f}{flag}")
    print(
        f"global best: eta = {best.eta:.4f} at q_2d = {best.q_2d:g}, d = {best.diameter_um:.3f} um"
    )
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {out}")
    if plot:
        figures.optimize_figure(out.with_suffix(".png"), result.per_q2d)
        print(f"wrote {out.with_suffix('.png')}")
    return 0


def cmd_mc(cfg: RunConfig, plot: bool) -> int:
    if cfg.beta is None or cfg.q_int is None:
        raise ConfigError("mc needs 'beta' and 'q_int' entries (plus optional q_ext, q_scat)")
    budget = compose(
        cfg.q_int,
        cfg.q_ext,
        cfg.q_scat if cfg.q_scat is not None else math.inf,
    )
    rates = ChannelRates.from_budget(cfg.beta, budget, cfg.top_fraction)
    tally = simulate(rates, cfg.n_photons, cfg.seed, threads=cfg.threads)
    eta_hat, std_err = estimate_eta(tally)
    analytic = rates.analytic_eta()

    out = _out_path(cfg, "mc")
    pre = report.provenance_lines(
        "mc",
        cfg.digest,
        {
            "beta": cfg.beta,
            "q_int": cfg.q_int,
            "q_ext": cfg.q_ext,
            "q_scat": budget.q_scat,
            "top_fraction": cfg.top_fraction,
            "n_photons": cfg.n_photons,
            "seed": cfg.seed,
            "rng": tally.rng_algorithm,
            "eta_hat": eta_hat,
            "std_err": std_err,
            "eta_analytic": analytic,
        },
    )
    rows = [(fate, tally.counts[fate]) for fate in FATES]
    report.write_table(out, ["fate", "count"], rows, pre)
    print(f"eta_hat = {eta_hat:.6f} +/- {std_err:.6f} (analytic {analytic:.6f})")
    print(f"wrote {out}")
    if plot:
        figures.mc_figure(out.with_suffix(".png"), tally, rates.fate_probabilities())
        print(f"wrote {out.with_suffix('.png')}")
    return 0


_COMMANDS = {
    "dbr": cmd_dbr,
    "cavity-q": cmd_cavity_q,
    "mode": cmd_mode,
    "fit": cmd_fit,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "mc": cmd_mc,
}

_OVERRIDE_FLAGS = (
    ("--out", "out", "output file path"),
    ("--seed", "seed", "RNG seed"),
    ("--alpha", "alpha", "sidewall scattering coefficient"),
    ("--gamma", "gamma", "leaky-mode rate ratio"),
    ("--q-ext", "q_ext", "planar extrinsic quality factor ('inf' allowed)"),
    ("--q-2d", "q_2d", "planar Q_2D list, comma separated"),
    ("--n-photons", "n_photons", "Monte Carlo photon count"),
    ("--threads", "threads", "Monte Carlo worker threads"),
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pillarkit",
        description="Micropillar single-photon-source design toolkit",
    )
    parser.add_argument("--version", action="version", version=f"pillarkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} pipeline stage")
        p.add_argument("config_pos", nargs="?", metavar="CONFIG", help="configuration file")
        p.add_argument("--config", help="configuration file (alternative to the positional)")
        p.add_argument("--plot", action="store_true", help="render a PNG next to the output")
        for flag, dest, help_text in _OVERRIDE_FLAGS:
            p.add_argument(flag, dest=f"ov_{dest}", metavar="V", help=help_text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config_path = args.config_pos or args.config
    if not config_path:
        print("error: a configuration file is required", file=sys.stderr)
        return 1
    overrides = {
        dest: getattr(args, f"ov_{dest}")
        for _, dest, _ in _OVERRIDE_FLAGS
        if getattr(args, f"ov_{dest}") is not None
    }
    try:
        cfg = load_config(config_path, overrides)
        return _COMMANDS[args.command](cfg, args.plot)
    except PillarKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
