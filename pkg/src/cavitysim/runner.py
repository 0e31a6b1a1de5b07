"""Scenario runner: builds systems from a config, integrates, writes CSVs.

Output contract (per run directory):
  config.txt    -- canonical config with execution-only fields normalized
  traj_*.csv    -- one per trajectory (schema cavitysim-trajectory-v1)
  map.csv       -- fig5 only: one row per sweep point
  alpha_map.csv -- fig4 only: peak correlations vs coupling ratio
  summary.csv   -- name,value rows of derived scalars
  manifest.json -- tool version, scenario, seed, config hash

The same config and seed produce byte-identical files, regardless of the
worker count: sweep points are computed independently and aggregated by
index, floats are written with repr(), and nothing records wall time.
"""

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__, analytic, coupling, dynamics as dyn, entanglement as ent
from . import fockspace as fs, presets
from .config import ExperimentConfig, canonical_text
from .model import SystemParams, build_generator
from .units import ghz_to_angular, mhz_to_angular

ENV_OUTPUT_ROOT = "CAVITYSIM_OUTPUT_ROOT"


@dataclass
class RunReport:
    output_dir: str
    summary: dict
    trajectory_files: list


def resolve_output_dir(cfg: ExperimentConfig, override: str | None = None) -> str:
    if override:
        return override
    if cfg.output_dir:
        return cfg.output_dir
    root = os.environ.get(ENV_OUTPUT_ROOT, "runs")
    return os.path.join(root, cfg.scenario)


def physics_canonical_text(cfg: ExperimentConfig) -> str:
    """Canonical text with execution-only fields normalized, so the config
    hash identifies the physics of a run, not where or how wide it ran."""
    return canonical_text(replace(cfg, workers=1, output_dir=""))


def system_for(cfg: ExperimentConfig, couplings_ghz, n_photons: int | None = None,
               lossless: bool | None = None):
    """(layout, generator) for the given per-atom couplings (ordinary GHz)."""
    n_ph = cfg.n_photons if n_photons is None else n_photons
    n_max = cfg.n_max if cfg.n_max > 0 else max(n_ph + 1, 1)
    layout = fs.HilbertLayout(n_max=n_max, n_atoms=len(couplings_ghz))
    drop_losses = cfg.lossless if lossless is None else lossless
    kappa = 0.0 if drop_losses else mhz_to_angular(cfg.resolved_kappa_mhz)
    gamma = 0.0 if drop_losses else mhz_to_angular(cfg.resolved_gamma_mhz)
    delta = ghz_to_angular(cfg.detuning_ghz)
    params = SystemParams(
        omega_c=0.0,
        omega_0=delta,
        kappa=kappa,
        gamma=gamma,
        couplings=tuple(ghz_to_angular(g) for g in couplings_ghz),
        frame=cfg.frame,
    )
    gen = build_generator(layout, params, dissipator_form=cfg.dissipator_form)
    return layout, gen


def time_grid(t_end_ns: float, dt_ns: float) -> np.ndarray:
    n = max(1, round(t_end_ns / dt_ns))
    return np.linspace(0.0, t_end_ns, n + 1)


def _integrate_cfg(cfg, gen, rho0, times, projections=None, track=None):
    # The literal dissipator form exists for comparison and does not preserve
    # the trace, so the drift gate must not kill such runs.
    trace_tol = float("inf") if cfg.dissipator_form == "literal" else 1e-9
    return dyn.integrate(
        gen,
        rho0,
        times,
        substeps=cfg.substeps if cfg.substeps > 0 else None,
        snapshot_stride=cfg.snapshot_stride if cfg.snapshot_stride > 0 else None,
        track=track if track is not None else cfg.observables,
        projections=projections,
        trace_tol=trace_tol,
    )


# ----------------------------------------------------------------------
# scenarios
# ----------------------------------------------------------------------


def _run_fig2(cfg: ExperimentConfig):
    g = cfg.resolved_couplings_ghz()[:1]
    layout, gen = system_for(cfg, g)
    rho0 = dyn.pure_state_density(fs.basis_state(layout, cfg.n_photons, "g"))

    short = _integrate_cfg(cfg, gen, rho0, time_grid(cfg.t_end_ns, cfg.dt_ns))
    long = _integrate_cfg(cfg, gen, rho0, time_grid(cfg.t_long_ns, cfg.dt_long_ns))

    g_ang = ghz_to_angular(g[0])
    kappa_ang = mhz_to_angular(cfg.resolved_kappa_mhz)
    gamma_ang = mhz_to_angular(cfg.resolved_gamma_mhz)
    summary = {
        "rabi_frequency_ghz": dyn.rabi_frequency(short, "pop_0e"),
        "rabi_frequency_expected_ghz": g_ang / np.pi,
        "kappa_mhz": cfg.resolved_kappa_mhz,
        "gamma_mhz": cfg.resolved_gamma_mhz,
    }
    if kappa_ang + gamma_ang > 0:
        fit = dyn.envelope_lifetime(long, "pop_0e")
        summary["tau_r_ns"] = fit.tau_ns
        summary["tau_r_expected_ns"] = 2.0 / (kappa_ang + gamma_ang)
        summary["tau_fit_log_rms"] = fit.log_rms_residual
        summary["cooperativity"] = coupling.cooperativity(
            g[0] * 1e9, cfg.resolved_kappa_mhz * 1e6, cfg.resolved_gamma_mhz * 1e6
        )
    return {"short": short, "long": long}, summary, {}


def _two_atom_runs(cfg: ExperimentConfig):
    """The four standard two-atom variants: photon number x coupling ratio."""
    g1 = cfg.resolved_couplings_ghz()[0]
    variants = {
        "one_photon_equal": (1, (g1, g1)),
        "one_photon_ratio": (1, (g1, cfg.alpha * g1)),
        "two_photon_equal": (2, (g1, g1)),
        "two_photon_ratio": (2, (g1, cfg.alpha * g1)),
    }
    runs = {}
    for name, (n_ph, gs) in variants.items():
        layout, gen = system_for(cfg, gs, n_photons=n_ph)
        rho0 = dyn.pure_state_density(fs.basis_state(layout, n_ph, "gg"))
        gv = analytic.CouplingVector(tuple(ghz_to_angular(x) for x in gs))
        proj = {}
        if n_ph == 1:
            chi0, chi1 = analytic.single_excitation_states(layout, gv)
            proj["P_chi0"] = chi0
            proj["P_chi1"] = chi1
            proj["P_psi_plus"] = analytic.symmetric_bell_state(layout)
        else:
            states = analytic.two_photon_states(
                layout, ghz_to_angular(gs[0]), ghz_to_angular(gs[1])
            )
            for k, chi in enumerate(states):
                proj[f"P_chi{k}"] = chi
        times = time_grid(cfg.t_end_ns, cfg.dt_ns)
        runs[name] = _integrate_cfg(cfg, gen, rho0, times, projections=proj)
    return runs


def _run_fig3(cfg: ExperimentConfig):
    track = tuple(cfg.observables)
    if "concurrence" not in track:
        cfg = replace(cfg, observables=track + ("concurrence",))
    runs = _two_atom_runs(cfg)
    ratio = runs["one_photon_ratio"]
    equal = runs["one_photon_equal"]
    metrics = analytic.peak_entanglement_metrics(cfg.alpha)
    summary = {
        "collective_frequency_ghz": dyn.rabi_frequency(equal, "P_chi1"),
        "collective_frequency_expected_ghz": np.sqrt(2.0) * 2.0 * cfg.g_ghz,
        "splitting_measured": ent.trajectory_splitting(
            ratio.series("pop_0eg"), ratio.series("pop_0ge")
        ),
        "splitting_expected": ent.splitting_magnitude(cfg.alpha),
        "fidelity_peak": float(np.sqrt(np.max(ratio.series("P_psi_plus")))),
        "fidelity_expected": metrics.fidelity,
        "concurrence_peak": float(np.max(ratio.series("C_BC"))),
        "concurrence_expected": metrics.concurrence,
    }
    return runs, summary, {}


def _run_fig4(cfg: ExperimentConfig):
    need = tuple(cfg.observables)
    for extra in ("entropies", "concurrence"):
        if extra not in need:
            need = need + (extra,)
    cfg = replace(cfg, observables=need)
    runs = _two_atom_runs(cfg)

    equal = runs["one_photon_equal"]
    g_ang = ghz_to_angular(cfg.g_ghz)
    period = np.pi / (np.sqrt(2.0) * g_ang)
    window = equal.times <= 5.0 * period + 1e-12
    summary = {
        "s_a_extrema_5_periods": dyn.count_extrema(equal.series("S_A")[window]),
        "s_b_extrema_5_periods": dyn.count_extrema(equal.series("S_B")[window]),
    }

    axis = cfg.sweep("alpha")
    rows = []
    for alpha in axis.values():
        gs = (cfg.g_ghz, float(alpha) * cfg.g_ghz)
        if gs[0] == 0 and gs[1] == 0:
            continue
        layout, gen = system_for(cfg, gs, n_photons=1)
        rho0 = dyn.pure_state_density(fs.basis_state(layout, 1, "gg"))
        omega = ghz_to_angular(cfg.g_ghz) * np.sqrt(1.0 + float(alpha) ** 2)
        t_end = 1.2 * np.pi / omega
        times = time_grid(t_end, t_end / 300)
        traj = _integrate_cfg(
            cfg, gen, rho0, times, track=("populations", "entropies", "concurrence")
        )
        rows.append(
            {
                "alpha": float(alpha),
                "peak_S_B": float(np.max(traj.series("S_B"))),
                "peak_S_C": float(np.max(traj.series("S_C"))),
                "peak_C_BC": float(np.max(traj.series("C_BC"))),
            }
        )
    return runs, summary, {"alpha_map.csv": rows}


def _fig5_point(cfg, fmap, r1, dx, dy):
    alpha = coupling.coupling_ratio(fmap, r1, (presets.LATTICE_NM + dx, dy, 0.0))
    gs = (cfg.g_ghz, alpha * cfg.g_ghz)
    layout, gen = system_for(cfg, gs, n_photons=1)
    rho0 = dyn.pure_state_density(fs.basis_state(layout, 1, "gg"))
    omega = ghz_to_angular(cfg.g_ghz) * np.sqrt(1.0 + alpha**2)
    t_end = 1.1 * np.pi / omega
    times = time_grid(t_end, t_end / 240)
    traj = _integrate_cfg(cfg, gen, rho0, times)
    return alpha, traj


def _run_fig5(cfg: ExperimentConfig):
    fmap = coupling.synth_fieldmap(cfg.design, cfg.resolution_nm)
    a = presets.LATTICE_NM
    r1 = (-a, 0.0, 0.0)
    dxs = cfg.sweep("delta_x_nm").values()
    dys = cfg.sweep("delta_y_nm").values()
    points = [(i, j, float(dx), float(dy))
              for i, dx in enumerate(dxs) for j, dy in enumerate(dys)]

    results: list = [None] * len(points)

    def work(k):
        i, j, dx, dy = points[k]
        alpha, traj = _fig5_point(cfg, fmap, r1, dx, dy)
        results[k] = (i, j, dx, dy, alpha, traj)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            list(pool.map(work, range(len(points))))
    else:
        for k in range(len(points)):
            work(k)

    runs = {}
    rows = []
    for i, j, dx, dy, alpha, traj in results:
        runs[f"dx{i:02d}_dy{j:02d}"] = traj
        rows.append(
            {
                "delta_x_nm": dx,
                "delta_y_nm": dy,
                "alpha": alpha,
                "peak_S_C": float(np.max(traj.series("S_C"))),
                "peak_C_BC": float(np.max(traj.series("C_BC"))),
            }
        )
    peak_c = np.array([r["peak_C_BC"] for r in rows])
    alphas = np.array([r["alpha"] for r in rows])
    x_axis = [r for r in rows if r["delta_y_nm"] == 0.0] or rows
    y_axis = [r for r in rows if r["delta_x_nm"] == 0.0] or rows
    summary = {
        "alpha_min": float(alphas.min()),
        "alpha_max": float(alphas.max()),
        "min_peak_concurrence": float(peak_c.min()),
        "max_reduction_pct": float((1.0 - peak_c.min()) * 100.0),
        "reduction_x_axis_pct": float(
            (1.0 - min(r["peak_C_BC"] for r in x_axis)) * 100.0
        ),
        "reduction_y_axis_pct": float(
            (1.0 - min(r["peak_C_BC"] for r in y_axis)) * 100.0
        ),
    }
    return runs, summary, {"map.csv": rows}


def _run_wstate(cfg: ExperimentConfig):
    gs = cfg.resolved_couplings_ghz()
    layout, gen = system_for(cfg, gs)
    rho0 = dyn.pure_state_density(
        fs.basis_state(layout, cfg.n_photons, "g" * cfg.n_atoms)
    )
    gv = analytic.CouplingVector(tuple(ghz_to_angular(g) for g in gs))
    chi0, chi1 = analytic.single_excitation_states(layout, gv)
    times = time_grid(cfg.t_end_ns, cfg.dt_ns)
    traj = _integrate_cfg(
        cfg, gen, rho0, times, projections={"P_chi0": chi0, "P_chi1": chi1}
    )
    freq = dyn.rabi_frequency(traj, "P_chi1")
    summary = {
        "collective_frequency_ghz": freq,
        "collective_frequency_expected_ghz": gv.g_norm / np.pi,
        "enhancement_over_single_atom": freq / (2.0 * gs[0]),
        "peak_p_chi1": float(np.max(traj.series("P_chi1"))),
        "w_fidelity_peak": float(np.sqrt(np.max(traj.series("P_chi1")))),
    }
    return {"wstate": traj}, summary, {}


def _run_custom(cfg: ExperimentConfig):
    gs = cfg.resolved_couplings_ghz()
    layout, gen = system_for(cfg, gs)
    rho0 = dyn.pure_state_density(
        fs.basis_state(layout, cfg.n_photons, "g" * cfg.n_atoms)
    )
    times = time_grid(cfg.t_end_ns, cfg.dt_ns)
    traj = _integrate_cfg(cfg, gen, rho0, times)
    return {"custom": traj}, {}, {}


_SCENARIO_FUNCS = {
    "fig2_single_atom": _run_fig2,
    "fig3_two_atom": _run_fig3,
    "fig4_correlations": _run_fig4,
    "fig5_position_map": _run_fig5,
    "n_atom_wstate": _run_wstate,
    "custom": _run_custom,
}

SCENARIO_NOTES = {
    "fig2_single_atom": "single atom, one photon: Rabi cycles and envelope lifetime",
    "fig3_two_atom": "two atoms, equal/ratio coupling, one- and two-photon dynamics",
    "fig4_correlations": "entropies and concurrence for the two-atom runs + alpha sweep",
    "fig5_position_map": "entanglement vs trap displacement on a synthetic field map",
    "n_atom_wstate": "N equally coupled atoms generating the shared-excitation state",
    "custom": "direct parameter run without scenario presets",
}


def _write_rows_csv(path: str, rows: list):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if not rows:
            return
        cols = list(rows[0].keys())
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(row[c])) for c in cols) + "\n")


def run_scenario(cfg: ExperimentConfig, output_dir: str | None = None) -> RunReport:
    out = resolve_output_dir(cfg, output_dir)
    os.makedirs(out, exist_ok=True)

    runs, summary, extra_tables = _SCENARIO_FUNCS[cfg.scenario](cfg)

    canon = physics_canonical_text(cfg)
    with open(os.path.join(out, "config.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canon)

    traj_files = []
    for name in sorted(runs):
        fname = f"traj_{name}.csv"
        with open(os.path.join(out, fname), "w", encoding="utf-8", newline="\n") as fh:
            dyn.write_trajectory_csv(runs[name], fh)
        traj_files.append(fname)

    for fname, rows in extra_tables.items():
        _write_rows_csv(os.path.join(out, fname), rows)

    with open(os.path.join(out, "summary.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("name,value\n")
        for key in sorted(summary):
            fh.write(f"{key},{repr(float(summary[key]))}\n")

    manifest = {
        "tool": "cavitysim",
        "version": __version__,
        "scenario": cfg.scenario,
        "seed": cfg.seed,
        "config_sha256": hashlib.sha256(canon.encode()).hexdigest(),
        "n_trajectories": len(traj_files),
    }
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return RunReport(output_dir=out, summary=summary, trajectory_files=traj_files)
