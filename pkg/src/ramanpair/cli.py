"""Command-line interface.

Subcommands: chi, evolve, scan, scenario, validate.
Exit codes: 0 success, 1 validation failure, 2 parse error,
3 singular detuning, 4 integration failure.

CSV output is deterministic and locale-independent: '.' decimal point,
nine significant digits, '\\n' line endings.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import analysis
from .dynamics import SolverOptions, TimeGrid, Trajectory, evolve_lindblad, evolve_schrodinger
from .effective import (
    build_effective_hamiltonian,
    chi_drive_of,
    effective_params,
    family_of,
)
from .errors import ConfigError, IntegrationError, ScanError, SimError, SingularDetuningError
from .model import (
    TWO_PI,
    SystemSpec,
    bare_state,
    build_collapse_channels,
    build_drive_terms,
    build_static_hamiltonian,
    dim_signature,
    excitation_number_candidate,
    load_config,
    spec_from_config,
    superposition,
)
from .observables import standard_observables, state_fidelity
from .operators import DimSignature, QuantumState
from .presets import preset_config, preset_names
from .scan import scan_cavity_frequency, scan_drive_frequency
from .validate import run_all

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_SINGULAR = 3
EXIT_INTEGRATION = 4

CSV_COLUMNS = ("t_ns", "n_cav", "exc_q1", "exc_q2", "leak_q1", "leak_q2", "g2",
               "pop_1gg", "pop_0ee")


def _fmt(x: float) -> str:
    return f"{x:.8e}"


def write_csv(path, times, traces: dict, columns=CSV_COLUMNS):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        series = [np.asarray(times)] + [np.asarray(traces[c]) for c in columns[1:]]
        for row in zip(*series):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _grid_from_config(doc: dict) -> TimeGrid:
    g = doc.get("grid", {})
    return TimeGrid(
        t_start=float(g.get("t_start", 0.0)),
        t_end=float(g.get("t_end", 2000.0)),
        n_samples=int(g.get("n_samples", 501)),
    )


def _solver_from_config(doc: dict, tol_override=None) -> SolverOptions:
    s = doc.get("solver", {})
    rtol = float(s.get("rtol", 1e-9)) if tol_override is None else float(tol_override)
    fixed = s.get("fixed_step")
    return SolverOptions(
        rtol=rtol,
        atol=float(s.get("atol", 1e-12)),
        method=str(s.get("method", "DOP853")),
        fixed_step=float(fixed) if fixed is not None else None,
    )


def _initial_from_config(doc: dict, spec: SystemSpec, sig: DimSignature) -> QuantumState:
    init = doc.get("initial_state", {"photons": 1, "levels": ["g"] * len(spec.atoms)})
    n = int(init.get("photons", 0))
    levels = list(init.get("levels", ["g"] * len(spec.atoms)))
    if sig == dim_signature(spec):
        return bare_state(spec, n, levels)
    # reduced qubit space of the effective model
    idx = n
    for lvl in levels:
        idx = idx * 2 + {"g": 0, "e": 1}[lvl]
    vec = np.zeros(sig.total, dtype=complex)
    vec[idx] = 1.0
    return QuantumState(sig, "ket", vec)


def _run_scan(spec: SystemSpec, doc: dict, objective=None, rng=None):
    cfg = dict(doc.get("scan", {}))
    if rng is not None:
        lo, hi = rng
    elif cfg.get("lo") is not None and cfg.get("hi") is not None:
        lo, hi = float(cfg["lo"]), float(cfg["hi"])
    else:
        raise ConfigError("scan range missing: provide a scan section or --range")
    objective = objective or cfg.get("objective", "peak_transfer")
    window = cfg.get("window")
    window = float(window) if window is not None else None
    init = doc.get("initial_state")
    initial = None
    if init is not None:
        initial = (int(init.get("photons", 1)), tuple(init.get("levels")))
    if cfg.get("parameter", "cavity") == "drive":
        return "drive", scan_drive_frequency(
            spec, lo, hi, objective=objective, window=window
        )
    return "cavity", scan_cavity_frequency(
        spec, lo, hi, objective=objective, window=window, initial=initial
    )


def _apply_scan(spec: SystemSpec, doc: dict, model: str):
    """Returns (spec at the compensated operating point, scan info dict)."""
    if model == "effective":
        fam = family_of(spec)
        if fam == "lambda" and spec.atoms[0].drives:
            return spec, {"parameter": "none", "note": "pump-frame model needs no matching"}
        w1 = spec.atoms[0].level_frequencies.get("e", 0.0) - spec.atoms[0].level_frequencies.get("g", 0.0)
        w2 = spec.atoms[1].level_frequencies.get("e", 0.0) - spec.atoms[1].level_frequencies.get("g", 0.0)
        matched = replace(spec, cavity=replace(spec.cavity, frequency=w1 + w2))
        return matched, {"parameter": "cavity", "best_ghz": w1 + w2,
                         "note": "reduced model matches exactly at the qubit sum"}
    param, result = _run_scan(spec, doc)
    best = result.best[0]
    if param == "drive":
        drives = tuple(replace(d, frequency=best) for d in spec.atoms[0].drives)
        spec = replace(spec, atoms=(replace(spec.atoms[0], drives=drives),) + spec.atoms[1:])
    else:
        spec = replace(spec, cavity=replace(spec.cavity, frequency=best))
    return spec, {"parameter": param, "best_ghz": best, "objective": result.best[1],
                  "evaluations": result.metadata["evaluations"]}


def _evolve(spec: SystemSpec, doc: dict, model: str, dissipative: bool,
            solver: SolverOptions, extra_pops=()) -> Trajectory:
    if model == "effective":
        h = build_effective_hamiltonian(spec)
        sig = h.sig
        drives = []
    else:
        h = build_static_hamiltonian(spec)
        sig = h.sig
        drives = build_drive_terms(spec)
    obs = standard_observables(sig, extra_populations=extra_pops)
    psi0 = _initial_from_config(doc, spec, sig)
    grid = _grid_from_config(doc)
    if dissipative:
        channels = build_collapse_channels(spec) if model == "full" else []
        return evolve_lindblad(h, drives, channels, psi0, grid, obs, solver)
    return evolve_schrodinger(h, drives, psi0, grid, obs, solver)


# -- subcommands -------------------------------------------------------


def cmd_chi(args) -> int:
    doc = load_config(args.config)
    spec = spec_from_config(doc)
    params = effective_params(spec)
    out = params.to_dict()
    if params.chi == 0.0:
        out["period_ns"] = None
        out["note"] = "non-interacting"
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_evolve(args) -> int:
    doc = load_config(args.config)
    spec = spec_from_config(doc)
    if args.n_max is not None:
        spec = replace(spec, cavity=replace(spec.cavity, n_max=args.n_max))
    solver = _solver_from_config(doc, tol_override=args.tol)
    scan_info = {"parameter": "none"}
    if args.scan:
        spec, scan_info = _apply_scan(spec, doc, args.model)
    traj = _evolve(spec, doc, args.model, args.dissipative, solver)
    write_csv(args.out, traj.times, traj.traces)
    summary = {
        "out": str(args.out),
        "model": args.model,
        "dissipative": args.dissipative,
        "scan": scan_info,
        "solver": traj.metadata,
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_scan(args) -> int:
    doc = load_config(args.config)
    spec = spec_from_config(doc)
    rng = None
    if args.range:
        lo, hi = args.range.split(":")
        rng = (float(lo), float(hi))
    param, result = _run_scan(spec, doc, objective=args.objective, rng=rng)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(f"{param}_frequency_ghz,objective\n")
            for freq, val in result.samples:
                fh.write(f"{_fmt(freq)},{_fmt(val)}\n")
    print(json.dumps({
        "parameter": param,
        "best_ghz": result.best[0],
        "objective_value": result.best[1],
        "metadata": result.metadata,
    }, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_validate(args) -> int:
    spec = None
    if args.config:
        spec = spec_from_config(load_config(args.config))
    rows = run_all(chi_scale=args.chi_scale, spec=spec)
    width = max(len(name) for name, _, _ in rows)
    failures = 0
    for name, ok, detail in rows:
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{name:<{width}}  {status}  {detail}")
    print(f"{failures} failure(s) out of {len(rows)} checks")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


# -- scenarios ---------------------------------------------------------


def _scenario_exchange(name: str, outdir, dissipative: bool) -> dict:
    doc = preset_config("fig6" if dissipative else "fig5")
    spec = spec_from_config(doc)
    spec, scan_info = _apply_scan(spec, doc, "full")
    solver = _solver_from_config(doc)
    traj = _evolve(spec, doc, "full", dissipative, solver)
    csv_path = f"{outdir}/{name}.csv"
    write_csv(csv_path, traj.times, traj.traces)
    pop = traj.traces["pop_0ee"]
    peaks = analysis.principal_maxima(traj.times, pop)
    period = analysis.oscillation_period(traj.times, pop)
    g2_at_ncav = analysis.values_at_maxima(traj.times, traj.traces["n_cav"], traj.traces["g2"])
    summary = {
        "csv": csv_path,
        "scan": scan_info,
        "period_ns": period,
        "pop_0ee_maxima": [(t, v) for t, v, closed in peaks if closed],
        "first_peak": max((v for _, v, _ in peaks), default=0.0),
        "max_leakage": float(max(traj.traces["leak_q1"].max(), traj.traces["leak_q2"].max())),
        "max_g2_exc_gap": float(np.abs(traj.traces["g2"] - traj.traces["exc_q1"]).max()),
        "g2_at_photon_maxima": g2_at_ncav,
        "damping_strictly_decreasing": analysis.strictly_decreasing(
            [v for _, v, closed in peaks if closed]
        ),
        "solver": traj.metadata,
    }
    return summary


def _scenario_ghz(outdir) -> dict:
    doc = preset_config("ghz")
    spec = spec_from_config(doc)
    solver = _solver_from_config(doc)

    # reduced pump-frame model: exact quarter-period entangler
    h_eff = build_effective_hamiltonian(spec)
    chi_d = chi_drive_of(spec)
    t_ghz = 1.0 / (8.0 * abs(chi_d))
    sig = h_eff.sig
    grid = TimeGrid(0.0, t_ghz, int(doc["grid"]["n_samples"]))
    obs = standard_observables(sig)
    psi0 = _initial_from_config(doc, spec, sig)
    traj_eff = evolve_schrodinger(h_eff, [], psi0, grid, obs, solver)
    target_eff = QuantumState(
        sig, "ket",
        np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0),
    )
    fid_eff = state_fidelity(traj_eff.final_state, target_eff)
    write_csv(f"{outdir}/ghz_effective.csv", traj_eff.times, traj_eff.traces)

    # full model at the scanned drive frequency
    spec_full, scan_info = _apply_scan(spec, doc, "full")
    chi_d_full = chi_drive_of(spec_full)
    t_full = 1.0 / (8.0 * abs(chi_d_full))
    h = build_static_hamiltonian(spec_full)
    drives = build_drive_terms(spec_full)
    sig_full = h.sig
    grid_full = TimeGrid(0.0, t_full, int(doc["grid"]["n_samples"]))
    obs_full = standard_observables(sig_full)
    psi0_full = _initial_from_config(doc, spec_full, sig_full)
    traj = evolve_schrodinger(h, drives, psi0_full, grid_full, obs_full, solver)
    write_csv(f"{outdir}/ghz_full.csv", traj.times, traj.traces)

    # the entangled-state phase lives in the pump frame
    omega_d = TWO_PI * spec_full.atoms[0].drives[0].frequency
    counter = np.real(np.diag(excitation_number_candidate(spec_full).dense()))
    rotated = np.exp(1j * omega_d * t_full * counter) * traj.final_state.data
    psi_rot = QuantumState(sig_full, "ket", rotated, check=False)
    target = superposition(
        spec_full, [(1.0, 0, ("g", "g")), (1.0, 0, ("e", "e"))]
    )
    fid_full = state_fidelity(psi_rot, target)

    return {
        "csv": [f"{outdir}/ghz_effective.csv", f"{outdir}/ghz_full.csv"],
        "scan": scan_info,
        "chi_drive_ghz": chi_d,
        "ghz_time_ns": t_ghz,
        "fidelity_effective": float(fid_eff),
        "ghz_time_full_ns": t_full,
        "fidelity_full": float(fid_full),
        "solver": traj.metadata,
    }


def _scenario_two_photon(outdir) -> dict:
    doc = preset_config("two_photon")
    spec = spec_from_config(doc)
    spec, scan_info = _apply_scan(spec, doc, "full")
    solver = _solver_from_config(doc)
    traj = _evolve(spec, doc, "full", False, solver,
                   extra_pops=(("pop_2gg", 2, (0, 0)),))
    csv_path = f"{outdir}/two_photon.csv"
    write_csv(csv_path, traj.times, traj.traces, columns=CSV_COLUMNS + ("pop_2gg",))
    pop = traj.traces["pop_0ee"]
    peaks = analysis.principal_maxima(traj.times, pop)
    period = analysis.oscillation_period(traj.times, pop)
    return {
        "csv": csv_path,
        "scan": scan_info,
        "peak_pop_0ee": float(pop.max()),
        "period_ns_reported": period,
        "pop_2gg_initial": float(traj.traces["pop_2gg"][0]),
        "solver": traj.metadata,
    }


def cmd_scenario(args) -> int:
    import os

    outdir = args.outdir
    os.makedirs(outdir, exist_ok=True)
    if args.name == "fig5":
        summary = _scenario_exchange("fig5", outdir, dissipative=False)
    elif args.name == "fig6":
        summary = _scenario_exchange("fig6", outdir, dissipative=True)
    elif args.name == "fig7":
        summary = {
            "nondissipative": _scenario_exchange("fig7_nondissipative", outdir, False),
            "dissipative": _scenario_exchange("fig7_dissipative", outdir, True),
        }
    elif args.name == "ghz":
        summary = _scenario_ghz(outdir)
    elif args.name == "two_photon":
        summary = _scenario_two_photon(outdir)
    else:
        raise ConfigError(f"unknown scenario {args.name!r}")
    with open(f"{outdir}/{args.name}_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    print(json.dumps(summary, indent=2, sort_keys=True, default=float))
    return EXIT_OK


# -- entry point -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ramanpair",
        description="Photon-mediated joint two-atom excitation simulator",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("chi", help="report the analytic effective parameters")
    pc.add_argument("config")
    pc.set_defaults(func=cmd_chi)

    pe = sub.add_parser("evolve", help="integrate a config and write a CSV trace")
    pe.add_argument("config")
    pe.add_argument("--model", choices=("full", "effective"), default="full")
    pe.add_argument("--dissipative", action="store_true")
    pe.add_argument("--out", default="trajectory.csv")
    pe.add_argument("--scan", action=argparse.BooleanOptionalAction, default=True,
                    help="compensate dispersive shifts before evolving (default on)")
    pe.add_argument("--n-max", type=int, default=None)
    pe.add_argument("--tol", type=float, default=None, help="override solver rtol")
    pe.set_defaults(func=cmd_evolve)

    ps = sub.add_parser("scan", help="scan for the compensated matching point")
    ps.add_argument("config")
    ps.add_argument("--range", default=None, metavar="LO:HI")
    ps.add_argument("--objective", choices=("peak_transfer", "min_gap"), default=None)
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_scan)

    pn = sub.add_parser("scenario", help="run an embedded preset end to end")
    pn.add_argument("name", choices=("fig5", "fig6", "fig7", "ghz", "two_photon"))
    pn.add_argument("--outdir", default=".")
    pn.set_defaults(func=cmd_scenario)

    pv = sub.add_parser("validate", help="run the invariant and oracle suite")
    pv.add_argument("--config", default=None,
                    help="also report dispersive validity of this config")
    pv.add_argument("--chi-scale", type=float, default=1.0,
                    help="mutation fixture: scale the analytic coupling")
    pv.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SingularDetuningError as exc:
        print(f"singular detuning: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except ScanError as exc:
        print(f"scan failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
