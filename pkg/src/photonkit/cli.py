"""Batch command-line front end.

Subcommands bind the solver modules to scenario files and flags, write CSV
grids plus JSON summaries, and keep all floating-point output at 9
significant digits. Exit codes: 0 success, 2 validation failure, 3 solver
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import (
    bent_guide,
    biphoton,
    dispersion,
    fiber_prop,
    phasematch,
    photon_stats,
    rect_guide,
    sellmeier_fit,
)
from .errors import PhotonkitError

__all__ = ["main", "run", "validate_scenario"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3


def _round_sig(value, digits: int = 9):
    """Recursively round floats to `digits` significant digits for output."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return v
        return float(f"{v:.{digits}g}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, dict):
        return {k: _round_sig(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_sig(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return [_round_sig(v, digits) for v in value.tolist()]
    return value


def _emit(payload: dict) -> None:
    print(json.dumps(_round_sig(payload), sort_keys=True, indent=2))


def _fail_validation(diagnostics) -> int:
    _emit({"status": "validation-error", "diagnostics": diagnostics})
    return EXIT_VALIDATION


def _load_scenario(path: str) -> tuple[dict | None, list]:
    p = Path(path)
    if not p.exists():
        return None, [{"path": "", "message": f"scenario file not found: {path}"}]
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        return None, [{"path": "", "message": f"line {exc.lineno}: {exc.msg}"}]
    if not isinstance(raw, dict):
        return None, [{"path": "", "message": "scenario must be a JSON object"}]
    raw["__dir__"] = str(p.parent)
    return raw, []


def _resolve_crystal(scenario: dict, diags: list) -> dispersion.CrystalSpec | None:
    ref = scenario.get("crystal")
    if not isinstance(ref, str) or not ref:
        diags.append({"path": "/crystal", "message": "crystal file or builtin name required"})
        return None
    base = Path(scenario.get("__dir__", "."))
    candidate = base / ref if not Path(ref).is_absolute() else Path(ref)
    if not candidate.exists():
        try:
            candidate = dispersion.builtin_crystal_path(ref)
        except PhotonkitError:
            diags.append({"path": "/crystal", "message": f"not found: {ref}"})
            return None
    try:
        return dispersion.load_crystal(candidate)
    except (PhotonkitError, ValueError) as exc:
        diags.append({"path": "/crystal", "message": str(exc)})
        return None


def _pol(name: str) -> dispersion.Polarization:
    return dispersion.Polarization(name.lower())


def _check_block(block, fields, pointer, diags) -> bool:
    """Require `block` to be an object holding positive numbers at `fields`."""
    if not isinstance(block, dict):
        diags.append({"path": pointer, "message": "object required"})
        return False
    ok = True
    for name, positive in fields:
        v = block.get(name)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            diags.append({"path": f"{pointer}/{name}", "message": "number required"})
            ok = False
        elif positive and v <= 0:
            diags.append({"path": f"{pointer}/{name}", "message": "must be positive"})
            ok = False
    return ok


def _query_from_scenario(scenario: dict, diags: list):
    q = scenario.get("query", {})
    if not isinstance(q, dict):
        diags.append({"path": "/query", "message": "object required"})
        return None
    try:
        return phasematch.PhaseMatchQuery(
            pump_wavelength_nm=float(q.get("pump_wavelength_nm", 1.0)),
            signal_theta_rad=float(q.get("signal_theta_rad", 0.0)),
            signal_phi_rad=float(q.get("signal_phi_rad", 0.0)),
            temperature_k=float(q.get("temperature_k", 298.0)),
            pol_pump=_pol(q.get("pol_pump", "z")),
            pol_signal=_pol(q.get("pol_signal", "z")),
            pol_idler=_pol(q.get("pol_idler", "z")),
            qpm_order=int(q.get("qpm_order", 1)),
            qpm_sign=int(q.get("qpm_sign", -1)),
        )
    except (PhotonkitError, ValueError) as exc:
        diags.append({"path": "/query", "message": str(exc)})
        return None


# ---------------------------------------------------------------- validation

def validate_scenario(scenario: dict) -> list:
    """Type-invariant diagnostics with JSON-pointer paths; empty iff runnable."""
    diags: list = []
    command = scenario.get("command")
    if command not in ("jsa", "fiber", "bentguide solve", "rectguide"):
        diags.append({"path": "/command",
                      "message": "command must be one of jsa, fiber, "
                                 "rectguide, 'bentguide solve'"})
        return diags
    if command in ("jsa", "fiber"):
        _resolve_crystal(scenario, diags)
        _check_block(scenario.get("pump"), [("central_frequency_phz", True),
                                            ("pulse_duration_fs", True),
                                            ("spatial_width_um", True)],
                     "/pump", diags)
        _check_block(scenario.get("coupling"), [("signal_width_um", True),
                                                ("idler_width_um", True)],
                     "/coupling", diags)
        if _check_block(scenario.get("grid"), [("n", True),
                                               ("range_fraction", True),
                                               ("signal_center_phz", True),
                                               ("idler_center_phz", True)],
                        "/grid", diags):
            g = scenario["grid"]
            if g["n"] < 16:
                diags.append({"path": "/grid/n", "message": "n must be >= 16"})
            if not 0 < g["range_fraction"] < 0.5:
                diags.append({"path": "/grid/range_fraction",
                              "message": "must lie in (0, 0.5)"})
        _query_from_scenario(scenario, diags)
    if command == "fiber":
        if _check_block(scenario.get("fiber"), [("gvd_2beta_s2_per_m", False),
                                                ("length_m", False)],
                        "/fiber", diags):
            if scenario["fiber"]["length_m"] < 0:
                diags.append({"path": "/fiber/length_m",
                              "message": "must be nonnegative"})
        if scenario.get("method", "stationary") not in ("stationary", "exact"):
            diags.append({"path": "/method",
                          "message": "method must be 'stationary' or 'exact'"})
    if command == "bentguide solve":
        if _check_block(scenario.get("spec"), [("inner_radius_um", True),
                                               ("outer_radius_um", True),
                                               ("half_height_um", True),
                                               ("core_index", True),
                                               ("clad_index", True),
                                               ("vacuum_wavelength_um", True)],
                        "/spec", diags):
            s = scenario["spec"]
            if s["inner_radius_um"] >= s["outer_radius_um"]:
                diags.append({"path": "/spec/inner_radius_um",
                              "message": "inner radius must be below outer radius"})
            if s["core_index"] <= s["clad_index"]:
                diags.append({"path": "/spec/core_index",
                              "message": "core index must exceed clad index"})
    if command == "rectguide":
        if _check_block(scenario.get("spec"), [("width_a_um", True),
                                               ("height_b_um", True),
                                               ("core_index", True)],
                        "/spec", diags):
            kind = scenario["spec"].get("kind", "dielectric")
            if kind not in ("hollow", "dielectric"):
                diags.append({"path": "/spec/kind",
                              "message": "kind must be 'hollow' or 'dielectric'"})
            if kind == "hollow" and "frequency_thz" not in scenario:
                diags.append({"path": "/frequency_thz",
                              "message": "hollow solve needs frequency_thz"})
            if kind == "dielectric" and "wavelength_um" not in scenario:
                diags.append({"path": "/wavelength_um",
                              "message": "dielectric solve needs wavelength_um"})
    return diags


# ---------------------------------------------------------------- subcommands

def _cmd_dispersion(args) -> int:
    scenario = {"crystal": args.crystal, "__dir__": "."}
    diags: list = []
    crystal = _resolve_crystal(scenario, diags)
    if crystal is None:
        return _fail_validation(diags)
    if args.wavelength_um <= 0:
        return _fail_validation([{"path": "/wavelength_um",
                                  "message": "must be positive"}])
    sell = crystal.axis_set(_pol(args.axis))
    n = dispersion.refractive_index(sell, args.wavelength_um)
    payload = {
        "status": "ok",
        "crystal": crystal.name,
        "axis": args.axis,
        "wavelength_um": args.wavelength_um,
        "refractive_index": n,
        "wavevector_per_um": dispersion.wavevector_magnitude(n, args.wavelength_um),
    }
    if crystal.poling_period_um > 0:
        payload["poling_period_um"] = dispersion.poling_period(
            crystal, args.temperature_k)
    _emit(payload)
    return EXIT_OK


def _cmd_phasematch_sweep(args) -> int:
    scenario = {"crystal": args.crystal, "__dir__": "."}
    diags: list = []
    crystal = _resolve_crystal(scenario, diags)
    if crystal is None:
        return _fail_validation(diags)
    if args.points < 2 or args.stop_nm <= args.start_nm:
        return _fail_validation([{"path": "/sweep",
                                  "message": "need points >= 2 and stop > start"}])
    lo, hi = args.window_nm
    pumps = np.linspace(args.start_nm, args.stop_nm, args.points)
    query = phasematch.PhaseMatchQuery(
        pump_wavelength_nm=args.start_nm, temperature_k=args.temperature_k,
        pol_pump=_pol(args.pol_pump), pol_signal=_pol(args.pol_signal),
        pol_idler=_pol(args.pol_idler), qpm_sign=args.qpm_sign)
    roots = phasematch.solve_signal_sweep(query, crystal, pumps, (lo, hi))
    rows = [{"pump_nm": float(p), "signal_nm": (None if math.isnan(s) else float(s))}
            for p, s in zip(pumps, roots)]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lambda_pump_nm", "lambda_vis_nm", "sigma_nm"])
            for row in rows:
                if row["signal_nm"] is not None:
                    writer.writerow([repr(row["pump_nm"]),
                                     repr(row["signal_nm"]), "1.0"])
    _emit({"status": "ok", "crystal": crystal.name, "points": rows,
           "solved": int(np.isfinite(roots).sum())})
    return EXIT_OK


def _cmd_fit_sellmeier(args) -> int:
    scenario = {"crystal": args.crystal, "__dir__": "."}
    diags: list = []
    crystal = _resolve_crystal(scenario, diags)
    if crystal is None:
        return _fail_validation(diags)
    if not Path(args.data).exists():
        return _fail_validation([{"path": "/data",
                                  "message": f"dataset not found: {args.data}"}])
    points = sellmeier_fit.load_dataset_csv(args.data)
    lo, hi = args.window_nm
    query = phasematch.PhaseMatchQuery(
        pump_wavelength_nm=min(pt.pump_nm for pt in points),
        temperature_k=args.temperature_k, qpm_sign=args.qpm_sign)
    setup = sellmeier_fit.FitSetup(crystal=crystal, query=query,
                                   search_window_nm=(lo, hi))
    start = (tuple(args.start) if args.start
             else crystal.sellmeier_z.as_tuple()[:3])
    report = sellmeier_fit.fit(points, start, setup, weighted=args.weighted)
    _emit({"status": "ok",
           "fitted": list(report.fitted),
           "uncertainties": list(report.uncertainties),
           "rss_nm2": report.rss_nm2,
           "rss_start_nm2": report.rss_start_nm2,
           "average_error_nm": report.average_error_nm,
           "n_points": report.n_points,
           "converged": report.converged,
           "iterations": report.iterations})
    return EXIT_OK


def _jsa_from_scenario(scenario: dict):
    crystal = _resolve_crystal(scenario, [])
    pump = biphoton.PumpSpec(**{k: float(v) for k, v in scenario["pump"].items()})
    coupling = biphoton.CouplingSpec(
        **{k: float(v) for k, v in scenario["coupling"].items()})
    g = scenario["grid"]
    grid_spec = biphoton.JsaGridSpec(
        n=int(g["n"]), range_fraction=float(g["range_fraction"]),
        signal_center_phz=float(g["signal_center_phz"]),
        idler_center_phz=float(g["idler_center_phz"]))
    query = _query_from_scenario(scenario, [])
    grid = biphoton.jsa_grid(pump, coupling, crystal, grid_spec, query)
    return grid


def _write_jsa_csv(grid: biphoton.JsaGrid, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega_s_phz", "omega_i_phz", "probability"])
        for j, ws in enumerate(grid.omega_s_phz):
            for k, wi in enumerate(grid.omega_i_phz):
                writer.writerow([repr(float(ws)), repr(float(wi)),
                                 repr(float(grid.probability[j, k]))])


def _out_dir(scenario: dict) -> Path:
    base = Path(scenario.get("__dir__", "."))
    out = scenario.get("output_dir", ".")
    path = base / out if not Path(out).is_absolute() else Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _cmd_jsa(args) -> int:
    scenario, diags = _load_scenario(args.scenario)
    if scenario is None:
        return _fail_validation(diags)
    scenario.setdefault("command", "jsa")
    diags = validate_scenario(scenario)
    if diags:
        return _fail_validation(diags)
    grid = _jsa_from_scenario(scenario)
    fit2 = biphoton.fit_gaussian_2d(grid)
    om_s, p_s = biphoton.marginal(grid, "signal")
    fit_s = biphoton.fit_gaussian_1d(om_s, p_s)
    out = _out_dir(scenario)
    _write_jsa_csv(grid, out / "jsa_grid.csv")
    _emit({"status": "ok",
           "grid_csv": str(out / "jsa_grid.csv"),
           "joint_fit": {
               "signal_center_phz": fit2.signal_center_phz,
               "idler_center_phz": fit2.idler_center_phz,
               "signal_sigma_phz": fit2.signal_sigma_phz,
               "idler_sigma_phz": fit2.idler_sigma_phz,
               "pearson": fit2.pearson},
           "signal_marginal_fit": {
               "center_phz": fit_s.center_phz,
               "fwhm_phz": fit_s.fwhm_phz}})
    return EXIT_OK


def _cmd_fiber(args) -> int:
    scenario, diags = _load_scenario(args.scenario)
    if scenario is None:
        return _fail_validation(diags)
    scenario.setdefault("command", "fiber")
    diags = validate_scenario(scenario)
    if diags:
        return _fail_validation(diags)
    grid = _jsa_from_scenario(scenario)
    fiber = fiber_prop.FiberSpec(
        gvd_2beta_s2_per_m=float(scenario["fiber"]["gvd_2beta_s2_per_m"]),
        length_m=float(scenario["fiber"]["length_m"]))
    method = scenario.get("method", "stationary")
    if method == "exact":
        tg = fiber_prop.propagate_exact(grid, fiber)
    else:
        tg = fiber_prop.propagate_stationary(grid, fiber)
    stats = fiber_prop.time_grid_stats(tg)
    fit2 = biphoton.fit_gaussian_2d(grid)
    mapped = fiber_prop.time_stats_from_frequency(fit2, fiber)
    out = _out_dir(scenario)
    fiber_prop.save_time_grid_csv(tg, out / "time_grid.csv")
    _emit({"status": "ok",
           "method": method,
           "time_grid_csv": str(out / "time_grid.csv"),
           "dispersion_scale_ns_per_phz": fiber_prop.dispersion_scale(fiber),
           "far_field_parameter": fiber_prop.far_field_parameter(
               fiber, fit2.signal_sigma_phz),
           "time_stats": {"tau_s_ns": stats.tau_s_ns,
                          "tau_i_ns": stats.tau_i_ns,
                          "pearson_t": stats.pearson_t},
           "mapped_frequency_stats": {"tau_s_ns": mapped.tau_s_ns,
                                      "tau_i_ns": mapped.tau_i_ns,
                                      "pearson_t": mapped.pearson_t}})
    return EXIT_OK


def _cmd_rectguide(args) -> int:
    scenario, diags = _load_scenario(args.scenario)
    if scenario is None:
        return _fail_validation(diags)
    scenario.setdefault("command", "rectguide")
    diags = validate_scenario(scenario)
    if diags:
        return _fail_validation(diags)
    s = scenario["spec"]
    spec = rect_guide.RectGuideSpec(
        width_a_um=float(s["width_a_um"]), height_b_um=float(s["height_b_um"]),
        core_index=float(s["core_index"]),
        clad_index=float(s.get("clad_index", 1.0)),
        kind=s.get("kind", "dielectric"))
    if spec.kind == "hollow":
        modes = rect_guide.hollow_modes(spec, float(scenario["frequency_thz"]))
    else:
        modes = rect_guide.marcatili_solve(
            spec, float(scenario["wavelength_um"]),
            scenario.get("polarization", "Ey"))
    _emit({"status": "ok",
           "modes": [{"family": m.family, "m": m.m, "n": m.n,
                      "k_x_per_um": m.k_x_per_um, "k_y_per_um": m.k_y_per_um,
                      "k_z_per_um": m.k_z_per_um,
                      "cutoff_thz": m.cutoff_thz}
                     for m in modes]})
    return EXIT_OK


def _cmd_bentguide_solve(args) -> int:
    scenario, diags = _load_scenario(args.scenario)
    if scenario is None:
        return _fail_validation(diags)
    scenario.setdefault("command", "bentguide solve")
    diags = validate_scenario(scenario)
    if diags:
        return _fail_validation(diags)
    s = scenario["spec"]
    spec = bent_guide.BentGuideSpec(
        inner_radius_um=float(s["inner_radius_um"]),
        outer_radius_um=float(s["outer_radius_um"]),
        half_height_um=float(s["half_height_um"]),
        core_index=float(s["core_index"]), clad_index=float(s["clad_index"]),
        vacuum_wavelength_um=float(s["vacuum_wavelength_um"]))
    modes = bent_guide.solve_modes(spec)
    rows = [{"p": m.p, "q": m.q, "parity": m.parity,
             "beta_w_per_um": m.beta_w_per_um, "beta_s_per_um": m.beta_s_per_um,
             "h_per_um": m.h_per_um, "m": m.m, "gamma_rad": m.gamma_rad,
             "mean_radius_um": m.mean_radius_um, "n_eff": m.n_eff,
             "physical": m.physical}
            for m in modes]
    if scenario.get("field_csv"):
        out = _out_dir(scenario)
        mode = modes[0]
        r = np.linspace(spec.inner_radius_um, spec.outer_radius_um, 101)
        z = np.linspace(-2 * spec.half_height_um, 2 * spec.half_height_um, 101)
        field = mode.field(r, z)
        with open(out / scenario["field_csv"], "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r_um", "z_um", "abs_Er"])
            for j, rv in enumerate(r):
                for k, zv in enumerate(z):
                    writer.writerow([repr(float(rv)), repr(float(zv)),
                                     repr(float(field[j, k]))])
    _emit({"status": "ok", "modes": rows,
           "count_estimate": list(bent_guide.count_vertical_modes(spec))})
    return EXIT_OK


def _cmd_stats_g2(args) -> int:
    kind, _, param = args.state.partition(":")
    try:
        if kind == "fock":
            moments = photon_stats.fock_moments(int(param))
        elif kind == "thermal":
            moments = photon_stats.thermal_moments(float(param))
        elif kind == "coherent":
            moments = photon_stats.coherent_moments(float(param) if param else 1.0)
        elif kind == "tmsv":
            moments = photon_stats.tmsv_moments(float(param)).per_mode
        else:
            return _fail_validation([{"path": "/state",
                                      "message": f"unknown state kind {kind!r}"}])
    except ValueError:
        return _fail_validation([{"path": "/state",
                                  "message": f"bad parameter {param!r}"}])
    g2 = photon_stats.g2_from_moments(moments)
    _emit({"status": "ok", "state": args.state,
           "mean": moments.mean, "variance": moments.variance,
           "g2": g2, "classification": photon_stats.classify_g2(g2)})
    return EXIT_OK


def _cmd_validate(args) -> int:
    scenario, diags = _load_scenario(args.scenario)
    if scenario is None:
        return _fail_validation(diags)
    diags = validate_scenario(scenario)
    _emit({"status": "ok" if not diags else "validation-error",
           "diagnostics": diags})
    return EXIT_OK if not diags else EXIT_VALIDATION


# ---------------------------------------------------------------- golden runs

def _golden_checks() -> list[tuple[str, bool]]:
    checks: list[tuple[str, bool]] = []

    spec = bent_guide.BentGuideSpec(0.5, 1.5, 0.25, 2.3, 1.0, 0.8)
    verts = bent_guide.vertical_roots(spec)
    betas = [v.beta_w_per_um for v in verts]
    refs_b = [5.03, 9.94, 14.46]
    checks.append(("bent-guide beta_w within 0.5%",
                   len(betas) == 3 and all(abs(b / r - 1) < 0.005
                                           for b, r in zip(betas, refs_b))))
    checks.append(("bent-guide vertical counts (2, 1)",
                   bent_guide.count_vertical_modes(spec) == (2, 1)))
    modes = bent_guide.solve_modes(spec)
    by_qp = {(m.q, m.p): m for m in modes}
    checks.append(("bent-guide n_eff(1,1) within 3%",
                   abs(by_qp[(1, 1)].n_eff / 2.03 - 1) < 0.03))
    checks.append(("bent-guide mean radius (1,1) within 0.05 um",
                   abs(by_qp[(1, 1)].mean_radius_um - 1.29) < 0.05))

    hollow = rect_guide.RectGuideSpec(1.0, 0.5, 1.0, kind="hollow")
    cutoff = rect_guide.hollow_cutoff_thz(hollow, 1, 0)
    checks.append(("hollow TE10 cutoff = c/(2a)",
                   abs(cutoff - 0.299792458 / 2.0 * 1e3) < 1e-9))

    fiber = fiber_prop.FiberSpec(-2.27e-26, 1e4)
    checks.append(("fiber dispersion scale 227 ns/PHz",
                   abs(fiber_prop.dispersion_scale(fiber) - 227.0) < 1e-9))

    g2_vals = [photon_stats.g2_from_moments(photon_stats.fock_moments(1)),
               photon_stats.g2_from_moments(photon_stats.fock_moments(2)),
               photon_stats.g2_from_moments(photon_stats.coherent_moments(1.0)),
               photon_stats.g2_from_moments(photon_stats.thermal_moments(0.7))]
    checks.append(("g2 table {0, 0.5, 1, 2}",
                   g2_vals == [0.0, 0.5, 1.0, 2.0]))

    crystal = dispersion.load_crystal(
        dispersion.builtin_crystal_path("ppktp_kato2002"))
    f1, f2 = sellmeier_fit.sellmeier_fraction_ranges(crystal.sellmeier_z)
    checks.append(("z-axis pole-fraction ranges (0.533, 0.048)",
                   abs(f1 - 0.533) < 0.005 and abs(f2 - 0.048) < 0.005))
    return checks


def _cmd_golden(_args=None) -> int:
    checks = _golden_checks()
    all_ok = True
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        all_ok &= ok
    return EXIT_OK if all_ok else EXIT_SOLVER


# ------------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonkit", description="numerical photonics workbench")
    parser.add_argument("--golden", action="store_true",
                        help="run the built-in reference checks and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("dispersion", help="refractive index at one wavelength")
    p.add_argument("--crystal", required=True)
    p.add_argument("--axis", default="z", choices=["x", "y", "z", "fast", "slow"])
    p.add_argument("--wavelength-um", type=float, required=True)
    p.add_argument("--temperature-k", type=float, default=298.0)
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("phasematch", help="phase matching solvers")
    psub = p.add_subparsers(dest="subcommand", required=True)
    ps = psub.add_parser("sweep", help="signal wavelength over a pump sweep")
    ps.add_argument("--crystal", required=True)
    ps.add_argument("--start-nm", type=float, required=True)
    ps.add_argument("--stop-nm", type=float, required=True)
    ps.add_argument("--points", type=int, default=23)
    ps.add_argument("--window-nm", type=float, nargs=2, default=(500.0, 600.0))
    ps.add_argument("--temperature-k", type=float, default=298.0)
    ps.add_argument("--pol-pump", default="z")
    ps.add_argument("--pol-signal", default="z")
    ps.add_argument("--pol-idler", default="z")
    ps.add_argument("--qpm-sign", type=int, default=-1)
    ps.add_argument("--out", default=None, help="optional CSV output path")
    ps.set_defaults(func=_cmd_phasematch_sweep)

    p = sub.add_parser("fit-sellmeier", help="fit z-axis Sellmeier coefficients")
    p.add_argument("--crystal", required=True)
    p.add_argument("--data", required=True, help="CSV dataset path")
    p.add_argument("--start", type=float, nargs=3, default=None)
    p.add_argument("--window-nm", type=float, nargs=2, default=(500.0, 600.0))
    p.add_argument("--temperature-k", type=float, default=298.0)
    p.add_argument("--qpm-sign", type=int, default=-1)
    p.add_argument("--weighted", action="store_true")
    p.set_defaults(func=_cmd_fit_sellmeier)

    p = sub.add_parser("jsa", help="joint spectral probability grid")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=_cmd_jsa)

    p = sub.add_parser("fiber", help="propagate the joint spectrum through fiber")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=_cmd_fiber)

    p = sub.add_parser("rectguide", help="rectangular waveguide modes")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=_cmd_rectguide)

    p = sub.add_parser("bentguide", help="bent waveguide solvers")
    bsub = p.add_subparsers(dest="subcommand", required=True)
    bs = bsub.add_parser("solve", help="full bent-guide mode table")
    bs.add_argument("--spec", dest="scenario", required=True)
    bs.set_defaults(func=_cmd_bentguide_solve)

    p = sub.add_parser("stats", help="photon statistics")
    ssub = p.add_subparsers(dest="subcommand", required=True)
    sg = ssub.add_parser("g2", help="zero-delay second-order coherence")
    sg.add_argument("--state", required=True,
                    help="fock:N | thermal:BETA | coherent[:MEAN] | tmsv:R")
    sg.set_defaults(func=_cmd_stats_g2)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=_cmd_validate)
    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.golden:
        return _cmd_golden(args)
    if not getattr(args, "func", None):
        parser.print_help()
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except PhotonkitError as exc:
        _emit({"status": "solver-error",
               "error": type(exc).__name__, "message": str(exc)})
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
