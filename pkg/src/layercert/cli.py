"""Pipeline driver: run configs end to end and emit reports.

Verbs: `run <config.ini>`, `verify <certificate.json>`, `catalog list`,
`catalog describe <name>`. Exit codes: 0 clean, 1 a stage errored (or a
verification failed), 2 the config or input file is invalid. The output
directory from the config can be overridden with LAYERCERT_OUTDIR.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from .asymptotics import classify_degrees, dominance_scale, growth_classification, \
    h2_integrability
from .certify import Certificate, QuadraticFormDecomposition, TestFunctionParams, \
    _select_s_window, certify, verify_certificate
from .charts import assert_in_gauge, coefficient_profile, is_developable, \
    metric_terms
from .config import RunConfig, parse_config
from .errors import ConfigError, LayercertError
from .report import RunReport, emit
from .spectrum import MeshSpec, RadialMeshSpec, radial_ladder, \
    spectral_report, threshold_scan
from .surfaces import CATALOG, LayerModel, check_core_glue, make_surface
from .topology import isoperimetric_constants, total_curvature, white_check

_STAGE_ORDER = ("geometry", "asymptotics", "topology", "certify", "spectrum")


def _jsonable(x):
    """Recursively coerce numpy scalars and non-finite floats for JSON."""
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if np.isnan(v):
            return None
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _stage_geometry(config: RunConfig, objects: dict) -> tuple[dict, dict]:
    surface = make_surface(config.surface_name, **config.surface_params)
    layer = LayerModel(surface, config.a, config.curvature_budget)
    objects["surface"] = surface
    objects["layer"] = layer
    gauge = assert_in_gauge(surface.chart)
    glue = check_core_glue(surface)
    dev = is_developable(surface.chart)

    chart = surface.chart
    v_lo = max(chart.v_range[0], -30.0)
    v_hi = min(chart.v_range[1], max(30.0, v_lo + 1.0))
    s_mid = 0.5 * (max(chart.s_range[0], -30.0) + min(chart.s_range[1], 30.0))
    v = np.linspace(v_lo, v_hi, 129)
    terms = metric_terms(chart, np.full_like(v, s_mid), v)
    rows = [(float(vv), float(k), float(h), float(q)) for vv, k, h, q in
            zip(v, terms["gauss"], terms["mean"], terms["det"])]
    tables = {"curvature_profile": (("v", "gauss", "mean", "first_form_det"),
                                    rows)}

    result = {
        "surface": surface.label,
        "threshold": layer.threshold,
        "a": config.a,
        "curvature_budget": config.curvature_budget,
        "thickness_product": config.a * surface.kappa_sup,
        "kappa_sup": surface.kappa_sup,
        "r_core": surface.r_core,
        "euler_characteristic": surface.euler_characteristic,
        "has_radial_structure": surface.radial is not None,
        "gauge_residual": max(gauge.values()),
        "core_glue_ok": glue["ok"],
        "developable": dev.developable,
        "sup_abs_gauss_on_chart": dev.sup_abs_gauss,
    }
    return result, tables


def _stage_asymptotics(config: RunConfig, objects: dict) -> tuple[dict, dict]:
    chart = objects["surface"].chart
    prof = coefficient_profile(chart)
    s_window, _ = _select_s_window(chart)
    degrees = classify_degrees(prof, s_window)
    t_dom = dominance_scale(prof, s_window)
    growth = growth_classification(prof, s_window, t=t_dom)
    integ = h2_integrability(prof, s_window, v_lo=max(0.0, chart.v_range[0]))

    result = {
        "deg_num": degrees.deg_num if np.isfinite(degrees.deg_num) else "-inf",
        "deg_det": degrees.deg_det,
        "degrees_stable": degrees.stable,
        "dominance_scale": t_dom,
        "growth": growth.classification,
        "growth_degree": growth.degree,
        "growth_exponent": growth.exponent,
        "growth_residual": growth.residual,
        "growth_agrees": growth.agrees,
        "h2_verdict": integ.verdict,
        "h2_rate": integ.rate,
        "h2_agrees": integ.agrees,
    }
    tables = {
        "growth_fit": (("t0", "integral"),
                       list(zip(growth.t0_grid, growth.values))),
        "h2_truncations": (("v_max", "integral"),
                           list(zip(integ.v_grid, integ.values))),
    }
    return result, tables


def _stage_topology(config: RunConfig, objects: dict) -> tuple[dict, dict]:
    surface = objects["surface"]
    white = white_check(surface)
    result = {
        "euler_characteristic": surface.euler_characteristic,
        "a2_verdict": white.verdict,
        "a2_rate": white.rate,
        "a2_last": white.a2_truncations[-1],
        "white_residual": white.white_residual,
    }
    if surface.radial is not None:
        total, tail, _ = total_curvature(surface)
        lams = isoperimetric_constants(surface)
        residual = (total / (2.0 * np.pi) - surface.euler_characteristic
                    + sum(lams))
        result.update({
            "total_curvature": total,
            "total_curvature_tail": tail,
            "end_constants": list(lams),
            "hartman_residual": residual,
            "huber_slack": 2.0 * np.pi * surface.euler_characteristic - total,
        })
    tables = {"bending_truncations": (("r", "integral"),
                                      list(zip(white.grid,
                                               white.a2_truncations)))}
    return result, tables


def _stage_certify(config: RunConfig, objects: dict) -> tuple[dict, dict]:
    layer = objects["layer"]
    cert = certify(layer, quad_refine=config.quad_refine)
    objects["certificate"] = cert

    tables = {}
    if cert.decomposition is not None:
        dec = cert.decomposition
        e_star = dec.eps_star
        if not np.isfinite(e_star) or e_star == 0.0:
            grid = np.linspace(-1.0, 1.0, 21)
        else:
            grid = np.linspace(0.0, 2.0 * e_star, 21)
        tables["parabola"] = (("epsilon", "form_value"),
                              [(float(e), float(dec.value(float(e))))
                               for e in grid])
    return cert.to_dict(), tables


def _certificate_attachment(config: RunConfig, cert: Certificate) -> dict:
    return _jsonable({
        "surface": config.surface_name,
        "surface_params": {k: list(v) if isinstance(v, tuple) else v
                           for k, v in config.surface_params.items()},
        "a": config.a,
        "curvature_budget": config.curvature_budget,
        "certificate": cert.to_dict(),
    })


def _default_radial_extent(layer: LayerModel) -> float:
    prof = layer.surface.radial
    r_max = max(20.0, 40.0 * layer.a, 4.0 * layer.surface.r_core)
    if np.isfinite(prof.r_max_valid):
        r_max = min(r_max, 0.98 * prof.r_max_valid)
    return float(r_max)


def _stage_spectrum(config: RunConfig, objects: dict) -> tuple[dict, dict]:
    layer = objects["layer"]
    surface = layer.surface
    mesh_cfg = config.mesh
    seed = config.seed if config.seed is not None else 7
    levels = int(mesh_cfg.get("levels", 4))
    k = int(mesh_cfg.get("k", 4))

    if surface.radial is not None:
        # defaults sized so the shallow capped-cone state resolves with
        # extrapolation error well under its gap; cheap cases just run fast
        r_max = float(mesh_cfg.get("v_max", _default_radial_extent(layer)))
        ladder = radial_ladder(
            r_max, levels=levels,
            n_r=int(mesh_cfg.get("n_v", 128)),
            n_u=int(mesh_cfg.get("n_u", 32)),
            grade=float(mesh_cfg.get("grade", 4.0)))
    else:
        chart = surface.chart
        bc = mesh_cfg.get("bc_s", "periodic" if chart.periodic else "dirichlet")
        if bc == "dirichlet":
            lo, hi = chart.s_range
            width = min(hi - lo, 40.0 * layer.a)
            mid = 0.0 if hi > 1e8 else 0.5 * (lo + hi)
            span = mesh_cfg.get("s_span", (mid - width / 2.0,
                                           mid + width / 2.0))
        else:
            span = None
        v_max = float(mesh_cfg.get("v_max", max(6.0, 20.0 * layer.a)))
        ladder = [MeshSpec(n_s=int(mesh_cfg.get("n_s", 8)) * 2 ** j,
                           n_v=int(mesh_cfg.get("n_v", 8)) * 2 ** j,
                           n_u=int(mesh_cfg.get("n_u", 8)) * 2 ** j,
                           v_max=v_max, bc_s=bc, s_span=span,
                           v_min=mesh_cfg.get("v_min"),
                           grade=float(mesh_cfg.get("grade", 1.0)))
                  for j in range(levels)]

    scan = threshold_scan(layer, ladder, seed=seed)
    finest = spectral_report(layer, ladder[-1], k=k, seed=seed)

    result = {
        "threshold": scan["threshold"],
        "lambda1_per_mesh": scan["lambda1"],
        "extrapolated_lambda1": scan["extrapolated"],
        "observed_order": scan["observed_order"],
        "extrapolation_error": scan["extrapolation_error"],
        "below_threshold": scan["below_threshold"],
        "report": finest.to_dict(),
    }
    cert = objects.get("certificate")
    if cert is not None and cert.verdict == "certified":
        slack = max(5.0 * scan["extrapolation_error"],
                    1e-6 * layer.threshold)
        result["certificate_rayleigh"] = cert.rayleigh_quotient
        result["lambda1_le_rayleigh"] = bool(
            scan["extrapolated"] <= cert.rayleigh_quotient + slack)

    rows = []
    for j, (mesh, lam) in enumerate(zip(ladder, scan["lambda1"])):
        cells = (mesh.n_r if isinstance(mesh, RadialMeshSpec) else mesh.n_s,
                 mesh.n_u)
        rows.append((j, cells[0], cells[1], float(lam)))
    tables = {"eigenvalue_ladder": (("level", "cells_main", "cells_u",
                                     "lambda1"), rows)}
    return result, tables


_STAGE_FN = {
    "geometry": _stage_geometry,
    "asymptotics": _stage_asymptotics,
    "topology": _stage_topology,
    "certify": _stage_certify,
    "spectrum": _stage_spectrum,
}


def run(config: RunConfig) -> RunReport:
    """Execute the enabled stages in dependency order.

    A stage failure is recorded and dependents that need its objects are
    skipped with their own error entry; independent stages still run.
    """
    report = RunReport(config=config)
    objects: dict = {}
    for name in _STAGE_ORDER:
        if name not in config.stages:
            continue
        start = time.perf_counter()
        try:
            if name != "geometry" and "layer" not in objects:
                raise LayercertError("skipped: geometry stage unavailable")
            result, tables = _STAGE_FN[name](config, objects)
            report.stage_results[name] = _jsonable(result)
            report.tables.update(tables)
        except Exception as exc:
            report.stage_errors[name] = f"{type(exc).__name__}: {exc}"
        report.timings[name] = time.perf_counter() - start
    cert = objects.get("certificate")
    if cert is not None and cert.params is not None:
        report.attachments["certificate"] = _certificate_attachment(config, cert)
    return report


def _load_certificate_file(path: str):
    with open(path) as fh:
        data = json.load(fh)
    surface = make_surface(data["surface"],
                           **{k: tuple(v) if isinstance(v, list) else v
                              for k, v in data.get("surface_params", {}).items()})
    layer = LayerModel(surface, float(data["a"]),
                       float(data.get("curvature_budget", 0.9)))
    cd = data["certificate"]
    params = None
    if cd.get("params"):
        pd = dict(cd["params"])
        params = TestFunctionParams(**pd)
    dec = None
    if cd.get("decomposition"):
        dd = cd["decomposition"]
        dec = QuadraticFormDecomposition(
            q0=dd["q0"], q1=dd["q1"], q2=dd["q2"],
            m0=dd["m0"], m1=dd["m1"], m2=dd["m2"],
            err_q0=dd["err_q0"], err_q1=dd["err_q1"], err_q2=dd["err_q2"],
            err_m0=dd["err_m0"], err_m1=dd["err_m1"], err_m2=dd["err_m2"],
            threshold=cd["threshold"], pieces={})
    cert = Certificate(
        verdict=cd["verdict"], threshold=cd["threshold"],
        reason=cd.get("reason", ""), params=params, decomposition=dec,
        rayleigh_quotient=cd.get("rayleigh_quotient"),
        margin=cd.get("margin"), quad_refine=int(cd.get("quad_refine", 1)))
    return layer, cert


def _cmd_run(path: str) -> int:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read config {path}: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(text)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2

    outdir = os.environ.get("LAYERCERT_OUTDIR", config.outdir)
    report = run(config)
    paths = emit(report, outdir)

    if config.added_stages:
        print("dependency closure added stages: "
              + ", ".join(config.added_stages))
    for name in config.stages:
        if name in report.stage_results:
            print(f"{name}: ok")
        else:
            print(f"{name}: ERROR {report.stage_errors.get(name, '?')}")
    print("wrote " + ", ".join(paths))
    return 0 if report.ok else 1


def _cmd_verify(path: str) -> int:
    try:
        layer, cert = _load_certificate_file(path)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        print(f"cannot load certificate {path}: {exc}", file=sys.stderr)
        return 2
    try:
        out = verify_certificate(layer, cert)
    except LayercertError as exc:
        print(f"verification errored: {exc}", file=sys.stderr)
        return 1
    print(f"value_old = {out['value_old']:.9g}")
    print(f"value_new = {out['value_new']:.9g}")
    print(f"bound     = {out['bound']:.3g}")
    print(f"consistent = {out['consistent']}, "
          f"still_certified = {out['still_certified']}")
    return 0 if out["ok"] else 1


def _cmd_catalog_list() -> int:
    for name in sorted(CATALOG):
        print(name)
    return 0


def _cmd_catalog_describe(name: str) -> int:
    if name not in CATALOG:
        print(f"unknown surface {name!r}; have {', '.join(sorted(CATALOG))}",
              file=sys.stderr)
        return 2
    surface = CATALOG[name]()
    chart = surface.chart
    print(f"name: {name}")
    print(f"label: {surface.label}")
    print(f"parameters: {json.dumps(_jsonable(surface.params), sort_keys=True)}")
    print(f"euler_characteristic: {surface.euler_characteristic}")
    s_lo, s_hi = (float(x) for x in chart.s_range)
    v_lo, v_hi = (float(x) for x in chart.v_range)
    print(f"chart s_range: ({s_lo:g}, {s_hi:g}), periodic: {chart.periodic}")
    print(f"chart v_range: ({v_lo:g}, {v_hi:g})")
    print(f"radial structure: {surface.radial is not None}")
    print(f"r_core: {surface.r_core}")
    print(f"kappa_sup: {surface.kappa_sup}")
    if surface.notes:
        print(f"notes: {surface.notes}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="layercert",
        description="certify and cross-check bound states of quantum layers "
                    "over ruled surfaces")
    sub = parser.add_subparsers(dest="verb", required=True)
    p_run = sub.add_parser("run", help="execute a config end to end")
    p_run.add_argument("config", help="path to an INI run configuration")
    p_ver = sub.add_parser("verify",
                           help="re-check an emitted certificate file")
    p_ver.add_argument("certificate", help="path to certificate.json")
    p_cat = sub.add_parser("catalog", help="inspect the surface catalog")
    cat_sub = p_cat.add_subparsers(dest="what", required=True)
    cat_sub.add_parser("list", help="list catalog surface names")
    p_desc = cat_sub.add_parser("describe", help="describe one surface")
    p_desc.add_argument("name")

    args = parser.parse_args(argv)
    if args.verb == "run":
        return _cmd_run(args.config)
    if args.verb == "verify":
        return _cmd_verify(args.certificate)
    if args.what == "list":
        return _cmd_catalog_list()
    return _cmd_catalog_describe(args.name)


if __name__ == "__main__":
    sys.exit(main())
