"""Declarative run configuration: INI sections with typed keys.

parse_config validates the whole file before raising, so a broken config
reports every violation in one pass, each with a stable error code and a
section.key location (plus the line number when it can be found in the
source text).
"""

from __future__ import annotations

import configparser
import inspect
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .surfaces import CATALOG

STAGES = ("geometry", "asymptotics", "topology", "certify", "spectrum")
STAGE_NEEDS = {"certify": ("geometry",), "spectrum": ("geometry",)}

# one stable code per config invariant
E_SYNTAX = "syntax"
E_SURFACE_MISSING = "surface-missing"
E_SURFACE_UNKNOWN = "surface-unknown"
E_SURFACE_PARAM = "surface-param"
E_LAYER_A = "layer-a-positive"
E_BUDGET_RANGE = "budget-range"
E_STAGE_UNKNOWN = "stage-unknown"
E_SEED_REQUIRED = "seed-required"
E_BAD_VALUE = "bad-value"

_MESH_INT_KEYS = ("n_s", "n_v", "n_u", "levels", "k")
_MESH_FLOAT_KEYS = ("v_max", "v_min", "grade")
_MESH_PAIR_KEYS = ("s_span",)


@dataclass(frozen=True)
class RunConfig:
    """Validated pipeline configuration.

    stages is the dependency-closed tuple in run order; requested_stages is
    what the file asked for and added_stages the closure expansion, recorded
    so reports can show why a stage ran unrequested.
    """

    surface_name: str
    surface_params: dict = field(default_factory=dict)
    a: float = 0.5
    curvature_budget: float = 0.9
    stages: tuple = ("geometry",)
    requested_stages: tuple = ("geometry",)
    added_stages: tuple = ()
    seed: int | None = None
    quad_refine: int = 1
    mesh: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    outdir: str = "layercert_out"


class _Diagnostics:
    """Collects (code, location, message) triples with line lookup."""

    def __init__(self, text: str):
        self.items = []
        self._lines = text.splitlines()

    def _line_of(self, section: str, key: str | None) -> int | None:
        want_header = f"[{section}]"
        in_section = False
        for i, raw in enumerate(self._lines, start=1):
            line = raw.strip()
            if line.startswith("["):
                if in_section and key is not None:
                    return None  # left the section without meeting the key
                in_section = line.split("#")[0].split(";")[0].strip() == want_header
                if in_section and key is None:
                    return i
                continue
            if in_section and key is not None:
                name = line.split("=")[0].split(":")[0].strip()
                if name == key:
                    return i
        return None

    def add(self, code: str, section: str, key: str | None, message: str):
        where = section if key is None else f"{section}.{key}"
        line = self._line_of(section, key)
        if line is not None:
            where = f"{where} (line {line})"
        self.items.append((code, where, message))


def _parse_scalar(raw: str):
    """Typed value from an INI string: float, or tuple of floats on commas."""
    raw = raw.strip()
    if "," in raw:
        return tuple(float(p) for p in raw.split(","))
    return float(raw)


def parse_config(text: str) -> RunConfig:
    """Parse and validate an INI config; raise ConfigError with every violation."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([(E_SYNTAX, f"line {getattr(exc, 'lineno', '?')}",
                            str(exc).replace("\n", " "))]) from exc

    diag = _Diagnostics(text)

    # [surface]
    surface_name = ""
    surface_params: dict = {}
    if not cp.has_option("surface", "name"):
        diag.add(E_SURFACE_MISSING, "surface", "name",
                 "config must name a catalog surface")
    else:
        surface_name = cp.get("surface", "name").strip()
        if surface_name not in CATALOG:
            diag.add(E_SURFACE_UNKNOWN, "surface", "name",
                     f"unknown surface {surface_name!r}; "
                     f"catalog has {', '.join(sorted(CATALOG))}")
        else:
            allowed = set(inspect.signature(CATALOG[surface_name]).parameters)
            for key in cp.options("surface"):
                if key == "name":
                    continue
                if key not in allowed:
                    diag.add(E_SURFACE_PARAM, "surface", key,
                             f"surface {surface_name!r} takes no parameter "
                             f"{key!r} (accepts: {', '.join(sorted(allowed)) or 'none'})")
                    continue
                try:
                    surface_params[key] = _parse_scalar(cp.get("surface", key))
                except ValueError:
                    diag.add(E_BAD_VALUE, "surface", key,
                             f"cannot parse {cp.get('surface', key)!r} as a number")

    # [layer]
    a = 0.5
    budget = 0.9
    if cp.has_option("layer", "a"):
        try:
            a = float(cp.get("layer", "a"))
        except ValueError:
            diag.add(E_BAD_VALUE, "layer", "a", "half-width must be a number")
    if not a > 0:
        diag.add(E_LAYER_A, "layer", "a",
                 f"layer half-width must be positive, got {a:g}")
    if cp.has_option("layer", "curvature_budget"):
        try:
            budget = float(cp.get("layer", "curvature_budget"))
        except ValueError:
            diag.add(E_BAD_VALUE, "layer", "curvature_budget",
                     "curvature budget must be a number")
    if not 0.0 < budget < 1.0:
        diag.add(E_BUDGET_RANGE, "layer", "curvature_budget",
                 f"curvature budget must lie strictly between 0 and 1, "
                 f"got {budget:g}")

    # [stages]
    requested = ("geometry",)
    if cp.has_option("stages", "enabled"):
        raw = [p.strip() for p in cp.get("stages", "enabled").split(",")]
        requested = tuple(p for p in raw if p)
        for name in requested:
            if name not in STAGES:
                diag.add(E_STAGE_UNKNOWN, "stages", "enabled",
                         f"unknown stage {name!r}; stages are "
                         f"{', '.join(STAGES)}")
    enabled = {s for s in requested if s in STAGES}
    added = []
    for name in sorted(enabled):
        for need in STAGE_NEEDS.get(name, ()):
            if need not in enabled:
                enabled.add(need)
                added.append(need)
    stages = tuple(s for s in STAGES if s in enabled)

    # [certify]
    quad_refine = 1
    if cp.has_option("certify", "quad_refine"):
        try:
            quad_refine = int(cp.get("certify", "quad_refine"))
        except ValueError:
            diag.add(E_BAD_VALUE, "certify", "quad_refine",
                     "quadrature refinement must be an integer")

    # [spectrum]
    seed = None
    mesh: dict = {}
    if cp.has_section("spectrum"):
        for key in cp.options("spectrum"):
            raw = cp.get("spectrum", key)
            try:
                if key == "seed":
                    seed = int(raw)
                elif key in _MESH_INT_KEYS:
                    mesh[key] = int(raw)
                elif key in _MESH_FLOAT_KEYS:
                    mesh[key] = float(raw)
                elif key in _MESH_PAIR_KEYS:
                    pair = _parse_scalar(raw)
                    if not (isinstance(pair, tuple) and len(pair) == 2):
                        raise ValueError(raw)
                    mesh[key] = pair
                elif key == "bc_s":
                    mesh[key] = raw.strip()
                else:
                    diag.add(E_BAD_VALUE, "spectrum", key,
                             f"unknown spectrum key {key!r}")
            except ValueError:
                diag.add(E_BAD_VALUE, "spectrum", key,
                         f"cannot parse {raw!r} for {key!r}")
    if "spectrum" in enabled and seed is None:
        diag.add(E_SEED_REQUIRED, "spectrum", "seed",
                 "the spectrum stage needs an explicit seed for "
                 "deterministic eigensolver starts")

    # [tolerances]
    tolerances: dict = {}
    if cp.has_section("tolerances"):
        for key in cp.options("tolerances"):
            try:
                tolerances[key] = float(cp.get("tolerances", key))
            except ValueError:
                diag.add(E_BAD_VALUE, "tolerances", key,
                         f"tolerance {key!r} must be a number")

    outdir = "layercert_out"
    if cp.has_option("output", "directory"):
        outdir = cp.get("output", "directory").strip()

    if diag.items:
        raise ConfigError(diag.items)
    return RunConfig(
        surface_name=surface_name, surface_params=surface_params,
        a=a, curvature_budget=budget,
        stages=stages, requested_stages=requested, added_stages=tuple(added),
        seed=seed, quad_refine=quad_refine, mesh=mesh,
        tolerances=tolerances, outdir=outdir)


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) for x in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_to_ini(config: RunConfig) -> str:
    """Canonical INI text for a config; parse_config inverts it exactly."""
    out = ["[surface]", f"name = {config.surface_name}"]
    for key in sorted(config.surface_params):
        out.append(f"{key} = {_fmt(config.surface_params[key])}")
    out += ["", "[layer]", f"a = {_fmt(config.a)}",
            f"curvature_budget = {_fmt(config.curvature_budget)}"]
    out += ["", "[stages]",
            "enabled = " + ", ".join(config.requested_stages)]
    out += ["", "[certify]", f"quad_refine = {config.quad_refine}"]
    spectrum_lines = []
    if config.seed is not None:
        spectrum_lines.append(f"seed = {config.seed}")
    for key in sorted(config.mesh):
        spectrum_lines.append(f"{key} = {_fmt(config.mesh[key])}")
    if spectrum_lines:
        out += ["", "[spectrum]"] + spectrum_lines
    if config.tolerances:
        out += ["", "[tolerances]"]
        out += [f"{key} = {_fmt(config.tolerances[key])}"
                for key in sorted(config.tolerances)]
    out += ["", "[output]", f"directory = {config.outdir}", ""]
    return "\n".join(out)


def with_outdir(config: RunConfig, outdir: str) -> RunConfig:
    return replace(config, outdir=outdir)
