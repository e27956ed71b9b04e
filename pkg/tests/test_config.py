"""INI config parsing: every error code, the closure, and the round trip."""

import pytest

from layercert.config import (
    E_BAD_VALUE,
    E_BUDGET_RANGE,
    E_LAYER_A,
    E_SEED_REQUIRED,
    E_STAGE_UNKNOWN,
    E_SURFACE_MISSING,
    E_SURFACE_PARAM,
    E_SURFACE_UNKNOWN,
    E_SYNTAX,
    RunConfig,
    config_to_ini,
    parse_config,
    with_outdir,
)
from layercert.errors import ConfigError

GOOD = """\
[surface]
name = capped_cone
half_angle = 0.7853981633974483
cap_radius = 0.4

[layer]
a = 0.2
curvature_budget = 0.9

[stages]
enabled = geometry, certify, spectrum

[spectrum]
seed = 7
n_v = 64

[output]
directory = out_test
"""


def _codes(exc: ConfigError):
    return [code for code, _, _ in exc.diagnostics]


def _expect(text, *codes):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    got = _codes(err.value)
    for code in codes:
        assert code in got, (code, got)
    return err.value


def test_good_config_parses():
    cfg = parse_config(GOOD)
    assert cfg.surface_name == "capped_cone"
    assert cfg.surface_params == {"half_angle": 0.7853981633974483,
                                  "cap_radius": 0.4}
    assert cfg.a == 0.2
    assert cfg.stages == ("geometry", "certify", "spectrum")
    assert cfg.requested_stages == ("geometry", "certify", "spectrum")
    assert cfg.added_stages == ()
    assert cfg.seed == 7
    assert cfg.mesh == {"n_v": 64}
    assert cfg.outdir == "out_test"


def test_syntax_error():
    _expect("surface]\nname = plane\n", E_SYNTAX)


def test_surface_missing():
    _expect("[layer]\na = 0.2\n", E_SURFACE_MISSING)


def test_surface_unknown():
    _expect("[surface]\nname = torus\n", E_SURFACE_UNKNOWN)


def test_surface_bad_param():
    err = _expect("[surface]\nname = cylinder\npitch = 3\n", E_SURFACE_PARAM)
    # location carries section.key and the line number
    assert any("surface.pitch" in where for _, where, _ in err.diagnostics)
    assert any("line 3" in where for _, where, _ in err.diagnostics)


def test_layer_a_positive():
    _expect("[surface]\nname = plane\n\n[layer]\na = -0.5\n", E_LAYER_A)


def test_budget_range():
    _expect("[surface]\nname = plane\n\n[layer]\ncurvature_budget = 1.5\n",
            E_BUDGET_RANGE)


def test_stage_unknown():
    _expect("[surface]\nname = plane\n\n[stages]\nenabled = geometry, polish\n",
            E_STAGE_UNKNOWN)


def test_seed_required_for_spectrum():
    _expect("[surface]\nname = plane\n\n[stages]\nenabled = spectrum\n",
            E_SEED_REQUIRED)


def test_bad_value():
    _expect("[surface]\nname = plane\n\n[layer]\na = wide\n", E_BAD_VALUE)


def test_multiple_violations_reported_together():
    text = ("[surface]\nname = torus\n\n[layer]\na = -1\n"
            "curvature_budget = 2\n\n[stages]\nenabled = polish\n")
    err = _expect(text, E_SURFACE_UNKNOWN, E_LAYER_A, E_BUDGET_RANGE,
                  E_STAGE_UNKNOWN)
    assert len(err.diagnostics) >= 4


def test_dependency_closure_adds_geometry():
    cfg = parse_config("[surface]\nname = cylinder\n\n[stages]\n"
                       "enabled = certify\n")
    assert cfg.stages == ("geometry", "certify")
    assert cfg.requested_stages == ("certify",)
    assert cfg.added_stages == ("geometry",)


def test_stage_order_is_canonical():
    cfg = parse_config("[surface]\nname = cylinder\n\n[stages]\n"
                       "enabled = topology, geometry, asymptotics\n")
    assert cfg.stages == ("geometry", "asymptotics", "topology")


def test_round_trip():
    cfg = parse_config(GOOD)
    assert parse_config(config_to_ini(cfg)) == cfg


def test_round_trip_with_tuple_param():
    cfg = RunConfig(surface_name="plane", surface_params={},
                    a=0.25, curvature_budget=0.8,
                    stages=("geometry",), requested_stages=("geometry",),
                    seed=3, mesh={"s_span": (-2.0, 2.0), "n_s": 8},
                    tolerances={"hartman": 0.02}, outdir="elsewhere")
    back = parse_config(config_to_ini(cfg))
    assert back == cfg


def test_with_outdir():
    cfg = parse_config(GOOD)
    moved = with_outdir(cfg, "/tmp/elsewhere")
    assert moved.outdir == "/tmp/elsewhere"
    assert moved.surface_name == cfg.surface_name
