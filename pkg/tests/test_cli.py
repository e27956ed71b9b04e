"""Command line driver: exit codes, report files, and partial failures."""

import json
import os

import pytest

from layercert.cli import main

PLANE_GEOM = """\
[surface]
name = plane

[layer]
a = 0.5

[stages]
enabled = geometry
"""

HELICOID_CERTIFY = """\
[surface]
name = helicoid

[layer]
a = 0.2

[stages]
enabled = geometry, certify
"""

DEVELOPABLE_CERTIFY = """\
[surface]
name = tangent_developable

[layer]
a = 0.05

[stages]
enabled = geometry, certify
"""


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    out = tmp_path / "out"
    monkeypatch.setenv("LAYERCERT_OUTDIR", str(out))
    return out


def _write_config(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return str(path)


def test_catalog_list(capsys):
    assert main(["catalog", "list"]) == 0
    out = capsys.readouterr().out.split()
    assert out == sorted(out)
    assert set(out) == {"plane", "cylinder", "helicoid", "capped_cone",
                        "hyperboloid", "tangent_developable"}


def test_catalog_describe(capsys):
    assert main(["catalog", "describe", "capped_cone"]) == 0
    out = capsys.readouterr().out
    assert "half_angle" in out
    assert "euler_characteristic: 1" in out


def test_catalog_describe_unknown(capsys):
    assert main(["catalog", "describe", "torus"]) == 2
    assert "unknown surface" in capsys.readouterr().err


def test_run_missing_config(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.ini")]) == 2
    assert "nope.ini" in capsys.readouterr().err


def test_run_invalid_config(tmp_path, capsys):
    path = _write_config(tmp_path, "[surface]\nname = torus\n")
    assert main(["run", path]) == 2
    assert "surface-unknown" in capsys.readouterr().err


def test_run_geometry_only(tmp_path, outdir, capsys):
    path = _write_config(tmp_path, PLANE_GEOM)
    assert main(["run", path]) == 0
    report = json.loads((outdir / "report.json").read_text())
    assert set(report["stages"]) == {"geometry"}
    assert report["errors"] == {}
    geo = report["stages"]["geometry"]
    assert geo["surface"] == "plane"
    assert geo["threshold"] == pytest.approx((3.141592653589793) ** 2)
    assert (outdir / "timings.csv").exists()
    assert (outdir / "curvature_profile.csv").exists()
    assert "geometry: ok" in capsys.readouterr().out


def test_run_flat_tail_not_found(tmp_path, outdir, capsys):
    # the helicoid is minimal: certify short-circuits to a clean not_found
    path = _write_config(tmp_path, HELICOID_CERTIFY)
    assert main(["run", path]) == 0
    report = json.loads((outdir / "report.json").read_text())
    assert report["stages"]["certify"]["verdict"] == "not_found"
    assert report["errors"] == {}


def test_run_partial_failure(tmp_path, outdir, capsys):
    # curved tail but no radial structure: certify must fail while
    # geometry still lands in the report: exit 1, both halves recorded
    path = _write_config(tmp_path, DEVELOPABLE_CERTIFY)
    assert main(["run", path]) == 1
    report = json.loads((outdir / "report.json").read_text())
    assert "geometry" in report["stages"]
    assert "certify" in report["errors"]
    out = capsys.readouterr().out
    assert "geometry: ok" in out
    assert "certify: ERROR" in out


def test_run_geometry_byte_stable(tmp_path, monkeypatch):
    path = _write_config(tmp_path, PLANE_GEOM)
    blobs = []
    for tag in ("one", "two"):
        out = tmp_path / tag
        monkeypatch.setenv("LAYERCERT_OUTDIR", str(out))
        assert main(["run", path]) == 0
        blobs.append((out / "report.json").read_bytes())
    assert blobs[0] == blobs[1]


def _certified_run(tmp_path, monkeypatch):
    config = """\
[surface]
name = cylinder
radius = 1.0

[layer]
a = 0.2

[stages]
enabled = geometry, certify
"""
    out = tmp_path / "cert_run"
    monkeypatch.setenv("LAYERCERT_OUTDIR", str(out))
    path = _write_config(tmp_path, config)
    assert main(["run", path]) == 0
    return out / "certificate.json"


def test_verify_roundtrip(tmp_path, monkeypatch, capsys):
    cert_path = _certified_run(tmp_path, monkeypatch)
    assert cert_path.exists()
    assert main(["verify", str(cert_path)]) == 0
    out = capsys.readouterr().out
    assert "consistent = True" in out
    assert "still_certified = True" in out


def test_verify_flags_tampering(tmp_path, monkeypatch, capsys):
    cert_path = _certified_run(tmp_path, monkeypatch)
    blob = json.loads(cert_path.read_text())
    blob["certificate"]["decomposition"]["q0"] += 1e-3
    cert_path.write_text(json.dumps(blob))
    assert main(["verify", str(cert_path)]) == 1
    assert "consistent = False" in capsys.readouterr().out


def test_verify_corrupt_file(tmp_path, capsys):
    path = tmp_path / "cert.json"
    path.write_text("{not json")
    assert main(["verify", str(path)]) == 2
    assert capsys.readouterr().err


def test_verify_missing_fields(tmp_path, capsys):
    path = tmp_path / "cert.json"
    path.write_text(json.dumps({"surface": "cylinder"}))
    assert main(["verify", str(path)]) == 2
