import math

import numpy as np
import pytest

from elastospec import serialize
from elastospec.errors import SchemaError
from elastospec.kernel_asymptotics import BoundaryCondition
from elastospec.materials import LameParameters
from elastospec.mesh_geometry import (
    Disk,
    Ellipse,
    Polygon,
    Rectangle,
    generate_mesh,
    refine,
)
from elastospec.spectra import Spectrum
from elastospec.trace_fitter import end_to_end_recover

DIR = BoundaryCondition.DIRICHLET


def make_spectrum():
    return Spectrum(
        bc=DIR,
        params=LameParameters(1.0, 0.25),
        dim=2,
        eigenvalues=np.array([1.0, 1.0, 2.5, math.pi**2, 17.25 + 1e-13]),
        provenance={"type": "external", "source": "unit-test"},
        domain_meta=Disk(1.0),
    )


class TestSpectrumJson:
    def test_round_trip_bitwise(self):
        spec = make_spectrum()
        text = serialize.dumps(serialize.spectrum_to_dict(spec))
        loaded = serialize.spectrum_from_dict(serialize.loads(text, "spectrum"))
        text2 = serialize.dumps(serialize.spectrum_to_dict(loaded))
        assert text == text2
        assert np.array_equal(loaded.eigenvalues, spec.eigenvalues)
        assert loaded.params == spec.params
        assert loaded.bc is spec.bc
        assert loaded.domain_meta == spec.domain_meta

    def test_missing_schema_version(self):
        with pytest.raises(SchemaError):
            serialize.loads('{"kind":"spectrum"}', "spectrum")

    def test_wrong_kind(self):
        with pytest.raises(SchemaError):
            serialize.loads('{"schema_version":1,"kind":"mesh"}', "spectrum")

    def test_malformed_json(self):
        with pytest.raises(SchemaError):
            serialize.loads("{not json", "spectrum")

    def test_missing_field(self):
        with pytest.raises(SchemaError):
            serialize.spectrum_from_dict({"schema_version": 1, "kind": "spectrum"})

    def test_invalid_eigenvalues_rejected(self):
        data = serialize.spectrum_to_dict(make_spectrum())
        data["eigenvalues"] = [3.0, 1.0]
        with pytest.raises(SchemaError):
            serialize.spectrum_from_dict(data)

    def test_external_spectrum_is_fittable(self, interval_params):
        # hand-written artifact with external provenance runs the pipeline
        k = np.arange(1, 501, dtype=float)
        data = {
            "schema_version": 1,
            "kind": "spectrum",
            "bc": "dirichlet",
            "tau": 1.0,
            "mu": -0.5,
            "dim": 1,
            "provenance": {"type": "external", "length": math.pi},
            "domain": None,
            "eigenvalues": (1.5 * k**2).tolist(),
        }
        spec = serialize.spectrum_from_dict(data)
        rec = end_to_end_recover(spec, interval_params, 1, DIR)
        assert rec.fit.a1_hat == pytest.approx(-0.5, abs=2e-3)


class TestDomainJson:
    @pytest.mark.parametrize(
        "domain",
        [
            Disk(1.5),
            Rectangle(2.0, 0.5),
            Ellipse(2.0, 1.0),
            Polygon(((0, 0), (1, 0), (1, 1), (0, 1))),
        ],
    )
    def test_round_trip(self, domain):
        data = serialize.domain_to_dict(domain)
        assert serialize.domain_from_dict(data) == domain

    def test_unknown_shape(self):
        with pytest.raises(SchemaError):
            serialize.domain_from_dict({"shape": "torus"})


class TestMeshText:
    def test_round_trip(self):
        mesh = refine(generate_mesh(Disk(1.0), 0.4))
        text = serialize.write_mesh_text(mesh)
        loaded = serialize.read_mesh_text(text)
        assert np.array_equal(loaded.nodes, mesh.nodes)
        assert np.array_equal(loaded.triangles, mesh.triangles)
        assert np.array_equal(loaded.boundary_edges, mesh.boundary_edges)
        assert serialize.write_mesh_text(loaded) == text

    def test_sections_present(self):
        mesh = generate_mesh(Rectangle(1.0, 1.0), 0.5)
        text = serialize.write_mesh_text(mesh)
        assert text.startswith("NODES 9")
        assert "TRIANGLES 8" in text
        assert "BOUNDARY_EDGES 8" in text

    def test_corrupt_rejected(self):
        mesh = generate_mesh(Rectangle(1.0, 1.0), 0.5)
        text = serialize.write_mesh_text(mesh)
        with pytest.raises(SchemaError):
            serialize.read_mesh_text(text.replace("TRIANGLES", "TRIANGLE"))
        with pytest.raises(SchemaError):
            serialize.read_mesh_text(text + "7 7")


class TestRecoveredJson:
    def test_serializes_pipeline_output(self, disk_oracle_spectrum, flagship_params):
        rec = end_to_end_recover(disk_oracle_spectrum, flagship_params, 2, DIR)
        data = serialize.recovered_to_dict(rec)
        text = serialize.dumps(data)
        back = serialize.loads(text, "recovered_geometry")
        assert back["volume"] == rec.geometry.volume
        assert back["fit"]["a1_hat"] == rec.fit.a1_hat
        assert back["audit"]["is_ball_within_tol"] == rec.audit.is_ball_within_tol


def test_seventeen_digit_floats():
    # 17 significant digits round-trip float64 exactly
    values = [math.pi, 1.0 / 3.0, 2.0**-52, 6.626e-34, 1.7976931348623157e308]
    for v in values:
        assert float(serialize.dumps({"schema_version": 1, "x": v}).split(":")[-1].rstrip("}\n")) == v
