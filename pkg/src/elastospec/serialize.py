"""Deterministic on-disk formats: spectrum/geometry JSON and mesh text.

Floats are written with 17 significant digits (lossless for float64),
keys in fixed order, so re-serializing a loaded artifact reproduces it
byte for byte. Every JSON artifact carries a mandatory schema_version.
"""

import json

import numpy as np

from .errors import SchemaError
from .kernel_asymptotics import BoundaryCondition
from .materials import LameParameters
from .mesh_geometry import Disk, Ellipse, Mesh, Polygon, Rectangle, validate_mesh
from .spectra import Spectrum
from .trace_fitter import FitResult, RecoveredGeometry

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "dumps",
    "loads",
    "spectrum_to_dict",
    "spectrum_from_dict",
    "domain_to_dict",
    "domain_from_dict",
    "recovered_to_dict",
    "fit_to_dict",
    "write_mesh_text",
    "read_mesh_text",
]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _render(obj) -> str:
    # json.dumps does not allow custom float formatting; the structures
    # here are plain dict/list/scalar trees, so render directly
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(k)}:{_render(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: dict) -> str:
    return _render(obj) + "\n"


def loads(text: str, expected_kind: str | None = None) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}")
    if not isinstance(data, dict):
        raise SchemaError("top-level JSON artifact must be an object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"schema_version {data.get('schema_version')!r} not supported "
            f"(expected {SCHEMA_VERSION})"
        )
    if expected_kind is not None and data.get("kind") != expected_kind:
        raise SchemaError(
            f"expected kind={expected_kind!r}, got {data.get('kind')!r}"
        )
    return data


def domain_to_dict(domain) -> dict:
    if isinstance(domain, Disk):
        return {"shape": "disk", "radius": domain.radius}
    if isinstance(domain, Rectangle):
        return {"shape": "rectangle", "lx": domain.lx, "ly": domain.ly}
    if isinstance(domain, Ellipse):
        return {"shape": "ellipse", "a": domain.a, "b": domain.b}
    if isinstance(domain, Polygon):
        return {"shape": "polygon", "vertices": [list(v) for v in domain.vertices]}
    raise SchemaError(f"unknown domain type {type(domain).__name__}")


def domain_from_dict(data: dict):
    shape = data.get("shape")
    if shape == "disk":
        return Disk(float(data["radius"]))
    if shape == "rectangle":
        return Rectangle(float(data["lx"]), float(data["ly"]))
    if shape == "ellipse":
        return Ellipse(float(data["a"]), float(data["b"]))
    if shape == "polygon":
        return Polygon(tuple(tuple(map(float, v)) for v in data["vertices"]))
    raise SchemaError(f"unknown domain shape {shape!r}")


def spectrum_to_dict(spectrum: Spectrum) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "spectrum",
        "bc": spectrum.bc.value,
        "tau": spectrum.params.tau,
        "mu": spectrum.params.mu,
        "dim": spectrum.dim,
        "count": spectrum.count,
        "provenance": spectrum.provenance,
        "domain": None
        if spectrum.domain_meta is None
        else domain_to_dict(spectrum.domain_meta),
        "eigenvalues": [float(v) for v in spectrum.eigenvalues],
    }


def spectrum_from_dict(data: dict) -> Spectrum:
    for key in ("bc", "tau", "mu", "dim", "eigenvalues", "provenance"):
        if key not in data:
            raise SchemaError(f"spectrum artifact missing {key!r}")
    try:
        return Spectrum(
            bc=BoundaryCondition.parse(data["bc"]),
            params=LameParameters(float(data["tau"]), float(data["mu"])),
            dim=int(data["dim"]),
            eigenvalues=np.asarray(data["eigenvalues"], dtype=float),
            provenance=dict(data["provenance"]),
            domain_meta=None
            if data.get("domain") is None
            else domain_from_dict(data["domain"]),
        )
    except ValueError as exc:
        raise SchemaError(f"invalid spectrum artifact: {exc}")


def fit_to_dict(fit: FitResult) -> dict:
    return {
        "a0_hat": fit.a0_hat,
        "a1_hat": fit.a1_hat,
        "window": list(fit.window),
        "residual_rms": fit.residual_rms,
        "condition": fit.condition,
        "n_samples": fit.n_samples,
        "guard_c": fit.guard_c,
        "a0_se": fit.a0_se,
        "a1_se": fit.a1_se,
    }


def recovered_to_dict(rec: RecoveredGeometry) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "recovered_geometry",
        "dim": rec.geometry.dim,
        "volume": rec.geometry.volume,
        "boundary_area": rec.geometry.boundary_area,
        "volume_rel_err": rec.volume_rel_err,
        "boundary_rel_err": rec.boundary_rel_err,
        "fit": fit_to_dict(rec.fit),
        "audit": {
            "ratio": rec.audit.ratio,
            "ball_ratio": rec.audit.ball_ratio,
            "is_ball_within_tol": rec.audit.is_ball_within_tol,
            "excess": rec.audit.excess,
            "tol": rec.audit.tol,
            "ratio_sigma": rec.audit.ratio_sigma,
            "excess_over_sigma": rec.audit.excess_over_sigma,
        },
    }


def write_mesh_text(mesh: Mesh) -> str:
    """Plain-text mesh: NODES / TRIANGLES / BOUNDARY_EDGES sections."""
    lines = [f"NODES {mesh.node_count}"]
    for x, y in mesh.nodes:
        lines.append(f"{_fmt(x)} {_fmt(y)}")
    lines.append(f"TRIANGLES {mesh.triangle_count}")
    for a, b, c in mesh.triangles:
        lines.append(f"{a} {b} {c}")
    lines.append(f"BOUNDARY_EDGES {mesh.boundary_edges.shape[0]}")
    for a, b in mesh.boundary_edges:
        lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"


def read_mesh_text(text: str) -> Mesh:
    tokens = text.split()
    pos = 0

    def expect(word):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != word:
            raise SchemaError(f"mesh text: expected {word!r} at token {pos}")
        pos += 1
        try:
            count = int(tokens[pos])
        except (IndexError, ValueError):
            raise SchemaError(f"mesh text: bad count after {word}")
        pos += 1
        return count

    n = expect("NODES")
    nodes = np.empty((n, 2))
    for i in range(n):
        nodes[i] = (float(tokens[pos]), float(tokens[pos + 1]))
        pos += 2
    t = expect("TRIANGLES")
    triangles = np.empty((t, 3), dtype=np.int64)
    for i in range(t):
        triangles[i] = (int(tokens[pos]), int(tokens[pos + 1]), int(tokens[pos + 2]))
        pos += 3
    e = expect("BOUNDARY_EDGES")
    edges = np.empty((e, 2), dtype=np.int64)
    for i in range(e):
        edges[i] = (int(tokens[pos]), int(tokens[pos + 1]))
        pos += 2
    if pos != len(tokens):
        raise SchemaError("mesh text: trailing tokens")
    flags = np.zeros(n, dtype=bool)
    flags[edges.ravel()] = True
    mesh = Mesh(nodes, triangles, edges, flags, None)
    validate_mesh(mesh)
    return mesh
