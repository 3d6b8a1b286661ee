"""Planar domains, structured triangulations, and discrete measures.

Meshing is deterministic and dependency-free: rectangles get a split
structured grid, disks a concentric-ring pattern of quasi-equilateral
triangles (scaled for ellipses), polygons an ear-clip triangulation
refined down to the target edge length. Curved boundaries are handled
with straight-edged triangles whose boundary nodes are projected onto
the true boundary, so discrete area/perimeter converge at second order.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ellipe

from .errors import MeshError
from .kernel_asymptotics import GeometricData

__all__ = [
    "Disk",
    "Rectangle",
    "Ellipse",
    "Polygon",
    "Mesh",
    "generate_mesh",
    "refine",
    "mesh_volume",
    "mesh_boundary_length",
    "max_edge_length",
    "validate_mesh",
    "to_geometric_data",
]


@dataclass(frozen=True)
class Disk:
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")

    @property
    def area(self):
        return math.pi * self.radius**2

    @property
    def perimeter(self):
        return 2.0 * math.pi * self.radius

    @property
    def diameter(self):
        return 2.0 * self.radius


@dataclass(frozen=True)
class Rectangle:
    lx: float
    ly: float

    def __post_init__(self):
        if not (self.lx > 0.0 and self.ly > 0.0):
            raise ValueError("side lengths must be positive")

    @property
    def area(self):
        return self.lx * self.ly

    @property
    def perimeter(self):
        return 2.0 * (self.lx + self.ly)

    @property
    def diameter(self):
        return math.hypot(self.lx, self.ly)


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("semi-axes must be positive")

    @property
    def area(self):
        return math.pi * self.a * self.b

    @property
    def perimeter(self):
        major, minor = max(self.a, self.b), min(self.a, self.b)
        return 4.0 * major * float(ellipe(1.0 - (minor / major) ** 2))

    @property
    def diameter(self):
        return 2.0 * max(self.a, self.b)


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_properly_intersect(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


@dataclass(frozen=True)
class Polygon:
    """Simple counterclockwise polygon given by its vertex loop."""

    vertices: tuple

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] < 3 or verts.shape[1] != 2:
            raise ValueError("polygon needs at least 3 planar vertices")
        object.__setattr__(self, "vertices", tuple(map(tuple, verts)))
        if _signed_area(verts) <= 0.0:
            raise ValueError("polygon vertices must be counterclockwise")
        m = verts.shape[0]
        for i in range(m):
            for j in range(i + 1, m):
                if j == i or (j + 1) % m == i or (i + 1) % m == j:
                    continue  # edges sharing a vertex may touch there
                if _segments_properly_intersect(
                    verts[i], verts[(i + 1) % m], verts[j], verts[(j + 1) % m]
                ):
                    raise ValueError("polygon must be simple (non-self-intersecting)")

    @property
    def vertex_array(self):
        return np.asarray(self.vertices, dtype=float)

    @property
    def area(self):
        return _signed_area(self.vertex_array)

    @property
    def perimeter(self):
        v = self.vertex_array
        return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))

    @property
    def diameter(self):
        v = self.vertex_array
        diff = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((diff**2).sum(-1)).max())


Domain2D = Disk | Rectangle | Ellipse | Polygon


def to_geometric_data(domain: Domain2D) -> GeometricData:
    """Analytic volume/perimeter of a domain, used as recovery ground truth."""
    return GeometricData(dim=2, volume=domain.area, boundary_area=domain.perimeter)


@dataclass
class Mesh:
    """Conforming triangulation; immutable by convention after construction.

    Triangles are counterclockwise node-index triples; boundary edges are
    directed so the domain lies on their left (the loop runs
    counterclockwise). ``domain`` is kept so refinement can project new
    boundary nodes onto curved boundaries.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_node_flags: np.ndarray
    domain: Domain2D | None = field(default=None, compare=False)

    @property
    def node_count(self):
        return self.nodes.shape[0]

    @property
    def triangle_count(self):
        return self.triangles.shape[0]


def triangle_areas(mesh: Mesh) -> np.ndarray:
    p = mesh.nodes
    a, b, c = (p[mesh.triangles[:, i]] for i in range(3))
    return 0.5 * (
        (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
        - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1])
    )


def mesh_volume(mesh: Mesh) -> float:
    """Sum of signed triangle areas."""
    return float(np.sum(triangle_areas(mesh)))


def mesh_boundary_length(mesh: Mesh) -> float:
    """Sum of boundary edge lengths."""
    p, q = mesh.nodes[mesh.boundary_edges[:, 0]], mesh.nodes[mesh.boundary_edges[:, 1]]
    return float(np.sum(np.linalg.norm(q - p, axis=1)))


def max_edge_length(mesh: Mesh) -> float:
    edges = _all_edges(mesh.triangles)
    p, q = mesh.nodes[edges[:, 0]], mesh.nodes[edges[:, 1]]
    return float(np.linalg.norm(q - p, axis=1).max())


def _all_edges(triangles: np.ndarray) -> np.ndarray:
    e = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
    )
    return np.unique(np.sort(e, axis=1), axis=0)


def generate_mesh(domain: Domain2D, target_h: float) -> Mesh:
    """Triangulate ``domain`` with maximum edge length <= 1.5 * target_h."""
    if not target_h > 0.0:
        raise MeshError(f"target_h must be positive, got {target_h}")
    if target_h >= domain.diameter:
        raise MeshError(
            f"target_h={target_h} must be below the domain diameter "
            f"{domain.diameter:.6g}"
        )
    if isinstance(domain, Rectangle):
        mesh = _rectangle_mesh(domain, target_h)
    elif isinstance(domain, Disk):
        mesh = _disk_mesh(domain, target_h)
    elif isinstance(domain, Ellipse):
        mesh = _ellipse_mesh(domain, target_h)
    elif isinstance(domain, Polygon):
        mesh = _polygon_mesh(domain, target_h)
    else:
        raise MeshError(f"unsupported domain type {type(domain).__name__}")
    return mesh


def _finalize(nodes, triangles, boundary_edges, domain):
    nodes = np.asarray(nodes, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    boundary_edges = np.asarray(boundary_edges, dtype=np.int64)
    flags = np.zeros(nodes.shape[0], dtype=bool)
    flags[boundary_edges.ravel()] = True
    return Mesh(nodes, triangles, boundary_edges, flags, domain)


def _rectangle_mesh(domain: Rectangle, h: float) -> Mesh:
    nx = max(1, math.ceil(domain.lx / h))
    ny = max(1, math.ceil(domain.ly / h))
    xs = np.linspace(0.0, domain.lx, nx + 1)
    ys = np.linspace(0.0, domain.ly, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def idx(i, j):
        return i * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            a, b = idx(i, j), idx(i + 1, j)
            c, d = idx(i + 1, j + 1), idx(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    edges = []
    for i in range(nx):  # bottom, then top (reversed for ccw loop)
        edges.append((idx(i, 0), idx(i + 1, 0)))
    for j in range(ny):
        edges.append((idx(nx, j), idx(nx, j + 1)))
    for i in range(nx, 0, -1):
        edges.append((idx(i, ny), idx(i - 1, ny)))
    for j in range(ny, 0, -1):
        edges.append((idx(0, j), idx(0, j - 1)))
    return _finalize(nodes, tris, edges, domain)


def _ring_index(j: int, k: int) -> int:
    # center is node 0; ring j >= 1 holds 6j nodes starting at 1 + 3j(j-1)
    return 1 + 3 * j * (j - 1) + (k % (6 * j))


def _disk_mesh(domain: Disk, h: float) -> Mesh:
    R = domain.radius
    n_r = max(2, math.ceil(R / h))
    nodes = [(0.0, 0.0)]
    for j in range(1, n_r + 1):
        r = R * j / n_r
        for k in range(6 * j):
            ang = 2.0 * math.pi * k / (6 * j)
            nodes.append((r * math.cos(ang), r * math.sin(ang)))
    tris = []
    for s in range(6):  # first ring: fan around the center
        tris.append((0, _ring_index(1, s), _ring_index(1, s + 1)))
    for j in range(2, n_r + 1):
        for s in range(6):
            outer = [_ring_index(j, s * j + i) for i in range(j + 1)]
            inner = [_ring_index(j - 1, s * (j - 1) + i) for i in range(j)]
            for i in range(j):
                tris.append((inner[i], outer[i], outer[i + 1]))
                if i < j - 1:
                    tris.append((inner[i], outer[i + 1], inner[i + 1]))
    edges = [
        (_ring_index(n_r, k), _ring_index(n_r, k + 1)) for k in range(6 * n_r)
    ]
    return _finalize(nodes, tris, edges, domain)


def _ellipse_mesh(domain: Ellipse, h: float) -> Mesh:
    scale = max(domain.a, domain.b)
    unit = _disk_mesh(Disk(1.0), h / scale)
    nodes = unit.nodes * np.array([domain.a, domain.b])
    return Mesh(
        nodes,
        unit.triangles,
        unit.boundary_edges,
        unit.boundary_node_flags,
        domain,
    )


def _polygon_mesh(domain: Polygon, h: float) -> Mesh:
    verts = domain.vertex_array
    tris = _ear_clip(verts)
    edges = [(i, (i + 1) % len(verts)) for i in range(len(verts))]
    mesh = _finalize(verts, tris, edges, domain)
    while max_edge_length(mesh) > 1.5 * h:
        mesh = refine(mesh)
    return mesh


def _ear_clip(verts: np.ndarray):
    """O(n^2) ear clipping of a simple ccw polygon."""
    remaining = list(range(len(verts)))
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def point_in_tri(p, a, b, c):
        d1, d2, d3 = cross(a, b, p), cross(b, c, p), cross(c, a, p)
        return d1 >= 0 and d2 >= 0 and d3 >= 0

    guard = 0
    while len(remaining) > 3:
        guard += 1
        if guard > 4 * len(verts) ** 2:
            raise MeshError("ear clipping failed; polygon may be degenerate")
        m = len(remaining)
        for pos in range(m):
            i0, i1, i2 = (
                remaining[pos - 1],
                remaining[pos],
                remaining[(pos + 1) % m],
            )
            a, b, c = verts[i0], verts[i1], verts[i2]
            if cross(a, b, c) <= 0:
                continue  # reflex corner, not an ear
            if any(
                point_in_tri(verts[k], a, b, c)
                for k in remaining
                if k not in (i0, i1, i2)
            ):
                continue
            tris.append((i0, i1, i2))
            remaining.pop(pos)
            break
    tris.append(tuple(remaining))
    return tris


def _project_boundary(domain: Domain2D, point: np.ndarray) -> np.ndarray:
    if isinstance(domain, Disk):
        r = np.linalg.norm(point)
        return point * (domain.radius / r)
    if isinstance(domain, Ellipse):
        # radial scaling onto the ellipse; exact membership, not nearest point
        t = 1.0 / math.sqrt(
            (point[0] / domain.a) ** 2 + (point[1] / domain.b) ** 2
        )
        return point * t
    return point


def refine(mesh: Mesh) -> Mesh:
    """Split every triangle into 4 via edge midpoints.

    Midpoints of boundary edges are projected back onto curved boundaries,
    so refined disk/ellipse meshes stay inscribed with boundary nodes on
    the true boundary.
    """
    nodes = [tuple(p) for p in mesh.nodes]
    boundary_pairs = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
    midpoint_of = {}

    def midpoint(i, j):
        key = (min(i, j), max(i, j))
        if key not in midpoint_of:
            p = 0.5 * (mesh.nodes[i] + mesh.nodes[j])
            if key in boundary_pairs and mesh.domain is not None:
                p = _project_boundary(mesh.domain, p)
            midpoint_of[key] = len(nodes)
            nodes.append(tuple(p))
        return midpoint_of[key]

    tris = []
    for a, b, c in mesh.triangles.tolist():
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        tris.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
    edges = []
    for a, b in mesh.boundary_edges.tolist():
        m = midpoint(a, b)
        edges.extend([(a, m), (m, b)])
    return _finalize(nodes, tris, edges, mesh.domain)


def validate_mesh(mesh: Mesh):
    """Raise MeshError on any violated mesh invariant."""
    areas = triangle_areas(mesh)
    if not np.all(areas > 0.0):
        bad = int(np.argmin(areas))
        raise MeshError(f"triangle {bad} has non-positive area {areas[bad]:.3e}")
    if mesh.triangles.min() < 0 or mesh.triangles.max() >= mesh.node_count:
        raise MeshError("triangle indices out of range")

    counts = {}
    for tri in mesh.triangles.tolist():
        for i in range(3):
            key = tuple(sorted((tri[i], tri[(i + 1) % 3])))
            counts[key] = counts.get(key, 0) + 1
    if any(c > 2 for c in counts.values()):
        raise MeshError("an edge is shared by more than two triangles")
    rim = {e for e, c in counts.items() if c == 1}
    declared = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
    if rim != declared:
        raise MeshError(
            f"boundary edge list disagrees with single-owner edges "
            f"({len(declared)} declared vs {len(rim)} found)"
        )

    # directed boundary edges must form closed loops
    outgoing = {}
    incoming = {}
    for a, b in mesh.boundary_edges.tolist():
        if a in outgoing or b in incoming:
            raise MeshError("boundary edges do not form simple loops")
        outgoing[a] = b
        incoming[b] = a
    if set(outgoing) != set(incoming):
        raise MeshError("boundary loops are not closed")

    flags = np.zeros(mesh.node_count, dtype=bool)
    flags[mesh.boundary_edges.ravel()] = True
    if not np.array_equal(flags, mesh.boundary_node_flags):
        raise MeshError("boundary_node_flags inconsistent with boundary edges")
