"""Meshes in the Beltrami-Cayley-Klein ball and interchange-format export.

Geodesic planes are Euclidean-flat in this model, so cell faces triangulate
exactly from their corner polygons.  Horoballs are ellipsoids tangent to the
unit sphere, meshed by the polar parametrization in the canonical frame and
rotated back.  Metric balls are meshed on the hyperboloid (cosh r * center +
sinh r * direction) and mapped down, giving ellipsoids in the model.

Exports: OBJ (ASCII, one object per mesh part), PLY (binary little-endian,
parts concatenated), and a versioned JSON scene that round-trips exactly.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from . import lorentz
from .coxeter import CoxeterCell
from .errors import GeometryError
from .horoball import Horoball, canonical_transform, horosphere_points
from .inball import InscribedBall

SCENE_SCHEMA_VERSION = 1

# face index -> corner cycle over [a0, a1, a2, T0, T1]
FACE_POLYGONS = {
    0: (1, 2, 4),
    1: (0, 2, 3),
    2: (0, 1, 4, 3),
    3: (0, 1, 2),
    4: (2, 3, 4),
}


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray  # (n, 3) Klein coordinates
    triangles: np.ndarray  # (m, 3) indices
    part_label: str

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        t = np.asarray(self.triangles)
        if len(t) and (t.min() < 0 or t.max() >= len(v)):
            raise GeometryError("triangle indices out of range")
        if len(v) and np.max(np.linalg.norm(v, axis=1)) > 1.0 + 1e-9:
            raise GeometryError("mesh leaves the model ball")


@dataclass(frozen=True)
class Scene:
    meshes: tuple
    metadata: dict = field(default_factory=dict)


def cell_face_polygons(cell: CoxeterCell):
    """(face index, corner cycle in Klein coordinates) for the five faces."""
    corners = [lorentz.klein_coords(v) for v in cell.polytope_vertices()]
    return [(i, [corners[j] for j in cycle]) for i, cycle in FACE_POLYGONS.items()]


def mesh_cell(cell: CoxeterCell, label: str = "cell") -> Mesh:
    """Triangulated boundary of the truncated orthoscheme."""
    corners = np.array([lorentz.klein_coords(v) for v in cell.polytope_vertices()])
    tris = []
    for cycle in FACE_POLYGONS.values():
        for k in range(1, len(cycle) - 1):
            tris.append((cycle[0], cycle[k], cycle[k + 1]))
    return Mesh(vertices=corners, triangles=np.array(tris), part_label=label)


def _grid_triangles(n_phi: int, n_theta: int):
    tris = []
    for i in range(n_phi - 1):
        for j in range(n_theta):
            a = i * n_theta + j
            b = i * n_theta + (j + 1) % n_theta
            c = (i + 1) * n_theta + j
            d = (i + 1) * n_theta + (j + 1) % n_theta
            tris.append((a, b, c))
            tris.append((b, d, c))
    return np.array(tris)


def mesh_horoball(ball: Horoball, resolution: int = 64, label: str = "horoball") -> Mesh:
    """Horosphere mesh over a (resolution+1) x resolution polar grid."""
    if resolution < 8:
        raise GeometryError("horoball mesh resolution must be at least 8")
    rot = canonical_transform(ball.center)
    phis = np.linspace(0.0, math.pi, resolution + 1)
    thetas = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis)
    pts = horosphere_points(ball, tt.ravel(), pp.ravel(), transform=rot)
    return Mesh(vertices=pts.T, triangles=_grid_triangles(resolution + 1, resolution), part_label=label)


def mesh_ball(ball: InscribedBall, resolution: int = 64, label: str = "inball") -> Mesh:
    """Metric sphere around a proper center, meshed on the hyperboloid."""
    c = lorentz.normalize_proper(ball.center)
    basis = _spacelike_basis(c)
    phis = np.linspace(0.0, math.pi, resolution + 1)
    thetas = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis)
    direction = (
        np.outer(np.cos(tt.ravel()) * np.sin(pp.ravel()), basis[0])
        + np.outer(np.sin(tt.ravel()) * np.sin(pp.ravel()), basis[1])
        + np.outer(np.cos(pp.ravel()), basis[2])
    )
    pts4 = math.cosh(ball.radius) * c + math.sinh(ball.radius) * direction
    verts = pts4[:, 1:] / pts4[:, :1]
    return Mesh(vertices=verts, triangles=_grid_triangles(resolution + 1, resolution), part_label=label)


def _spacelike_basis(c):
    """Orthonormal (for the Minkowski form) basis of the tangent space at c."""
    basis = []
    for k in range(4):
        v = np.zeros(4)
        v[k] = 1.0
        v = v + lorentz.bilinear(v, c) * c  # project off the center
        for b in basis:
            v = v - lorentz.bilinear(v, b) * b
        n2 = lorentz.bilinear(v, v)
        if n2 > 1e-12:
            basis.append(v / math.sqrt(n2))
        if len(basis) == 3:
            return basis
    raise GeometryError("failed to build a tangent basis")


def mesh_model_sphere(resolution: int = 48) -> Mesh:
    phis = np.linspace(0.0, math.pi, resolution + 1)
    thetas = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis)
    verts = np.stack(
        [np.cos(tt) * np.sin(pp), np.sin(tt) * np.sin(pp), np.cos(pp)], axis=-1
    ).reshape(-1, 3)
    return Mesh(vertices=verts, triangles=_grid_triangles(resolution + 1, resolution), part_label="model")


def export(scene: Scene, fmt: str) -> bytes:
    """Serialize a scene; byte-stable for identical inputs."""
    if fmt == "obj":
        return _export_obj(scene)
    if fmt == "ply":
        return _export_ply(scene)
    if fmt == "json":
        return _export_json(scene)
    raise GeometryError(f"unknown export format {fmt!r}")


def _export_obj(scene: Scene) -> bytes:
    lines = ["# orthopack scene"]
    offset = 1
    for mesh in scene.meshes:
        lines.append(f"o {mesh.part_label}")
        for v in mesh.vertices:
            lines.append("v %.17g %.17g %.17g" % tuple(v))
        for t in mesh.triangles:
            lines.append("f %d %d %d" % (t[0] + offset, t[1] + offset, t[2] + offset))
        offset += len(mesh.vertices)
    return ("\n".join(lines) + "\n").encode()


def _export_ply(scene: Scene) -> bytes:
    nv = sum(len(m.vertices) for m in scene.meshes)
    nf = sum(len(m.triangles) for m in scene.meshes)
    header = (
        "ply\n"
        "format binary_little_endian 1.0\n"
        "comment orthopack scene\n"
        f"element vertex {nv}\n"
        "property float x\nproperty float y\nproperty float z\n"
        f"element face {nf}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    ).encode()
    body = bytearray()
    for mesh in scene.meshes:
        for v in mesh.vertices:
            body += struct.pack("<3f", *v)
    offset = 0
    for mesh in scene.meshes:
        for t in mesh.triangles:
            body += struct.pack("<B3i", 3, t[0] + offset, t[1] + offset, t[2] + offset)
        offset += len(mesh.vertices)
    return header + bytes(body)


def _export_json(scene: Scene) -> bytes:
    doc = {
        "schema_version": SCENE_SCHEMA_VERSION,
        "metadata": scene.metadata,
        "meshes": [
            {
                "part_label": m.part_label,
                "vertices": [[float(c) for c in v] for v in m.vertices],
                "triangles": [[int(i) for i in t] for t in m.triangles],
            }
            for m in scene.meshes
        ],
    }
    return (json.dumps(doc, sort_keys=True, indent=1) + "\n").encode()


def import_scene_json(data: bytes) -> Scene:
    doc = json.loads(data.decode())
    if doc.get("schema_version") != SCENE_SCHEMA_VERSION:
        raise GeometryError(f"unsupported scene schema {doc.get('schema_version')!r}")
    meshes = tuple(
        Mesh(
            vertices=np.array(m["vertices"], dtype=float).reshape(-1, 3),
            triangles=np.array(m["triangles"], dtype=int).reshape(-1, 3),
            part_label=m["part_label"],
        )
        for m in doc["meshes"]
    )
    return Scene(meshes=meshes, metadata=doc["metadata"])
