"""Quadric error forms for edge-collapse decimation.

A quadric is a symmetric 4x4 form Q; its value at a homogeneous point
p = (x, y, z, 1) is p^T Q p. For a plane quadric built from a unit-normal
plane this is the squared distance to the plane, so sums of plane quadrics
measure aggregate squared deviation from the local surface.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .obj import TriMesh

# Upper-triangle packing order of the symmetric 4x4 matrix.
_PACK = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]


@dataclass
class Quadric:
    """Symmetric 4x4 form stored as its 10 upper-triangle coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64).reshape(10)

    @classmethod
    def zero(cls) -> "Quadric":
        return cls(np.zeros(10))

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Quadric":
        return cls(np.array([m[i, j] for i, j in _PACK]))

    @classmethod
    def from_plane(cls, normal, offset: float, weight: float = 1.0) -> "Quadric":
        """Plane quadric w * p p^T for plane (n, d) with n·x + d = 0, |n| = 1."""
        p = np.array([normal[0], normal[1], normal[2], offset], dtype=np.float64)
        return cls.from_matrix(weight * np.outer(p, p))

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4))
        for c, (i, j) in zip(self.coeffs, _PACK):
            m[i, j] = c
            m[j, i] = c
        return m

    def error(self, point) -> float:
        p = np.array([point[0], point[1], point[2], 1.0])
        return float(p @ self.matrix() @ p)

    def __add__(self, other: "Quadric") -> "Quadric":
        return Quadric(self.coeffs + other.coeffs)


def face_planes(mesh: TriMesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit normals, offsets, and double-areas for every face.

    Degenerate faces get a zero normal and zero area; callers skip them.
    """
    v = mesh.vertices
    f = mesh.faces
    e1 = v[f[:, 1]] - v[f[:, 0]]
    e2 = v[f[:, 2]] - v[f[:, 0]]
    cross = np.cross(e1, e2)
    double_area = np.linalg.norm(cross, axis=1)
    normals = np.zeros_like(cross)
    ok = double_area > 1e-14
    normals[ok] = cross[ok] / double_area[ok, None]
    offsets = -np.einsum("ij,ij->i", normals, v[f[:, 0]])
    return normals, offsets, double_area


def boundary_edges(mesh: TriMesh) -> list[tuple[int, int, int]]:
    """Edges incident to exactly one face, as (vertex_a, vertex_b, face_id)."""
    count: dict[tuple[int, int], tuple[int, int]] = {}
    for fid, (a, b, c) in enumerate(mesh.faces):
        for u, w in ((a, b), (b, c), (c, a)):
            key = (min(int(u), int(w)), max(int(u), int(w)))
            n, first = count.get(key, (0, fid))
            count[key] = (n + 1, first)
    return [(a, b, fid) for (a, b), (n, fid) in count.items() if n == 1]


def vertex_quadric_matrices(
    mesh: TriMesh,
    boundary_penalty: float = 1000.0,
    area_weighted: bool = False,
) -> np.ndarray:
    """Per-vertex accumulated quadrics as an (n, 4, 4) array.

    Each vertex sums the plane quadrics of its incident faces (unit weight by
    default). Boundary edges add a constraint plane perpendicular to the
    adjacent face, scaled by ``boundary_penalty``, so open rims resist erosion.
    """
    normals, offsets, double_area = face_planes(mesh)
    n = mesh.vertex_count
    q = np.zeros((n, 4, 4))

    planes = np.concatenate([normals, offsets[:, None]], axis=1)
    pp = planes[:, :, None] * planes[:, None, :]
    if area_weighted:
        pp = pp * (0.5 * double_area)[:, None, None]
    ok = double_area > 1e-14
    for k in range(3):
        np.add.at(q, mesh.faces[ok, k], pp[ok])

    if boundary_penalty > 0:
        v = mesh.vertices
        for a, b, fid in boundary_edges(mesh):
            fn = normals[fid]
            if np.linalg.norm(fn) < 0.5:
                continue
            edge = v[b] - v[a]
            en = np.linalg.norm(edge)
            if en < 1e-14:
                continue
            cn = np.cross(edge / en, fn)
            cl = np.linalg.norm(cn)
            if cl < 1e-14:
                continue
            cn = cn / cl
            plane = np.array([cn[0], cn[1], cn[2], -float(cn @ v[a])])
            cq = boundary_penalty * np.outer(plane, plane)
            q[a] += cq
            q[b] += cq
    return q


def vertex_quadrics(
    mesh: TriMesh,
    boundary_penalty: float = 1000.0,
    area_weighted: bool = False,
) -> list[Quadric]:
    """Public per-vertex quadric list; see vertex_quadric_matrices."""
    mats = vertex_quadric_matrices(mesh, boundary_penalty, area_weighted)
    return [Quadric.from_matrix(m) for m in mats]


def _solve_optimal(qm: np.ndarray) -> np.ndarray | None:
    """Minimizer of p^T Q p over affine points, or None when near-singular."""
    a = qm[:3, :3]
    b = -qm[:3, 3]
    det = np.linalg.det(a)
    scale = max(np.abs(a).max(), 1e-30) ** 3
    if abs(det) < 1e-12 * scale:
        return None
    return np.linalg.solve(a, b)


def collapse_cost(q_sum: Quadric, v1, v2) -> tuple[float, np.ndarray]:
    """Cost and placement for collapsing an edge under the summed quadric.

    Tries the closed-form minimizer; always competes it against the endpoints
    and midpoint so the result is a true minimum over that candidate set even
    when the 3x3 system is ill-conditioned.
    """
    qm = q_sum.matrix()
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    candidates = [0.5 * (v1 + v2), v1, v2]
    solved = _solve_optimal(qm)
    if solved is not None:
        candidates.insert(0, solved)
    errs = [q_sum.error(c) for c in candidates]
    best = int(np.argmin(errs))
    return max(errs[best], 0.0), candidates[best]
