"""Indexed triangle meshes and the Wavefront OBJ subset used for interchange.

The writer is bit-exact by contract: ``v %.6f %.6f %.6f`` / ``f %d %d %d``
lines, ``\\n`` separators, no trailing whitespace. Anything downstream that
hashes or byte-compares assets relies on this.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class ParseError(ValueError):
    """Malformed OBJ input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyMeshError(ValueError):
    """Input produced no vertices or no faces."""


@dataclass
class TriMesh:
    """Indexed triangle mesh: (n, 3) float positions, (m, 3) int vertex triples."""

    vertices: np.ndarray
    faces: np.ndarray
    name: Optional[str] = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def bbox_diagonal(self) -> float:
        if len(self.vertices) == 0:
            return 0.0
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(span))

    def validate(self) -> None:
        """Raise ValueError if any structural invariant is violated."""
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise ValueError("face index out of range")
        for f in self.faces:
            if len({int(f[0]), int(f[1]), int(f[2])}) != 3:
                raise ValueError(f"degenerate face {tuple(f)}")
        seen = set()
        for f in self.faces:
            key = frozenset(int(i) for i in f)
            if key in seen:
                raise ValueError(f"duplicate face {tuple(f)}")
            seen.add(key)


@dataclass
class MeshStats:
    vertex_count: int
    face_count: int
    serialized_size: int
    bbox_diagonal: float


_IGNORED_DIRECTIVES = {"vn", "vt", "vp", "o", "g", "s", "mtllib", "usemtl", "l"}


def _face_index(token: str, line_no: int, n_vertices: int) -> int:
    # OBJ faces may carry v/vt/vn references; only the vertex index matters here.
    head = token.split("/")[0]
    try:
        idx = int(head)
    except ValueError:
        raise ParseError(line_no, f"non-numeric face index {token!r}") from None
    if idx == 0:
        raise ParseError(line_no, "OBJ indices are 1-based; 0 is invalid")
    if idx < 0:
        idx = n_vertices + idx
    else:
        idx -= 1
    if idx < 0 or idx >= n_vertices:
        raise IndexError(f"line {line_no}: face index {token!r} out of range (have {n_vertices} vertices)")
    return idx


def parse_obj(data: bytes | str) -> TriMesh:
    """Parse the OBJ subset into a TriMesh.

    Quads fan-triangulate as (i,j,k)+(i,k,l); negative indices resolve against
    the vertex count seen so far. Topologically degenerate or duplicate faces
    are dropped so the TriMesh invariants always hold on return.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    seen_faces: set[frozenset[int]] = set()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) not in (4, 5, 7):  # x y z [w] or x y z r g b
                raise ParseError(line_no, f"vertex needs 3 coordinates, got {len(parts) - 1}")
            try:
                vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
            except ValueError:
                raise ParseError(line_no, "non-numeric vertex coordinate") from None
        elif tag == "f":
            if len(parts) not in (4, 5):
                raise ParseError(line_no, f"face needs 3 or 4 indices, got {len(parts) - 1}")
            idx = [_face_index(t, line_no, len(vertices)) for t in parts[1:]]
            tris = [(idx[0], idx[1], idx[2])]
            if len(idx) == 4:
                tris.append((idx[0], idx[2], idx[3]))
            for tri in tris:
                if len(set(tri)) != 3:
                    continue
                key = frozenset(tri)
                if key in seen_faces:
                    continue
                seen_faces.add(key)
                faces.append(tri)
        elif tag in _IGNORED_DIRECTIVES:
            continue
        else:
            raise ParseError(line_no, f"unknown directive {tag!r}")

    if not vertices or not faces:
        raise EmptyMeshError("OBJ input has no usable vertices or faces")
    return TriMesh(np.array(vertices), np.array(faces))


def write_obj(mesh: TriMesh) -> bytes:
    """Serialize with the fixed 6-decimal format; reparse reproduces connectivity."""
    out: list[str] = []
    for v in mesh.vertices:
        out.append("v %.6f %.6f %.6f" % (v[0], v[1], v[2]))
    for f in mesh.faces:
        out.append("f %d %d %d" % (f[0] + 1, f[1] + 1, f[2] + 1))
    return ("\n".join(out) + "\n").encode("utf-8")


def mesh_stats(mesh: TriMesh) -> MeshStats:
    """Counts, actual serialized byte size, and bounding-box diagonal."""
    return MeshStats(
        vertex_count=mesh.vertex_count,
        face_count=mesh.face_count,
        serialized_size=len(write_obj(mesh)),
        bbox_diagonal=mesh.bbox_diagonal(),
    )
