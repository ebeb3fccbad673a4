"""Triangle meshes, point clouds, and their file formats.

Binary STL is the primary interchange format: 80-byte header, u32
triangle count, then 50 bytes per facet (12 little-endian float32:
normal, v1, v2, v3; plus a u16 attribute written as 0).  Coordinates
are held as float64 in memory and narrowed to float32 on write; that
narrowing is the format's precision, not ours, and write-read-write
round trips are bit-exact.

ASCII STL is read transparently and written only on request.  Point
clouds travel as xyz text, one "x y z" triple per line with six
fractional digits.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

STL_HEADER_BYTES = 80
STL_FACET_STRUCT = struct.Struct("<12fH")
STL_SIGNATURE = b"armscan binary STL"

XYZ_DECIMALS = 6


class StlFormatError(ValueError):
    """Malformed STL data; the message carries the byte or line position."""


class XyzFormatError(ValueError):
    """Malformed xyz text; the message carries the line number."""


@dataclass
class Triangle:
    """One facet: unit normal plus three vertices (mm)."""

    normal: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float).reshape(3)
        self.v1 = np.asarray(self.v1, dtype=float).reshape(3)
        self.v2 = np.asarray(self.v2, dtype=float).reshape(3)
        self.v3 = np.asarray(self.v3, dtype=float).reshape(3)

    @classmethod
    def from_vertices(cls, v1, v2, v3) -> "Triangle":
        """Build a facet with the right-hand-rule normal of (v1, v2, v3).

        Raises ValueError for collinear vertices; degenerate facets are
        never emitted.
        """
        v1 = np.asarray(v1, dtype=float)
        v2 = np.asarray(v2, dtype=float)
        v3 = np.asarray(v3, dtype=float)
        cross = np.cross(v2 - v1, v3 - v1)
        norm = np.linalg.norm(cross)
        if norm < 1e-12:
            raise ValueError(f"degenerate triangle: {v1}, {v2}, {v3}")
        return cls(cross / norm, v1, v2, v3)

    @property
    def vertices(self) -> np.ndarray:
        return np.stack([self.v1, self.v2, self.v3])

    def flipped(self) -> "Triangle":
        return Triangle(-self.normal, self.v1, self.v3, self.v2)


@dataclass
class TriangleMesh:
    """Ordered triangle soup, as STL stores it."""

    triangles: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.triangles)

    def __iter__(self):
        return iter(self.triangles)

    def __getitem__(self, i):
        return self.triangles[i]

    def add(self, triangle: Triangle) -> None:
        self.triangles.append(triangle)

    def vertex_array(self) -> np.ndarray:
        """All vertices, (3 * count, 3), in facet order."""
        if not self.triangles:
            return np.zeros((0, 3))
        return np.concatenate([t.vertices for t in self.triangles])

    def triangle_array(self) -> np.ndarray:
        """Vertices grouped per facet, (count, 3, 3)."""
        if not self.triangles:
            return np.zeros((0, 3, 3))
        return np.stack([t.vertices for t in self.triangles])

    def bounds(self) -> tuple:
        verts = self.vertex_array()
        if verts.size == 0:
            raise ValueError("empty mesh has no bounds")
        return verts.min(axis=0), verts.max(axis=0)

    def flipped(self) -> "TriangleMesh":
        return TriangleMesh([t.flipped() for t in self.triangles])


@dataclass
class PointCloud:
    """Unordered 3D points (mm), stored row-wise."""

    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 3)

    def __len__(self) -> int:
        return len(self.points)


# ------------------------------------------------------------------ STL


def write_stl_binary(mesh: TriangleMesh) -> bytes:
    count = len(mesh)
    if count > 0xFFFFFFFF:
        raise StlFormatError(f"triangle count {count} exceeds the u32 field")
    parts = [STL_SIGNATURE.ljust(STL_HEADER_BYTES, b"\0")]
    parts.append(struct.pack("<I", count))
    for t in mesh:
        parts.append(
            STL_FACET_STRUCT.pack(*t.normal, *t.v1, *t.v2, *t.v3, 0)
        )
    return b"".join(parts)


def write_stl_ascii(mesh: TriangleMesh, name: str = "scan") -> str:
    lines = [f"solid {name}"]
    for t in mesh:
        lines.append(
            "  facet normal {:e} {:e} {:e}".format(*t.normal)
        )
        lines.append("    outer loop")
        for v in (t.v1, t.v2, t.v3):
            lines.append("      vertex {:e} {:e} {:e}".format(*v))
        lines.append("    endloop")
        lines.append("  endfacet")
    lines.append(f"endsolid {name}")
    return "\n".join(lines) + "\n"


def _read_stl_binary(data: bytes) -> TriangleMesh:
    if len(data) < STL_HEADER_BYTES + 4:
        raise StlFormatError(
            f"file is {len(data)} bytes, shorter than the 84-byte binary minimum"
        )
    (count,) = struct.unpack_from("<I", data, STL_HEADER_BYTES)
    expected = STL_HEADER_BYTES + 4 + 50 * count
    if len(data) != expected:
        raise StlFormatError(
            f"size mismatch: header declares {count} triangles "
            f"({expected} bytes) but the file holds {len(data)} bytes"
        )
    mesh = TriangleMesh()
    offset = STL_HEADER_BYTES + 4
    for _ in range(count):
        values = STL_FACET_STRUCT.unpack_from(data, offset)
        mesh.add(
            Triangle(
                np.array(values[0:3], dtype=float),
                np.array(values[3:6], dtype=float),
                np.array(values[6:9], dtype=float),
                np.array(values[9:12], dtype=float),
            )
        )
        offset += 50
    return mesh


def _parse_floats(tokens, n, line_no, what):
    if len(tokens) != n:
        raise StlFormatError(
            f"line {line_no}: expected {n} numbers after '{what}', got {len(tokens)}"
        )
    try:
        return [float(tok) for tok in tokens]
    except ValueError as exc:
        raise StlFormatError(f"line {line_no}: {exc}") from None


def _read_stl_ascii(text: str) -> TriangleMesh:
    mesh = TriangleMesh()
    lines = text.splitlines()
    i = 0

    def next_content_line():
        nonlocal i
        while i < len(lines):
            i += 1
            stripped = lines[i - 1].strip()
            if stripped:
                return stripped, i
        return None, i

    line, no = next_content_line()
    if line is None or not line.startswith("solid"):
        raise StlFormatError(f"line {no}: expected 'solid', got {line!r}")
    while True:
        line, no = next_content_line()
        if line is None:
            raise StlFormatError(f"line {no}: unterminated solid, missing 'endsolid'")
        if line.startswith("endsolid"):
            break
        tokens = line.split()
        if tokens[:2] != ["facet", "normal"]:
            raise StlFormatError(f"line {no}: expected 'facet normal', got {line!r}")
        normal = _parse_floats(tokens[2:], 3, no, "facet normal")
        line, no = next_content_line()
        if line != "outer loop":
            raise StlFormatError(f"line {no}: expected 'outer loop', got {line!r}")
        verts = []
        for _ in range(3):
            line, no = next_content_line()
            tokens = (line or "").split()
            if tokens[:1] != ["vertex"]:
                raise StlFormatError(f"line {no}: expected 'vertex', got {line!r}")
            verts.append(_parse_floats(tokens[1:], 3, no, "vertex"))
        line, no = next_content_line()
        if line != "endloop":
            raise StlFormatError(f"line {no}: expected 'endloop', got {line!r}")
        line, no = next_content_line()
        if line != "endfacet":
            raise StlFormatError(f"line {no}: expected 'endfacet', got {line!r}")
        mesh.add(Triangle(np.array(normal), *(np.array(v) for v in verts)))
    return mesh


def read_stl(data: bytes) -> TriangleMesh:
    """Parse an STL byte stream, auto-detecting binary vs ASCII.

    A stream is treated as ASCII iff it decodes and follows the
    solid/facet grammar; binary files that merely begin with the word
    'solid' fall through to the binary reader.
    """
    looks_ascii = False
    text = None
    try:
        text = data.decode("ascii")
        looks_ascii = text.lstrip().startswith("solid") and "facet" in text
    except UnicodeDecodeError:
        pass
    if looks_ascii:
        return _read_stl_ascii(text)
    return _read_stl_binary(data)


def save_stl(mesh: TriangleMesh, path, ascii_format: bool = False) -> None:
    if ascii_format:
        with open(path, "w") as fh:
            fh.write(write_stl_ascii(mesh))
    else:
        with open(path, "wb") as fh:
            fh.write(write_stl_binary(mesh))


def load_stl(path) -> TriangleMesh:
    with open(path, "rb") as fh:
        return read_stl(fh.read())


# ------------------------------------------------------------------ xyz


def write_xyz(cloud: PointCloud) -> str:
    return "".join(
        "{:.6f} {:.6f} {:.6f}\n".format(*row) for row in cloud.points
    )


def read_xyz(text: str) -> PointCloud:
    rows = []
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        tokens = stripped.split()
        if len(tokens) != 3:
            raise XyzFormatError(
                f"line {no}: expected 3 coordinates, got {len(tokens)}"
            )
        try:
            rows.append([float(tok) for tok in tokens])
        except ValueError as exc:
            raise XyzFormatError(f"line {no}: {exc}") from None
    return PointCloud(np.array(rows).reshape(-1, 3))


def save_xyz(cloud: PointCloud, path) -> None:
    with open(path, "w") as fh:
        fh.write(write_xyz(cloud))


def load_xyz(path) -> PointCloud:
    with open(path) as fh:
        return read_xyz(fh.read())
