import struct

import numpy as np
import pytest

from armscan.meshio import (
    PointCloud,
    StlFormatError,
    Triangle,
    TriangleMesh,
    XyzFormatError,
    read_stl,
    read_xyz,
    write_stl_ascii,
    write_stl_binary,
    write_xyz,
)


def random_mesh(rng, count):
    """Mesh with exactly float32-representable coordinates."""
    tris = []
    for _ in range(count):
        verts = rng.uniform(-500.0, 500.0, (3, 3)).astype(np.float32)
        tris.append(
            Triangle.from_vertices(*(v.astype(float) for v in verts))
        )
    return TriangleMesh(tris)


# ------------------------------------------------------------------ triangle


def test_triangle_normal_right_hand_rule():
    t = Triangle.from_vertices([0, 0, 0], [1, 0, 0], [0, 1, 0])
    assert np.allclose(t.normal, [0, 0, 1])
    assert np.allclose(np.linalg.norm(t.normal), 1.0)


def test_triangle_rejects_collinear_vertices():
    with pytest.raises(ValueError):
        Triangle.from_vertices([0, 0, 0], [1, 1, 1], [2, 2, 2])
    with pytest.raises(ValueError):
        Triangle.from_vertices([0, 0, 0], [0, 0, 0], [1, 0, 0])


def test_triangle_flip_reverses_normal_and_winding():
    t = Triangle.from_vertices([0, 0, 0], [2, 0, 0], [0, 2, 0])
    f = t.flipped()
    assert np.allclose(f.normal, -t.normal)
    assert np.allclose(f.v2, t.v3)
    recomputed = Triangle.from_vertices(f.v1, f.v2, f.v3)
    assert np.allclose(recomputed.normal, f.normal)


# ------------------------------------------------------------------ binary


def test_empty_mesh_is_84_bytes():
    data = write_stl_binary(TriangleMesh())
    assert len(data) == 84
    assert struct.unpack_from("<I", data, 80)[0] == 0


def test_file_size_law(rng):
    for count in (1, 7, 33):
        data = write_stl_binary(random_mesh(rng, count))
        assert len(data) == 84 + 50 * count


def test_binary_round_trip_bit_exact(rng):
    for count in (1, 5, 40):
        mesh = random_mesh(rng, count)
        first = write_stl_binary(mesh)
        second = write_stl_binary(read_stl(first))
        assert first == second


def test_write_narrows_to_float32(rng):
    v1 = [0.1, 0.2, 0.3]  # not float32-representable
    mesh = TriangleMesh([Triangle.from_vertices(v1, [1, 0, 0], [0, 1, 0])])
    back = read_stl(write_stl_binary(mesh))
    assert back[0].v1[0] == np.float32(0.1)
    assert back[0].v1[0] != 0.1


def test_binary_truncated_raises():
    data = write_stl_binary(TriangleMesh())
    with pytest.raises(StlFormatError, match="84-byte"):
        read_stl(data[:50])


def test_binary_count_mismatch_raises(rng):
    data = bytearray(write_stl_binary(random_mesh(rng, 3)))
    struct.pack_into("<I", data, 80, 7)
    with pytest.raises(StlFormatError, match="size mismatch"):
        read_stl(bytes(data))


def test_binary_header_starting_with_solid_still_binary(rng):
    mesh = random_mesh(rng, 2)
    data = bytearray(write_stl_binary(mesh))
    data[:5] = b"solid"
    back = read_stl(bytes(data))
    assert len(back) == 2


# ------------------------------------------------------------------ ascii


def test_ascii_single_facet():
    text = """
    solid example
      facet normal 0.0 0.0 1.0
        outer loop
          vertex 0 0 7
          vertex 1.5E+00 0 7
          vertex 0 2e0 7
        endloop
      endfacet
    endsolid example
    """
    mesh = read_stl(text.encode())
    assert len(mesh) == 1
    assert np.allclose(mesh[0].normal, [0, 0, 1])
    assert np.allclose(mesh[0].v2, [1.5, 0, 7])


def test_ascii_unit_cube_from_another_tool():
    # assembled the way mesh exporters commonly print it, not via our writer
    faces = []
    quads = [
        ([0, 0, 0], [0, 1, 0], [1, 1, 0], [1, 0, 0], [0, 0, -1]),
        ([0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1], [0, 0, 1]),
        ([0, 0, 0], [1, 0, 0], [1, 0, 1], [0, 0, 1], [0, -1, 0]),
        ([1, 0, 0], [1, 1, 0], [1, 1, 1], [1, 0, 1], [1, 0, 0]),
        ([1, 1, 0], [0, 1, 0], [0, 1, 1], [1, 1, 1], [0, 1, 0]),
        ([0, 1, 0], [0, 0, 0], [0, 0, 1], [0, 1, 1], [-1, 0, 0]),
    ]
    for a, b, c, d, n in quads:
        for tri in ((a, b, c), (a, c, d)):
            lines = ["facet normal %d %d %d" % tuple(n), " outer loop"]
            lines += ["  vertex %d %d %d" % tuple(v) for v in tri]
            lines += [" endloop", "endfacet"]
            faces.append("\n".join(lines))
    text = "solid cube\n" + "\n".join(faces) + "\nendsolid cube\n"
    mesh = read_stl(text.encode())
    assert len(mesh) == 12
    lo, hi = mesh.bounds()
    assert np.allclose(lo, [0, 0, 0])
    assert np.allclose(hi, [1, 1, 1])


def test_ascii_writer_output_parses_back(rng):
    mesh = random_mesh(rng, 4)
    back = read_stl(write_stl_ascii(mesh).encode())
    assert len(back) == 4
    for orig, parsed in zip(mesh, back):
        assert np.allclose(parsed.vertices, orig.vertices, atol=1e-5)


def test_ascii_malformed_token_reports_line():
    text = "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 oops\n"
    with pytest.raises(StlFormatError, match="line 4"):
        read_stl(text.encode())


def test_ascii_missing_endsolid_raises():
    text = "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 1 0 0\nvertex 0 1 0\nendloop\nendfacet\n"
    with pytest.raises(StlFormatError, match="endsolid"):
        read_stl(text.encode())


# ------------------------------------------------------------------ xyz


def test_xyz_empty_cloud_empty_file():
    assert write_xyz(PointCloud()) == ""
    assert len(read_xyz("")) == 0


def test_xyz_round_trip_500_points(rng):
    cloud = PointCloud(rng.uniform(-400, 400, (500, 3)))
    text = write_xyz(cloud)
    assert len(text.splitlines()) == 500
    back = read_xyz(text)
    assert np.abs(back.points - cloud.points).max() < 1e-6


def test_xyz_tolerates_extra_whitespace():
    cloud = read_xyz("  1.0\t2.0   3.0  \n\n   4 5 6\n")
    assert np.allclose(cloud.points, [[1, 2, 3], [4, 5, 6]])


def test_xyz_malformed_line_numbered():
    with pytest.raises(XyzFormatError, match="line 2"):
        read_xyz("1 2 3\n4 5\n")
    with pytest.raises(XyzFormatError, match="line 3"):
        read_xyz("1 2 3\n4 5 6\n7 eight 9\n")
