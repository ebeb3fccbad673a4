import numpy as np
import pytest

from armscan.meshio import write_stl_binary
from armscan.objects import make_plate, make_wing
from armscan.scanner import (
    ScanGrid,
    UnreachableGridError,
    run_scan,
    triangulate,
)
from armscan.scene import CONTACT_MESH, CONTACT_NONE, NoiseModel, TargetScene


def plate_scene(z=25.0, **kw):
    # big enough to cover every grid used here
    return TargetScene(make_plate(180.0, -120.0, 220.0, 240.0, z), **kw)


def small_grid(n_rows, n_cols, spacing=6.0):
    return ScanGrid(
        x0=240.0, y0=-30.0, n_rows=n_rows, n_cols=n_cols,
        row_spacing=spacing, col_spacing=spacing, safe_z=60.0,
    )


# ------------------------------------------------------------------ grid


def test_grid_point_formula():
    g = ScanGrid(10.0, 20.0, 5, 4, 2.0, 3.0)
    assert g.point(0, 0) == (10.0, 20.0)
    assert g.point(3, 2) == (10.0 + 3 * 2.0, 20.0 + 2 * 3.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        ScanGrid(0, 0, 0, 5, 1.0, 1.0)
    with pytest.raises(ValueError):
        ScanGrid(0, 0, 5, 5, -1.0, 1.0)


def test_grid_probe_order_column_major():
    g = ScanGrid(0, 0, 3, 2, 1.0, 1.0)
    order = list(g.probe_order())
    assert order == [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]
    assert [g.contact_ordinal(i, k) for i, k in order] == list(range(6))


# ------------------------------------------------------------------ scan


def test_scan_1x1_grid(geom):
    result = run_scan(small_grid(1, 1), geom, plate_scene(), NoiseModel())
    assert result.points.grid.point_count == 1
    assert len(result.mesh) == 0
    assert result.points.cell(0, 0).z_measured == 25.0


def test_scan_20x25_counts(geom):
    result = run_scan(small_grid(20, 25, spacing=4.0), geom, plate_scene(), NoiseModel())
    cloud = result.points.measured_cloud()
    assert len(cloud) == 500
    assert len(result.mesh) == 912


def test_scan_flat_plate_zero_noise(geom):
    result = run_scan(small_grid(6, 7), geom, plate_scene(25.0), NoiseModel())
    for c in result.points.in_probe_order():
        assert c.kind == CONTACT_MESH
        assert abs(c.z_measured - 25.0) < 1e-9
    for t in result.mesh:
        assert np.allclose(t.normal, [0.0, 0.0, 1.0], atol=1e-9)
        assert np.abs(t.vertices[:, 2] - 25.0).max() < 1e-9


def test_scan_contact_ordinals_via_drift(geom):
    # pure drift makes each measurement encode its own contact ordinal
    drift = 0.001
    grid = small_grid(4, 5)
    result = run_scan(grid, geom, plate_scene(25.0),
                      NoiseModel(drift_per_contact=drift))
    for i, k in grid.probe_order():
        c = result.points.cell(i, k)
        ordinal = round((c.z_measured - c.z_true) / drift)
        assert ordinal == k * grid.n_rows + i


def test_scan_unreachable_grid_aborts_before_probing(geom):
    grid = ScanGrid(500.0, -30.0, 4, 4, 40.0, 6.0, safe_z=60.0)
    with pytest.raises(UnreachableGridError) as err:
        run_scan(grid, geom, plate_scene(), NoiseModel())
    assert err.value.indices  # 1-based offenders listed
    assert all(1 <= i <= 4 and 1 <= k <= 4 for i, k in err.value.indices)


def test_scan_deterministic(geom):
    noise = NoiseModel(sigma_contact=0.05, drift_per_contact=0.0005, seed=3)
    a = run_scan(small_grid(5, 6), geom, plate_scene(), noise)
    b = run_scan(small_grid(5, 6), geom, plate_scene(), noise)
    assert write_stl_binary(a.mesh) == write_stl_binary(b.mesh)
    assert a.trace.to_csv() == b.trace.to_csv()
    assert np.array_equal(
        a.points.measured_cloud().points, b.points.measured_cloud().points
    )


# ------------------------------------------------------------------ triangulation


def test_triangulate_2x2_exact_vertex_sequences(geom):
    grid = small_grid(2, 2)
    result = run_scan(grid, geom, plate_scene(25.0), NoiseModel())
    q = {(i, k): result.points.cell(i, k).point() for i, k in grid.probe_order()}
    mesh = result.mesh
    assert len(mesh) == 2
    first, second = mesh[0], mesh[1]
    assert np.allclose(first.v1, q[(1, 1)])
    assert np.allclose(first.v2, q[(0, 1)])
    assert np.allclose(first.v3, q[(0, 0)])
    assert np.allclose(second.v1, q[(1, 1)])
    assert np.allclose(second.v2, q[(0, 0)])
    assert np.allclose(second.v3, q[(1, 0)])


def test_triangle_count_law(geom, rng):
    for _ in range(6):
        r = int(rng.integers(1, 7))
        c = int(rng.integers(1, 7))
        result = run_scan(small_grid(r, c), geom, plate_scene(), NoiseModel())
        assert len(result.mesh) == 2 * (r - 1) * (c - 1)


def test_triangulate_skips_cells_with_holes(geom):
    # plate covering only y >= -6: the first column misses in skip mode
    scene = TargetScene(
        make_plate(180.0, -6.0, 220.0, 160.0, 25.0), floor_mode="skip"
    )
    grid = small_grid(4, 5)  # columns at y = -30, -24, ..., -6
    result = run_scan(grid, geom, scene, NoiseModel())
    misses = result.points.count(CONTACT_NONE)
    assert misses == 16  # 4 of 5 columns clear the plate
    assert len(result.mesh) == 0  # only one contacted column: no full cell

    scene2 = TargetScene(
        make_plate(180.0, -18.0, 220.0, 160.0, 25.0), floor_mode="skip"
    )
    result2 = run_scan(grid, geom, scene2, NoiseModel())
    assert result2.points.count(CONTACT_NONE) == 8
    # full cells only among the last three columns
    assert len(result2.mesh) == 2 * (4 - 1) * (3 - 1)


def test_triangulate_flip_normals(geom):
    result = run_scan(
        small_grid(3, 3), geom, plate_scene(25.0), NoiseModel(), flip_normals=True
    )
    for t in result.mesh:
        assert np.allclose(t.normal, [0.0, 0.0, -1.0], atol=1e-9)


def test_triangulate_pure_function_of_grid(geom):
    result = run_scan(small_grid(4, 4), geom, plate_scene(), NoiseModel())
    again = triangulate(result.points)
    assert write_stl_binary(again) == write_stl_binary(result.mesh)


def test_triangulate_projected_area_tiles_rectangle(geom):
    grid = small_grid(5, 7, spacing=6.0)
    result = run_scan(grid, geom, plate_scene(), NoiseModel())
    area = 0.0
    for t in result.mesh:
        (x1, y1), (x2, y2), (x3, y3) = t.vertices[:, :2]
        area += abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) / 2.0
    assert area == pytest.approx((5 - 1) * (7 - 1) * 36.0, abs=1e-9)


def test_triangulate_interior_edges_shared_twice(geom):
    grid = small_grid(4, 5)
    result = run_scan(grid, geom, plate_scene(), NoiseModel())
    edges = {}
    for t in result.mesh:
        vs = [tuple(np.round(v, 9)) for v in t.vertices]
        for a, b in ((0, 1), (1, 2), (2, 0)):
            key = tuple(sorted([vs[a], vs[b]]))
            edges[key] = edges.get(key, 0) + 1
    assert set(edges.values()) <= {1, 2}
    shared = sum(1 for n in edges.values() if n == 2)
    r, c = grid.n_rows, grid.n_cols
    interior_lattice = (r - 1) * (c - 2) + (r - 2) * (c - 1)
    diagonals = (r - 1) * (c - 1)
    assert shared == interior_lattice + diagonals


def test_height_map_single_cover(geom, rng):
    grid = small_grid(4, 4)
    result = run_scan(grid, geom, plate_scene(), NoiseModel())
    tris = result.mesh.triangle_array()
    for _ in range(200):
        x = rng.uniform(grid.x0 + 0.01, grid.x0 + 3 * 6.0 - 0.01)
        y = rng.uniform(grid.y0 + 0.01, grid.y0 + 3 * 6.0 - 0.01)
        strictly_inside = 0
        for tri in tris:
            v1, v2, v3 = tri
            det = (v2[0] - v1[0]) * (v3[1] - v1[1]) - (v3[0] - v1[0]) * (v2[1] - v1[1])
            u = ((x - v1[0]) * (v3[1] - v1[1]) - (y - v1[1]) * (v3[0] - v1[0])) / det
            v = ((y - v1[1]) * (v2[0] - v1[0]) - (x - v1[0]) * (v2[1] - v1[1])) / det
            if u > 1e-9 and v > 1e-9 and u + v < 1.0 - 1e-9:
                strictly_inside += 1
        assert strictly_inside <= 1


# ------------------------------------------------------------------ wing


def test_scan_wing_measures_surface_heights(geom):
    wing = make_wing(220.0, -70.0, span=150.0, chord=140.0)
    scene = TargetScene(wing)
    grid = ScanGrid(240.0, -40.0, 5, 6, 6.0, 6.0, safe_z=60.0)
    result = run_scan(grid, geom, scene, NoiseModel())
    zs = [c.z_measured for c in result.points.in_probe_order()]
    assert all(c.kind == CONTACT_MESH for c in result.points.in_probe_order())
    assert max(zs) > 5.0  # over the cambered hump
    assert min(zs) >= 0.0


def test_summary_counts(geom):
    result = run_scan(small_grid(3, 4), geom, plate_scene(), NoiseModel())
    text = result.summary()
    assert "points probed   12" in text
    assert "mesh contacts   12" in text
    assert "triangles       12" in text
