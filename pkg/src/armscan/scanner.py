"""Grid scanning: column-major probing of a rectangular lattice and
its tessellation into a height-field mesh.

Probing visits column after column, ascending row within each column,
so the contact ordinal of cell (i, k) is k * n_rows + i (0-based).  The
error model's cumulative drift therefore compounds along the scan
exactly in probe order.

Each completed cell (i, k) with all four corners contacted yields two
triangles with a fixed vertex sequence:

    (Q[i][k], Q[i-1][k], Q[i-1][k-1])
    (Q[i][k], Q[i-1][k-1], Q[i][k-1])

Normals follow the right-hand rule on that sequence, which points up
for positive spacings; flip_normals re-orients every facet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import RobotGeometry, is_reachable
from .meshio import PointCloud, Triangle, TriangleMesh
from .motion import DEFAULT_STEP, JointTrace, probe_cycle
from .scene import (
    CONTACT_MESH,
    CONTACT_NONE,
    CONTACT_TABLE,
    CONTACT_UNREACHABLE,
    NoiseModel,
    TargetScene,
)

DEFAULT_SAFE_Z = 60.0


class UnreachableGridError(Exception):
    """Grid points the arm cannot pose over at the safe height.

    Raised before any probing happens; indices are 1-based (row, col)
    pairs.
    """

    def __init__(self, indices, details):
        self.indices = list(indices)
        shown = ", ".join(f"({i}, {k})" for i, k in self.indices[:8])
        if len(self.indices) > 8:
            shown += f", ... {len(self.indices) - 8} more"
        super().__init__(
            f"{len(self.indices)} grid point(s) unreachable at the safe "
            f"height: {shown}; first: {details}"
        )


@dataclass(frozen=True)
class ScanGrid:
    """Rectangular probe lattice.

    Rows advance along +x by row_spacing, columns along +y by
    col_spacing, from the (x0, y0) corner.  safe_z is the travel height
    between probes.
    """

    x0: float
    y0: float
    n_rows: int
    n_cols: int
    row_spacing: float
    col_spacing: float
    safe_z: float = DEFAULT_SAFE_Z

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("grid needs at least one row and one column")
        if self.row_spacing <= 0.0 or self.col_spacing <= 0.0:
            raise ValueError("grid spacings must be positive")

    def point(self, i: int, k: int) -> tuple:
        """(x, y) of the 0-based cell (row i, column k)."""
        return (self.x0 + i * self.row_spacing, self.y0 + k * self.col_spacing)

    def contact_ordinal(self, i: int, k: int) -> int:
        return k * self.n_rows + i

    def probe_order(self):
        """(i, k) pairs, ascending row within ascending column."""
        for k in range(self.n_cols):
            for i in range(self.n_rows):
                yield i, k

    @property
    def point_count(self) -> int:
        return self.n_rows * self.n_cols


@dataclass
class PointGrid:
    """Measured contact lattice; cells[i][k] follows the grid layout."""

    grid: ScanGrid
    cells: list

    def cell(self, i: int, k: int):
        return self.cells[i][k]

    def in_probe_order(self):
        for i, k in self.grid.probe_order():
            yield self.cells[i][k]

    def count(self, kind: str) -> int:
        return sum(1 for c in self.in_probe_order() if c.kind == kind)

    def measured_cloud(self) -> PointCloud:
        pts = [c.point() for c in self.in_probe_order() if c.touched]
        return PointCloud(np.array(pts).reshape(-1, 3))


def triangulate(points: PointGrid, flip_normals: bool = False) -> TriangleMesh:
    """Two triangles per fully contacted cell, fixed vertex sequence.

    A cell is skipped when any of its four corners has no height
    (probe miss in skip mode, or an unreachable point).  Emission order
    matches the incremental order a column-by-column scan produces.
    """
    mesh = TriangleMesh()
    cells = points.cells
    for k in range(1, points.grid.n_cols):
        for i in range(1, points.grid.n_rows):
            corners = (
                cells[i][k],
                cells[i - 1][k],
                cells[i - 1][k - 1],
                cells[i][k - 1],
            )
            if not all(c.touched for c in corners):
                continue
            q_ik, q_up, q_diag, q_left = (c.point() for c in corners)
            first = Triangle.from_vertices(q_ik, q_up, q_diag)
            second = Triangle.from_vertices(q_ik, q_diag, q_left)
            if flip_normals:
                first, second = first.flipped(), second.flipped()
            mesh.add(first)
            mesh.add(second)
    return mesh


@dataclass
class ScanResult:
    points: PointGrid
    mesh: TriangleMesh
    trace: JointTrace

    def summary(self) -> str:
        p, g = self.points, self.points.grid
        lines = [
            f"grid            {g.n_rows} rows x {g.n_cols} cols, "
            f"spacing {g.row_spacing:g} x {g.col_spacing:g} mm",
            f"corner          ({g.x0:g}, {g.y0:g}) mm, safe height {g.safe_z:g} mm",
            f"points probed   {g.point_count}",
            f"mesh contacts   {p.count(CONTACT_MESH)}",
            f"table contacts  {p.count(CONTACT_TABLE)}",
            f"misses          {p.count(CONTACT_NONE)}",
            f"unreachable     {p.count(CONTACT_UNREACHABLE)}",
            f"triangles       {len(self.mesh)}",
            f"trace waypoints {len(self.trace)}",
        ]
        return "\n".join(lines) + "\n"


def run_scan(
    grid: ScanGrid,
    geom: RobotGeometry,
    scene: TargetScene,
    noise: NoiseModel,
    flip_normals: bool = False,
    step: float = DEFAULT_STEP,
) -> ScanResult:
    """Probe the whole lattice and tessellate the measured heights.

    Every grid point must be reachable at the safe height before any
    probing starts; otherwise UnreachableGridError lists the offenders
    and no motion is logged.  Per-point descent failures during the
    scan do not abort it, they mark the cell unreachable and leave
    holes in the mesh.
    """
    bad = []
    first_reason = None
    for i, k in grid.probe_order():
        x, y = grid.point(i, k)
        ok, why = is_reachable((x, y, grid.safe_z), geom)
        if not ok:
            bad.append((i + 1, k + 1))
            if first_reason is None:
                first_reason = why
    if bad:
        raise UnreachableGridError(bad, first_reason)

    cells = [[None] * grid.n_cols for _ in range(grid.n_rows)]
    trace = JointTrace()
    last_xy = None
    for i, k in grid.probe_order():
        x, y = grid.point(i, k)
        contact, cycle = probe_cycle(
            x,
            y,
            safe_z=grid.safe_z,
            geom=geom,
            scene=scene,
            noise=noise,
            contact_index=grid.contact_ordinal(i, k),
            from_xy=last_xy,
            step=step,
        )
        cells[i][k] = contact
        trace.extend(cycle)
        last_xy = (x, y)

    points = PointGrid(grid, cells)
    mesh = triangulate(points, flip_normals=flip_normals)
    return ScanResult(points, mesh, trace)
