"""Quantitative evaluation: Chamfer distance, mesh surface sampling,
algebraic sphere fitting, and the two probe performance tests.

The Chamfer distance here is the sum of the two directed mean
nearest-neighbor distances, not their average; both directed terms are
reported so either convention can be recovered.

The accuracy test probes nine points on a reference sphere (four on
the equator, four at 45 degrees latitude, one at the pole) and reports
each point's diameter-equivalent deviation from the fitted sphere.
The repeatability test probes one point many times at several reach
distances and reports the worst deviation from the centroid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .kinematics import (
    JointLimitError,
    Pose,
    RobotGeometry,
    UnreachableError,
    inverse_kinematics,
    is_reachable,
)
from .meshio import PointCloud, TriangleMesh
from .scene import NoiseModel

TEST_B_DISTANCES = (120.0, 300.0, 500.0)
TEST_B_REPEATS = 10

# (latitude, longitude) degrees: equator and 45-degree rings at four
# equally spaced longitudes, plus the pole.
TEST_A_DIRECTIONS = (
    (0.0, 0.0),
    (0.0, 90.0),
    (0.0, 180.0),
    (0.0, -90.0),
    (45.0, 0.0),
    (45.0, 90.0),
    (45.0, 180.0),
    (45.0, -90.0),
    (90.0, 0.0),
)


# ------------------------------------------------------------------ chamfer


@dataclass(frozen=True)
class ChamferReport:
    cd: float
    forward_mean: float
    backward_mean: float
    m: int
    n: int

    def key_values(self) -> str:
        return (
            f"chamfer_mm = {self.cd:.9f}\n"
            f"forward_mean_mm = {self.forward_mean:.9f}\n"
            f"backward_mean_mm = {self.backward_mean:.9f}\n"
            f"points_a = {self.m}\n"
            f"points_b = {self.n}\n"
        )


def chamfer_distance(p: PointCloud, q: PointCloud) -> ChamferReport:
    """Sum of directed mean nearest-neighbor distances between clouds.

    Nearest neighbors come from a KD-tree but the distances are exact;
    the result is symmetric in its operands.
    """
    if len(p) == 0 or len(q) == 0:
        raise ValueError("chamfer distance needs two non-empty clouds")
    forward = cKDTree(q.points).query(p.points)[0].mean()
    backward = cKDTree(p.points).query(q.points)[0].mean()
    return ChamferReport(forward + backward, forward, backward, len(p), len(q))


def sample_mesh_surface(
    mesh: TriangleMesh, count: int = None, density: float = None, seed: int = 0
) -> PointCloud:
    """Area-weighted uniform random points on the mesh surface.

    Pass either an exact count or a density in points per mm^2.
    Sampling is seeded and reproducible.
    """
    tris = mesh.triangle_array()
    if tris.size == 0:
        raise ValueError("cannot sample an empty mesh")
    edge1 = tris[:, 1] - tris[:, 0]
    edge2 = tris[:, 2] - tris[:, 0]
    areas = 0.5 * np.linalg.norm(np.cross(edge1, edge2), axis=1)
    total = areas.sum()
    if total <= 0.0:
        raise ValueError("mesh has zero surface area")
    if count is None:
        if density is None:
            raise ValueError("need count or density")
        count = max(1, math.ceil(density * total))

    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(areas), size=count, p=areas / total)
    u = rng.random(count)
    v = rng.random(count)
    flip = u + v > 1.0
    u[flip] = 1.0 - u[flip]
    v[flip] = 1.0 - v[flip]
    pts = tris[chosen, 0] + u[:, None] * edge1[chosen] + v[:, None] * edge2[chosen]
    return PointCloud(pts)


# ------------------------------------------------------------------ sphere


@dataclass(frozen=True)
class SphereFit:
    center: np.ndarray
    radius: float
    per_point_dd: np.ndarray
    mean_dd: float


def fit_sphere(points: PointCloud) -> SphereFit:
    """Algebraic least-squares sphere through the points.

    Minimizes the linearized residual ||p||^2 - 2 c.p + ||c||^2 - r^2
    via the standard linear system in (c, r^2 - ||c||^2).  Each point's
    deviation is reported as the diameter-equivalent 2 |dist - radius|.

    Raises ValueError for fewer than 4 points or a coplanar/degenerate
    set (singular system).
    """
    pts = points.points
    if len(pts) < 4:
        raise ValueError(f"sphere fit needs at least 4 points, got {len(pts)}")
    a = np.column_stack([2.0 * pts, np.ones(len(pts))])
    b = (pts * pts).sum(axis=1)
    solution, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 4:
        raise ValueError("sphere fit is singular: points are coplanar or coincident")
    center = solution[:3]
    square = solution[3] + center @ center
    if square <= 0.0:
        raise ValueError("sphere fit collapsed to non-positive radius")
    radius = math.sqrt(square)
    dd = 2.0 * np.abs(np.linalg.norm(pts - center, axis=1) - radius)
    return SphereFit(center, radius, dd, float(dd.mean()))


# ------------------------------------------------------------------ test A


@dataclass(frozen=True)
class AccuracyReport:
    """Nine-point sphere probe outcome, one row per probe point."""

    nominal_center: np.ndarray
    nominal_diameter: float
    rows: tuple  # (latitude_deg, longitude_deg, dd_mm)
    average_dd: float
    fit: SphereFit

    def table(self) -> str:
        lines = [
            "Point  Latitude  Longitude  Diameter difference (mm)",
        ]
        for n, (lat, lon, dd) in enumerate(self.rows, start=1):
            lines.append(f"{n:>5}  {lat:>8.0f}  {lon:>9.0f}  {dd:>24.5f}")
        lines.append(f"Average {self.average_dd:.5f}")
        return "\n".join(lines) + "\n"

    def key_values(self) -> str:
        out = [
            f"nominal_diameter_mm = {self.nominal_diameter:.6f}",
            f"fitted_diameter_mm = {2.0 * self.fit.radius:.6f}",
            f"average_dd_mm = {self.average_dd:.9f}",
        ]
        for n, (lat, lon, dd) in enumerate(self.rows, start=1):
            out.append(f"dd_{n}_mm = {dd:.9f}")
        return "\n".join(out) + "\n"


def probe_directions() -> np.ndarray:
    """Unit outward normals of the nine accuracy-test points."""
    dirs = []
    for lat, lon in TEST_A_DIRECTIONS:
        la, lo = math.radians(lat), math.radians(lon)
        dirs.append(
            [math.cos(la) * math.cos(lo), math.cos(la) * math.sin(lo), math.sin(la)]
        )
    return np.array(dirs)


def _approach_pose(point: np.ndarray, outward: np.ndarray) -> Pose:
    """Tool pose touching `point` with the probe axis along -outward."""
    approach = -outward
    seed = np.array([1.0, 0.0, 0.0])
    if abs(approach @ seed) > 0.9:
        seed = np.array([0.0, 1.0, 0.0])
    x_axis = np.cross(seed, approach)
    x_axis /= np.linalg.norm(x_axis)
    y_axis = np.cross(approach, x_axis)
    return Pose(np.column_stack([x_axis, y_axis, approach]), point)


def test_a(
    center,
    diameter: float,
    geom: RobotGeometry,
    noise: NoiseModel,
) -> AccuracyReport:
    """Probe a reference sphere at nine points and fit it back.

    Each contact is simulated as the nominal surface point displaced
    radially by the contact error model (the probe travels along the
    surface normal).  The arm must reach every probe pose; placements
    it cannot reach raise UnreachableError.
    """
    if not 10.0 <= diameter <= 50.0:
        raise ValueError(
            f"reference sphere diameter must be within [10, 50] mm, got {diameter}"
        )
    center = np.asarray(center, dtype=float).reshape(3)
    radius = diameter / 2.0
    dirs = probe_directions()

    measured = []
    for index, outward in enumerate(dirs):
        nominal = center + radius * outward
        try:
            inverse_kinematics(_approach_pose(nominal, outward), geom)
        except (UnreachableError, JointLimitError) as exc:
            raise UnreachableError(
                f"sphere probe point {index + 1} at "
                f"({nominal[0]:.3f}, {nominal[1]:.3f}, {nominal[2]:.3f}): {exc}"
            ) from None
        measured.append(nominal + noise.error_at(index) * outward)

    fit = fit_sphere(PointCloud(np.array(measured)))
    rows = tuple(
        (lat, lon, float(dd))
        for (lat, lon), dd in zip(TEST_A_DIRECTIONS, fit.per_point_dd)
    )
    return AccuracyReport(center, diameter, rows, fit.mean_dd, fit)


# ------------------------------------------------------------------ test B


@dataclass(frozen=True)
class RepeatabilityReport:
    distance_from_base: float
    repeats: int
    repeatability: float  # max deviation from the centroid, the +/- value
    points: np.ndarray

    def key_values(self) -> str:
        return (
            f"distance_mm = {self.distance_from_base:.3f}\n"
            f"repeats = {self.repeats}\n"
            f"repeatability_mm = {self.repeatability:.9f}\n"
        )


def repeatability_table(reports) -> str:
    lines = ["Point distance (mm)  Point repeatability (mm)"]
    for r in reports:
        lines.append(
            f"{r.distance_from_base:>19.0f}  {'+/- %.4f' % r.repeatability:>24}"
        )
    return "\n".join(lines) + "\n"


def test_b(
    geom: RobotGeometry,
    noise: NoiseModel,
    distances=TEST_B_DISTANCES,
    repeats: int = TEST_B_REPEATS,
) -> list:
    """Probe one table point per distance `repeats` times.

    The point sits on the table plane at (distance, 0, 0); each touch
    is displaced vertically by the error model, consuming consecutive
    contact ordinals across the whole test.  Repeatability is the
    worst distance of any touch from the centroid of its group.
    """
    if repeats < 2:
        raise ValueError("repeatability needs at least 2 repeats")
    reports = []
    for which, distance in enumerate(distances):
        ok, why = is_reachable((distance, 0.0, 0.0), geom)
        if not ok:
            raise UnreachableError(f"test point at {distance} mm: {why}")
        zs = np.array(
            [
                noise.error_at(which * repeats + j)
                for j in range(repeats)
            ]
        )
        pts = np.column_stack(
            [np.full(repeats, distance), np.zeros(repeats), zs]
        )
        deviation = np.linalg.norm(pts - pts.mean(axis=0), axis=1).max()
        reports.append(
            RepeatabilityReport(distance, repeats, float(deviation), pts)
        )
    return reports
