"""Closed-form kinematics of a 6-DoF arm with a spherical wrist.

The arm is modelled as a yaw base, a two-link planar arm working in the
vertical plane selected by the base yaw, and a ZYZ wrist whose three axes
meet at the wrist center.  Five lengths describe the geometry:

    d1  vertical offset from the base frame to the shoulder
    l1  radial offset from the yaw axis to the shoulder
    l2  upper-arm length (shoulder to elbow)
    d4  forearm length (elbow to wrist center)
    d6  tool offset from the wrist center to the probe tip, along the
        tool approach axis

The wrist carrier frame keeps its z axis vertical for every arm posture
(the joint-2/joint-3 rotations are compensated ahead of the wrist, as on
belt-coupled arms), so joint 5 measures the tool tilt from vertical and a
straight-down tool is exactly the wrist-singular configuration.

Joint zero datums ("home" = all joints zero = arm pointing straight up):

    theta2 = 0  when the upper arm is vertical; the geometric elevation of
                the upper arm above the horizontal is theta2 + pi/2
    theta3 = 0  when the arm is fully stretched; the interior elbow angle
                is pi - theta3, positive theta3 folds the forearm down

Both offsets are exposed as module constants.  Only the elbow-up branch is
solved: the elbow always sits above the shoulder-to-wrist chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

# Geometric-angle <-> joint-variable datums (see module docstring).
SHOULDER_ELEVATION_OFFSET = math.pi / 2.0
ELBOW_STRAIGHT_INTERIOR = math.pi

# acos arguments within this distance of [-1, 1] are clamped (treated as
# exactly reachable); beyond it the target is out of the workspace.
ACOS_CLAMP_TOL = 1e-12

# Below this |sin(theta5)| the wrist roll axes align and theta4 is
# indeterminate; it is pinned to 0 and the solution flagged.
WRIST_SINGULAR_TOL = 1e-12

# Grace on limit checks: solved angles may sit an epsilon past a limit
# when the target lies exactly on the boundary.
LIMIT_GRACE = 1e-9

DEFAULT_JOINT_LIMITS_DEG = (
    (-180.0, 180.0),
    (-135.0, 135.0),
    (0.0, 170.0),
    (-180.0, 180.0),
    (0.0, 180.0),
    (-180.0, 180.0),
)

# Probe pointing straight down: approach = -z, tool x kept along base x.
TOOL_DOWN_ROTATION = np.array(
    [
        [1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, -1.0],
    ]
)


class UnreachableError(Exception):
    """Target pose lies outside the position workspace."""


class JointLimitError(Exception):
    """A solved joint angle violates its configured limit interval."""

    def __init__(self, joint: int, value: float, lo: float, hi: float, context: str = ""):
        self.joint = joint
        self.value = value
        self.limits = (lo, hi)
        msg = (
            f"joint {joint} angle {math.degrees(value):.3f} deg outside "
            f"[{math.degrees(lo):.3f}, {math.degrees(hi):.3f}] deg"
        )
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.fmod(a + math.pi, 2.0 * math.pi)
    if r <= 0.0:
        r += 2.0 * math.pi
    return r - math.pi


class JointAngles(NamedTuple):
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta5: float
    theta6: float

    @classmethod
    def from_sequence(cls, values) -> "JointAngles":
        vals = [float(v) for v in values]
        if len(vals) != 6:
            raise ValueError(f"expected 6 joint angles, got {len(vals)}")
        return cls(*vals)

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


class WristCenter(NamedTuple):
    xc: float
    yc: float
    zc: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class RobotGeometry:
    """Link lengths (mm) and joint limit intervals (radians)."""

    d1: float = 170.0
    l1: float = 65.0
    l2: float = 305.0
    d4: float = 222.0
    d6: float = 70.0
    joint_limits: tuple = field(
        default=tuple(
            (math.radians(lo), math.radians(hi)) for lo, hi in DEFAULT_JOINT_LIMITS_DEG
        )
    )

    def __post_init__(self):
        for name in ("d1", "l2", "d4", "d6"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.l1 < 0.0:
            raise ValueError(f"l1 must be non-negative, got {self.l1}")
        if len(self.joint_limits) != 6:
            raise ValueError("joint_limits must hold 6 (lo, hi) intervals")
        for j, (lo, hi) in enumerate(self.joint_limits, start=1):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"joint {j} limit interval ({lo}, {hi}) is invalid")

    @property
    def max_reach(self) -> float:
        return self.l1 + self.l2 + self.d4 + self.d6

    def in_limits(self, angles: JointAngles) -> bool:
        return all(
            lo - LIMIT_GRACE <= a <= hi + LIMIT_GRACE
            for a, (lo, hi) in zip(angles, self.joint_limits)
        )

    def check_limits(self, angles: JointAngles, context: str = "") -> None:
        for j, (a, (lo, hi)) in enumerate(zip(angles, self.joint_limits), start=1):
            if not (lo - LIMIT_GRACE <= a <= hi + LIMIT_GRACE):
                raise JointLimitError(j, a, lo, hi, context)


@dataclass
class Pose:
    """End-effector frame: 3x3 rotation plus position (mm).

    The homogeneous bottom row [0 0 0 1] is implicit.  Column 3 of the
    rotation is the tool approach axis; the probe tip sits d6 along it
    from the wrist center.
    """

    rotation: np.ndarray
    position: np.ndarray

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        self.position = np.asarray(self.position, dtype=float).reshape(3)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, matrix) -> "Pose":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        return cls(m[:3, :3].copy(), m[:3, 3].copy())

    @classmethod
    def tool_down(cls, x: float, y: float, z: float) -> "Pose":
        return cls(TOOL_DOWN_ROTATION.copy(), np.array([x, y, z], dtype=float))

    @property
    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.position
        return m

    @property
    def approach(self) -> np.ndarray:
        return self.rotation[:, 2]

    def rotation_error(self) -> float:
        """Max deviation of R from a proper rotation (orthonormality + det)."""
        r = self.rotation
        ortho = np.abs(r.T @ r - np.eye(3)).max()
        return max(ortho, abs(np.linalg.det(r) - 1.0))

    def is_orthonormal(self, tol: float = 1e-9) -> bool:
        return self.rotation_error() <= tol


@dataclass(frozen=True)
class IkTrace:
    """Intermediate quantities of the position solve, r-z plane view.

    z        wrist-center elevation above the shoulder (mm)
    radial   in-plane distance from the shoulder to the wrist center (mm)
    chord    straight-line shoulder-to-wrist-center distance (mm)
    alpha    elevation of the chord above the horizontal (rad)
    beta     angle at the shoulder between chord and upper arm (rad)
    """

    z: float
    radial: float
    chord: float
    alpha: float
    beta: float
    wrist_singular: bool = False


def _rotz(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _roty(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def forward_kinematics(angles: JointAngles, geom: RobotGeometry) -> Pose:
    """Probe-tip pose for a joint tuple.

    Total on any finite angles; joint limits are the caller's contract.
    """
    t1, t2, t3, t4, t5, t6 = angles
    # Radial direction selected by the base yaw, in the horizontal plane.
    c1, s1 = math.cos(t1), math.sin(t1)
    elev2 = t2 + SHOULDER_ELEVATION_OFFSET          # upper-arm elevation
    elev3 = elev2 - t3                              # forearm elevation
    r_in_plane = (
        geom.l1
        + geom.l2 * math.cos(elev2)
        + geom.d4 * math.cos(elev3)
    )
    zc = geom.d1 + geom.l2 * math.sin(elev2) + geom.d4 * math.sin(elev3)
    center = np.array([r_in_plane * c1, r_in_plane * s1, zc])

    rotation = _rotz(t1 + t4) @ _roty(t5) @ _rotz(t6)
    position = center + geom.d6 * rotation[:, 2]
    return Pose(rotation, position)


def fk_frames(angles: JointAngles, geom: RobotGeometry) -> list:
    """4x4 frames after each link: shoulder, elbow, wrist carrier,
    joint-4, joint-5, probe tip.  The wrist carrier keeps z vertical."""
    t1, t2, t3, t4, t5, t6 = angles

    def h(rot: np.ndarray, trans: np.ndarray) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = rot
        m[:3, 3] = trans
        return m

    frames = []
    base_yaw = _rotz(t1)
    shoulder = h(base_yaw, base_yaw @ np.array([geom.l1, 0.0, geom.d1]))
    frames.append(shoulder)

    upper = shoulder @ h(_roty(-t2), np.zeros(3)) @ h(np.eye(3), np.array([0.0, 0.0, geom.l2]))
    frames.append(upper)

    fore = upper @ h(_roty(t3), np.zeros(3)) @ h(np.eye(3), np.array([0.0, 0.0, geom.d4]))
    # Carrier compensation: undo the arm pitch so the wrist z stays vertical.
    carrier = fore @ h(_roty(t2 - t3), np.zeros(3))
    frames.append(carrier)

    j4 = carrier @ h(_rotz(t4), np.zeros(3))
    frames.append(j4)
    j5 = j4 @ h(_roty(t5), np.zeros(3))
    frames.append(j5)
    tip = j5 @ h(_rotz(t6), np.zeros(3)) @ h(np.eye(3), np.array([0.0, 0.0, geom.d6]))
    frames.append(tip)
    return frames


def wrist_center(pose: Pose, geom: RobotGeometry) -> WristCenter:
    """Wrist-center position: tip position backed off d6 along the approach."""
    p = pose.position
    a = pose.rotation[:, 2]
    return WristCenter(
        p[0] - geom.d6 * a[0],
        p[1] - geom.d6 * a[1],
        p[2] - geom.d6 * a[2],
    )


def _acos_or_unreachable(value: float, what: str) -> float:
    if value > 1.0 + ACOS_CLAMP_TOL or value < -1.0 - ACOS_CLAMP_TOL:
        raise UnreachableError(f"{what}: cosine argument {value:.6f} outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, value)))


def _solve_branch(
    pose: Pose, geom: RobotGeometry, theta1: float, radial: float, z: float
) -> tuple:
    chord = math.hypot(radial, z)
    if chord < 1e-9:
        raise UnreachableError("wrist center coincides with the shoulder")
    alpha = math.atan2(z, radial)

    l2, d4 = geom.l2, geom.d4
    interior = _acos_or_unreachable(
        (l2 * l2 + d4 * d4 - chord * chord) / (2.0 * l2 * d4),
        f"elbow triangle (chord {chord:.3f} mm, annulus "
        f"[{abs(l2 - d4):.3f}, {l2 + d4:.3f}])",
    )
    theta3 = ELBOW_STRAIGHT_INTERIOR - interior
    # Shoulder angle from the solved elbow angle rather than a second
    # acos: the pair then closes the triangle exactly, which keeps the
    # round trip tight even at the stretched (interior = pi) boundary
    # where independent acos calls are ill-conditioned.
    beta = math.atan2(
        d4 * math.sin(theta3), l2 + d4 * math.cos(theta3)
    )

    theta2 = normalize_angle(alpha + beta - SHOULDER_ELEVATION_OFFSET)

    # Wrist: ZYZ angles of the rotation seen from the (vertical-z) carrier.
    r = pose.rotation
    c1, s1 = math.cos(theta1), math.sin(theta1)
    m13 = c1 * r[0, 2] + s1 * r[1, 2]
    m23 = -s1 * r[0, 2] + c1 * r[1, 2]
    m11 = c1 * r[0, 0] + s1 * r[1, 0]
    m21 = -s1 * r[0, 0] + c1 * r[1, 0]
    m31 = r[2, 0]
    m32 = r[2, 1]
    m33 = r[2, 2]

    # atan2 keeps the tilt relative-accurate where acos(m33) would
    # round tiny tilts to zero and drop a d6-scaled tip offset
    sin5 = math.hypot(m13, m23)
    theta5 = math.atan2(sin5, m33)
    wrist_singular = sin5 <= WRIST_SINGULAR_TOL
    if wrist_singular:
        theta4 = 0.0
        if m33 > 0.0:
            theta5 = 0.0
            theta6 = math.atan2(m21, m11)
        else:
            theta5 = math.pi
            theta6 = math.atan2(m21, -m11)
    else:
        theta4 = math.atan2(m23, m13)
        theta6 = math.atan2(m32, -m31)

    angles = JointAngles(
        theta1,
        theta2,
        theta3,
        normalize_angle(theta4),
        theta5,
        normalize_angle(theta6),
    )
    geom.check_limits(angles, "inverse kinematics")
    trace = IkTrace(z, radial, chord, alpha, beta, wrist_singular)
    return angles, trace


def inverse_kinematics(pose: Pose, geom: RobotGeometry) -> tuple:
    """Solve the elbow-up joint tuple reproducing `pose`.

    Returns (JointAngles, IkTrace).  All quadrant-sensitive inverse
    tangents are two-argument.  A straight-down (or straight-up) tool
    makes joint 4 indeterminate; it is pinned to 0 and the trace flags
    ``wrist_singular``.

    The base yaw aims at the wrist center.  Postures that carry the
    wrist center across the base axis (upper arm pitched past vertical)
    have no solution with that yaw; they are recovered by the
    back-reaching branch, yaw turned half a turn with the wrist center
    behind the shoulder (negative radial).  Both branches are elbow-up;
    the aimed branch wins when it exists.

    Raises UnreachableError when the wrist center falls outside the
    two-link annulus in both branches, JointLimitError when a solved
    angle violates its interval, ValueError on a non-orthonormal
    rotation.
    """
    if not pose.is_orthonormal(1e-9):
        raise ValueError(
            f"pose rotation is not orthonormal (error {pose.rotation_error():.2e})"
        )

    xc, yc, zc = wrist_center(pose, geom)
    azimuth = math.atan2(yc, xc)
    planar = math.hypot(xc, yc)
    z = zc - geom.d1

    try:
        return _solve_branch(pose, geom, azimuth, planar - geom.l1, z)
    except (UnreachableError, JointLimitError) as aimed_error:
        try:
            return _solve_branch(
                pose, geom, normalize_angle(azimuth + math.pi), -planar - geom.l1, z
            )
        except (UnreachableError, JointLimitError):
            raise aimed_error from None


def is_reachable(point, geom: RobotGeometry) -> tuple:
    """Whether a straight-down probe pose at `point` (mm) is solvable.

    Returns (ok, diagnostic); the diagnostic names the failing check.
    """
    x, y, z = (float(v) for v in point)
    try:
        inverse_kinematics(Pose.tool_down(x, y, z), geom)
    except UnreachableError as exc:
        return False, str(exc)
    except JointLimitError as exc:
        return False, str(exc)
    return True, "reachable"
