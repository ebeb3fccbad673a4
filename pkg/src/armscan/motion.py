"""Straight-line Cartesian planning and the touch-probe motion cycle.

Planning is quasi-static: a path is a uniform chain of position
waypoints under a constant tool orientation, solved joint-by-joint
through the closed-form IK.  No velocity profile exists; the trace is
the sequence an open-loop controller would stream.

A probe cycle is three such lines: lateral travel at the safe height,
descent to the contact, retract back to the safe height.  Contact
heights come from the scene's exact raycast; the descent step size only
shapes the joint log, never the measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import (
    TOOL_DOWN_ROTATION,
    JointAngles,
    JointLimitError,
    Pose,
    RobotGeometry,
    UnreachableError,
    inverse_kinematics,
)
from .scene import CONTACT_UNREACHABLE, ContactResult, NoiseModel, TargetScene, probe_contact

DEFAULT_STEP = 5.0


@dataclass
class LinearPath:
    """Uniformly sampled segment with a fixed tool orientation."""

    start: np.ndarray
    end: np.ndarray
    orientation: np.ndarray = None
    step: float = DEFAULT_STEP

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float).reshape(3)
        self.end = np.asarray(self.end, dtype=float).reshape(3)
        if self.orientation is None:
            self.orientation = TOOL_DOWN_ROTATION.copy()
        self.orientation = np.asarray(self.orientation, dtype=float).reshape(3, 3)
        if self.step <= 0.0:
            raise ValueError(f"step must be positive, got {self.step}")

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def waypoints(self) -> np.ndarray:
        """Uniform interpolation, endpoints exact, spacing <= step.

        A degenerate segment yields the single start point.  The 1e-9
        slack keeps an exact multiple of step from picking up a phantom
        extra interval through float rounding.
        """
        if self.length < 1e-12:
            return self.start[None, :].copy()
        intervals = max(1, math.ceil(self.length / self.step - 1e-9))
        t = np.arange(intervals + 1) / intervals
        return self.start + t[:, None] * (self.end - self.start)


@dataclass
class JointTrace:
    """Ordered joint-space log: (waypoint index, JointAngles) pairs."""

    entries: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def add(self, angles: JointAngles) -> None:
        self.entries.append((len(self.entries), angles))

    def extend(self, other: "JointTrace") -> None:
        """Append another trace, renumbering onto this one's tail."""
        for _, angles in other.entries:
            self.add(angles)

    def angles_array(self) -> np.ndarray:
        if not self.entries:
            return np.zeros((0, 6))
        return np.array([angles for _, angles in self.entries])

    def to_csv(self) -> str:
        lines = ["waypoint,theta1_deg,theta2_deg,theta3_deg,theta4_deg,theta5_deg,theta6_deg"]
        for idx, angles in self.entries:
            degs = ",".join(f"{math.degrees(a):.6f}" for a in angles)
            lines.append(f"{idx},{degs}")
        return "\n".join(lines) + "\n"


def plan_line(path: LinearPath, geom: RobotGeometry) -> JointTrace:
    """Solve IK along the path; failures identify the waypoint.

    Raises UnreachableError or JointLimitError naming the offending
    waypoint index and position.
    """
    trace = JointTrace()
    for i, pos in enumerate(path.waypoints()):
        where = f"waypoint {i} at ({pos[0]:.3f}, {pos[1]:.3f}, {pos[2]:.3f})"
        try:
            angles, _ = inverse_kinematics(Pose(path.orientation, pos), geom)
        except UnreachableError as exc:
            raise UnreachableError(f"{where}: {exc}") from None
        except JointLimitError as exc:
            raise JointLimitError(exc.joint, exc.value, *exc.limits, context=where) from None
        trace.add(angles)
    return trace


def _append_leg(trace: JointTrace, leg: JointTrace, skip_first: bool) -> None:
    for n, (_, angles) in enumerate(leg.entries):
        if skip_first and n == 0:
            continue
        trace.add(angles)


def probe_cycle(
    x: float,
    y: float,
    *,
    safe_z: float,
    geom: RobotGeometry,
    scene: TargetScene,
    noise: NoiseModel,
    contact_index: int,
    from_xy=None,
    step: float = DEFAULT_STEP,
) -> tuple:
    """One touch: travel over (x, y), descend to contact, retract.

    Returns (ContactResult, JointTrace).  The trace starts and ends at
    the safe height; seam waypoints shared between legs appear once.
    If any leg of the cycle cannot be solved, the point is marked
    unreachable (kind distinct from a no-contact miss) and the trace
    holds only the lateral travel, still ending at the safe height.
    """
    trace = JointTrace()
    try:
        if from_xy is not None:
            lateral = plan_line(
                LinearPath(
                    [from_xy[0], from_xy[1], safe_z], [x, y, safe_z], step=step
                ),
                geom,
            )
            _append_leg(trace, lateral, skip_first=False)

        contact = probe_contact(x, y, contact_index, scene, noise)
        z_stop = contact.z_measured if contact.touched else scene.table_z
        descend = plan_line(
            LinearPath([x, y, safe_z], [x, y, z_stop], step=step), geom
        )
        retract = plan_line(
            LinearPath([x, y, z_stop], [x, y, safe_z], step=step), geom
        )
    except (UnreachableError, JointLimitError):
        # trace holds at most the lateral leg, still at the safe height
        return ContactResult(x, y, kind=CONTACT_UNREACHABLE), trace

    _append_leg(trace, descend, skip_first=from_xy is not None)
    _append_leg(trace, retract, skip_first=True)
    return contact, trace
