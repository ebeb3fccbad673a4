"""Parametric target objects for scans and benchmarks.

The wing is a cambered four-digit-style airfoil section (6% camber at
40% chord, 9% thickness for the default), extruded along the span and
laid flat: the mesh is the upper surface as a height field touching
z = 0 along its edges, which is what a top-probing scan can see.
"""

from __future__ import annotations

import math

import numpy as np

from .meshio import Triangle, TriangleMesh


def make_plate(x0: float, y0: float, width: float, depth: float, z: float) -> TriangleMesh:
    """Flat rectangular plate at height z, two triangles."""
    a = [x0, y0, z]
    b = [x0 + width, y0, z]
    c = [x0 + width, y0 + depth, z]
    d = [x0, y0 + depth, z]
    return TriangleMesh(
        [Triangle.from_vertices(a, b, c), Triangle.from_vertices(a, c, d)]
    )


def _camber_line(s: float, camber: float, camber_pos: float) -> float:
    if s < camber_pos:
        return camber / camber_pos**2 * (2.0 * camber_pos * s - s * s)
    return (
        camber
        / (1.0 - camber_pos) ** 2
        * ((1.0 - 2.0 * camber_pos) + 2.0 * camber_pos * s - s * s)
    )


def _half_thickness(s: float, thickness: float) -> float:
    return (
        5.0
        * thickness
        * (
            0.2969 * math.sqrt(s)
            - 0.1260 * s
            - 0.3516 * s * s
            + 0.2843 * s**3
            - 0.1015 * s**4
        )
    )


def wing_upper_surface(
    s: float, chord: float, camber: float = 0.06,
    camber_pos: float = 0.4, thickness: float = 0.09,
) -> float:
    """Upper-surface height at chordwise fraction s in [0, 1]."""
    if s <= 0.0 or s >= 1.0:
        s = min(1.0, max(0.0, s))
    return chord * (
        _camber_line(s, camber, camber_pos) + _half_thickness(s, thickness)
    )


def make_wing(
    x0: float,
    y0: float,
    span: float = 150.0,
    chord: float = 140.0,
    n_span: int = 61,
    n_chord: int = 81,
    camber: float = 0.06,
    camber_pos: float = 0.4,
    thickness: float = 0.09,
) -> TriangleMesh:
    """Wing upper surface over [x0, x0+span] x [y0, y0+chord].

    Span stations are uniform; chord stations are cosine-spaced to
    resolve the blunt leading edge.  Heights are >= 0 everywhere and
    reach 0 at the leading edge, so the sheet rests on the table.
    """
    xs = np.linspace(x0, x0 + span, n_span)
    fractions = (1.0 - np.cos(np.linspace(0.0, math.pi, n_chord))) / 2.0
    ys = y0 + fractions * chord
    zs = np.array(
        [wing_upper_surface(s, chord, camber, camber_pos, thickness) for s in fractions]
    )

    mesh = TriangleMesh()
    for a in range(n_span - 1):
        for b in range(n_chord - 1):
            p00 = [xs[a], ys[b], zs[b]]
            p01 = [xs[a], ys[b + 1], zs[b + 1]]
            p10 = [xs[a + 1], ys[b], zs[b]]
            p11 = [xs[a + 1], ys[b + 1], zs[b + 1]]
            mesh.add(Triangle.from_vertices(p00, p10, p11))
            mesh.add(Triangle.from_vertices(p00, p11, p01))
    return mesh
