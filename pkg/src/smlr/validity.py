"""Per-level constraint checking: robot models, state and motion validity.

A :class:`LevelValidity` owns the robot geometry of one abstraction level and
the shared obstacle list.  All checks are vectorized over batches of states so
a discretized motion can be validated in a single numpy pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (Box, Disc, Obstacle, Polygon, points_in_polygon,
                       points_to_segments_dist, segments_intersect,
                       segments_to_segments_dist)
from .spaces import StateSpace


# -- posed-polygon helpers (robot polygon differs per state) ----------------

def _posed_vertices(local_vertices, xy, theta):
    """Rigid transform of local vertices for m poses -> (m, nv, 2)."""
    c, s = np.cos(theta), np.sin(theta)
    vx, vy = local_vertices[:, 0], local_vertices[:, 1]
    px = c[:, None] * vx[None, :] - s[:, None] * vy[None, :] + xy[:, 0:1]
    py = s[:, None] * vx[None, :] + c[:, None] * vy[None, :] + xy[:, 1:2]
    return np.stack([px, py], axis=-1)


def _posed_contains(verts, points):
    """Even-odd containment of fixed points in per-pose polygons -> (m, p)."""
    a = verts                                  # (m, nv, 2)
    b = np.roll(verts, -1, axis=1)
    x = points[None, :, None, 0]
    y = points[None, :, None, 1]
    ax, ay = a[:, None, :, 0], a[:, None, :, 1]
    bx, by = b[:, None, :, 0], b[:, None, :, 1]
    cond = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = ax + (y - ay) * (bx - ax) / (by - ay)
    crossings = np.sum(cond & (x < xint), axis=2)
    return (crossings % 2) == 1


def _posed_edges_point_dist(verts, point):
    """Min distance from a fixed point to each pose's polygon edges -> (m,)."""
    a = verts
    b = np.roll(verts, -1, axis=1)
    d = b - a
    dd = np.sum(d * d, axis=2)
    ap = point[None, None, :] - a
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.sum(ap * d, axis=2) / dd
    t = np.where(dd == 0.0, 0.0, np.clip(t, 0.0, 1.0))
    closest = a + t[:, :, None] * d
    return np.linalg.norm(point[None, None, :] - closest, axis=2).min(axis=1)


# -- robot models ------------------------------------------------------------

class RobotModel:
    """Maps level states to workspace geometry and tests obstacle overlap."""

    def collides(self, coords: np.ndarray, obstacle: Obstacle) -> np.ndarray:
        raise NotImplementedError

    def in_workspace(self, coords, lo, hi) -> np.ndarray:
        raise NotImplementedError

    def reference_points(self, coords: np.ndarray) -> np.ndarray:
        """Workspace positions used for clearance queries -> (m, d)."""
        raise NotImplementedError


@dataclass
class PointRobot(RobotModel):
    position_indices: tuple = (0, 1)

    def _pos(self, coords):
        return coords[:, list(self.position_indices)]

    reference_points = _pos

    def collides(self, coords, obstacle):
        return obstacle.signed_distance(self._pos(coords)) <= 0.0

    def in_workspace(self, coords, lo, hi):
        p = self._pos(coords)
        return np.all((p >= lo) & (p <= hi), axis=1)


@dataclass
class DiscRobot(RobotModel):
    radius: float = 0.05
    position_indices: tuple = (0, 1)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disc robot radius must be positive")

    def _pos(self, coords):
        return coords[:, list(self.position_indices)]

    reference_points = _pos

    def collides(self, coords, obstacle):
        return obstacle.signed_distance(self._pos(coords)) <= self.radius

    def in_workspace(self, coords, lo, hi):
        p = self._pos(coords)
        return np.all((p >= lo + self.radius) & (p <= hi - self.radius),
                      axis=1)


@dataclass
class PolygonRobot(RobotModel):
    """Rigid (possibly non-convex) polygon posed by (x, y, theta) coords."""

    vertices: np.ndarray = None
    pose_indices: tuple = (0, 1, 2)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[0] < 3:
            raise ValueError("polygon robot needs >= 3 vertices")

    def _verts(self, coords):
        i, j, k = self.pose_indices
        xy = coords[:, [i, j]]
        theta = coords[:, k]
        return _posed_vertices(self.vertices, xy, theta)

    def reference_points(self, coords):
        i, j, _ = self.pose_indices
        return coords[:, [i, j]]

    def collides(self, coords, obstacle):
        verts = self._verts(coords)
        m, nv, _ = verts.shape
        flat = verts.reshape(m * nv, 2)
        hit = (obstacle.signed_distance(flat) <= 0.0).reshape(m, nv).any(axis=1)
        if isinstance(obstacle, Disc):
            center_in = _posed_contains(verts, obstacle.center[None, :])[:, 0]
            near = _posed_edges_point_dist(verts, obstacle.center) \
                <= obstacle.radius
            return hit | center_in | near
        seg = obstacle.boundary_segments()
        if seg is None:
            return hit
        oa, ob = seg
        corner_in = _posed_contains(verts, oa).any(axis=1)
        ra = flat
        rb = np.roll(verts, -1, axis=1).reshape(m * nv, 2)
        crossing = segments_intersect(ra, rb, oa, ob) \
            .reshape(m, nv, -1).any(axis=(1, 2))
        return hit | corner_in | crossing

    def in_workspace(self, coords, lo, hi):
        verts = self._verts(coords)
        return np.all((verts >= lo) & (verts <= hi), axis=(1, 2))

    def boundary_dist(self, coords, obstacle):
        """Distance from the posed boundary to the obstacle (unsigned)."""
        verts = self._verts(coords)
        m, nv, _ = verts.shape
        ra = verts.reshape(m * nv, 2)
        rb = np.roll(verts, -1, axis=1).reshape(m * nv, 2)
        if isinstance(obstacle, Disc):
            d = points_to_segments_dist(
                obstacle.center[None, :],
                ra, rb).reshape(m, nv).min(axis=1) - obstacle.radius
            return d
        oa, ob = obstacle.boundary_segments()
        d = segments_to_segments_dist(ra, rb, oa, ob)
        return d.reshape(m, nv, -1).min(axis=(1, 2))


@dataclass
class ChainRobot(RobotModel):
    """Planar kinematic chain: base position plus relative joint angles.

    Links are capsules of half-width link_radius; self-collision is ignored.
    """

    link_lengths: tuple = (0.1, 0.1)
    link_radius: float = 0.01
    base_indices: tuple = (0, 1)
    angle_indices: tuple = (2, 3)

    def __post_init__(self):
        if len(self.angle_indices) != len(self.link_lengths):
            raise ValueError("one joint angle per link required")
        if self.link_radius <= 0 or any(l <= 0 for l in self.link_lengths):
            raise ValueError("link geometry must be positive")

    def joints(self, coords):
        """Joint positions including the base -> (m, L+1, 2)."""
        base = coords[:, list(self.base_indices)]
        angles = np.cumsum(coords[:, list(self.angle_indices)], axis=1)
        lengths = np.asarray(self.link_lengths, dtype=float)
        steps = lengths[None, :, None] * np.stack(
            [np.cos(angles), np.sin(angles)], axis=-1)
        pts = np.concatenate([base[:, None, :],
                              base[:, None, :] + np.cumsum(steps, axis=1)],
                             axis=1)
        return pts

    def reference_points(self, coords):
        return coords[:, list(self.base_indices)]

    def _links(self, coords):
        j = self.joints(coords)
        return j[:, :-1, :], j[:, 1:, :]

    def collides(self, coords, obstacle):
        a, b = self._links(coords)
        m, L, _ = a.shape
        fa, fb = a.reshape(m * L, 2), b.reshape(m * L, 2)
        if isinstance(obstacle, Disc):
            d = points_to_segments_dist(obstacle.center[None, :], fa, fb)
            d = d.reshape(m, L).min(axis=1)
            return d <= obstacle.radius + self.link_radius
        near_end = (obstacle.signed_distance(fa) <= self.link_radius) | \
                   (obstacle.signed_distance(fb) <= self.link_radius)
        near_end = near_end.reshape(m, L).any(axis=1)
        seg = obstacle.boundary_segments()
        if seg is None:
            return near_end
        oa, ob = seg
        d = segments_to_segments_dist(fa, fb, oa, ob)
        crossing = (d.reshape(m, L, -1) <= self.link_radius).any(axis=(1, 2))
        return near_end | crossing

    def in_workspace(self, coords, lo, hi):
        j = self.joints(coords)
        r = self.link_radius
        return np.all((j >= lo + r) & (j <= hi - r), axis=(1, 2))

    def boundary_dist(self, coords, obstacle):
        a, b = self._links(coords)
        m, L, _ = a.shape
        fa, fb = a.reshape(m * L, 2), b.reshape(m * L, 2)
        if isinstance(obstacle, Disc):
            d = points_to_segments_dist(obstacle.center[None, :], fa, fb)
            d = d.reshape(m, L).min(axis=1) - obstacle.radius
        else:
            oa, ob = obstacle.boundary_segments()
            d = segments_to_segments_dist(fa, fb, oa, ob)
            d = d.reshape(m, L, -1).min(axis=(1, 2))
        return d - self.link_radius


# -- level validity ----------------------------------------------------------

@dataclass
class LevelValidity:
    """Constraint function of one level: robot + shared obstacles.

    check_resolution is the motion discretization step as a fraction of the
    space's max extent.
    """

    space: StateSpace
    robot: RobotModel
    obstacles: list = field(default_factory=list)
    workspace_lo: np.ndarray | None = None
    workspace_hi: np.ndarray | None = None
    check_resolution: float = 0.01

    def __post_init__(self):
        if not 0 < self.check_resolution <= 1:
            raise ValueError("check_resolution must be in (0, 1]")
        self._extent = self.space.max_extent()

    def valid_mask(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords[None, :]
        ok = np.ones(len(coords), dtype=bool)
        if self.workspace_lo is not None:
            ok &= self.robot.in_workspace(coords, self.workspace_lo,
                                          self.workspace_hi)
        for obs in self.obstacles:
            if not ok.any():
                break
            idx = np.nonzero(ok)[0]
            ok[idx] &= ~self.robot.collides(coords[idx], obs)
        return ok

    def is_valid(self, x) -> bool:
        return bool(self.valid_mask(np.asarray(x, dtype=float)[None, :])[0])

    def motion_valid(self, a, b) -> bool:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        length = self.space.distance(a, b)
        step = self.check_resolution * self._extent
        n = max(1, int(math.ceil(length / step)))
        svals = np.linspace(0.0, 1.0, n + 1)
        pts = self.space.interpolate_many(a, b, svals)
        return bool(self.valid_mask(pts).all())

    def clearance(self, x) -> float:
        """Signed distance from the robot geometry to the nearest obstacle.

        Exact for point and disc robots; for polygon/chain robots the
        magnitude is the boundary separation with the sign taken from
        is_valid (containment depth is not resolved).
        """
        x = np.asarray(x, dtype=float)[None, :]
        if not self.obstacles:
            return math.inf
        if isinstance(self.robot, PointRobot):
            return float(min(o.signed_distance(
                self.robot.reference_points(x))[0] for o in self.obstacles))
        if isinstance(self.robot, DiscRobot):
            return float(min(o.signed_distance(
                self.robot.reference_points(x))[0] - self.robot.radius
                for o in self.obstacles))
        mag = float(min(self.robot.boundary_dist(x, o)[0]
                        for o in self.obstacles))
        sign = 1.0 if self.is_valid(x[0]) else -1.0
        return sign * abs(mag)
