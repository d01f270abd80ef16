"""Composable geometric state spaces: real boxes, circles and weighted products.

Every space is internally flattened to per-coordinate arrays (bounds, weight,
wrap flag), so the metric is a weighted Euclidean norm with wrap-around
handling on circular coordinates.  States are plain float64 numpy arrays of
length ``space.dim``; circular coordinates are kept normalized to [0, 2*pi).
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


class StateSpace:
    """Base class; concrete spaces fill in the flat per-coordinate arrays.

    Attributes:
        dim: number of coordinates.
        lo, hi: per-coordinate bounds (circles use [0, 2*pi)).
        weights: per-coordinate metric weight (>0).
        circular: boolean mask of wrap-around coordinates.
    """

    dim: int
    lo: np.ndarray
    hi: np.ndarray
    weights: np.ndarray
    circular: np.ndarray

    def _init_flat(self, lo, hi, weights, circular):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.circular = np.asarray(circular, dtype=bool)
        self.dim = len(self.lo)
        if np.any(self.lo >= self.hi):
            raise ValueError("lower bound must be strictly below upper bound")
        if np.any(self.weights <= 0):
            raise ValueError("metric weights must be positive")

    # -- state handling ----------------------------------------------------

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(
                f"state has shape {x.shape}, expected ({self.dim},)")
        return x

    def normalize(self, x) -> np.ndarray:
        """Return a copy with circular coordinates wrapped into [0, 2*pi)."""
        x = self._check(x).copy()
        x[self.circular] = np.mod(x[self.circular], TWO_PI)
        return x

    def contains(self, x, atol: float = 1e-9) -> bool:
        x = self._check(x)
        return bool(np.all(x >= self.lo - atol) and np.all(x <= self.hi + atol))

    # -- metric ------------------------------------------------------------

    def _diff(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Per-coordinate difference b - a, shortest-arc on circles."""
        d = b - a
        if np.any(self.circular):
            c = self.circular
            d[..., c] = np.mod(d[..., c] + math.pi, TWO_PI) - math.pi
        return d

    def _absdiff(self, a, b) -> np.ndarray:
        """Per-coordinate |b - a| with circular wrap; exactly symmetric."""
        d = np.abs(b - a)
        if np.any(self.circular):
            c = self.circular
            dc = np.mod(d[..., c], TWO_PI)
            d[..., c] = np.minimum(dc, TWO_PI - dc)
        return d

    def distance(self, a, b) -> float:
        a = self._check(a)
        b = self._check(b)
        d = self._absdiff(a, b)
        return float(math.sqrt(np.dot(self.weights, d * d)))

    def distance_many(self, q, pts: np.ndarray) -> np.ndarray:
        """Distances from a single state q to each row of pts, vectorized."""
        q = self._check(q)
        pts = np.asarray(pts, dtype=float)
        d = self._absdiff(q, pts)
        return np.sqrt((d * d) @ self.weights)

    # -- interpolation -----------------------------------------------------

    def interpolate(self, a, b, s: float) -> np.ndarray:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"interpolation parameter {s} outside [0, 1]")
        a = self._check(a)
        b = self._check(b)
        x = a + s * self._diff(a, b)
        x[self.circular] = np.mod(x[self.circular], TWO_PI)
        return x

    def interpolate_many(self, a, b, svals: np.ndarray) -> np.ndarray:
        """Interpolated states for each s in svals; shape (len(svals), dim)."""
        a = self._check(a)
        b = self._check(b)
        svals = np.asarray(svals, dtype=float)
        x = a[None, :] + svals[:, None] * self._diff(a, b)[None, :]
        x[:, self.circular] = np.mod(x[:, self.circular], TWO_PI)
        return x

    # -- sampling ----------------------------------------------------------

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(self.dim)
        return self.lo + u * (self.hi - self.lo)

    def sample_uniform_near(self, center, radius: float,
                            rng: np.random.Generator) -> np.ndarray:
        """Per-coordinate perturbation of half-width radius/sqrt(n*w_i),
        clamped to bounds (wrapped on circles); guarantees
        distance(center, result) <= radius."""
        center = self._check(center)
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        if radius == 0.0:
            return center.copy()
        half = radius / np.sqrt(self.dim * self.weights)
        half = np.where(self.circular, np.minimum(half, math.pi), half)
        x = center + rng.uniform(-half, half)
        x[self.circular] = np.mod(x[self.circular], TWO_PI)
        nc = ~self.circular
        x[nc] = np.clip(x[nc], self.lo[nc], self.hi[nc])
        return x

    def max_extent(self) -> float:
        """Diameter of the space under its metric."""
        ext = np.where(self.circular, math.pi, self.hi - self.lo)
        return float(math.sqrt(np.dot(self.weights, ext * ext)))


class RealVectorSpace(StateSpace):
    """Axis-aligned box in R^n with the Euclidean metric."""

    def __init__(self, bounds):
        bounds = np.asarray(bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2 or bounds.shape[0] < 1:
            raise ValueError("bounds must be a (n, 2) array of [lo, hi] rows")
        n = bounds.shape[0]
        self._init_flat(bounds[:, 0], bounds[:, 1],
                        np.ones(n), np.zeros(n, dtype=bool))

    @classmethod
    def unit(cls, n: int) -> "RealVectorSpace":
        return cls([[0.0, 1.0]] * n)


class CircleSpace(StateSpace):
    """Single angle in radians with period 2*pi; shortest-arc metric."""

    def __init__(self):
        self._init_flat([0.0], [TWO_PI], [1.0], [True])


class ProductSpace(StateSpace):
    """Weighted product of child spaces; metric sqrt(sum w_i * d_i^2)."""

    def __init__(self, children, weights=None):
        if len(children) < 2:
            raise ValueError("product space needs at least 2 children")
        if weights is None:
            weights = [1.0] * len(children)
        if len(weights) != len(children):
            raise ValueError("one weight per child required")
        if any(w <= 0 for w in weights):
            raise ValueError("child weights must be positive")
        self.children = list(children)
        self.child_weights = [float(w) for w in weights]
        lo = np.concatenate([c.lo for c in children])
        hi = np.concatenate([c.hi for c in children])
        w = np.concatenate([wc * c.weights
                            for wc, c in zip(self.child_weights, children)])
        circ = np.concatenate([c.circular for c in children])
        self._init_flat(lo, hi, w, circ)


class CoordinateSubspace(StateSpace):
    """Space formed by a coordinate subset of another space (fiber spaces)."""

    def __init__(self, parent: StateSpace, indices):
        indices = np.asarray(indices, dtype=int)
        self.parent = parent
        self.indices = indices
        self._init_flat(parent.lo[indices], parent.hi[indices],
                        parent.weights[indices], parent.circular[indices])


def point_to_edge_distance(space: StateSpace, q, u, v) -> float:
    """Exact metric distance from q to the image of the segment u--v.

    The interpolated segment is linear in unwrapped coordinates (shortest-arc
    increments on circles), so the distance is a weighted point-to-segment
    distance minimized over the 2*pi shifts of q's circular coordinates.
    """
    q = space._check(q)
    u = space._check(u)
    v = space._check(v)
    dseg = space._diff(u, v)
    w = np.sqrt(space.weights)
    a = u * w
    d = dseg * w
    qw = q * w
    circ_idx = np.nonzero(space.circular)[0]

    def seg_dist(point):
        dd = float(np.dot(d, d))
        if dd == 0.0:
            return float(np.linalg.norm(point - a))
        s = float(np.dot(point - a, d)) / dd
        s = min(1.0, max(0.0, s))
        return float(np.linalg.norm(point - (a + s * d)))

    if len(circ_idx) == 0:
        return seg_dist(qw)
    best = math.inf
    for combo in _shift_combos(len(circ_idx)):
        point = qw.copy()
        point[circ_idx] += combo * w[circ_idx]
        best = min(best, seg_dist(point))
    return best


def _shift_combos(n_circ: int) -> np.ndarray:
    shifts = np.array([-TWO_PI, 0.0, TWO_PI])
    grids = np.meshgrid(*[shifts] * n_circ, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def points_to_edge_distance(space: StateSpace, pts: np.ndarray,
                            u, v) -> np.ndarray:
    """Vectorized :func:`point_to_edge_distance` for many query points."""
    pts = np.asarray(pts, dtype=float)
    u = space._check(u)
    v = space._check(v)
    w = np.sqrt(space.weights)
    a = u * w
    d = space._diff(u, v) * w
    dd = float(np.dot(d, d))
    circ_idx = np.nonzero(space.circular)[0]
    combos = (_shift_combos(len(circ_idx)) if len(circ_idx)
              else np.zeros((1, 0)))
    best = np.full(len(pts), np.inf)
    qw = pts * w
    for combo in combos:
        p = qw.copy()
        if len(circ_idx):
            p[:, circ_idx] += combo * w[circ_idx]
        if dd == 0.0:
            dist = np.linalg.norm(p - a, axis=1)
        else:
            s = np.clip((p - a) @ d / dd, 0.0, 1.0)
            dist = np.linalg.norm(p - (a + s[:, None] * d), axis=1)
        best = np.minimum(best, dist)
    return best
