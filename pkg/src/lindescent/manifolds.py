"""Built-in Riemannian manifolds with closed-form exponential geometry.

Three families, all stored in ambient coordinates so no chart bookkeeping
is needed:

* Euclidean space R^n (``euclidean``), with a configurable finite scale
  ``r`` standing in for the injectivity radius,
* the unit sphere S^{n-1} embedded in R^n (``sphere``), r = pi,
* the flat torus T^n stored as angle tuples in [0, 2*pi)^n (``torus``),
  per-coordinate circumference 2*pi, r = pi.

The metric is the restriction of the ambient inner product in these
coordinates, so the musical isomorphisms flat/sharp act as identities on
components.  Every operation that produces a point re-projects onto the
constraint set, which keeps drift from accumulating over long descents.

Scalar operations delegate to the ``*_many`` array kernels (shape
``(n, ambient_dim)``) so that batched and single-point code paths share
the same arithmetic bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutLocusError

TWO_PI = 2.0 * math.pi

EUCLIDEAN = "euclidean"
SPHERE = "sphere"
TORUS = "torus"
KINDS = (EUCLIDEAN, SPHERE, TORUS)


@dataclass(frozen=True, eq=False)
class Point:
    """A manifold point, held as ambient coordinates."""

    coords: np.ndarray


@dataclass(frozen=True, eq=False)
class TangentVec:
    """Tangent vector at ``base``, as an ambient vector."""

    base: Point
    vec: np.ndarray


@dataclass(frozen=True, eq=False)
class CotangentVec:
    """Covector at ``base``; components via the metric, so an ambient vector."""

    base: Point
    covec: np.ndarray


def same_point(x: Point, y: Point) -> bool:
    return np.array_equal(x.coords, y.coords)


@dataclass(frozen=True)
class Manifold:
    """Descriptor of a built-in manifold plus its closed-form operations.

    Attributes:
        kind: one of ``euclidean``, ``sphere``, ``torus``.
        dim: intrinsic dimension.
        ambient_dim: number of ambient coordinates per point.
        r: injectivity radius (finite chosen scale for Euclidean).
    """

    kind: str
    dim: int
    ambient_dim: int
    r: float

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise ValueError("injectivity radius must be positive and finite")

    # -- constraint handling -------------------------------------------------

    def project_many(self, coords: np.ndarray) -> np.ndarray:
        """Project rows onto the constraint set (normalize / reduce angles)."""
        if self.kind == SPHERE:
            return coords / np.linalg.norm(coords, axis=-1, keepdims=True)
        if self.kind == TORUS:
            return np.mod(coords, TWO_PI)
        return coords

    def constraint_residual(self, coords: np.ndarray) -> float:
        if self.kind == SPHERE:
            return float(np.max(np.abs(np.linalg.norm(coords, axis=-1) - 1.0)))
        if self.kind == TORUS:
            return float(np.max(np.maximum(-coords, coords - TWO_PI), initial=0.0))
        return 0.0

    def point(self, coords) -> Point:
        """Build a Point from raw coordinates, validating the constraint."""
        arr = np.asarray(coords, dtype=float)
        if arr.shape != (self.ambient_dim,):
            raise ValueError(
                f"expected {self.ambient_dim} coordinates, got shape {arr.shape}"
            )
        if self.kind == SPHERE and abs(np.linalg.norm(arr) - 1.0) > 1e-6:
            raise ValueError("coordinates are not on the unit sphere")
        return Point(self.project_many(arr[None])[0])

    # -- geodesic operations -------------------------------------------------

    def exp_many(self, base: np.ndarray, vel: np.ndarray) -> np.ndarray:
        """Geodesic endpoints exp_{base_i}(vel_i); rows with zero velocity
        return the base row unchanged (bitwise)."""
        if self.kind == EUCLIDEAN:
            return base + vel
        if self.kind == TORUS:
            return np.mod(base + vel, TWO_PI)
        theta = np.linalg.norm(vel, axis=-1)
        out = base.copy()
        moving = theta > 0.0
        if np.any(moving):
            th = theta[moving, None]
            y = np.cos(th) * base[moving] + np.sin(th) * (vel[moving] / th)
            out[moving] = y / np.linalg.norm(y, axis=-1, keepdims=True)
        return out

    def log_many(self, base: np.ndarray, target: np.ndarray) -> np.ndarray:
        """Inverse of exp; requires every pair strictly inside the radius."""
        d = self.distance_many(base, target)
        if np.any(d >= self.r):
            raise CutLocusError(
                f"distance {float(np.max(d)):.6g} >= injectivity radius {self.r:.6g}"
            )
        if self.kind == EUCLIDEAN:
            return target - base
        if self.kind == TORUS:
            return _wrap_angles(target - base)
        dots = np.clip(np.sum(base * target, axis=-1), -1.0, 1.0)
        w = target - dots[:, None] * base
        out = np.zeros_like(base)
        mask = d > 0.0
        if np.any(mask):
            wn = np.linalg.norm(w[mask], axis=-1)
            out[mask] = (d[mask] / wn)[:, None] * w[mask]
        return out

    def distance_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Geodesic distance per row; bitwise-equal rows give exactly 0.

        Sphere arcs use the asin form on chords (acos form near the
        antipode), which is well conditioned at both ends."""
        if self.kind == EUCLIDEAN:
            return np.linalg.norm(b - a, axis=-1)
        if self.kind == TORUS:
            gap = np.mod(np.abs(b - a), TWO_PI)  # abs keeps symmetry exact
            return np.linalg.norm(np.minimum(gap, TWO_PI - gap), axis=-1)
        near = np.sum(a * b, axis=-1) > 0.0
        chord = np.linalg.norm(np.where(near[:, None], b - a, b + a), axis=-1)
        half = 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))
        return np.where(near, half, np.pi - half)

    def exp(self, x: Point, v: TangentVec) -> Point:
        if not same_point(v.base, x):
            raise ValueError("tangent vector is based at a different point")
        return Point(self.exp_many(x.coords[None], v.vec[None])[0])

    def log(self, x: Point, y: Point) -> TangentVec:
        return TangentVec(x, self.log_many(x.coords[None], y.coords[None])[0])

    def distance(self, x: Point, y: Point) -> float:
        return float(self.distance_many(x.coords[None], y.coords[None])[0])

    # -- metric isomorphisms -------------------------------------------------

    def flat(self, v: TangentVec) -> CotangentVec:
        """Index-lowering; identity on components in these coordinates."""
        return CotangentVec(v.base, v.vec)

    def sharp(self, xi: CotangentVec) -> TangentVec:
        """Index-raising; exact inverse of flat."""
        return TangentVec(xi.base, xi.covec)

    def inner(self, u: np.ndarray, w: np.ndarray) -> float:
        return float(np.dot(u, w))

    # -- tangent-space plumbing ----------------------------------------------

    def tangent_project_many(self, base: np.ndarray, ambient: np.ndarray) -> np.ndarray:
        """Orthogonal projection of ambient vectors onto tangent spaces."""
        if self.kind != SPHERE:
            return ambient
        return ambient - np.sum(ambient * base, axis=-1, keepdims=True) * base

    def tangent_project(self, x: Point, ambient: np.ndarray) -> np.ndarray:
        return self.tangent_project_many(x.coords[None], ambient[None])[0]

    def tangent_frame(self, x: Point) -> np.ndarray:
        """Orthonormal basis of T_x, one frame vector per row, shape (dim, ambient)."""
        if self.kind != SPHERE:
            return np.eye(self.ambient_dim)
        n = self.ambient_dim
        q, _ = np.linalg.qr(np.column_stack([x.coords, np.eye(n)]))
        return q[:, 1:n].T

    # -- sampling --------------------------------------------------------------

    def random_points(self, count: int, seed: int) -> list[Point]:
        """Deterministic, approximately uniform samples (ball of radius r
        for Euclidean)."""
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(count):
            if self.kind == SPHERE:
                g = rng.standard_normal(self.ambient_dim)
                out.append(Point(g / np.linalg.norm(g)))
            elif self.kind == TORUS:
                out.append(Point(rng.uniform(0.0, TWO_PI, self.ambient_dim)))
            else:
                g = rng.standard_normal(self.ambient_dim)
                radius = self.r * rng.uniform() ** (1.0 / self.dim)
                out.append(Point(radius * g / np.linalg.norm(g)))
        return out

    def random_point(self, seed: int) -> Point:
        return self.random_points(1, seed)[0]


def _wrap_angles(delta: np.ndarray) -> np.ndarray:
    """Wrap angle differences into [-pi, pi)."""
    return np.mod(delta + math.pi, TWO_PI) - math.pi


def euclidean(dim: int, r: float = 1.0) -> Manifold:
    return Manifold(EUCLIDEAN, dim, dim, r)


def sphere(dim: int) -> Manifold:
    """Unit sphere S^dim embedded in R^{dim+1}."""
    return Manifold(SPHERE, dim, dim + 1, math.pi)


def torus(dim: int) -> Manifold:
    """Flat torus, angle coordinates in [0, 2*pi) per axis."""
    return Manifold(TORUS, dim, dim, math.pi)
