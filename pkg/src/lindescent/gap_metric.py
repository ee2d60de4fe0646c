"""Gap functions and the induced witness-max distances.

The gap turns bundle elements into bounded scalars: zero exactly on the
zero section, smooth off it, strictly below 1.  The point distance is

    d_X(x, y) = max over z of |gap(nu(z, x)) - gap(nu(z, y))|

taken over a finite witness set, always augmented with {x, y} so that the
z = x term equals gap(nu(x, y)) and separation is forced.  Augmentation
also makes the fixed-point bound F(x) <= d_X(x, f(x)) hold exactly, term
for term.  The fiber distance combines delta images of the two fiberwise
differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FiberMismatchError
from .linearization import BundleElem, Linearization
from .manifolds import Manifold, Point
from .report import AuditReport

GAP_SHAPES = ("bounded-norm", "broken-constant")


@dataclass(frozen=True)
class GapFn:
    """Bounded separating function on the bundle.

    ``bounded-norm`` (default): rho(sqrt(|xi|^2 + k^2)) with
    rho(t) = t / (1 + t).  ``broken-constant`` is intentionally invalid
    (it never separates, collapsing the induced distance to zero); it
    exists so fault injection has something to catch.
    """

    shape: str = "bounded-norm"

    def __post_init__(self) -> None:
        if self.shape not in GAP_SHAPES:
            raise ValueError(f"unknown gap shape {self.shape!r}")

    def from_norms(self, xi_norm, k):
        if self.shape == "broken-constant":
            return np.ones_like(np.asarray(xi_norm, dtype=float))
        t = np.hypot(xi_norm, k)  # no underflow for subnormal slots
        return t / (1.0 + t)

    def eval(self, e: BundleElem) -> float:
        return float(self.from_norms(e.xi_norm, e.k))


@dataclass(frozen=True)
class WitnessSet:
    """Finite stand-in for the sup over all of X."""

    points: tuple[Point, ...]
    policy: str = "custom"

    def __post_init__(self) -> None:
        if len(self.points) == 0:
            raise ValueError("witness set must be nonempty")

    @property
    def coords(self) -> np.ndarray:
        return np.stack([p.coords for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


def random_witnesses(m: Manifold, count: int, seed: int) -> WitnessSet:
    if count < 1:
        raise ValueError("witness count must be >= 1")
    return WitnessSet(tuple(m.random_points(count, seed)), policy=f"random(seed={seed})")


def grid_witnesses(m: Manifold, count: int) -> WitnessSet:
    """Deterministic quasi-uniform witnesses: product angle grid on the
    torus, uniform angles on S^1, Fibonacci lattice on S^2, a box grid on
    Euclidean space, and a fixed-seed fallback on higher spheres."""
    if count < 1:
        raise ValueError("witness count must be >= 1")
    if m.kind == "torus":
        per_axis = max(1, round(count ** (1.0 / m.dim)))
        axes = [np.arange(per_axis) * (2.0 * np.pi / per_axis)] * m.dim
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m.dim)
        pts = tuple(Point(row) for row in mesh)
    elif m.kind == "sphere" and m.ambient_dim == 2:
        ang = np.arange(count) * (2.0 * np.pi / count)
        pts = tuple(Point(np.array([np.cos(a), np.sin(a)])) for a in ang)
    elif m.kind == "sphere" and m.ambient_dim == 3:
        golden = np.pi * (3.0 - np.sqrt(5.0))
        idx = np.arange(count)
        z = 1.0 - (2.0 * idx + 1.0) / count
        rad = np.sqrt(1.0 - z * z)
        pts = tuple(
            Point(np.array([rad[i] * np.cos(golden * i), rad[i] * np.sin(golden * i), z[i]]))
            for i in idx
        )
    elif m.kind == "euclidean":
        per_axis = max(2, round(count ** (1.0 / m.dim)))
        axes = [np.linspace(-m.r, m.r, per_axis)] * m.dim
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m.dim)
        pts = tuple(Point(row) for row in mesh)
    else:
        return random_witnesses(m, count, seed=0)
    return WitnessSet(pts, policy="grid")


@dataclass(frozen=True)
class GapMetric:
    """d_X and fiberwise d_E induced by a linearization and a gap."""

    lin: Linearization
    gap: GapFn = field(default_factory=GapFn)
    witnesses: WitnessSet | None = None

    def _witness_gaps(self, x: Point) -> np.ndarray:
        xis, ks = self.lin.nu_arrays(self.witnesses.coords, x)
        return self.gap.from_norms(np.linalg.norm(xis, axis=-1), ks)

    def dist_x(self, x: Point, y: Point) -> float:
        """Witness-max distance, always augmented with z = x and z = y.

        For any gap that vanishes on the zero section the z = x term is
        exactly gap(nu(x, y)), which forces separation and makes the
        fixed-point bound F <= d_X hold term for term."""
        best = max(
            abs(self.gap.eval(self.lin.nu(x, x)) - self.gap.eval(self.lin.nu(x, y))),
            abs(self.gap.eval(self.lin.nu(y, y)) - self.gap.eval(self.lin.nu(y, x))),
        )
        if self.witnesses is not None:
            gx, gy = self._witness_gaps(x), self._witness_gaps(y)
            best = max(best, float(np.max(np.abs(gx - gy))))
        return best

    def dist_e(self, u: BundleElem, v: BundleElem) -> float:
        """d_E(u, v) = d_X over delta(u - v) plus d_X over delta(v - u)."""
        try:
            d1 = self.lin.delta(u - v)
            d2 = self.lin.delta(v - u)
        except FiberMismatchError:
            raise FiberMismatchError("dist_e requires elements of the same fiber")
        return self.dist_x(*d1) + self.dist_x(*d2)

    def geodesic(self, x: Point, y: Point) -> float:
        return self.lin.manifold.distance(x, y)


def metric_audit(metric: GapMetric, triples: int, seed: int) -> AuditReport:
    """Check the metric axioms of dist_x on random triples.

    Symmetry must hold bitwise, separation strictly, and the triangle
    inequality within 1e-12.
    """
    if triples < 1:
        raise ValueError("triples must be >= 1")
    m = metric.lin.manifold
    pts = m.random_points(3 * triples, seed)
    report = AuditReport("metric audit")
    worst_sym = 0.0
    min_sep = np.inf
    worst_tri = -np.inf
    for i in range(triples):
        x, y, z = pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]
        dxy, dyx = metric.dist_x(x, y), metric.dist_x(y, x)
        dyz, dxz = metric.dist_x(y, z), metric.dist_x(x, z)
        worst_sym = max(worst_sym, abs(dxy - dyx))
        min_sep = min(min_sep, dxy, dyz, dxz)
        if metric.dist_x(x, x) != 0.0:
            min_sep = -1.0
        worst_tri = max(worst_tri, dxz - dxy - dyz, dxy - dxz - dyz, dyz - dxy - dxz)
    report.add("symmetry", worst_sym == 0.0, worst_sym)
    report.add("separation", min_sep > 0.0, min_sep, "(min distance over distinct pairs)")
    report.add("triangle", worst_tri <= 1e-12, worst_tri, "(max violation margin)")
    return report
