"""Fixed points of self-maps via descent on F(x) = gap(nu(x, f(x))).

F vanishes exactly at fixed points and is bounded by the witness distance
d_X(x, f(x)) at every point; the bound holds exactly here because the
witness max is augmented with the evaluation pair.  F need not be smooth
at fixed points, so once F drops below the fixed-point tolerance the
differential is reported as zero instead of finite-differencing noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .adherence import cluster_limits
from .descent import DescentConfig, DescentTrace, Functional, run_descent
from .gap_metric import GapFn, GapMetric, WitnessSet
from .linearization import Linearization
from .manifolds import CotangentVec, Manifold, Point, TangentVec


@dataclass(frozen=True)
class SelfMap:
    """Smooth self-map of a manifold; outputs satisfy the constraint."""

    manifold: Manifold
    apply: Callable[[Point], Point]
    label: str = "selfmap"


def identity_map(m: Manifold) -> SelfMap:
    return SelfMap(m, lambda x: x, "identity")


def rotation_map(m: Manifold, angle: float) -> SelfMap:
    """Rotation in the first two ambient coordinates (spheres)."""
    if m.kind != "sphere":
        raise ValueError("rotation_map needs a sphere")
    c, s = np.cos(angle), np.sin(angle)

    def apply(x: Point) -> Point:
        out = x.coords.copy()
        out[0] = c * x.coords[0] - s * x.coords[1]
        out[1] = s * x.coords[0] + c * x.coords[1]
        return Point(m.project_many(out[None])[0])

    return SelfMap(m, apply, f"rotation({angle:g})")


def translation_map(m: Manifold, offset) -> SelfMap:
    if m.kind != "torus":
        raise ValueError("translation_map needs a torus")
    off = np.asarray(offset, dtype=float)

    def apply(x: Point) -> Point:
        return Point(m.project_many((x.coords + off)[None])[0])

    return SelfMap(m, apply, "translation")


def contraction_map(m: Manifold, target: Point, rate: float = 0.5) -> SelfMap:
    """Geodesic contraction x -> exp_x(rate * log_x(target)); requires
    iterates to stay inside the injectivity radius around the target."""
    if not 0.0 < rate < 1.0:
        raise ValueError("rate must lie in (0, 1)")

    def apply(x: Point) -> Point:
        v = m.log(x, target)
        return m.exp(x, TangentVec(x, rate * v.vec))

    return SelfMap(m, apply, f"contraction(rate={rate:g})")


@dataclass
class FixedPointReport:
    found: bool
    final_value: float
    final_residual: float
    bound_ok: bool
    bound_worst: float
    orbit_distances: list[float]
    message: str

    def to_text(self) -> str:
        lines = [
            "report: fixed point search",
            f"found: {'yes' if self.found else 'no'}",
            f"final_objective: {self.final_value:.17g}",
            f"final_residual: {self.final_residual:.17g}",
            f"bound_holds: {'yes' if self.bound_ok else 'NO'} "
            f"(worst margin {self.bound_worst:.6g})",
            f"orbit_to_cluster: {' '.join(format(d, '.6g') for d in self.orbit_distances)}",
            f"message: {self.message}",
        ]
        return "\n".join(lines) + "\n"


def fixed_point_objective(lin: Linearization, gap: GapFn, f: SelfMap) -> Functional:
    """F(x) = gap(nu(x, f(x))); zero exactly at fixed points."""

    def value(x: Point) -> float:
        return gap.eval(lin.nu(x, f.apply(x)))

    return Functional(lin.manifold, value)


def run_fixed_point(
    lin: Linearization,
    gap: GapFn,
    f: SelfMap,
    x0: Point,
    cfg: DescentConfig,
    witnesses: WitnessSet,
    tol_fp: float = 1e-8,
    n_orbit: int = 5,
    cluster_radius: float = 1e-3,
) -> tuple[DescentTrace, FixedPointReport]:
    """Minimize the fixed-point objective and audit the run.

    The report asserts 0 <= F(x_n) <= d_X(x_n, f(x_n)) at every iterate
    (exact, by witness augmentation), flags success when the final value
    is below tol_fp, and records geodesic distances from the forward
    orbit of the final point to the limit cluster.
    """
    base = fixed_point_objective(lin, gap, f)
    m = lin.manifold

    def floored_grad(x: Point) -> CotangentVec:
        if base.value(x) < tol_fp:
            return CotangentVec(x, np.zeros(m.ambient_dim))
        return base.differential(x)

    objective = Functional(m, base.f, floored_grad)
    trace = run_descent(lin, objective, x0, cfg, witnesses, gap)

    metric = GapMetric(lin, gap, witnesses)
    bound_worst = -np.inf
    bound_ok = True
    for x, value in zip(trace.iterates, trace.values):
        margin = value - metric.dist_x(x, f.apply(x))
        bound_worst = max(bound_worst, margin)
        if margin > 0.0 or value < 0.0:
            bound_ok = False

    x_last = trace.last
    final_value = trace.values[-1]
    residual = m.distance(x_last, f.apply(x_last))
    found = final_value < tol_fp

    clusters = cluster_limits(trace, cluster_radius).clusters
    last_idx = len(trace) - 1
    cluster = next(c for c in clusters if last_idx in c.indices)
    member_coords = np.stack([trace.iterates[i].coords for i in cluster.indices])
    orbit = []
    z = x_last
    for _ in range(n_orbit):
        z = f.apply(z)
        dists = m.distance_many(
            np.broadcast_to(z.coords, member_coords.shape), member_coords
        )
        orbit.append(float(np.min(dists)))

    if found:
        message = f"fixed point found; residual {residual:.3g}"
    else:
        message = f"no fixed point found; objective {final_value:.6g} > 0"
    report = FixedPointReport(
        found=found,
        final_value=final_value,
        final_residual=residual,
        bound_ok=bound_ok,
        bound_worst=float(bound_worst),
        orbit_distances=orbit,
        message=message,
    )
    return trace, report
