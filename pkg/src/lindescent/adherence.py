"""Post-hoc trace analysis: limit clusters and convexity probes.

Limit points of a finite run are approximated by single-linkage clusters
of the tail iterates (last quarter of the trace) in ambient coordinates.
A descent trace of a continuous objective should show the same value, up
to tolerance, on every cluster; strict convexity along a parametrization
should collapse the tail to a single cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .descent import DescentTrace, Functional, _state_coords
from .manifolds import Point
from .report import AuditReport


@dataclass
class Cluster:
    representative: object
    indices: list[int]
    f_spread: float
    f_min: float


@dataclass
class ClusterReport:
    clusters: list[Cluster]
    f_constancy_tol: float
    min_cluster_f: float
    start_f: float

    @property
    def passed(self) -> bool:
        return (
            all(c.f_spread <= self.f_constancy_tol for c in self.clusters)
            and self.min_cluster_f <= self.start_f
        )

    def to_text(self) -> str:
        lines = [
            "report: limit clusters",
            f"overall: {'pass' if self.passed else 'FAIL'}",
            f"clusters: {len(self.clusters)}",
            f"min_cluster_f: {self.min_cluster_f:.17g}",
            f"start_f: {self.start_f:.17g}",
        ]
        for i, c in enumerate(self.clusters):
            lines.append(
                f"cluster{i}: size {len(c.indices)} spread {c.f_spread:.6g} "
                f"min_f {c.f_min:.17g}"
            )
        return "\n".join(lines) + "\n"


def cluster_limits(
    trace: DescentTrace,
    radius: float,
    f_constancy_tol: float = 1e-6,
    tail_fraction: float = 0.25,
) -> ClusterReport:
    """Single-linkage clustering of tail iterates at the given radius.

    Every tail iterate lands in exactly one cluster; per cluster the
    report carries the spread max|F_i - F_j|.
    """
    if len(trace) == 0:
        raise ValueError("trace is empty")
    if radius <= 0.0:
        raise ValueError("radius must be > 0")
    n = len(trace)
    tail_len = max(1, math.ceil(n * tail_fraction))
    start = n - tail_len
    coords = np.stack([_state_coords(s) for s in trace.iterates[start:]])
    values = np.asarray(trace.values[start:])

    # union-find over pairs within the linkage radius
    parent = list(range(tail_len))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(tail_len):
        dists = np.linalg.norm(coords[i + 1 :] - coords[i], axis=-1)
        for j in np.nonzero(dists <= radius)[0]:
            ri, rj = find(i), find(int(j) + i + 1)
            if ri != rj:
                parent[rj] = ri

    groups: dict[int, list[int]] = {}
    for i in range(tail_len):
        groups.setdefault(find(i), []).append(i)

    clusters = []
    for members in groups.values():
        vals = values[members]
        rep_local = members[int(np.argmin(vals))]
        clusters.append(
            Cluster(
                representative=trace.iterates[start + rep_local],
                indices=[start + i for i in members],
                f_spread=float(np.max(vals) - np.min(vals)),
                f_min=float(np.min(vals)),
            )
        )
    clusters.sort(key=lambda c: c.indices[0])
    return ClusterReport(
        clusters=clusters,
        f_constancy_tol=f_constancy_tol,
        min_cluster_f=min(c.f_min for c in clusters),
        start_f=trace.values[0],
    )


@dataclass(frozen=True)
class ConvexProbe:
    """Smooth parametrization P from a box C in R^k into the manifold,
    with sampling parameters for the convexity inequality."""

    param: Callable[[np.ndarray], Point]
    lower: np.ndarray
    upper: np.ndarray
    samples: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        lo, hi = np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("probe box must satisfy lower < upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)


def convexity_audit(
    probe: ConvexProbe,
    F: Functional,
    trace: DescentTrace | None = None,
    cluster_radius: float = 1e-3,
    tol: float = 1e-10,
    strict_margin: float = 1e-12,
) -> AuditReport:
    """Sample the convexity inequality of F o P on random segment points.

    Verdict (in ``extras['verdict']``): ``non-convex`` on any violation
    beyond tol, ``strictly-convex`` when every midpoint margin exceeds
    strict_margin, else ``convex``.  With a trace supplied and a strictly
    convex verdict, the tail must collapse to a single cluster.
    Injectivity of P is spot-checked on sampled pairs, not proven.
    """
    if probe.samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(probe.seed)
    dim = probe.lower.size
    worst_violation = 0.0
    min_margin = math.inf
    witness = ""
    inj_ok = True
    for _ in range(probe.samples):
        c = rng.uniform(probe.lower, probe.upper, size=dim)
        d = rng.uniform(probe.lower, probe.upper, size=dim)
        fc, fd = F.value(probe.param(c)), F.value(probe.param(d))
        for lam in (0.25, 0.5, 0.75):
            mid = F.value(probe.param(lam * c + (1.0 - lam) * d))
            margin = lam * fc + (1.0 - lam) * fd - mid
            if margin < -tol and not witness:
                witness = f"c={c.tolist()} d={d.tolist()} lambda={lam}"
            worst_violation = max(worst_violation, -margin)
            if lam == 0.5:
                min_margin = min(min_margin, margin)
        if np.linalg.norm(c - d) > 1e-6 * np.max(probe.upper - probe.lower):
            if np.allclose(probe.param(c).coords, probe.param(d).coords, atol=1e-12):
                inj_ok = False

    report = AuditReport("convexity audit")
    convex = worst_violation <= tol
    strict = convex and min_margin > strict_margin
    verdict = "strictly-convex" if strict else ("convex" if convex else "non-convex")
    report.extras["verdict"] = verdict
    report.add("convexity_inequality", convex, worst_violation,
               f"witness {witness}" if witness else "")
    report.add("midpoint_margin", True, min_margin, "(informational)")
    report.add("parameter_injective", inj_ok, 0.0 if inj_ok else 1.0)
    if trace is not None and strict:
        n_clusters = len(cluster_limits(trace, cluster_radius).clusters)
        report.add("unique_limit", n_clusters == 1, float(n_clusters),
                   "(clusters in trace tail)")
    return report
