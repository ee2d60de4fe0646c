"""Descent by 1D search along linearization paths.

Each iteration builds the path gamma(t) = delta(t * dF) through the
current point (t = 0 is the point itself, by the zero-section property),
hands F o gamma to a 1D method, and steps to the path endpoint at the
returned parameter.  Monotonicity of the recorded values is inherited
exactly from the method contract.  Stopping: displacement below eps,
differential norm below the zero threshold, or the iteration cap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, IO

import numpy as np

from .errors import EvaluationError
from .gap_metric import GapFn, GapMetric, WitnessSet
from .linearization import BundleElem, Linearization
from .manifolds import CotangentVec, Manifold, Point, TangentVec
from .methods import GoldenSection, MethodKind, ScalarPath, apply_method


class StopReason(enum.Enum):
    TOLERANCE_REACHED = "ToleranceReached"
    EXACT_CRITICAL_POINT = "ExactCriticalPoint"
    MAX_ITERATIONS = "MaxIterations"
    ABORTED = "Aborted"  # only on partial traces attached to EvaluationError


@dataclass
class Functional:
    """Scalar objective on a manifold with an optional closed-form
    differential; otherwise central differences along an orthonormal
    tangent frame, pushed through flat."""

    manifold: Manifold
    f: Callable[[Point], float]
    grad: Callable[[Point], CotangentVec] | None = None
    fd_step: float = 1e-6

    def value(self, x: Point) -> float:
        v = float(self.f(x))
        if not math.isfinite(v):
            raise EvaluationError(f"functional returned non-finite value {v!r}")
        return v

    def differential(self, x: Point) -> CotangentVec:
        if self.grad is not None:
            return self.grad(x)
        m, h = self.manifold, self.fd_step
        frame = m.tangent_frame(x)
        comps = np.empty(m.dim)
        for i, ei in enumerate(frame):
            fp = self.value(m.exp(x, TangentVec(x, h * ei)))
            fm = self.value(m.exp(x, TangentVec(x, -h * ei)))
            comps[i] = (fp - fm) / (2.0 * h)
        return m.flat(TangentVec(x, comps @ frame))


@dataclass(frozen=True)
class DescentConfig:
    eps: float = 1e-8
    n_max: int = 200
    t_half: float = 1.0
    grad_zero_tol: float = 1e-12
    method: MethodKind = field(default_factory=GoldenSection)
    displacement: str = "gap"  # or "geodesic"

    def __post_init__(self) -> None:
        if self.eps < 0.0:
            raise ValueError("eps must be >= 0")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.t_half <= 0.0:
            raise ValueError("t_half must be > 0")
        if self.grad_zero_tol < 0.0:
            raise ValueError("grad_zero_tol must be >= 0")
        if self.displacement not in ("gap", "geodesic"):
            raise ValueError("displacement must be 'gap' or 'geodesic'")


@dataclass
class DescentTrace:
    """Recorded run: iterates x_n, values F(x_n), step parameters t_n and
    displacements d_n (one fewer than iterates), and the stop reason.
    ``stalled`` marks the extra eps = 0 stop after two consecutive zero
    steps."""

    iterates: list
    values: list[float]
    steps: list[float]
    displacements: list[float]
    stop: StopReason
    stalled: bool = False
    sobolev_diag: dict[float, list[float]] | None = None

    def __len__(self) -> int:
        return len(self.iterates)

    @property
    def last(self):
        return self.iterates[-1]


def descent_loop(
    x0,
    value_fn,
    diff_fn,
    norm_fn,
    path_fn,
    step_fn,
    disp_fn,
    cfg: DescentConfig,
) -> DescentTrace:
    """Shared loop for point- and map-valued descents.

    ``diff_fn`` returns an opaque differential object consumed by
    ``norm_fn``, ``path_fn`` and ``step_fn``.  On EvaluationError the
    partial trace is attached to the exception and the error re-raised.
    """
    xs = [x0]
    ts: list[float] = []
    ds: list[float] = []
    stop = StopReason.MAX_ITERATIONS
    stalled = False
    try:
        fs = [value_fn(x0)]
        x = x0
        d = 1.0 + cfg.eps
        zero_streak = 0
        for _ in range(cfg.n_max):
            if d < cfg.eps:
                stop = StopReason.TOLERANCE_REACHED
                break
            g = diff_fn(x)
            if norm_fn(g) <= cfg.grad_zero_tol:
                stop = StopReason.EXACT_CRITICAL_POINT
                break
            t_star = apply_method(cfg.method, path_fn(x, g), 0.0)
            x_next = step_fn(x, g, t_star)
            d = disp_fn(x, x_next)
            ts.append(t_star)
            ds.append(d)
            xs.append(x_next)
            fs.append(value_fn(x_next))
            x = x_next
            zero_streak = zero_streak + 1 if t_star == 0.0 else 0
            if cfg.eps == 0.0 and zero_streak >= 2:
                stop = StopReason.TOLERANCE_REACHED
                stalled = True
                break
    except EvaluationError as err:
        err.trace = DescentTrace(xs, fs, ts, ds, StopReason.ABORTED)
        raise
    return DescentTrace(xs, fs, ts, ds, stop, stalled)


def _path_from_differential(
    lin: Linearization, F: Functional, x: Point, xi: CotangentVec, t_half: float
) -> ScalarPath:
    def f(t: float) -> float:
        e = BundleElem(x, CotangentVec(x, t * xi.covec), 0.0)
        return F.value(lin.delta(e)[1])

    return ScalarPath(f, -t_half, t_half)


def path_at(lin: Linearization, F: Functional, x: Point, t_half: float = 1.0) -> ScalarPath:
    """The search path t -> F(delta(t * dF)); equals F(x) exactly at t = 0."""
    return _path_from_differential(lin, F, x, F.differential(x), t_half)


def run_descent(
    lin: Linearization,
    F: Functional,
    x0: Point,
    cfg: DescentConfig,
    witnesses: WitnessSet,
    gap: GapFn | None = None,
) -> DescentTrace:
    """Linearization-path descent with witness gap-metric displacements
    (or geodesic displacements when configured)."""
    metric = GapMetric(lin, gap or GapFn(), witnesses)
    disp = metric.dist_x if cfg.displacement == "gap" else metric.geodesic

    def path_fn(x: Point, xi: CotangentVec) -> ScalarPath:
        return _path_from_differential(lin, F, x, xi, cfg.t_half)

    def step_fn(x: Point, xi: CotangentVec, t: float) -> Point:
        e = BundleElem(x, CotangentVec(x, t * xi.covec), 0.0)
        return lin.delta(e)[1]

    return descent_loop(
        x0,
        F.value,
        F.differential,
        lambda xi: float(np.linalg.norm(xi.covec)),
        path_fn,
        step_fn,
        disp,
        cfg,
    )


# -- built-in objectives -------------------------------------------------------


def sphere_cosine(m: Manifold, pole: Point) -> Functional:
    """F(x) = 1 - <x, p>; geodesically convex near p, minimum 0 at p."""
    if m.kind != "sphere":
        raise ValueError("sphere_cosine needs a sphere")
    p = pole.coords

    def grad(x: Point) -> CotangentVec:
        return CotangentVec(x, float(np.dot(p, x.coords)) * x.coords - p)

    return Functional(m, lambda x: 1.0 - float(np.dot(x.coords, p)), grad)


def euclidean_sqnorm(m: Manifold) -> Functional:
    if m.kind != "euclidean":
        raise ValueError("euclidean_sqnorm needs a Euclidean manifold")
    return Functional(
        m,
        lambda x: float(np.dot(x.coords, x.coords)),
        lambda x: CotangentVec(x, 2.0 * x.coords),
    )


def torus_height(m: Manifold) -> Functional:
    """F(theta) = sum_i cos(theta_i); minima at (pi, ..., pi), away from
    the angle seam so tail clustering in coordinates is safe."""
    if m.kind != "torus":
        raise ValueError("torus_height needs a torus")
    return Functional(
        m,
        lambda x: float(np.sum(np.cos(x.coords))),
        lambda x: CotangentVec(x, -np.sin(x.coords)),
    )


# -- trace serialization -------------------------------------------------------

TRACE_FORMAT = "lindescent-trace-v1"


def _fmt(v: float) -> str:
    return format(v, ".17g")


def _state_coords(state) -> np.ndarray:
    if isinstance(state, Point):
        return state.coords
    return np.asarray(state.values).ravel()


def write_trace_csv(trace: DescentTrace, out: IO[str]) -> None:
    """Fixed, versioned column order: iter, t, d, F, then ambient
    coordinates; stop reason in a comment footer."""
    width = _state_coords(trace.iterates[0]).size
    out.write(f"# format={TRACE_FORMAT}\n")
    out.write("iter,t,d,F," + ",".join(f"x{i}" for i in range(width)) + "\n")
    for n, (state, value) in enumerate(zip(trace.iterates, trace.values)):
        t = _fmt(trace.steps[n]) if n < len(trace.steps) else ""
        d = _fmt(trace.displacements[n]) if n < len(trace.displacements) else ""
        coords = ",".join(_fmt(c) for c in _state_coords(state))
        out.write(f"{n},{t},{d},{_fmt(value)},{coords}\n")
    out.write(f"# stop={trace.stop.value}\n")
    if trace.stalled:
        out.write("# stalled=true\n")
