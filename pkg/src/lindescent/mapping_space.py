"""Discretized loop spaces: maps u: S^1 -> N on a uniform grid.

The linearization of the target lifts pointwise: nu and delta act node by
node, so sections of the lifted bundle are arrays of covectors plus an
array of scalar slots.  Sobolev norms of order s (p = 2 only) are spectral:

    norm^2 = sum_k (1 + k^2)^s * |u_hat_k|^2

with unitary discrete Fourier coefficients of the ambient-valued samples,
so s = 0 reproduces the plain sample l2 norm and the multipliers are
nondecreasing in s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, IO

import numpy as np

from .descent import DescentConfig, DescentTrace, descent_loop
from .errors import EvaluationError, ShapeError
from .linearization import BundleElem, Linearization
from .manifolds import CotangentVec, Manifold, Point, TWO_PI
from .methods import ScalarPath

_FMT = ".17g"


@dataclass(frozen=True, eq=False)
class DiscreteMap:
    """Loop samples u_j = u(2*pi*j/m) as rows of an (m, ambient_dim) array."""

    target: Manifold
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape[1] != self.target.ambient_dim:
            raise ShapeError(f"values must be (m, {self.target.ambient_dim})")
        m = self.values.shape[0]
        if m < 4 or m % 2 != 0:
            raise ShapeError("grid size must be even and >= 4")
        if self.target.constraint_residual(self.values) > 1e-12:
            raise ShapeError("map values violate the target constraint")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.m) * (TWO_PI / self.m)

    @cached_property
    def spectrum(self) -> np.ndarray:
        """Unitary DFT of the samples, componentwise over the ambient space."""
        return np.fft.fft(self.values, axis=0) / math.sqrt(self.m)

    def node(self, j: int) -> Point:
        return Point(self.values[j])


def discrete_map(target: Manifold, values) -> DiscreteMap:
    """Build a map from raw samples, projecting onto the constraint set."""
    arr = target.project_many(np.asarray(values, dtype=float))
    return DiscreteMap(target, arr)


def circle_loop(m: int, angles) -> DiscreteMap:
    """Loop into S^1 (the unit circle in R^2) given by sample angles."""
    from .manifolds import sphere

    ang = np.asarray(angles, dtype=float)
    return DiscreteMap(sphere(1), np.column_stack([np.cos(ang), np.sin(ang)]))


def degree_loop(m: int, degree: int, perturb_amp: float = 0.0, perturb_mode: int = 1) -> DiscreteMap:
    """Degree-``degree`` loop on S^1, optionally with a sinusoidal phase
    perturbation."""
    t = np.arange(m) * (TWO_PI / m)
    return circle_loop(m, degree * t + perturb_amp * np.sin(perturb_mode * t))


def latitude_loop(m: int, z: float) -> DiscreteMap:
    """Constant-latitude loop on S^2 at height z (not a geodesic for z != 0)."""
    from .manifolds import sphere

    if not -1.0 < z < 1.0:
        raise ValueError("latitude must satisfy -1 < z < 1")
    t = np.arange(m) * (TWO_PI / m)
    rho = math.sqrt(1.0 - z * z)
    vals = np.column_stack([rho * np.cos(t), rho * np.sin(t), np.full(m, z)])
    return DiscreteMap(sphere(2), vals)


@dataclass(frozen=True, eq=False)
class LiftedBundleElem:
    """Section of the pulled-back bundle: one covector and one scalar slot
    per node, based at the nodes of ``base``."""

    base: DiscreteMap
    xis: np.ndarray
    ks: np.ndarray

    def __post_init__(self) -> None:
        if self.xis.shape != self.base.values.shape or self.ks.shape != (self.base.m,):
            raise ShapeError("section arrays do not match the base grid")

    def scale(self, t: float) -> "LiftedBundleElem":
        return LiftedBundleElem(self.base, t * self.xis, t * self.ks)

    def sections(self) -> list[BundleElem]:
        out = []
        for j in range(self.base.m):
            x = self.base.node(j)
            out.append(BundleElem(x, CotangentVec(x, self.xis[j]), float(self.ks[j])))
        return out


@dataclass(frozen=True)
class SobolevSpec:
    s: float
    p: int = 2

    def __post_init__(self) -> None:
        if self.p != 2:
            raise ValueError("only p = 2 norms are computed")


def _check_compatible(f: DiscreteMap, g: DiscreteMap) -> None:
    if f.target is not g.target and f.target != g.target:
        raise ShapeError("maps have different targets")
    if f.m != g.m:
        raise ShapeError("maps have different grid sizes")


def lifted_nu(lin: Linearization, f: DiscreteMap, g: DiscreteMap) -> LiftedBundleElem:
    """Nodewise nu(f(x_j), g(x_j)); base of the result is f."""
    _check_compatible(f, g)
    m = lin.manifold
    d = m.distance_many(f.values, g.values)
    chi = lin.cutoff_many(d)
    xis = np.zeros_like(f.values)
    mask = chi > 0.0
    if np.any(mask):
        xis[mask] = chi[mask, None] * m.log_many(f.values[mask], g.values[mask])
    return LiftedBundleElem(f, xis, d)


def lifted_delta(lin: Linearization, e: LiftedBundleElem) -> tuple[DiscreteMap, DiscreteMap]:
    """Nodewise delta; first component is the base map."""
    m = lin.manifold
    vv = np.sum(e.xis * e.xis, axis=-1)
    scale = lin.delta_scale(e.ks, vv)
    second = m.exp_many(e.base.values, scale[:, None] * e.xis)
    return e.base, DiscreteMap(e.base.target, second)


# -- spectral norms ------------------------------------------------------------


def _wavenumbers(m: int) -> np.ndarray:
    return np.fft.fftfreq(m, d=1.0 / m)


def _sobolev_norm_of_array(arr: np.ndarray, s: float) -> float:
    m = arr.shape[0]
    hat = np.fft.fft(arr, axis=0) / math.sqrt(m)
    mult = (1.0 + _wavenumbers(m) ** 2) ** s
    return float(np.sqrt(np.sum(mult * np.sum(np.abs(hat) ** 2, axis=-1))))


def sobolev_norm(u: DiscreteMap, spec: SobolevSpec) -> float:
    """Spectral W^{s,2} norm of the ambient-valued samples."""
    mult = (1.0 + _wavenumbers(u.m) ** 2) ** spec.s
    return float(np.sqrt(np.sum(mult * np.sum(np.abs(u.spectrum) ** 2, axis=-1))))


def sobolev_distance(u: DiscreteMap, v: DiscreteMap, spec: SobolevSpec) -> float:
    """Norm of the ambient difference u - v (subtraction in the ambient
    algebra, consistent with the completion)."""
    _check_compatible(u, v)
    return _sobolev_norm_of_array(u.values - v.values, spec.s)


# -- functionals on maps ---------------------------------------------------------


@dataclass
class MapFunctional:
    """Objective on discrete maps; closed-form differential optional,
    otherwise nodewise central differences along tangent frames."""

    target: Manifold
    f: Callable[[DiscreteMap], float]
    grad: Callable[[DiscreteMap], np.ndarray] | None = None
    fd_step: float = 1e-6

    def value(self, u: DiscreteMap) -> float:
        v = float(self.f(u))
        if not math.isfinite(v):
            raise EvaluationError(f"map functional returned non-finite value {v!r}")
        return v

    def differential(self, u: DiscreteMap) -> np.ndarray:
        if self.grad is not None:
            return self.grad(u)
        m, h = self.target, self.fd_step
        out = np.zeros_like(u.values)
        for j in range(u.m):
            frame = m.tangent_frame(u.node(j))
            for ei in frame:
                up, um = u.values.copy(), u.values.copy()
                up[j] = m.exp_many(u.values[j][None], h * ei[None])[0]
                um[j] = m.exp_many(u.values[j][None], -h * ei[None])[0]
                c = (
                    self.value(DiscreteMap(m, up)) - self.value(DiscreteMap(m, um))
                ) / (2.0 * h)
                out[j] += c * ei
        return out


def dirichlet_energy(u: DiscreteMap) -> float:
    """Forward-difference discretization of (1/2) * integral |u'|^2 dt."""
    h = TWO_PI / u.m
    diffs = np.roll(u.values, -1, axis=0) - u.values
    return float(0.5 * np.sum(diffs * diffs) / h)


def dirichlet_differential(u: DiscreteMap) -> np.ndarray:
    """Discrete Laplacian, tangent-projected nodewise, through flat."""
    h = TWO_PI / u.m
    lap = np.roll(u.values, -1, axis=0) + np.roll(u.values, 1, axis=0) - 2.0 * u.values
    return u.target.tangent_project_many(u.values, -lap / h)


def dirichlet_functional(target: Manifold) -> MapFunctional:
    return MapFunctional(target, dirichlet_energy, dirichlet_differential)


def sobolev_tracking_functional(
    target: Manifold, reference: DiscreteMap, spec: SobolevSpec
) -> MapFunctional:
    """F(u) = 1/2 * norm_{s}(u - reference)^2 with spectral gradient."""
    mult = (1.0 + _wavenumbers(reference.m) ** 2) ** spec.s

    def value(u: DiscreteMap) -> float:
        return 0.5 * _sobolev_norm_of_array(u.values - reference.values, spec.s) ** 2

    def grad(u: DiscreteMap) -> np.ndarray:
        diff = u.values - reference.values
        hat = np.fft.fft(diff, axis=0)
        ambient = np.real(np.fft.ifft(mult[:, None] * hat, axis=0))
        return target.tangent_project_many(u.values, ambient)

    return MapFunctional(target, value, grad)


# -- descent over maps -----------------------------------------------------------


def run_mapping_descent(
    lin: Linearization,
    F: MapFunctional,
    u0: DiscreteMap,
    cfg: DescentConfig,
    s_diagnostics: tuple[float, ...] = (-1.0, 0.0),
) -> DescentTrace:
    """Descent with the pointwise-lifted linearization.

    Displacements are s = 0 Sobolev norms of ambient differences.  After
    the run, W^{s,2} distances of every iterate to the final iterate are
    recorded per requested s as weak-convergence diagnostics.
    """

    def path_fn(u: DiscreteMap, g: np.ndarray) -> ScalarPath:
        def f(t: float) -> float:
            sec = LiftedBundleElem(u, t * g, np.zeros(u.m))
            return F.value(lifted_delta(lin, sec)[1])

        return ScalarPath(f, -cfg.t_half, cfg.t_half)

    def step_fn(u: DiscreteMap, g: np.ndarray, t: float) -> DiscreteMap:
        sec = LiftedBundleElem(u, t * g, np.zeros(u.m))
        return lifted_delta(lin, sec)[1]

    def disp_fn(u: DiscreteMap, v: DiscreteMap) -> float:
        return _sobolev_norm_of_array(u.values - v.values, 0.0)

    trace = descent_loop(
        u0,
        F.value,
        F.differential,
        lambda g: float(np.linalg.norm(g)),
        path_fn,
        step_fn,
        disp_fn,
        cfg,
    )
    last = trace.iterates[-1]
    trace.sobolev_diag = {
        s: [sobolev_distance(u, last, SobolevSpec(s)) for u in trace.iterates]
        for s in s_diagnostics
    }
    return trace


# -- loop diagnostics -------------------------------------------------------------


def winding_number(u: DiscreteMap) -> int:
    """Degree of a loop into S^1 (circle in R^2) from wrapped angle steps."""
    if u.target.kind != "sphere" or u.target.ambient_dim != 2:
        raise ShapeError("winding number needs a loop into the circle")
    ang = np.arctan2(u.values[:, 1], u.values[:, 0])
    steps = np.diff(np.append(ang, ang[0]))
    steps = np.mod(steps + math.pi, TWO_PI) - math.pi
    return int(round(float(np.sum(steps) / TWO_PI)))


def max_step_arc(u: DiscreteMap, v: DiscreteMap) -> float:
    """Largest nodewise geodesic jump between consecutive iterates."""
    _check_compatible(u, v)
    return float(np.max(u.target.distance_many(u.values, v.values)))


# -- serialization ----------------------------------------------------------------


def write_map_csv(u: DiscreteMap, out: IO[str]) -> None:
    out.write("t," + ",".join(f"x{i}" for i in range(u.target.ambient_dim)) + "\n")
    for t, row in zip(u.grid, u.values):
        out.write(format(t, _FMT) + "," + ",".join(format(c, _FMT) for c in row) + "\n")


def write_spectrum_csv(u: DiscreteMap, spec: SobolevSpec, out: IO[str]) -> None:
    ks = _wavenumbers(u.m)
    mult = (1.0 + ks**2) ** spec.s
    coef = np.linalg.norm(u.spectrum, axis=-1)
    order = np.argsort(ks)
    out.write("k,multiplier,coefficient_norm\n")
    for i in order:
        out.write(
            f"{int(ks[i])},{format(mult[i], _FMT)},{format(float(coef[i]), _FMT)}\n"
        )
