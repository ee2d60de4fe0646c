"""Two-sided linearization (nu, delta) over the augmented cotangent bundle.

The bundle over a manifold X is E = T*X x R: a covector slot plus a scalar
slot.  ``nu(x, y)`` packs a cut-off logarithm together with the geodesic
distance, so it vanishes exactly on the diagonal even past the cut locus,
where the covector part alone would have to vanish spuriously.  ``delta``
maps a bundle element back to a pair of points through a saturated
exponential whose argument norm stays below the injectivity radius for
any scalar slot k >= 0.

The cut-off is an explicit smooth bump: identically 1 on
[0, rho_c * r * (1 - w)], identically 0 from rho_c * r on, glued by the
standard exp(-1/s) transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FiberMismatchError
from .manifolds import CotangentVec, Manifold, Point, TangentVec, same_point
from .report import AuditReport


@dataclass(frozen=True, eq=False)
class BundleElem:
    """Element of the fiber E_x = T*_x X x R."""

    base: Point
    xi: CotangentVec
    k: float

    def __post_init__(self) -> None:
        if not same_point(self.xi.base, self.base):
            raise FiberMismatchError("covector slot based at a different point")

    @property
    def xi_norm(self) -> float:
        return float(np.linalg.norm(self.xi.covec))

    def is_zero(self) -> bool:
        return self.k == 0.0 and not np.any(self.xi.covec)

    def __sub__(self, other: "BundleElem") -> "BundleElem":
        if not same_point(self.base, other.base):
            raise FiberMismatchError("bundle elements lie in different fibers")
        return BundleElem(
            self.base,
            CotangentVec(self.base, self.xi.covec - other.xi.covec),
            self.k - other.k,
        )

    def __mul__(self, scalar: float) -> "BundleElem":
        return BundleElem(
            self.base, CotangentVec(self.base, scalar * self.xi.covec), scalar * self.k
        )

    __rmul__ = __mul__


def zero_elem(x: Point, ambient_dim: int) -> BundleElem:
    return BundleElem(x, CotangentVec(x, np.zeros(ambient_dim)), 0.0)


def _bump(s: np.ndarray) -> np.ndarray:
    """exp(-1/s) continued by 0 for s <= 0; the C-infinity glue."""
    out = np.zeros_like(s)
    pos = s > 0.0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


@dataclass
class Linearization:
    """The pair (nu, delta) for one of the built-in manifolds.

    ``cutoff_fraction`` (rho_c) places the outer edge of the bump at
    rho_c * r; ``transition_width`` is the fraction of that length used
    for the smooth transition.
    """

    manifold: Manifold
    cutoff_fraction: float = 0.9
    transition_width: float = 0.1

    def __post_init__(self) -> None:
        if not (0.0 < self.cutoff_fraction < 1.0):
            raise ValueError("cutoff_fraction must lie in (0, 1)")
        if not (0.0 < self.transition_width < 1.0):
            raise ValueError("transition_width must lie in (0, 1)")

    @property
    def cutoff_outer(self) -> float:
        return self.cutoff_fraction * self.manifold.r

    @property
    def cutoff_inner(self) -> float:
        return self.cutoff_outer * (1.0 - self.transition_width)

    def cutoff_many(self, t: np.ndarray) -> np.ndarray:
        """Smooth monotone bump chi: 1 on [0, inner], 0 on [outer, inf)."""
        a, b = self.cutoff_inner, self.cutoff_outer
        out = np.ones_like(t)
        out[t >= b] = 0.0
        mid = (t > a) & (t < b)
        if np.any(mid):
            s = (t[mid] - a) / (b - a)
            up, down = _bump(1.0 - s), _bump(s)
            out[mid] = up / (up + down)
        return out

    def cutoff(self, t: float) -> float:
        return float(self.cutoff_many(np.asarray([t], dtype=float))[0])

    # -- nu ----------------------------------------------------------------

    def nu_arrays(self, bases: np.ndarray, y: Point) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized nu(z_i, y) over base rows: covector components and
        scalar slots.  The log is only evaluated where the cut-off is
        positive, which keeps it strictly inside the injectivity radius."""
        m = self.manifold
        tgt = np.broadcast_to(y.coords, bases.shape)
        d = m.distance_many(bases, tgt)
        xis = np.zeros_like(bases)
        chi = self.cutoff_many(d)
        mask = chi > 0.0
        if np.any(mask):
            logs = m.log_many(bases[mask], tgt[mask])
            xis[mask] = chi[mask, None] * logs
        return xis, d

    def nu(self, x: Point, y: Point) -> BundleElem:
        """nu(x, y) = (chi(d) * flat(log_x y), d(x, y)); zero iff x == y."""
        xis, ks = self.nu_arrays(x.coords[None], y)
        return BundleElem(x, CotangentVec(x, xis[0]), float(ks[0]))

    # -- delta ---------------------------------------------------------------

    def delta_scale(self, k, vv):
        """Saturation factor r / sqrt(1 + <(1+k)v, (1+k)v>)."""
        return self.manifold.r / np.sqrt(1.0 + (1.0 + k) ** 2 * vv)

    def delta(self, e: BundleElem) -> tuple[Point, Point]:
        """Pair (base, exp_base(saturated sharp(xi))); total on E."""
        m = self.manifold
        v = m.sharp(e.xi).vec
        scale = float(self.delta_scale(e.k, np.dot(v, v)))
        return e.base, m.exp(e.base, TangentVec(e.base, scale * v))

    # -- derived pairing -------------------------------------------------------

    def pairing_k(self, xi: CotangentVec, y: Point) -> float:
        """<sharp(nu(x, y).xi), sharp(xi)> with x the covector's base point;
        vanishes whenever y equals the base point."""
        m = self.manifold
        e = self.nu(xi.base, y)
        return m.inner(m.sharp(e.xi).vec, m.sharp(xi).vec)


@dataclass
class KDroppedLinearization(Linearization):
    """Deliberately broken variant: the scalar slot is discarded, so nu
    vanishes on far pairs.  Fault-injection fixture for the audit."""

    def nu(self, x: Point, y: Point) -> BundleElem:
        e = super().nu(x, y)
        return BundleElem(e.base, e.xi, 0.0)


def drop_k(lin: Linearization) -> Linearization:
    return KDroppedLinearization(
        lin.manifold, lin.cutoff_fraction, lin.transition_width
    )


def _far_point(m: Manifold, x: Point) -> Point:
    """A point at or beyond the cut-off from x (antipode-style)."""
    if m.kind == "sphere":
        return Point(-x.coords)
    if m.kind == "torus":
        return Point(m.project_many((x.coords + math.pi)[None])[0])
    shift = np.zeros(m.ambient_dim)
    shift[0] = m.r
    return Point(x.coords + shift)


def check_linearization(
    lin: Linearization, samples: int, seed: int, fd_step: float = 1e-5
) -> AuditReport:
    """Numerical audit of the defining properties of (nu, delta).

    Checks, per random sample: the zero-section/diagonal correspondence,
    commutation with the projections, vanishing of nu exactly on the
    diagonal (including deterministic far pairs past the cut-off), a
    nonzero differential of y -> nu(x, y) at y = x, the derivative-at-zero
    identity of (1/r) nu composed with delta on the k = 0 slice, and
    injectivity (numerical rank) of the induced map on sampled frames.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    m = lin.manifold
    points = m.random_points(2 * samples, seed)
    rng = np.random.default_rng(seed + 1)
    report = AuditReport("linearization audit")

    worst_zero = 0.0
    zero_ok = True
    worst_proj = 0.0
    min_pair_sep = math.inf
    vanish_ok = True
    worst_dnu = math.inf
    worst_ident = 0.0
    worst_rank = math.inf

    for i in range(samples):
        x, y = points[2 * i], points[2 * i + 1]
        frame = m.tangent_frame(x)

        # zero section <-> diagonal, both directions, exact
        e0 = zero_elem(x, m.ambient_dim)
        b, second = lin.delta(e0)
        if not (same_point(b, x) and same_point(second, x)):
            zero_ok = False
            worst_zero = max(worst_zero, m.distance(second, x))
        if not lin.nu(x, x).is_zero():
            zero_ok = False
            worst_zero = max(worst_zero, abs(lin.nu(x, x).k))

        # projections commute
        exy = lin.nu(x, y)
        worst_proj = max(worst_proj, 0.0 if same_point(exy.base, x) else 1.0)
        eb = BundleElem(x, CotangentVec(x, rng.standard_normal(m.ambient_dim)), 0.5)
        worst_proj = max(worst_proj, 0.0 if same_point(lin.delta(eb)[0], x) else 1.0)

        # nu(x, y) = 0 iff x = y, stressed with a far pair past the cut-off
        for other in (y, _far_point(m, x)):
            if same_point(x, other):
                continue
            e = lin.nu(x, other)
            sep = math.hypot(e.xi_norm, e.k)
            min_pair_sep = min(min_pair_sep, sep)
            if e.is_zero():
                vanish_ok = False

        # differential of y -> nu(x, y) at y = x is nonzero
        best_dir = 0.0
        for ei in frame:
            tv = TangentVec(x, fd_step * ei)
            ep = lin.nu(x, m.exp(x, tv))
            em = lin.nu(x, m.exp(x, TangentVec(x, -fd_step * ei)))
            diff = ep - em
            rate = math.hypot(diff.xi_norm, diff.k) / (2.0 * fd_step)
            best_dir = max(best_dir, rate)
        worst_dnu = min(worst_dnu, best_dir)

        # derivative identity for (1/r) nu o delta restricted to k = 0
        coeffs = rng.standard_normal(m.dim)
        coeffs *= rng.uniform(0.25, 2.0) / np.linalg.norm(coeffs)
        xi = CotangentVec(x, coeffs @ frame)
        e = BundleElem(x, xi, 0.0)
        _, yh = lin.delta(fd_step * e)
        resid = np.linalg.norm(
            lin.nu(x, yh).xi.covec / m.r - fd_step * xi.covec
        ) / fd_step
        worst_ident = max(worst_ident, float(resid))

        # induced cotangent map injective: numerical rank of d(delta o nu)(x, .)
        jac = np.empty((m.dim, m.dim))
        for j, ej in enumerate(frame):
            yp = m.exp(x, TangentVec(x, fd_step * ej))
            ym = m.exp(x, TangentVec(x, -fd_step * ej))
            pp = lin.delta(lin.nu(x, yp))[1].coords
            pm = lin.delta(lin.nu(x, ym))[1].coords
            jac[:, j] = frame @ ((pp - pm) / (2.0 * fd_step))
        worst_rank = min(worst_rank, float(np.linalg.svd(jac, compute_uv=False)[-1]))

    report.add("zero_section_diagonal", zero_ok and worst_zero == 0.0, worst_zero)
    report.add("projection_commutes", worst_proj == 0.0, worst_proj)
    report.add(
        "vanish_iff_equal",
        vanish_ok and min_pair_sep > 0.0,
        min_pair_sep,
        "(min separation over distinct pairs)",
    )
    report.add(
        "derivative_nonzero", worst_dnu > 0.5, worst_dnu, "(min differential norm)"
    )
    report.add("derivative_identity", worst_ident <= 1e-5, worst_ident)
    report.add(
        "cotangent_injective", worst_rank > 1e-3, worst_rank, "(min singular value)"
    )
    return report
