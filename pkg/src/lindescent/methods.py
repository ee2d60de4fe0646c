"""One-dimensional improvement operators with an exact never-worse contract.

A method takes a scalar function on a compact interval and a point in it,
and returns a point whose value is never larger; it returns its input
exactly when no strictly better candidate was found.  Ties break toward
the input so the equivalence "moved iff strictly improved" holds exactly,
which the descent loop's stopping test relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import EvaluationError
from .report import AuditReport

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScalarPath:
    """A scalar function on the compact interval [a, b]."""

    f: Callable[[float], float]
    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError("interval must satisfy a < b")


@dataclass(frozen=True)
class GridRefine:
    """Scan a uniform grid, then refine around the best cell."""

    levels: int = 3
    points_per_level: int = 33

    def __post_init__(self) -> None:
        if self.levels < 1 or self.points_per_level < 2:
            raise ValueError("grid refinement needs levels >= 1 and >= 2 points")


@dataclass(frozen=True)
class GoldenSection:
    """Golden-section bracketing to a relative interval tolerance."""

    rel_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.max_iter < 1:
            raise ValueError("golden section needs rel_tol > 0 and max_iter >= 1")


@dataclass(frozen=True)
class ArmijoBacktrack:
    """Backtracking toward the descent side, sufficient-decrease test."""

    c: float = 0.5
    shrink: float = 0.5
    max_backtracks: int = 60

    def __post_init__(self) -> None:
        if not (0.0 < self.c < 1.0 and 0.0 < self.shrink < 1.0):
            raise ValueError("Armijo needs c and shrink in (0, 1)")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be >= 1")


MethodKind = Union[GridRefine, GoldenSection, ArmijoBacktrack]


def _eval(path: ScalarPath, t: float) -> float:
    v = float(path.f(t))
    if not math.isfinite(v):
        raise EvaluationError(f"path returned non-finite value {v!r} at t={t!r}")
    return v


def apply_method(method, path: ScalarPath, x: float) -> float:
    """Apply a method at x; the result never has a larger value and equals
    x exactly when nothing strictly better was found.

    ``method`` is one of the method kinds, or any callable
    (path, x) -> t for externally supplied steppers (those are re-filtered
    through the same strict-improvement rule).
    """
    if not (path.a <= x <= path.b):
        raise ValueError(f"start {x!r} outside [{path.a!r}, {path.b!r}]")
    fx = _eval(path, x)
    if isinstance(method, GridRefine):
        t, ft = _grid_refine(method, path, x, fx)
    elif isinstance(method, GoldenSection):
        t, ft = _golden(method, path, x, fx)
    elif isinstance(method, ArmijoBacktrack):
        t, ft = _armijo(method, path, x, fx)
    elif callable(method):
        t = float(method(path, x))
        if not (path.a <= t <= path.b):
            return x
        ft = _eval(path, t)
    else:
        raise TypeError(f"not a method: {method!r}")
    if t != x and ft < fx:
        return t
    return x


def _grid_refine(m: GridRefine, path: ScalarPath, x: float, fx: float):
    lo, hi = path.a, path.b
    best_t, best_f = x, fx
    for _ in range(m.levels):
        ts = np.linspace(lo, hi, m.points_per_level)
        for t in ts:
            ft = _eval(path, float(t))
            if ft < best_f:
                best_t, best_f = float(t), ft
        span = (hi - lo) / (m.points_per_level - 1)
        lo, hi = max(path.a, best_t - span), min(path.b, best_t + span)
    return best_t, best_f


def _golden(m: GoldenSection, path: ScalarPath, x: float, fx: float):
    lo, hi = path.a, path.b
    best_t, best_f = x, fx

    def probe(t: float) -> float:
        nonlocal best_t, best_f
        ft = _eval(path, t)
        if ft < best_f:
            best_t, best_f = t, ft
        return ft

    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = probe(c), probe(d)
    width0 = hi - lo
    for _ in range(m.max_iter):
        if hi - lo <= m.rel_tol * width0:
            break
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = probe(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = probe(d)
    probe(0.5 * (lo + hi))
    return best_t, best_f


def _armijo(m: ArmijoBacktrack, path: ScalarPath, x: float, fx: float):
    h = max(1e-9, 1e-7 * (path.b - path.a))
    tl, tr = max(path.a, x - h), min(path.b, x + h)
    if tr <= tl:
        return x, fx
    slope = (_eval(path, tr) - _eval(path, tl)) / (tr - tl)
    if slope == 0.0:
        return x, fx
    direction = -math.copysign(1.0, slope)
    reach = (path.b - x) if direction > 0 else (x - path.a)
    if reach == 0.0:
        return x, fx
    step = reach
    for _ in range(m.max_backtracks):
        t = x + direction * step
        ft = _eval(path, t)
        if ft <= fx - m.c * step * abs(slope):
            return t, ft
        step *= m.shrink
    return x, fx


def _random_paths(corpus: int, seed: int):
    """Random degree <= 6 polynomials and trigonometric blends on random
    compact intervals."""
    rng = np.random.default_rng(seed)
    for i in range(corpus):
        a = rng.uniform(-3.0, 3.0)
        b = a + rng.uniform(0.5, 4.0)
        if i % 2 == 0:
            coeffs = rng.standard_normal(rng.integers(1, 8))
            poly = np.polynomial.Polynomial(coeffs)
            yield ScalarPath(poly, a, b), rng
        else:
            amps = rng.standard_normal(4)
            freqs = rng.integers(1, 4, size=2)

            def trig(t, amps=amps, freqs=freqs):
                return (
                    amps[0]
                    + amps[1] * math.sin(freqs[0] * t)
                    + amps[2] * math.cos(freqs[1] * t)
                    + amps[3] * math.sin(t) * math.cos(t)
                )

            yield ScalarPath(trig, a, b), rng


def method_contract_audit(method, corpus: int, seed: int, starts: int = 10) -> AuditReport:
    """Exercise the contract on a random corpus: the value never increases
    and a move implies a strict improvement.  Accepts raw callables so
    intentionally broken steppers can be shown to fail."""
    if corpus < 1:
        raise ValueError("corpus must be >= 1")
    report = AuditReport("method contract audit")
    increase_violations = 0
    strictness_violations = 0
    escapes = 0
    worst_increase = 0.0
    cases = 0
    for path, rng in _random_paths(corpus, seed):
        for x in rng.uniform(path.a, path.b, size=starts):
            cases += 1
            x = float(x)
            fx = _eval(path, x)
            if callable(method) and not isinstance(
                method, (GridRefine, GoldenSection, ArmijoBacktrack)
            ):
                # audit raw candidates without the protective filter
                t = float(method(path, x))
                if not (path.a <= t <= path.b):
                    escapes += 1
                    continue
                ft = _eval(path, t)
            else:
                t = apply_method(method, path, x)
                ft = _eval(path, t)
            if ft > fx:
                increase_violations += 1
                worst_increase = max(worst_increase, ft - fx)
            if (t != x) != (ft < fx):
                strictness_violations += 1
    report.extras["cases"] = str(cases)
    report.add("never_increases", increase_violations == 0, worst_increase,
               f"({increase_violations} violations)")
    report.add("strict_improvement_iff_moved", strictness_violations == 0,
               float(strictness_violations))
    report.add("stays_in_interval", escapes == 0, float(escapes))
    return report
