"""Flat dotted-key run configuration.

One ``key = value`` assignment per line, ``#`` comments, no nesting.
Unknown keys, duplicates and type mismatches are rejected with a
file/line diagnostic.  Values are ints, floats, strings, or
comma-separated float lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .descent import (
    DescentConfig,
    Functional,
    euclidean_sqnorm,
    sphere_cosine,
    torus_height,
)
from .errors import ConfigError
from .gap_metric import GapFn, WitnessSet, grid_witnesses, random_witnesses
from .fixed_point import (
    SelfMap,
    contraction_map,
    identity_map,
    rotation_map,
    translation_map,
)
from .linearization import Linearization
from .manifolds import Manifold, Point, euclidean, sphere, torus
from .mapping_space import (
    DiscreteMap,
    MapFunctional,
    SobolevSpec,
    degree_loop,
    dirichlet_functional,
    latitude_loop,
    sobolev_tracking_functional,
)
from .methods import ArmijoBacktrack, GoldenSection, GridRefine, MethodKind

_INT = "int"
_FLOAT = "float"
_STR = "str"
_FLOATS = "floats"

# key -> (type, default); None default means "required if used"
SCHEMA: dict[str, tuple[str, object]] = {
    "seed": (_INT, 0),
    "manifold.kind": (_STR, None),
    "manifold.dim": (_INT, None),
    "manifold.r": (_FLOAT, 1.0),
    "linearization.cutoff_fraction": (_FLOAT, 0.9),
    "gap.shape": (_STR, "bounded-norm"),
    "witness.policy": (_STR, "random"),
    "witness.count": (_INT, 64),
    "witness.seed": (_INT, 0),
    "method.variant": (_STR, "golden_section_step"),
    "method.levels": (_INT, 3),
    "method.points_per_level": (_INT, 33),
    "method.c": (_FLOAT, 0.5),
    "method.shrink": (_FLOAT, 0.5),
    "descent.eps": (_FLOAT, 1e-8),
    "descent.n_max": (_INT, 200),
    "descent.t_half": (_FLOAT, 1.0),
    "descent.grad_zero_tol": (_FLOAT, 1e-12),
    "descent.displacement": (_STR, "gap"),
    "adherence.radius": (_FLOAT, 1e-3),
    "adherence.f_tol": (_FLOAT, 1e-6),
    "problem.kind": (_STR, "builtin"),
    "problem.functional": (_STR, None),
    "problem.target_point": (_FLOATS, None),
    "problem.start": (_STR, "random"),
    "problem.start_point": (_FLOATS, None),
    "problem.m": (_INT, 64),
    "problem.degree": (_INT, 1),
    "problem.perturb_amp": (_FLOAT, 0.0),
    "problem.perturb_mode": (_INT, 1),
    "problem.latitude_z": (_FLOAT, 0.5),
    "problem.s_list": (_FLOATS, (-1.0, 0.0)),
    "problem.track_s": (_FLOAT, -1.0),
    "fixed_point.map": (_STR, "contraction"),
    "fixed_point.angle": (_FLOAT, 3.141592653589793),
    "fixed_point.rate": (_FLOAT, 0.5),
    "fixed_point.target_point": (_FLOATS, None),
    "fixed_point.offset": (_FLOATS, None),
    "fixed_point.tol_fp": (_FLOAT, 1e-8),
    "fixed_point.n_orbit": (_INT, 5),
    "metric.pairs": (_INT, 20),
    "metric.triples": (_INT, 200),
    "output.trace": (_STR, None),
    "output.report": (_STR, None),
    "output.map": (_STR, None),
    "output.spectrum": (_STR, None),
}


def _parse_value(kind: str, raw: str, where: str):
    try:
        if kind == _INT:
            return int(raw)
        if kind == _FLOAT:
            return float(raw)
        if kind == _FLOATS:
            return tuple(float(tok) for tok in raw.split(","))
        return raw
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {kind}") from None


def parse_config(path: str | Path) -> dict:
    """Read a config file into a validated flat dict with defaults filled in."""
    values: dict[str, object] = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{path}:{lineno}"
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        values[key] = _parse_value(SCHEMA[key][0], raw, where)
    for key, (_, default) in SCHEMA.items():
        values.setdefault(key, default)
    return values


def _require(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise ConfigError(f"missing required key {key!r}")
    return cfg[key]


@dataclass
class Problem:
    """Everything a run needs, assembled from a parsed config."""

    manifold: Manifold
    lin: Linearization
    gap: GapFn
    witnesses: WitnessSet
    descent: DescentConfig
    seed: int
    cfg: dict
    functional: Functional | None = None
    start: Point | None = None
    map_functional: MapFunctional | None = None
    start_map: DiscreteMap | None = None
    self_map: SelfMap | None = None


def _build_manifold(cfg: dict) -> Manifold:
    kind = _require(cfg, "manifold.kind")
    dim = _require(cfg, "manifold.dim")
    if kind == "sphere":
        return sphere(dim)
    if kind == "torus":
        return torus(dim)
    if kind == "euclidean":
        return euclidean(dim, cfg["manifold.r"])
    raise ConfigError(f"manifold.kind: unknown kind {kind!r}")


def _build_method(cfg: dict) -> MethodKind:
    variant = cfg["method.variant"]
    if variant == "grid_refine":
        return GridRefine(cfg["method.levels"], cfg["method.points_per_level"])
    if variant == "golden_section_step":
        return GoldenSection()
    if variant == "armijo_backtrack":
        return ArmijoBacktrack(cfg["method.c"], cfg["method.shrink"])
    raise ConfigError(f"method.variant: unknown variant {variant!r}")


def _build_witnesses(cfg: dict, m: Manifold) -> WitnessSet:
    policy = cfg["witness.policy"]
    count = cfg["witness.count"]
    if count < 1:
        raise ConfigError("witness.count must be >= 1")
    if policy == "random":
        return random_witnesses(m, count, cfg["witness.seed"])
    if policy == "grid":
        return grid_witnesses(m, count)
    raise ConfigError(f"witness.policy: unknown policy {policy!r}")


def _point_from(cfg: dict, key: str, m: Manifold, fallback_seed: int) -> Point:
    coords = cfg.get(key)
    if coords is not None:
        try:
            return m.point(coords)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    return m.random_point(fallback_seed)


def _default_pole(m: Manifold) -> Point:
    coords = np.zeros(m.ambient_dim)
    coords[-1] = 1.0
    return Point(coords)


def build_problem(cfg: dict, require_objective: bool = True) -> Problem:
    m = _build_manifold(cfg)
    try:
        lin = Linearization(m, cutoff_fraction=cfg["linearization.cutoff_fraction"])
        gap = GapFn(cfg["gap.shape"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    witnesses = _build_witnesses(cfg, m)
    try:
        descent_cfg = DescentConfig(
            eps=cfg["descent.eps"],
            n_max=cfg["descent.n_max"],
            t_half=cfg["descent.t_half"],
            grad_zero_tol=cfg["descent.grad_zero_tol"],
            method=_build_method(cfg),
            displacement=cfg["descent.displacement"],
        )
    except ValueError as exc:
        raise ConfigError(f"descent: {exc}") from None
    seed = cfg["seed"]
    problem = Problem(m, lin, gap, witnesses, descent_cfg, seed, cfg)
    if not require_objective:
        return problem

    kind = cfg["problem.kind"]
    if kind == "builtin":
        name = _require(cfg, "problem.functional")
        if name == "sphere_cosine":
            pole = (
                m.point(cfg["problem.target_point"])
                if cfg.get("problem.target_point") is not None
                else _default_pole(m)
            )
            problem.functional = sphere_cosine(m, pole)
        elif name == "sqnorm":
            problem.functional = euclidean_sqnorm(m)
        elif name == "torus_height":
            problem.functional = torus_height(m)
        else:
            raise ConfigError(f"problem.functional: unknown functional {name!r}")
        if cfg["problem.start"] == "random":
            problem.start = m.random_point(seed)
        else:
            problem.start = _point_from(cfg, "problem.start_point", m, seed)
    elif kind == "mapping":
        grid = cfg["problem.m"]
        name = _require(cfg, "problem.functional")
        if m.kind == "sphere" and m.ambient_dim == 2:
            u0 = degree_loop(
                grid, cfg["problem.degree"], cfg["problem.perturb_amp"],
                cfg["problem.perturb_mode"],
            )
        elif m.kind == "sphere" and m.ambient_dim == 3:
            u0 = latitude_loop(grid, cfg["problem.latitude_z"])
        else:
            raise ConfigError("mapping problems support sphere targets of dim 1 or 2")
        if name == "dirichlet":
            problem.map_functional = dirichlet_functional(m)
        elif name == "sobolev_track":
            ref = degree_loop(grid, cfg["problem.degree"])
            problem.map_functional = sobolev_tracking_functional(
                m, ref, SobolevSpec(cfg["problem.track_s"])
            )
        else:
            raise ConfigError(f"problem.functional: unknown functional {name!r}")
        problem.start_map = u0
    elif kind == "fixed_point":
        name = cfg["fixed_point.map"]
        if name == "identity":
            problem.self_map = identity_map(m)
        elif name == "rotation":
            problem.self_map = rotation_map(m, cfg["fixed_point.angle"])
        elif name == "translation":
            problem.self_map = translation_map(
                m, _require(cfg, "fixed_point.offset")
            )
        elif name == "contraction":
            target = _point_from(cfg, "fixed_point.target_point", m, seed + 1)
            problem.self_map = contraction_map(m, target, cfg["fixed_point.rate"])
        else:
            raise ConfigError(f"fixed_point.map: unknown map {name!r}")
        if cfg["problem.start"] == "random":
            problem.start = m.random_point(seed)
        else:
            problem.start = _point_from(cfg, "problem.start_point", m, seed)
    else:
        raise ConfigError(f"problem.kind: unknown kind {kind!r}")
    return problem
