"""Command-line front end.

Subcommands: ``solve`` (descent run, trace CSV plus summary report),
``fixed-point`` (descent on the fixed-point objective plus its report),
``metric`` (distance table and metric-axiom audit), ``check`` (the fixed
invariant suite).  Exit codes: 0 success, 1 configuration or runtime
error, 2 iteration budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .adherence import cluster_limits
from .config import Problem, build_problem, parse_config
from .descent import StopReason, run_descent, write_trace_csv
from .errors import ConfigError, EvaluationError
from .gap_metric import GapMetric, metric_audit
from .linearization import check_linearization, drop_k, Linearization
from .manifolds import euclidean, sphere, torus
from .mapping_space import (
    SobolevSpec,
    run_mapping_descent,
    sobolev_norm,
    winding_number,
    write_map_csv,
    write_spectrum_csv,
    degree_loop,
)
from .fixed_point import run_fixed_point
from .methods import GridRefine, method_contract_audit

_OUT_ENV = "LINDESCENT_OUTPUT_DIR"


def _out_dir() -> Path:
    return Path(os.environ.get(_OUT_ENV, "."))


def _resolve(path_value: str | None, default_name: str) -> Path:
    if path_value is None:
        return _out_dir() / default_name
    p = Path(path_value)
    return p if p.is_absolute() else _out_dir() / p


def _load(args, require_objective: bool = True) -> Problem:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.max_iter is not None:
        cfg["descent.n_max"] = args.max_iter
    if args.tol is not None:
        cfg["descent.eps"] = args.tol
    return build_problem(cfg, require_objective)


def _seed_variants(problem_cfg: dict, args) -> list[int]:
    base = problem_cfg["seed"]
    return [base + i for i in range(max(1, args.jobs))]


def _suffixed(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix + path.suffix)


def _exit_code_for(stop: StopReason) -> int:
    return 2 if stop is StopReason.MAX_ITERATIONS else 0


def cmd_solve(args) -> int:
    problem = _load(args)
    cfg = problem.cfg
    trace_path = _resolve(args.output or cfg["output.trace"], "trace.csv")
    report_path = _resolve(cfg["output.report"], "report.txt")
    codes = []
    seeds = _seed_variants(cfg, args)
    for i, seed in enumerate(seeds):
        cfg["seed"] = seed
        problem = build_problem(cfg)
        tpath = trace_path if len(seeds) == 1 else _suffixed(trace_path, f"-seed{seed}")
        rpath = report_path if len(seeds) == 1 else _suffixed(report_path, f"-seed{seed}")
        if problem.map_functional is not None:
            trace = run_mapping_descent(
                problem.lin,
                problem.map_functional,
                problem.start_map,
                problem.descent,
                tuple(cfg["problem.s_list"]),
            )
        else:
            trace = run_descent(
                problem.lin,
                problem.functional,
                problem.start,
                problem.descent,
                problem.witnesses,
                problem.gap,
            )
        with open(tpath, "w") as out:
            write_trace_csv(trace, out)
        clusters = cluster_limits(
            trace, cfg["adherence.radius"], cfg["adherence.f_tol"]
        )
        with open(rpath, "w") as out:
            out.write(f"stop: {trace.stop.value}\n")
            out.write(f"iterations: {len(trace) - 1}\n")
            out.write(f"final_value: {trace.values[-1]:.17g}\n")
            out.write(clusters.to_text())
            if trace.sobolev_diag is not None:
                for s, series in sorted(trace.sobolev_diag.items()):
                    out.write(f"sobolev_diag[s={s:g}]: {series[-1]:.17g}\n")
        if problem.map_functional is not None:
            if cfg["output.map"] is not None:
                with open(_resolve(cfg["output.map"], "map.csv"), "w") as out:
                    write_map_csv(trace.last, out)
            if cfg["output.spectrum"] is not None:
                spec = SobolevSpec(cfg["problem.s_list"][0])
                with open(_resolve(cfg["output.spectrum"], "spectrum.csv"), "w") as out:
                    write_spectrum_csv(trace.last, spec, out)
        print(f"solve[seed={seed}]: stop={trace.stop.value} "
              f"F={trace.values[-1]:.6g} trace={tpath}")
        codes.append(_exit_code_for(trace.stop))
    return max(codes)


def cmd_fixed_point(args) -> int:
    problem = _load(args)
    cfg = problem.cfg
    if problem.self_map is None:
        raise ConfigError("fixed-point command needs problem.kind = fixed_point")
    trace_path = _resolve(args.output or cfg["output.trace"], "fixed_point_trace.csv")
    report_path = _resolve(cfg["output.report"], "fixed_point_report.txt")
    trace, report = run_fixed_point(
        problem.lin,
        problem.gap,
        problem.self_map,
        problem.start,
        problem.descent,
        problem.witnesses,
        tol_fp=cfg["fixed_point.tol_fp"],
        n_orbit=cfg["fixed_point.n_orbit"],
        cluster_radius=cfg["adherence.radius"],
    )
    with open(trace_path, "w") as out:
        write_trace_csv(trace, out)
    with open(report_path, "w") as out:
        out.write(report.to_text())
    print(f"fixed-point: {report.message} (stop={trace.stop.value})")
    return _exit_code_for(trace.stop)


def cmd_metric(args) -> int:
    problem = _load(args, require_objective=False)
    cfg = problem.cfg
    metric = GapMetric(problem.lin, problem.gap, problem.witnesses)
    report_path = _resolve(args.output or cfg["output.report"], "metric_report.txt")
    pairs = problem.manifold.random_points(2 * cfg["metric.pairs"], problem.seed)
    audit = metric_audit(metric, cfg["metric.triples"], problem.seed)
    with open(report_path, "w") as out:
        out.write("pair_table: i d_X geodesic\n")
        for i in range(cfg["metric.pairs"]):
            x, y = pairs[2 * i], pairs[2 * i + 1]
            out.write(
                f"{i} {metric.dist_x(x, y):.17g} "
                f"{problem.manifold.distance(x, y):.17g}\n"
            )
        out.write(audit.to_text())
    print(f"metric: {'pass' if audit.passed else 'FAIL'} report={report_path}")
    return 0 if audit.passed else 1


CHECKS = (
    "linearization_sphere",
    "linearization_torus",
    "linearization_euclidean",
    "method_grid_refine",
    "method_golden_section",
    "method_armijo",
    "metric_sphere",
    "parseval",
    "finite_difference_gradient",
)


def cmd_check(args) -> int:
    if args.list:
        for name in CHECKS:
            print(name)
        return 0
    import numpy as np

    from .descent import Functional, sphere_cosine
    from .gap_metric import GapFn, random_witnesses
    from .manifolds import Point

    failures = 0

    def run(name: str, passed: bool, detail: str = "") -> None:
        nonlocal failures
        print(f"check {name}: {'pass' if passed else 'FAIL'} {detail}".rstrip())
        if not passed:
            failures += 1

    for name, m in (
        ("linearization_sphere", sphere(2)),
        ("linearization_torus", torus(2)),
        ("linearization_euclidean", euclidean(3)),
    ):
        lin = Linearization(m)
        if args.inject_fault == "drop-k":
            lin = drop_k(lin)
        rep = check_linearization(lin, samples=50, seed=7)
        run(name, rep.passed)

    from .methods import ArmijoBacktrack, GoldenSection

    for name, method in (
        ("method_grid_refine", GridRefine()),
        ("method_golden_section", GoldenSection()),
        ("method_armijo", ArmijoBacktrack()),
    ):
        rep = method_contract_audit(method, corpus=40, seed=11)
        run(name, rep.passed)

    m2 = sphere(2)
    metric = GapMetric(Linearization(m2), GapFn(), random_witnesses(m2, 64, 3))
    run("metric_sphere", metric_audit(metric, 50, 5).passed)

    u = degree_loop(64, 1, 0.2, 3)
    l2 = float(np.linalg.norm(u.values))
    run("parseval", abs(sobolev_norm(u, SobolevSpec(0.0)) - l2) <= 1e-12)

    pole = Point(np.array([0.0, 0.0, 1.0]))
    F = sphere_cosine(m2, pole)
    F_fd = Functional(m2, F.f)
    worst = 0.0
    for x in m2.random_points(20, 13):
        a, b = F.differential(x).covec, F_fd.differential(x).covec
        denom = max(float(np.linalg.norm(a)), 1e-9)
        worst = max(worst, float(np.linalg.norm(a - b)) / denom)
    run("finite_difference_gradient", worst <= 1e-5, f"(worst rel {worst:.2e})")

    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindescent",
        description="descent via linearization paths on built-in manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("config", help="path to a dotted-key config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--jobs", type=int, default=1,
                       help="fan out this many consecutive seeds")

    p_solve = sub.add_parser("solve", help="run a descent problem")
    add_common(p_solve)
    p_solve.set_defaults(fn=cmd_solve)

    p_fp = sub.add_parser("fixed-point", help="search for a fixed point")
    add_common(p_fp)
    p_fp.set_defaults(fn=cmd_fixed_point)

    p_metric = sub.add_parser("metric", help="tabulate and audit the gap metric")
    add_common(p_metric)
    p_metric.set_defaults(fn=cmd_metric)

    p_check = sub.add_parser("check", help="run the invariant suite")
    p_check.add_argument("--list", action="store_true", help="list check names")
    p_check.add_argument("--inject-fault", choices=["drop-k"], default=None,
                         help="deliberately break a component (harness test)")
    p_check.add_argument("--seed", type=int, default=None)
    p_check.add_argument("--output", default=None)
    p_check.add_argument("--max-iter", type=int, default=None)
    p_check.add_argument("--tol", type=float, default=None)
    p_check.set_defaults(fn=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EvaluationError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
