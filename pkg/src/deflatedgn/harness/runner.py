"""Experiment orchestration: run, compare, and beta-field emission."""

import os
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..deflation import DeflationState, add_deflation_point, beta_field
from ..exceptions import ConfigError
from ..multistart import MultistartConfig, multistart
from ..problems import PROBLEM_BUILDERS
from ..solvers import SOLVER_METHODS, SolutionSet, deflation_loop
from . import plots, reports
from .config import METHOD_NAMES, ExperimentConfig, resolve_x0

OUTPUT_ROOT_ENV = "DEFLATEDGN_OUTPUT_ROOT"


def default_output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))


def _prepare_output_dir(config: ExperimentConfig, label: str) -> Path:
    if config.output_dir:
        out = Path(config.output_dir)
    else:
        out = default_output_root() / f"{config.problem}_{label}_{time.strftime('%Y%m%d-%H%M%S')}"
    out.mkdir(parents=True, exist_ok=True)
    return out


@dataclass
class RunReport:
    config: ExperimentConfig
    output_dir: Path
    solutions: SolutionSet
    rounds: tuple
    discoveries: tuple
    total_residual_evals: int
    total_jacobian_evals: int
    wall_time_s: float

    @property
    def n_solutions(self) -> int:
        return len(self.solutions)


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Execute one configured experiment and write its artifacts.

    The output directory receives report.json, one trace_round_<k>.csv per
    round (or discoveries.csv for multistart), problem-specific exports such
    as BVP grid values, and rendered figures unless plots are disabled.
    """
    config.validate()
    problem = config.build_problem()
    out = _prepare_output_dir(config, config.method)
    started = time.perf_counter()
    if config.method == "multistart":
        report = _run_multistart(config, problem, out)
    else:
        report = _run_solver(config, problem, out)
    report.wall_time_s = time.perf_counter() - started
    _write_report_json(report, problem, out)
    _export_problem_outputs(report, problem, out)
    return report


def _run_solver(config: ExperimentConfig, problem, out: Path) -> RunReport:
    x0 = resolve_x0(config, problem)
    solver_config = config.solver_config()
    method = config.method
    if method in ("newton_root", "gauss_newton"):
        result = SOLVER_METHODS[method](problem, x0, solver_config)
        solutions = SolutionSet(metric=problem.metric)
        if result.converged:
            from ..solvers import Solution

            solutions.add(
                Solution(
                    x=result.x,
                    residual_norm=result.residual_norm,
                    grad_norm=result.grad_norm,
                    objective=0.5 * result.residual_norm**2,
                    round_index=0,
                    iterations=result.iterations,
                    cum_residual_evals=result.n_residual_evals,
                    cum_jacobian_evals=result.n_jacobian_evals,
                )
            )
        rounds = (result,)
        totals = (result.n_residual_evals, result.n_jacobian_evals)
    else:
        loop = deflation_loop(
            method,
            problem,
            x0,
            rounds=config.rounds,
            config=solver_config,
            deflation=config.deflation_config(),
            stop_on_failure=config.stop_on_failure,
        )
        solutions = loop.solutions
        rounds = loop.rounds
        totals = (loop.total_residual_evals, loop.total_jacobian_evals)
    for k, result in enumerate(rounds):
        reports.write_trace_csv(out / f"trace_round_{k}.csv", result.trace)
    report = RunReport(
        config=config,
        output_dir=out,
        solutions=solutions,
        rounds=rounds,
        discoveries=(),
        total_residual_evals=totals[0],
        total_jacobian_evals=totals[1],
        wall_time_s=0.0,
    )
    return report


def _run_multistart(config: ExperimentConfig, problem, out: Path) -> RunReport:
    bounds = np.asarray(config.bounds, dtype=float) if config.bounds else problem.bounds
    if bounds is None:
        raise ConfigError(f"multistart on {problem.name!r} needs bounds")
    ms_config = MultistartConfig(
        bounds=bounds,
        n_starts=config.n_starts,
        rng_seed=config.seed,
        solver=config.solver_config(),
    )
    result = multistart(problem, ms_config)
    reports.write_csv(
        out / "discoveries.csv",
        ("discovery_index", "start_index", "cum_residual_evals", "cum_jacobian_evals"),
        [
            (d.index, d.start_index, d.cum_residual_evals, d.cum_jacobian_evals)
            for d in result.discoveries
        ],
    )
    return RunReport(
        config=config,
        output_dir=out,
        solutions=result.solutions,
        rounds=(),
        discoveries=result.discoveries,
        total_residual_evals=result.total_residual_evals,
        total_jacobian_evals=result.total_jacobian_evals,
        wall_time_s=0.0,
    )


def _write_report_json(report: RunReport, problem, out: Path) -> None:
    solution_indices = {}
    solutions_json = []
    for i, sol in enumerate(report.solutions):
        solutions_json.append(reports.solution_entry(i, sol))
        solution_indices[sol.round_index] = i
    rounds_json = [
        reports.round_entry(k, result, solution_indices.get(k))
        for k, result in enumerate(report.rounds)
    ]
    doc = {
        "schema": reports.REPORT_SCHEMA,
        "config": report.config.to_dict(),
        "problem": problem.name,
        "method": report.config.method,
        "rounds": rounds_json,
        "solutions": solutions_json,
        "discoveries": [
            {
                "index": d.index,
                "start_index": d.start_index,
                "cum_residual_evals": d.cum_residual_evals,
                "cum_jacobian_evals": d.cum_jacobian_evals,
            }
            for d in report.discoveries
        ],
        "totals": {
            "residual_evals": report.total_residual_evals,
            "jacobian_evals": report.total_jacobian_evals,
            "rounds_converged": sum(1 for r in report.rounds if r.converged),
            "n_solutions": len(report.solutions),
        },
        "wall_time_s": report.wall_time_s,
    }
    reports.write_report(out / "report.json", doc)


def _export_problem_outputs(report: RunReport, problem, out: Path) -> None:
    grid = problem.extras.get("grid")
    if grid is not None:
        for i, sol in enumerate(report.solutions):
            values = grid.evaluate(sol.x)
            reports.write_csv(
                out / f"bvp_solution_{i}.csv",
                ("node", "u_re", "u_im"),
                [
                    (repr(float(xk)), repr(float(v.real)), repr(float(v.imag)))
                    for xk, v in zip(grid.nodes, values)
                ],
            )
    if not report.config.plots:
        return
    if report.rounds:
        plots.plot_convergence(out / "convergence.png", [r.trace for r in report.rounds])
    if grid is not None and len(report.solutions):
        plots.plot_bvp_solutions(out / "bvp_solutions.png", grid, report.solutions.points())
    elif problem.n_params == 2:
        plots.plot_solutions_2d(
            out / "solutions.png", problem, report.solutions.points(), bounds=problem.bounds
        )
    if report.discoveries:
        plots.plot_discoveries(
            out / "discoveries.png",
            {"multistart": [(d.index, d.cum_residual_evals) for d in report.discoveries]},
        )


def compare_methods(configs, output_dir=None) -> Path:
    """Run several configs on the same problem and tabulate discovery costs.

    Writes compare.csv with one row per (method, discovery): the round or
    start index, iterations, and cumulative evaluation counts, plus a figure.
    """
    if len(configs) < 2:
        raise ConfigError("compare needs at least 2 configs")
    keys = {c.problem_key() for c in configs}
    if len(keys) != 1:
        raise ConfigError(f"compare requires a single shared problem, got {sorted(keys)}")
    out = Path(output_dir) if output_dir else _prepare_output_dir(configs[0], "compare")
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    series = {}
    for i, config in enumerate(configs):
        sub = config.with_overrides({"output_dir": str(out / f"run_{i}_{config.method}")})
        report = run_experiment(sub)
        label = f"{config.method}[{i}]"
        if report.discoveries:
            pairs = [(d.index, d.cum_residual_evals) for d in report.discoveries]
            for d in report.discoveries:
                rows.append(
                    (label, d.index, d.start_index, "", d.cum_residual_evals, d.cum_jacobian_evals)
                )
        else:
            pairs = []
            for j, sol in enumerate(report.solutions):
                pairs.append((j, sol.cum_residual_evals))
                rows.append(
                    (
                        label,
                        j,
                        sol.round_index,
                        sol.iterations,
                        sol.cum_residual_evals,
                        sol.cum_jacobian_evals,
                    )
                )
        series[label] = pairs
    reports.write_csv(
        out / "compare.csv",
        (
            "method",
            "discovery_index",
            "round_or_start",
            "iterations",
            "cum_residual_evals",
            "cum_jacobian_evals",
        ),
        rows,
    )
    if any(c.plots for c in configs):
        plots.plot_discoveries(out / "compare.png", series)
    return out


def emit_beta_field(config: ExperimentConfig, output_dir=None) -> Path:
    """Evaluate the beta field of a 2-parameter problem and classify regions.

    Deflated points come from ``config.deflated_points`` when given, otherwise
    from running the configured deflation loop first.  Each grid node is
    written as (x, y, beta, region) with regions green (beta > 1 - epsilon),
    yellow (0 <= beta <= 1 - epsilon), red (beta < 0), or missing.
    """
    config.validate()
    problem = config.build_problem()
    if problem.n_params != 2:
        raise ConfigError("beta-field requires a 2-parameter problem")
    out = Path(output_dir) if output_dir else _prepare_output_dir(config, "beta_field")
    out.mkdir(parents=True, exist_ok=True)
    state = DeflationState(config=config.deflation_config(), metric=problem.metric)
    if config.deflated_points:
        for point in config.deflated_points:
            state = add_deflation_point(state, np.asarray(point, dtype=float))
    elif config.method in ("newton_root", "gauss_newton"):
        pass  # plain methods deflate nothing; emit the undeflated field
    else:
        loop = deflation_loop(
            config.method,
            problem,
            resolve_x0(config, problem),
            rounds=config.rounds,
            config=config.solver_config(),
            deflation=config.deflation_config(),
            stop_on_failure=config.stop_on_failure,
        )
        for point in loop.solutions.points():
            state = add_deflation_point(state, point)
    xmin, xmax, ymin, ymax, nx, ny = config.grid
    xs = np.linspace(xmin, xmax, int(nx))
    ys = np.linspace(ymin, ymax, int(ny))
    beta = beta_field(problem, state, xs, ys)
    regions = classify_regions(beta, config.epsilon)
    rows = []
    for i, xv in enumerate(xs):
        for j, yv in enumerate(ys):
            rows.append((repr(float(xv)), repr(float(yv)), repr(float(beta[i, j])), regions[i, j]))
    reports.write_csv(out / "beta_field.csv", ("x", "y", "beta", "region"), rows)
    if config.plots:
        plots.plot_beta_field(out / "beta_field.png", xs, ys, beta, regions, config.epsilon)
    return out


def classify_regions(beta: np.ndarray, epsilon: float) -> np.ndarray:
    """Three-region classification of a beta field."""
    regions = np.full(beta.shape, "missing", dtype=object)
    finite = np.isfinite(beta)
    regions[finite & (beta > 1.0 - epsilon)] = "green"
    regions[finite & (beta <= 1.0 - epsilon) & (beta >= 0.0)] = "yellow"
    regions[finite & (beta < 0.0)] = "red"
    return regions


def list_problems() -> list[str]:
    return sorted(PROBLEM_BUILDERS)


def list_methods() -> list[str]:
    return list(METHOD_NAMES)
