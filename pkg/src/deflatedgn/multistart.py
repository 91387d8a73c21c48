"""Random-restart Gauss-Newton baseline with evaluation accounting.

Start points are sampled uniformly from a box with a counter-based PRNG, so a
fixed seed reproduces the run bit for bit.  Bounds are used only for sampling;
the inner solver is unconstrained, and returned minima are merely required to
stay inside a slightly inflated box.
"""

from dataclasses import dataclass, field

import numpy as np

from .deflation import EUCLIDEAN
from .problems.base import Problem
from .solvers import Solution, SolutionSet, SolverConfig, gauss_newton


@dataclass(frozen=True)
class MultistartConfig:
    bounds: np.ndarray  # (n_params, 2) sampling intervals
    n_starts: int = 300
    rng_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    grad_tol: float = 1e-6  # acceptance threshold on ||grad f||
    bounds_slack: float = 0.1  # returned minima may overshoot the box by this fraction

    def __post_init__(self):
        bounds = np.asarray(self.bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2 or np.any(bounds[:, 1] <= bounds[:, 0]):
            raise ValueError("bounds must be (n_params, 2) nonempty intervals")
        object.__setattr__(self, "bounds", bounds)
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")


@dataclass(frozen=True)
class Discovery:
    """Cumulative evaluation counts at the moment a new minimum was found."""

    index: int
    start_index: int
    cum_residual_evals: int
    cum_jacobian_evals: int


@dataclass(frozen=True)
class MultistartResult:
    solutions: SolutionSet
    discoveries: tuple
    statuses: tuple
    total_residual_evals: int
    total_jacobian_evals: int

    @property
    def n_converged(self) -> int:
        return sum(1 for s in self.statuses if s == "converged")


def sample_starts(config: MultistartConfig, n_params: int) -> np.ndarray:
    """The deterministic start points used by ``multistart``."""
    if config.bounds.shape[0] != n_params:
        raise ValueError("bounds do not match the problem dimension")
    rng = np.random.Generator(np.random.Philox(config.rng_seed))
    lo = config.bounds[:, 0]
    hi = config.bounds[:, 1]
    return lo + (hi - lo) * rng.random((config.n_starts, n_params))


def multistart(problem: Problem, config: MultistartConfig) -> MultistartResult:
    """Run line-searched Gauss-Newton from each sampled start point.

    A start contributes a minimum when it converges with ||grad f|| below
    ``grad_tol`` and lands inside the inflated box; evaluation counts at each
    new distinct minimum are recorded for cost comparisons.
    """
    if problem.field_kind != "real":
        raise ValueError("multistart requires a real-valued problem")
    starts = sample_starts(config, problem.n_params)
    width = config.bounds[:, 1] - config.bounds[:, 0]
    lo = config.bounds[:, 0] - config.bounds_slack * width
    hi = config.bounds[:, 1] + config.bounds_slack * width
    solutions = SolutionSet(metric=problem.metric)
    discoveries = []
    statuses = []
    total_res = total_jac = 0
    for start_index, x0 in enumerate(starts):
        result = gauss_newton(problem, x0, config.solver)
        total_res += result.n_residual_evals
        total_jac += result.n_jacobian_evals
        statuses.append(result.status)
        if not result.converged:
            continue
        if result.grad_norm > config.grad_tol:
            continue
        if np.any(result.x < lo) or np.any(result.x > hi):
            continue
        added = solutions.add(
            Solution(
                x=result.x,
                residual_norm=result.residual_norm,
                grad_norm=result.grad_norm,
                objective=0.5 * result.residual_norm**2,
                round_index=start_index,
                iterations=result.iterations,
                cum_residual_evals=total_res,
                cum_jacobian_evals=total_jac,
            )
        )
        if added:
            discoveries.append(
                Discovery(
                    index=len(solutions) - 1,
                    start_index=start_index,
                    cum_residual_evals=total_res,
                    cum_jacobian_evals=total_jac,
                )
            )
    return MultistartResult(
        solutions=solutions,
        discoveries=tuple(discoveries),
        statuses=tuple(statuses),
        total_residual_evals=total_res,
        total_jacobian_evals=total_jac,
    )


def dedupe(points, tol: float, metric=None) -> SolutionSet:
    """Greedy clustering of points by metric distance; first found is kept.

    Unlike SolutionSet's scaled rule, the tolerance here is absolute: two
    points within ``tol`` of each other fall into the same cluster.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    out = SolutionSet(metric=metric or EUCLIDEAN, absolute_tol=tol)
    for x in points:
        out.add(Solution(x=np.asarray(x)))
    return out
