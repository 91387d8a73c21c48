"""The six iterative methods, the quadratic line search, and the deflation loop.

Three method families are provided:

* Newton for rootfinding on square systems, with the scalar deflation update
  x + p/beta where beta = 1 - <grad_eta, p>.
* Newton for optimization on the first-order conditions, using the full
  Hessian of f; converges to any stationary point.
* Line-searched Gauss-Newton and its two deflated variants.  Per iteration
  the undeflated step p = argmin_p ||r + J p|| is computed; when
  <grad_eta, p> > epsilon the "good" variant takes x + p/beta and the "bad"
  variant takes the rank-one-updated pseudoinverse step
  beta1 p + beta2 (J^H J)^{-1} grad_eta; otherwise both fall back to the
  line-searched undeflated step, which restores plain Gauss-Newton behaviour
  near undiscovered minima.

All inner products use the real part of the conjugated product so the same
code drives real and complex problems.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .deflation import DeflationConfig, DeflationState, add_deflation_point, grad_eta
from .exceptions import AtDeflatedPointError, LineSearchError, RankDeficiencyError
from .linalg import (
    apply_normal_inverse,
    apply_pinv_transpose,
    apply_projector_complement,
    lsq_min_norm,
    qr_factorize,
)
from .problems.base import Problem

BETA_TOL = 1e-14
OMEGA_TOL = 1e-28

BRANCH_DEFLATED = "deflated"
BRANCH_UNDEFLATED = "undeflated-linesearch"

STATUS_CONVERGED = "converged"
STATUS_MAX_ITERS = "max-iters"
STATUS_RANK_DEFICIENT = "rank-deficient"
STATUS_LINE_SEARCH_FAILED = "line-search-failed"
STATUS_STEP_UNDEFINED = "step-undefined"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets shared by all methods.

    ``step_tol`` is tested against ||p|| for the Gauss-Newton family, ||r||
    for Newton rootfinding and ||grad f|| for Newton-for-optimization.
    ``epsilon`` is the deflated-branch threshold on <grad_eta, p>.
    """

    step_tol: float = 1e-10
    max_iters: int = 500
    epsilon: float = 0.01
    armijo_c1: float = 1e-4
    alpha_min: float = 1e-12
    max_ls_trials: int = 50

    def __post_init__(self):
        if self.step_tol <= 0:
            raise ValueError("step_tol must be positive")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class IterationRecord:
    """One row of a solve trace.

    ``x`` is the iterate before the step, ``step_norm`` the norm of the
    method's base step p, and ``beta`` the deflation scalar 1 - <grad_eta, p>
    at the iterate.  ``alpha`` is the accepted line-search step on the
    undeflated branch and None when no line-searched step was taken (deflated
    branch, Newton family, or the terminal record of a run).
    """

    k: int
    x: np.ndarray
    step_norm: float
    grad_norm: float
    residual_norm: float
    beta: float
    branch: str
    alpha: float | None = None


@dataclass(frozen=True)
class SolveResult:
    status: str
    x: np.ndarray
    trace: tuple
    n_residual_evals: int
    n_jacobian_evals: int

    @property
    def converged(self) -> bool:
        return self.status == STATUS_CONVERGED

    @property
    def iterations(self) -> int:
        return max(len(self.trace) - 1, 0)

    @property
    def residual_norm(self) -> float:
        return self.trace[-1].residual_norm if self.trace else math.nan

    @property
    def grad_norm(self) -> float:
        return self.trace[-1].grad_norm if self.trace else math.nan


class _Counter:
    __slots__ = ("residual", "jacobian")

    def __init__(self):
        self.residual = 0
        self.jacobian = 0


def _re_inner(a, b) -> float:
    """<a, b> as the real part of the conjugated product."""
    return float(np.real(np.vdot(a, b)))


def _empty_state(problem: Problem, config: DeflationConfig | None = None) -> DeflationState:
    return DeflationState(config=config or DeflationConfig(), metric=problem.metric)


ARMIJO_NOISE = 4.0 * np.finfo(float).eps


def armijo_holds(f0: float, f_trial: float, alpha: float, slope: float, c1: float) -> bool:
    """Sufficient-decrease test with a machine-noise allowance.

    Near a nonzero-residual minimum the attainable decrease falls below the
    rounding noise of f itself; the small eps-scaled term keeps such steps
    from being rejected on noise alone.
    """
    return f_trial <= f0 + c1 * alpha * slope + ARMIJO_NOISE * abs(f0)


def quadratic_line_search(f, x, p, config: SolverConfig, *, f0: float, slope: float) -> float:
    """Armijo backtracking with quadratic interpolation, starting at alpha = 1.

    ``f0`` and ``slope`` are f(x) and the directional derivative of f at x
    along p.  Each trial alpha is either accepted by the Armijo test
    f(x + alpha p) <= f0 + c1 alpha slope (see ``armijo_holds``) or replaced
    by the minimizer of the quadratic interpolant through (f0, slope,
    f(x + alpha p)), clamped to [0.1 alpha, 0.5 alpha].  Raises
    LineSearchError below ``alpha_min``.
    """
    if not np.any(p):
        raise LineSearchError("zero direction")
    alpha = 1.0
    for _ in range(config.max_ls_trials):
        f_trial = f(x + alpha * p)
        if armijo_holds(f0, f_trial, alpha, slope, config.armijo_c1):
            return alpha
        denom = f_trial - f0 - slope * alpha
        if denom > 0:
            candidate = -slope * alpha * alpha / (2.0 * denom)
            alpha = min(max(candidate, 0.1 * alpha), 0.5 * alpha)
        else:
            alpha = 0.5 * alpha
        if alpha < config.alpha_min:
            raise LineSearchError(f"step shrank below alpha_min={config.alpha_min:g}")
    raise LineSearchError(f"no Armijo decrease within {config.max_ls_trials} trials")


def _run_loop(problem, x0, config, state, compute_step, take_step):
    """Shared solve loop.

    ``compute_step`` evaluates the model at x and returns a dict with the
    step, norms and trace fields; ``take_step`` maps that dict to the next
    iterate or raises a _Stop.  One trace record is appended per loop pass,
    including the terminal pass, so ``len(trace) == steps_taken + 1``.
    """
    counter = _Counter()
    x = np.asarray(x0, dtype=problem.dtype).copy()
    if x.shape != (problem.n_params,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({problem.n_params},)")
    trace = []
    status = STATUS_MAX_ITERS
    k = 0
    while True:
        try:
            info = compute_step(x, counter)
        except RankDeficiencyError:
            status = STATUS_RANK_DEFICIENT
            break
        except AtDeflatedPointError:
            status = STATUS_STEP_UNDEFINED
            break
        record = IterationRecord(
            k=k,
            x=x.copy(),
            step_norm=info["step_norm"],
            grad_norm=info["grad_norm"],
            residual_norm=info["residual_norm"],
            beta=info["beta"],
            branch=info["branch"],
        )
        if info["converged"]:
            trace.append(record)
            status = STATUS_CONVERGED
            break
        if k >= config.max_iters:
            trace.append(record)
            status = STATUS_MAX_ITERS
            break
        try:
            x_next, alpha = take_step(x, info, counter)
        except _Stop as stop:
            trace.append(record)
            status = stop.status
            break
        except RankDeficiencyError:
            trace.append(record)
            status = STATUS_RANK_DEFICIENT
            break
        except AtDeflatedPointError:
            trace.append(record)
            status = STATUS_STEP_UNDEFINED
            break
        trace.append(replace(record, alpha=alpha))
        x = x_next
        k += 1
    return SolveResult(
        status=status,
        x=x,
        trace=tuple(trace),
        n_residual_evals=counter.residual,
        n_jacobian_evals=counter.jacobian,
    )


class _Stop(Exception):
    def __init__(self, status):
        self.status = status


def _gn_solve(problem, x0, config, state, flavor):
    """Gauss-Newton engine; ``flavor`` selects the deflated-branch step."""
    config = config or SolverConfig()
    state = state if state is not None else _empty_state(problem)

    def compute_step(x, counter):
        r = problem.residual(x)
        counter.residual += 1
        J = problem.jacobian(x)
        counter.jacobian += 1
        p = lsq_min_norm(J, -r)
        grad = J.conj().T @ r
        eg = grad_eta(state, x) if state.n_points else np.zeros_like(x)
        de = _re_inner(eg, p)
        beta = 1.0 - de
        deflated = de > config.epsilon
        p_norm = float(np.linalg.norm(p))
        return {
            "r": r,
            "J": J,
            "p": p,
            "grad": grad,
            "eg": eg,
            "beta": beta,
            "branch": BRANCH_DEFLATED if deflated else BRANCH_UNDEFLATED,
            "step_norm": p_norm,
            "grad_norm": float(np.linalg.norm(grad)),
            "residual_norm": float(np.linalg.norm(r)),
            "converged": p_norm <= config.step_tol and not deflated,
        }

    def take_step(x, info, counter):
        p = info["p"]
        if info["branch"] == BRANCH_DEFLATED:
            if flavor == "good":
                if abs(info["beta"]) < BETA_TOL:
                    raise _Stop(STATUS_STEP_UNDEFINED)
                return x + p / info["beta"], None
            return x + _bad_deflated_step(info), None
        f0 = 0.5 * _re_inner(info["r"], info["r"])
        slope = _re_inner(info["grad"], p)

        def f_eval(z):
            rz = problem.residual(z)
            counter.residual += 1
            return 0.5 * _re_inner(rz, rz)

        try:
            alpha = quadratic_line_search(f_eval, x, p, config, f0=f0, slope=slope)
        except LineSearchError:
            raise _Stop(STATUS_LINE_SEARCH_FAILED)
        return x + alpha * p, alpha

    return _run_loop(problem, x0, config, state, compute_step, take_step)


def _bad_deflated_step(info):
    """beta1 p + beta2 (J^H J)^{-1} grad_eta with one QR recycled for the
    projector, normal-inverse and pseudoinverse-transpose applications."""
    factors = qr_factorize(info["J"])
    pr = apply_projector_complement(factors, info["r"])
    normal_inv_eta = apply_normal_inverse(factors, info["eg"])
    pinv_t_eta = apply_pinv_transpose(factors, info["eg"])
    pr2 = _re_inner(pr, pr)
    beta = info["beta"]
    omega = pr2 * _re_inner(pinv_t_eta, pinv_t_eta) + beta * beta
    if omega < OMEGA_TOL:
        raise _Stop(STATUS_STEP_UNDEFINED)
    return (beta / omega) * info["p"] - (pr2 / omega) * normal_inv_eta


def gauss_newton(problem, x0, config: SolverConfig | None = None) -> SolveResult:
    """Line-searched Gauss-Newton; stops when ||p|| <= step_tol."""
    return _gn_solve(problem, x0, config, None, "good")


def good_deflated_gn(
    problem, x0, config: SolverConfig | None = None, state: DeflationState | None = None
) -> SolveResult:
    """"Good" deflated Gauss-Newton: scalar step rescaling on the deflated branch."""
    return _gn_solve(problem, x0, config, state, "good")


def bad_deflated_gn(
    problem, x0, config: SolverConfig | None = None, state: DeflationState | None = None
) -> SolveResult:
    """"Bad" deflated Gauss-Newton: Gauss-Newton applied to the deflated residual."""
    return _gn_solve(problem, x0, config, state, "bad")


def _newton_solve(problem, x0, config, state, optimize):
    """Newton engine for rootfinding (optimize=False) or optimization."""
    config = config or SolverConfig()
    state = state if state is not None else _empty_state(problem)
    if optimize:
        if problem.hessians is None:
            raise ValueError(f"problem {problem.name!r} supplies no residual Hessians")
        if problem.field_kind != "real":
            raise ValueError("Newton-for-optimization supports real problems only")
    elif problem.n_residuals != problem.n_params:
        raise ValueError("Newton rootfinding requires a square problem")

    def compute_step(x, counter):
        r = problem.residual(x)
        counter.residual += 1
        J = problem.jacobian(x)
        counter.jacobian += 1
        grad = J.conj().T @ r
        if optimize:
            matrix = J.T @ J + np.einsum("i,ijk->jk", r, problem.hessians(x))
            rhs = -grad
            target_norm = float(np.linalg.norm(grad))
        else:
            matrix = J
            rhs = -r
            target_norm = float(np.linalg.norm(r))
        try:
            p = np.linalg.solve(matrix, rhs)
        except np.linalg.LinAlgError:
            raise RankDeficiencyError("singular linear system in Newton step")
        if not np.all(np.isfinite(p)):
            raise RankDeficiencyError("non-finite Newton step")
        eg = grad_eta(state, x) if state.n_points else np.zeros_like(x)
        beta = 1.0 - _re_inner(eg, p)
        return {
            "p": p,
            "beta": beta,
            "branch": BRANCH_DEFLATED,
            "step_norm": float(np.linalg.norm(p)),
            "grad_norm": float(np.linalg.norm(grad)),
            "residual_norm": float(np.linalg.norm(r)),
            "converged": target_norm <= config.step_tol,
        }

    def take_step(x, info, counter):
        if abs(info["beta"]) < BETA_TOL:
            raise _Stop(STATUS_STEP_UNDEFINED)
        return x + info["p"] / info["beta"], None

    return _run_loop(problem, x0, config, state, compute_step, take_step)


def newton_root(problem, x0, config: SolverConfig | None = None) -> SolveResult:
    """Newton's method for square systems; stops when ||r|| <= step_tol."""
    return _newton_solve(problem, x0, config, None, optimize=False)


def deflated_newton_root(
    problem, x0, config: SolverConfig | None = None, state: DeflationState | None = None
) -> SolveResult:
    """Deflated Newton for square systems: the Newton step scaled by 1/beta."""
    return _newton_solve(problem, x0, config, state, optimize=False)


def deflated_newton_opt(
    problem, x0, config: SolverConfig | None = None, state: DeflationState | None = None
) -> SolveResult:
    """Deflated Newton on the first-order optimality conditions.

    Requires residual Hessians; converges to stationary points of f (the test
    is on ||grad f||), with beta-scaled steps and no line search.
    """
    return _newton_solve(problem, x0, config, state, optimize=True)


@dataclass(frozen=True)
class Solution:
    """A deduplicated converged point with provenance."""

    x: np.ndarray
    residual_norm: float = math.nan
    grad_norm: float = math.nan
    objective: float = math.nan
    round_index: int = -1
    iterations: int = 0
    cum_residual_evals: int = 0
    cum_jacobian_evals: int = 0


class SolutionSet:
    """Converged points deduplicated by metric distance.

    A candidate is distinct when its distance to every kept solution y
    exceeds ``tol_scale * (1 + |y|)``, |y| measured by the same metric, or
    exceeds ``absolute_tol`` when one is given.  The first found
    representative is kept.
    """

    def __init__(self, metric=None, tol_scale: float = 1e-4, absolute_tol: float | None = None):
        from .deflation import EUCLIDEAN

        self.metric = metric or EUCLIDEAN
        self.tol_scale = tol_scale
        self.absolute_tol = absolute_tol
        self.solutions: list[Solution] = []
        self._tols: list[float] = []

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def points(self) -> list[np.ndarray]:
        return [s.x for s in self.solutions]

    def match(self, x) -> int | None:
        """Index of the kept solution x duplicates, or None if distinct."""
        for i, (sol, tol) in enumerate(zip(self.solutions, self._tols)):
            if self.metric.distance(x, sol.x) <= tol:
                return i
        return None

    def add(self, solution: Solution) -> bool:
        """Add if distinct; returns True when the solution was new."""
        if self.match(solution.x) is not None:
            return False
        self.solutions.append(solution)
        if self.absolute_tol is not None:
            self._tols.append(self.absolute_tol)
        else:
            y = solution.x
            scale = 1.0 + self.metric.distance(y, np.zeros_like(y))
            self._tols.append(self.tol_scale * scale)
        return True


@dataclass(frozen=True)
class DeflationLoopResult:
    """Outcome of repeated solve-deflate-restart rounds."""

    solutions: SolutionSet
    rounds: tuple
    state: DeflationState
    total_residual_evals: int
    total_jacobian_evals: int

    @property
    def n_converged(self) -> int:
        return sum(1 for r in self.rounds if r.converged)


DEFLATABLE_METHODS = {
    "deflated_newton_root": deflated_newton_root,
    "deflated_newton_opt": deflated_newton_opt,
    "good_deflated_gn": good_deflated_gn,
    "bad_deflated_gn": bad_deflated_gn,
}

PLAIN_METHODS = {
    "newton_root": newton_root,
    "gauss_newton": gauss_newton,
}

SOLVER_METHODS = {**PLAIN_METHODS, **DEFLATABLE_METHODS}


def deflation_loop(
    method,
    problem: Problem,
    x0,
    rounds: int,
    config: SolverConfig | None = None,
    deflation: DeflationConfig | None = None,
    *,
    metric=None,
    stop_on_failure: bool = True,
    x0_provider=None,
) -> DeflationLoopResult:
    """Repeatedly solve, deflate the converged solution, and restart.

    Each round starts from the same x0 (``x0_provider(round_index)`` may
    override this).  A converged round appends its solution to the deflation
    state and to the returned SolutionSet; a failed round is recorded and, if
    ``stop_on_failure``, ends the loop.  ``method`` is a name from
    SOLVER_METHODS or a callable with the deflated-method signature.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if isinstance(method, str):
        if method not in SOLVER_METHODS:
            raise KeyError(f"unknown method {method!r}")
        if rounds > 1 and method not in DEFLATABLE_METHODS:
            raise ValueError(f"method {method!r} ignores deflation; use rounds=1")
        fn = SOLVER_METHODS[method]
        deflation_aware = method in DEFLATABLE_METHODS
    else:
        fn = method
        deflation_aware = True
    state = DeflationState(
        config=deflation or DeflationConfig(), metric=metric or problem.metric
    )
    solutions = SolutionSet(metric=state.metric)
    results = []
    total_res = total_jac = 0
    for round_index in range(rounds):
        start = x0_provider(round_index) if x0_provider is not None else x0
        result = (
            fn(problem, start, config, state) if deflation_aware else fn(problem, start, config)
        )
        results.append(result)
        total_res += result.n_residual_evals
        total_jac += result.n_jacobian_evals
        if result.converged:
            state = add_deflation_point(state, result.x)
            solutions.add(
                Solution(
                    x=result.x,
                    residual_norm=result.residual_norm,
                    grad_norm=result.grad_norm,
                    objective=0.5 * result.residual_norm**2,
                    round_index=round_index,
                    iterations=result.iterations,
                    cum_residual_evals=total_res,
                    cum_jacobian_evals=total_jac,
                )
            )
        elif stop_on_failure:
            break
    return DeflationLoopResult(
        solutions=solutions,
        rounds=tuple(results),
        state=state,
        total_residual_evals=total_res,
        total_jacobian_evals=total_jac,
    )
