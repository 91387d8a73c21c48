"""Problem container and shared evaluation helpers."""

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..deflation import EUCLIDEAN, DeflationMetric


@dataclass(frozen=True)
class Problem:
    """A nonlinear least squares problem f(x) = 1/2 ||r(x)||^2.

    ``residual`` maps an n_params vector to an n_residuals vector and
    ``jacobian`` returns the n_residuals x n_params matrix of partial
    derivatives.  ``hessians``, when available, returns the stacked residual
    Hessians with shape (n_residuals, n_params, n_params) and enables the
    Newton-for-optimization solver.  ``metric`` is the distance used for
    deflation and solution dedupe; ``bounds`` is an optional (n_params, 2)
    sampling box for multistart.
    """

    name: str
    n_params: int
    n_residuals: int
    residual: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    hessians: Callable[[np.ndarray], np.ndarray] | None = None
    field_kind: str = "real"  # "real" or "complex"
    metric: DeflationMetric = EUCLIDEAN
    bounds: np.ndarray | None = None
    presets: Mapping[str, np.ndarray] = field(default_factory=dict)
    default_x0: np.ndarray | None = None
    extras: Mapping = field(default_factory=dict)

    @property
    def dtype(self):
        return np.complex128 if self.field_kind == "complex" else np.float64

    def zero_x(self) -> np.ndarray:
        return np.zeros(self.n_params, dtype=self.dtype)


def objective(problem: Problem, x) -> float:
    """f(x) = 1/2 ||r(x)||^2."""
    r = problem.residual(np.asarray(x))
    return 0.5 * float(np.real(np.vdot(r, r)))


def gradient(problem: Problem, x) -> np.ndarray:
    """grad f = J^H r (the conjugate transpose in the complex case)."""
    x = np.asarray(x)
    return problem.jacobian(x).conj().T @ problem.residual(x)


def gradient_norm(problem: Problem, x) -> float:
    return float(np.linalg.norm(gradient(problem, x)))


def residual_norm(problem: Problem, x) -> float:
    return float(np.linalg.norm(problem.residual(np.asarray(x))))
