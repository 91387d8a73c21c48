"""Deflation operators, their logarithmic gradients, and the beta field.

A deflation operator mu blows up at previously found solutions so that an
iterative method cannot reconverge to them.  The solvers only ever need
grad eta = grad log(mu), which stays bounded in floating point long after mu
itself has overflowed.  Distances are measured by a pluggable metric so that
function-space problems can deflate in a norm on function values rather than
on raw coefficients.
"""

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .exceptions import AtDeflatedPointError, ShapeError

VARIANTS = ("multi-shift", "single-shift", "exponential")

# d(x, y) below this fraction of the point scale counts as "at" the point.
AT_POINT_TOL = 1e-13


@dataclass(frozen=True)
class DeflationConfig:
    """Operator family and its shape parameters.

    theta is the norm exponent and sigma the shift of the shifted-power
    operators; both are ignored by the exponential variant.
    """

    theta: float = 2.0
    sigma: float = 1.0
    variant: str = "multi-shift"

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


@dataclass(frozen=True)
class DeflationMetric:
    """Distance d(x, y) >= 0 together with its gradient in the first argument.

    ``gradient(x, y)`` returns g with d(x + delta, y) ~= d(x, y) + Re<g, delta>,
    which for the Euclidean metric is (x - y)/d.
    """

    name: str
    distance: Callable[[np.ndarray, np.ndarray], float]
    gradient: Callable[[np.ndarray, np.ndarray], np.ndarray]


def _euclidean_distance(x, y) -> float:
    return float(np.linalg.norm(x - y))


def _euclidean_gradient(x, y) -> np.ndarray:
    diff = x - y
    return diff / float(np.linalg.norm(diff))


EUCLIDEAN = DeflationMetric("euclidean", _euclidean_distance, _euclidean_gradient)


@dataclass(frozen=True)
class DeflationState:
    """Immutable set of deflated points plus operator configuration.

    Points may repeat: a repeated point raises the effective multiplicity of
    the deflation at that location.
    """

    config: DeflationConfig = field(default_factory=DeflationConfig)
    metric: DeflationMetric = EUCLIDEAN
    points: tuple = ()
    point_scales: tuple = ()

    @property
    def n_points(self) -> int:
        return len(self.points)


def add_deflation_point(state: DeflationState, y) -> DeflationState:
    """Return a new state with y appended; the input state is unchanged."""
    y = np.array(y, copy=True)
    if state.points and y.shape != state.points[0].shape:
        raise ShapeError(
            f"point has shape {y.shape}, existing points have {state.points[0].shape}"
        )
    y.setflags(write=False)
    scale = 1.0 + state.metric.distance(y, np.zeros_like(y))
    return replace(
        state,
        points=state.points + (y,),
        point_scales=state.point_scales + (scale,),
    )


def _distances(state: DeflationState, x) -> np.ndarray:
    ds = np.empty(state.n_points)
    for i, (y, scale) in enumerate(zip(state.points, state.point_scales)):
        d = state.metric.distance(x, y)
        if d < AT_POINT_TOL * scale:
            raise AtDeflatedPointError(
                f"x is within {d:.3e} of deflated point {i}; mu is undefined there"
            )
        ds[i] = d
    return ds


def mu_value(state: DeflationState, x) -> float:
    """Value of the deflation operator at x; 1 for an empty state.

    The exponential variant can overflow for points very close to a deflated
    point; solvers avoid this by only consuming grad_eta.
    """
    x = np.asarray(x)
    if state.n_points == 0:
        return 1.0
    d = _distances(state, x)
    cfg = state.config
    if cfg.variant == "multi-shift":
        return float(np.prod(cfg.sigma + d ** (-cfg.theta)))
    if cfg.variant == "single-shift":
        return float(cfg.sigma + np.exp(-cfg.theta * np.sum(np.log(d))))
    return float(np.exp(np.sum(1.0 / d)))


def grad_eta(state: DeflationState, x) -> np.ndarray:
    """Gradient of eta = log(mu) at x; zero vector for an empty state."""
    x = np.asarray(x)
    out = np.zeros_like(x, dtype=np.promote_types(x.dtype, float))
    if state.n_points == 0:
        return out
    d = _distances(state, x)
    cfg = state.config
    if cfg.variant == "multi-shift":
        # eta = sum_i log(sigma + d_i^-theta)
        coeff = -cfg.theta * d ** (-cfg.theta - 1.0) / (cfg.sigma + d ** (-cfg.theta))
    elif cfg.variant == "single-shift":
        # eta = log(sigma + Q), Q = prod d_i^-theta; weight Q/(sigma+Q) via logs
        log_q = -cfg.theta * float(np.sum(np.log(d)))
        weight = 1.0 / (1.0 + cfg.sigma * np.exp(-log_q)) if cfg.sigma > 0 else 1.0
        coeff = -cfg.theta * weight / d
    else:
        # eta = sum_i 1/d_i
        coeff = -1.0 / d**2
    for c, y in zip(coeff, state.points):
        out = out + c * state.metric.gradient(x, y)
    return out


def beta_field(problem, state: DeflationState, xs, ys) -> np.ndarray:
    """beta(x) = 1 - <grad_eta(x), p(x)> on a 2-d lattice.

    p is the undeflated Gauss-Newton step (equal to the Newton step on square
    problems).  Nodes where the evaluation fails are returned as NaN.
    Shape is (len(xs), len(ys)) with entry [i, j] at (xs[i], ys[j]).
    """
    from .linalg import lsq_min_norm

    if problem.n_params != 2:
        raise ShapeError("beta_field requires a 2-parameter problem")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    out = np.full((xs.size, ys.size), np.nan)
    for i, xv in enumerate(xs):
        for j, yv in enumerate(ys):
            z = np.array([xv, yv])
            try:
                p = lsq_min_norm(problem.jacobian(z), -problem.residual(z))
                eg = grad_eta(state, z)
            except Exception:
                continue
            out[i, j] = 1.0 - float(np.real(np.vdot(eg, p)))
    return out
