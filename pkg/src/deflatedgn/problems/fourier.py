"""Fourier-extension collocation for nonlinear boundary value problems on [0, 1].

A function is approximated by a Fourier series periodic on [-1, 1],

    u(x) = sum_{j=-n}^{n} c_j exp(i j pi x),

and a BVP becomes an oversampled nonlinear least squares problem by enforcing
the ODE at the equispaced nodes x_k = k/m (k = 0..m) plus one residual row per
boundary condition.  Coefficient vectors are fully complex; realness of the
converged solutions is observed, not enforced.  Deflation distances use the
2-norm of function values on the grid, since many coefficient vectors
represent nearly the same function.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..deflation import DeflationMetric
from .base import Problem


@dataclass(frozen=True)
class FourierExtensionGrid:
    """Frequencies -n..n (N = 2n+1 coefficients) sampled at the m+1 nodes k/m."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m < 2 * self.n:
            raise ValueError(f"need m >= 2n, got n={self.n}, m={self.m}")

    @property
    def n_coeffs(self) -> int:
        return 2 * self.n + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m

    @property
    def freqs(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1)

    def matrix(self) -> np.ndarray:
        """Dense evaluation matrix E[k, j] = exp(i j pi x_k)."""
        return _fe_matrix(self.n, self.m)

    def evaluate(self, c) -> np.ndarray:
        """Function values on the nodes, via a padded FFT when it applies."""
        c = np.asarray(c)
        if c.shape != (self.n_coeffs,):
            raise ValueError(f"expected {self.n_coeffs} coefficients, got {c.shape}")
        if self.m + 1 >= self.n_coeffs:
            length = 2 * self.m
            padded = np.zeros(length, dtype=complex)
            padded[np.mod(self.freqs, length)] = c
            return (length * np.fft.ifft(padded))[: self.m + 1]
        return self.matrix() @ c

    def adjoint(self, w) -> np.ndarray:
        """E^H w, the adjoint of ``evaluate``."""
        w = np.asarray(w)
        if w.shape != (self.m + 1,):
            raise ValueError(f"expected {self.m + 1} node values, got {w.shape}")
        length = 2 * self.m
        padded = np.zeros(length, dtype=complex)
        padded[: self.m + 1] = w
        spectrum = np.fft.fft(padded)
        return spectrum[np.mod(self.freqs, length)]


@lru_cache(maxsize=8)
def _fe_matrix(n: int, m: int) -> np.ndarray:
    nodes = np.arange(m + 1) / m
    freqs = np.arange(-n, n + 1)
    return np.exp(1j * np.pi * np.outer(nodes, freqs))


def fe_norm(c, grid: FourierExtensionGrid) -> float:
    """2-norm of the function values on the grid, scaled by 1/sqrt(m+1)."""
    values = grid.evaluate(c)
    return float(np.linalg.norm(values)) / np.sqrt(grid.m + 1)


def fe_metric(grid: FourierExtensionGrid) -> DeflationMetric:
    """Deflation metric d(c, c') = fe_norm(c - c') with its chain-rule gradient."""

    def distance(c, y):
        return fe_norm(c - y, grid)

    def grad(c, y):
        diff = c - y
        d = fe_norm(diff, grid)
        return grid.adjoint(grid.evaluate(diff)) / ((grid.m + 1) * d)

    return DeflationMetric(f"fe(n={grid.n},m={grid.m})", distance, grad)


def _fit_coefficients(grid: FourierExtensionGrid, values) -> np.ndarray:
    """Least-squares Fourier-extension coefficients of node values."""
    c, _, _, _ = np.linalg.lstsq(grid.matrix(), np.asarray(values, dtype=complex), rcond=None)
    return c


def _bvp_problem(name, grid, ode_residual, ode_jacobian_diag, second_derivative_scale):
    """Shared scaffolding for the collocation problems.

    ``ode_residual(u, upp)`` returns the unweighted ODE rows from function
    values and (scaled) second-derivative values; ``ode_jacobian_diag(u)``
    returns the diagonal multiplier of E contributed by the nonlinear term.
    """
    E = grid.matrix()
    freqs = grid.freqs
    d2 = -((np.pi * freqs) ** 2) * second_derivative_scale
    weight = 1.0 / np.sqrt(grid.m + 1)
    boundary = np.vstack([np.ones(grid.n_coeffs), (-1.0) ** freqs]).astype(complex)
    linear_part = E * d2[np.newaxis, :]

    def residual(c):
        u = grid.evaluate(c)
        upp = grid.evaluate(c * d2)
        rows = weight * ode_residual(u, upp)
        return np.concatenate([rows, boundary @ c])

    def jacobian(c):
        u = grid.evaluate(c)
        rows = weight * (linear_part + ode_jacobian_diag(u)[:, np.newaxis] * E)
        return np.vstack([rows, boundary])

    zero = np.zeros(grid.n_coeffs, dtype=complex)
    bump = _fit_coefficients(grid, grid.nodes * (1.0 - grid.nodes))
    return Problem(
        name=name,
        n_params=grid.n_coeffs,
        n_residuals=grid.m + 3,
        residual=residual,
        jacobian=jacobian,
        field_kind="complex",
        metric=fe_metric(grid),
        presets={"zero": zero, "x(1-x)": bump},
        default_x0=zero,
        extras={"grid": grid},
    )


def bratu_problem(n: int = 100, m: int = 400) -> Problem:
    """u'' + 3 exp(u) = 0 on [0, 1] with u(0) = u(1) = 0, discretized by
    Fourier-extension collocation: m+1 ODE rows scaled by 1/sqrt(m+1) plus the
    two boundary rows sum(c_j) and sum(c_j (-1)^j."""
    grid = FourierExtensionGrid(n, m)

    def ode_residual(u, upp):
        return upp + 3.0 * np.exp(u)

    def ode_jacobian_diag(u):
        return 3.0 * np.exp(u)

    return _bvp_problem("bratu", grid, ode_residual, ode_jacobian_diag, 1.0)


def carrier_problem(n: int = 100, m: int = 400) -> Problem:
    """0.05 u'' + 8 x (1 - x) u + u^2 = 1 on [0, 1] with u(0) = u(1) = 0,
    same discretization as the Bratu problem."""
    grid = FourierExtensionGrid(n, m)
    q = 8.0 * grid.nodes * (1.0 - grid.nodes)

    def ode_residual(u, upp):
        return upp + q * u + u * u - 1.0

    def ode_jacobian_diag(u):
        return q + 2.0 * u

    return _bvp_problem("carrier", grid, ode_residual, ode_jacobian_diag, 0.05)
