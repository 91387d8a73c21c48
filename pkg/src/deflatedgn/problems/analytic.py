"""Closed-form two-dimensional benchmark problems."""

import numpy as np
from numpy.polynomial import polynomial as npoly

from .base import Problem


def himmelblau() -> Problem:
    """Himmelblau's system r = (x^2 + y - 11, x + y^2 - 7).

    Square (2 x 2) real problem with four roots, e.g. (3, 2).  Residual
    Hessians are constant, so the Newton-for-optimization solver applies.
    """

    def residual(z):
        x, y = z
        return np.array([x * x + y - 11.0, x + y * y - 7.0])

    def jacobian(z):
        x, y = z
        return np.array([[2.0 * x, 1.0], [1.0, 2.0 * y]])

    h1 = np.array([[2.0, 0.0], [0.0, 0.0]])
    h2 = np.array([[0.0, 0.0], [0.0, 2.0]])

    def hessians(z):
        return np.stack([h1, h2])

    return Problem(
        name="himmelblau",
        n_params=2,
        n_residuals=2,
        residual=residual,
        jacobian=jacobian,
        hessians=hessians,
        bounds=np.array([[-6.0, 6.0], [-6.0, 6.0]]),
        default_x0=np.array([1.0, 1.0]),
    )


def _poly_with_factors(roots, include_linear):
    """Coefficients of [z] * prod_k (1 - z^2/root_k^2) in increasing powers."""
    c = np.array([0.0, 1.0]) if include_linear else np.array([1.0])
    for rho in roots:
        c = npoly.polymul(c, np.array([1.0, 0.0, -1.0 / rho**2]))
    return c


def ftrig(a: float = 10.0) -> Problem:
    """Trigonometric-product test problem with 42 local minima.

    The residual components are the truncated product expansions of
    sin(x + y) and cos(x - y) (three quadratic factors each, the sine keeping
    its leading linear factor), scaled by ``a``, plus a slowly growing
    nonzero component:

        r1 = a (x+y) prod_{k=1..3} (1 - (x+y)^2 / (k pi)^2)
        r2 = a        prod_{k=1..3} (1 - (x-y)^2 / ((k-1/2) pi)^2)
        r3 = a + 0.01 (x^2 + y^2)

    The 7 zero lines of r1 and 6 zero lines of r2 cross in the 42 local
    minima; the full objective has 143 stationary points.  Nonzero residual
    throughout since r3 >= a.
    """
    if a == 0:
        raise ValueError("a must be nonzero")
    p_sin = _poly_with_factors([k * np.pi for k in (1, 2, 3)], include_linear=True)
    p_cos = _poly_with_factors([(k - 0.5) * np.pi for k in (1, 2, 3)], include_linear=False)
    dp_sin = npoly.polyder(p_sin)
    dp_cos = npoly.polyder(p_cos)
    ddp_sin = npoly.polyder(dp_sin)
    ddp_cos = npoly.polyder(dp_cos)

    def residual(z):
        x, y = z
        s, t = x + y, x - y
        return np.array(
            [
                a * npoly.polyval(s, p_sin),
                a * npoly.polyval(t, p_cos),
                a + 0.01 * (x * x + y * y),
            ]
        )

    def jacobian(z):
        x, y = z
        s, t = x + y, x - y
        ds = a * npoly.polyval(s, dp_sin)
        dt = a * npoly.polyval(t, dp_cos)
        return np.array([[ds, ds], [dt, -dt], [0.02 * x, 0.02 * y]])

    ones = np.array([[1.0, 1.0], [1.0, 1.0]])
    alt = np.array([[1.0, -1.0], [-1.0, 1.0]])
    h3 = np.array([[0.02, 0.0], [0.0, 0.02]])

    def hessians(z):
        x, y = z
        s, t = x + y, x - y
        return np.stack(
            [
                a * npoly.polyval(s, ddp_sin) * ones,
                a * npoly.polyval(t, ddp_cos) * alt,
                h3,
            ]
        )

    return Problem(
        name="ftrig",
        n_params=2,
        n_residuals=3,
        residual=residual,
        jacobian=jacobian,
        hessians=hessians,
        bounds=np.array([[-10.0, 10.0], [-10.0, 10.0]]),
        default_x0=np.array([1.0, 3.0]),
        extras={"a": a},
    )
