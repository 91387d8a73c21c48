"""Spin Hamiltonians, Stevens operators, and inverse eigenvalue problems."""

from dataclasses import dataclass

import numpy as np

from ..exceptions import DegenerateEigenvaluesError, ShapeError
from .base import Problem

# Minimum eigenvalue gap for the eigenvalue Jacobian to be considered defined.
EIGENVALUE_GAP_TOL = 1e-10

# Default planted Mn12 parameters (B20, B40, B22, B44).  Synthetic values
# chosen so the 21 eigenvalues are well separated (min gap ~1.5e-3); they are
# configuration inputs, not fitted constants.
MN12_DEFAULT_PLANTED = (-0.1021, -8.894e-05, 0.035858, 0.030408)


@dataclass(frozen=True)
class SpinSystem:
    """Stevens operator basis for a single spin S on the (2S+1)-dim space."""

    spin: float
    dim: int
    o20: np.ndarray
    o40: np.ndarray
    o22: np.ndarray
    o44: np.ndarray

    @property
    def operators(self) -> tuple:
        """Basis in Hamiltonian order (O20, O40, O22, O44)."""
        return (self.o20, self.o40, self.o22, self.o44)


def stevens_operators(spin: float) -> SpinSystem:
    """Build the rank-2 and rank-4 Stevens operators for spin quantum number S.

    S_z is diagonal with entries S+1-k (k = 1..2S+1), the ladder operators
    have (S+)_{k,k+1} = sqrt(k (2S+1-k)), and with X = S(S+1):

        O20 = 3 S_z^2 - X I
        O22 = (S+^2 + S-^2)/2
        O40 = 35 S_z^4 - (30 X - 25) S_z^2 + (3 X^2 - 6 X) I
        O44 = (S+^4 + S-^4)/2
    """
    two_s = 2.0 * spin
    if abs(two_s - round(two_s)) > 1e-12 or spin < 1:
        raise ValueError(f"spin must be a half-integer >= 1, got {spin}")
    dim = int(round(two_s)) + 1
    k = np.arange(1, dim + 1)
    sz = np.diag(spin + 1.0 - k)
    off = np.sqrt(k[:-1] * (two_s + 1.0 - k[:-1]))
    sp = np.zeros((dim, dim))
    sp[np.arange(dim - 1), np.arange(1, dim)] = off
    sm = sp.T.copy()
    x = spin * (spin + 1.0)
    eye = np.eye(dim)
    sz2 = sz @ sz
    o20 = 3.0 * sz2 - x * eye
    o22 = 0.5 * (sp @ sp + sm @ sm)
    o40 = 35.0 * sz2 @ sz2 - (30.0 * x - 25.0) * sz2 + (3.0 * x**2 - 6.0 * x) * eye
    o44 = 0.5 * (np.linalg.matrix_power(sp, 4) + np.linalg.matrix_power(sm, 4))
    return SpinSystem(spin=spin, dim=dim, o20=o20, o40=o40, o22=o22, o44=o44)


def iep_problem(basis, a0, targets, name: str = "iep") -> Problem:
    """Inverse eigenvalue problem for A(x) = A0 + sum_i x_i A_i.

    The residual is r_i(x) = lambda_i(x) - lambda_i with both the computed and
    the target eigenvalues sorted ascending.  The Jacobian uses first-order
    perturbation of simple eigenvalues, d lambda_i / d x_j = v_i^T A_j v_i,
    and raises DegenerateEigenvaluesError when two eigenvalues are closer than
    the gap tolerance.
    """
    basis = [np.asarray(b, dtype=float) for b in basis]
    a0 = np.asarray(a0, dtype=float)
    targets = np.sort(np.asarray(targets, dtype=float))
    dim = a0.shape[0]
    if a0.shape != (dim, dim):
        raise ShapeError("A0 must be square")
    for b in basis:
        if b.shape != (dim, dim):
            raise ShapeError("basis matrices must match the dimension of A0")
        if np.max(np.abs(b - b.T)) > 1e-12 * max(1.0, np.max(np.abs(b))):
            raise ShapeError("basis matrices must be symmetric")
    if targets.shape != (dim,):
        raise ShapeError(f"expected {dim} target eigenvalues, got {targets.shape}")

    def assemble(x):
        a = a0.copy()
        for xi, b in zip(x, basis):
            a = a + xi * b
        return a

    def residual(x):
        return np.linalg.eigvalsh(assemble(x)) - targets

    def jacobian(x):
        evals, vecs = np.linalg.eigh(assemble(x))
        if np.min(np.diff(evals)) < EIGENVALUE_GAP_TOL:
            raise DegenerateEigenvaluesError(
                "eigenvalue gap %.3e below %.1e; Jacobian undefined"
                % (float(np.min(np.diff(evals))), EIGENVALUE_GAP_TOL)
            )
        return np.stack([np.sum(vecs * (b @ vecs), axis=0) for b in basis], axis=1)

    return Problem(
        name=name,
        n_params=len(basis),
        n_residuals=dim,
        residual=residual,
        jacobian=jacobian,
        extras={"targets": targets, "basis": tuple(basis), "a0": a0},
    )


def mn12_problem(planted=None) -> Problem:
    """Mn12-style spin-Hamiltonian inverse eigenvalue problem (S = 10).

    A(B20, B40, B22, B44) = B20 O20 + B40 O40 + B22 O22 + B44 O44 on the
    21-dimensional space; the targets are the eigenvalues of A(planted), so
    the planted vector is a zero-residual solution by construction.  Flipping
    the sign of B22 conjugates A by a diagonal sign matrix, so
    (B20, B40, -B22, B44) is an isospectral second solution.
    """
    system = stevens_operators(10)
    planted = np.asarray(
        MN12_DEFAULT_PLANTED if planted is None else planted, dtype=float
    )
    if planted.shape != (4,):
        raise ShapeError("planted parameters must be a 4-vector")
    a_star = sum(p * op for p, op in zip(planted, system.operators))
    targets = np.linalg.eigvalsh(a_star)
    problem = iep_problem(system.operators, np.zeros((system.dim, system.dim)), targets, name="mn12")
    twin = planted * np.array([1.0, 1.0, -1.0, 1.0])
    x0 = planted * np.array([1.1, 1.3, 0.7, 1.2])
    extras = dict(problem.extras)
    extras.update({"planted": planted, "twin": twin, "system": system})
    return Problem(
        name="mn12",
        n_params=4,
        n_residuals=system.dim,
        residual=problem.residual,
        jacobian=problem.jacobian,
        presets={"planted": planted, "twin": twin},
        default_x0=x0,
        extras=extras,
    )
