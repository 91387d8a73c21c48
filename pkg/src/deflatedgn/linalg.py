"""Dense linear algebra used by the solvers.

Minimum-norm least squares, thin QR with recycled applications, projector and
pseudoinverse actions, the rank-one pseudoinverse update, and a central
finite-difference Jacobian used as a verification oracle.  All routines accept
real or complex input; transposes are conjugate transposes in the complex
case.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import InvalidInputError, RankDeficiencyError, ShapeError

# |R_ii| below this fraction of max |R_jj| declares rank deficiency.
RANK_TOL = 1e-12


@dataclass(frozen=True)
class QRFactors:
    """Thin QR factorization J = Q R with real nonnegative R diagonal."""

    q: np.ndarray
    r: np.ndarray
    rows: int
    cols: int

    def min_diag_ratio(self) -> float:
        d = np.abs(np.diag(self.r))
        dmax = d.max() if d.size else 0.0
        return float(d.min() / dmax) if dmax > 0 else 0.0


def _as_matrix(J) -> np.ndarray:
    J = np.asarray(J)
    if J.ndim != 2 or J.shape[0] < 1 or J.shape[1] < 1:
        raise ShapeError(f"expected a 2-d matrix, got shape {J.shape}")
    return J


def lsq_min_norm(J, b) -> np.ndarray:
    """Minimum-2-norm minimizer of ||J p - b||_2.

    Uses an SVD-based solve with a machine-precision rank cutoff, so heavily
    ill-conditioned systems (e.g. Fourier-extension collocation) are handled
    the way dedicated minimum-norm routines handle them.
    """
    J = _as_matrix(J)
    b = np.asarray(b)
    if b.shape != (J.shape[0],):
        raise ShapeError(f"rhs has shape {b.shape}, expected ({J.shape[0]},)")
    if not (np.all(np.isfinite(J)) and np.all(np.isfinite(b))):
        raise InvalidInputError("non-finite entries in least-squares input")
    x, _, _, _ = np.linalg.lstsq(J, b, rcond=None)
    return x


def qr_factorize(J) -> QRFactors:
    """Thin QR of an m x l matrix with m >= l.

    The factors are normalized so that the diagonal of R is real and
    nonnegative, which makes the factorization unique for full-rank input.
    """
    J = _as_matrix(J)
    m, l = J.shape
    if m < l:
        raise ShapeError(f"qr_factorize requires m >= l, got {m} x {l}")
    if not np.all(np.isfinite(J)):
        raise InvalidInputError("non-finite entries in matrix")
    q, r = np.linalg.qr(J, mode="reduced")
    d = np.diag(r).copy()
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    q = q * phase[np.newaxis, :]
    r = r * np.conj(phase)[:, np.newaxis]
    return QRFactors(q=q, r=r, rows=m, cols=l)


def _require_full_rank(factors: QRFactors) -> None:
    if factors.min_diag_ratio() < RANK_TOL:
        raise RankDeficiencyError(
            "R diagonal ratio %.3e below rank tolerance %.1e"
            % (factors.min_diag_ratio(), RANK_TOL)
        )


def apply_normal_inverse(factors: QRFactors, v) -> np.ndarray:
    """(J^H J)^{-1} v via two triangular solves with the R factor."""
    v = np.asarray(v)
    if v.shape != (factors.cols,):
        raise ShapeError(f"vector has shape {v.shape}, expected ({factors.cols},)")
    _require_full_rank(factors)
    w = solve_triangular(factors.r, v, trans="C", lower=False)
    return solve_triangular(factors.r, w, lower=False)


def apply_projector_complement(factors: QRFactors, r) -> np.ndarray:
    """P r = (I - J J^+) r, the residual component orthogonal to range(J)."""
    r = np.asarray(r)
    if r.shape != (factors.rows,):
        raise ShapeError(f"vector has shape {r.shape}, expected ({factors.rows},)")
    return r - factors.q @ (factors.q.conj().T @ r)


def apply_pinv_transpose(factors: QRFactors, v) -> np.ndarray:
    """J^{+H} v = Q R^{-H} v."""
    v = np.asarray(v)
    if v.shape != (factors.cols,):
        raise ShapeError(f"vector has shape {v.shape}, expected ({factors.cols},)")
    _require_full_rank(factors)
    w = solve_triangular(factors.r, v, trans="C", lower=False)
    return factors.q @ w


def pinv_rank_update_action(A, u, v) -> np.ndarray:
    """(A + u v^H)^+ u for full-rank A, without forming the update.

    Evaluates the closed-form rank-one pseudoinverse update

        (A + u v^H)^+ u = (conj(beta)/omega) A^+ u + (||Pu||^2/omega) (A^H A)^{-1} v

    with beta = 1 + v^H A^+ u, omega = ||Pu||^2 ||A^{+H} v||^2 + |beta|^2 and
    P = I - A A^+.  In the real case this reduces to the familiar
    (beta/omega) A^+ u + (||Pu||^2/omega) (A^T A)^{-1} v form, and for square A
    to (1 + v^T A^{-1} u)^{-1} A^{-1} u.  Used for verification, not in the
    solver hot path.
    """
    A = _as_matrix(A)
    u = np.asarray(u)
    v = np.asarray(v)
    m, l = A.shape
    if u.shape != (m,) or v.shape != (l,):
        raise ShapeError(f"expected u ({m},) and v ({l},), got {u.shape} and {v.shape}")
    factors = qr_factorize(A)
    _require_full_rank(factors)
    qtu = factors.q.conj().T @ u
    apu = solve_triangular(factors.r, qtu, lower=False)
    pu = u - factors.q @ qtu
    beta = 1.0 + np.vdot(v, apu)
    z = solve_triangular(factors.r, v, trans="C", lower=False)  # R^{-H} v
    pu2 = float(np.real(np.vdot(pu, pu)))
    omega = pu2 * float(np.real(np.vdot(z, z))) + abs(beta) ** 2
    normal_inv_v = solve_triangular(factors.r, z, lower=False)
    return (np.conj(beta) / omega) * apu + (pu2 / omega) * normal_inv_v


def fd_jacobian(problem, x, h: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of ``problem.residual`` at x.

    Verification oracle only.  The default step balances truncation against
    rounding; pass an explicit h for stiff spectra.
    """
    x = np.asarray(x)
    if h is None:
        h = 1e-5 * (1.0 + float(np.max(np.abs(x), initial=0.0)))
    if h <= 0:
        raise InvalidInputError("step size must be positive")
    r0 = np.asarray(problem.residual(x))
    J = np.zeros((r0.shape[0], x.shape[0]), dtype=np.promote_types(r0.dtype, x.dtype))
    for j in range(x.shape[0]):
        e = np.zeros_like(x)
        e[j] = h
        J[:, j] = (np.asarray(problem.residual(x + e)) - np.asarray(problem.residual(x - e))) / (2.0 * h)
    return J
