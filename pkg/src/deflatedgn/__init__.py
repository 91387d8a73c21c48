"""Deflated Newton and Gauss-Newton solvers for nonlinear least squares.

Deflation modifies a problem after each solution is found so that iterative
methods are repelled from it, letting a single initial guess enumerate many
local minima.  This package provides the deflation operators, the "good" and
"bad" deflated Gauss-Newton methods plus Newton baselines, a multistart
baseline, benchmark problems (Himmelblau, a 42-minimum trigonometric product
problem, Fourier-extension discretizations of the Bratu and Carrier BVPs, and
spin-Hamiltonian inverse eigenvalue problems), and a CLI harness that writes
reports, traces, and figures.
"""

from .deflation import (
    EUCLIDEAN,
    DeflationConfig,
    DeflationMetric,
    DeflationState,
    add_deflation_point,
    beta_field,
    grad_eta,
    mu_value,
)
from .exceptions import (
    AtDeflatedPointError,
    ConfigError,
    DeflatedGNError,
    DegenerateEigenvaluesError,
    InvalidInputError,
    LineSearchError,
    RankDeficiencyError,
    ShapeError,
)
from .linalg import (
    QRFactors,
    apply_normal_inverse,
    apply_pinv_transpose,
    apply_projector_complement,
    fd_jacobian,
    lsq_min_norm,
    pinv_rank_update_action,
    qr_factorize,
)
from .multistart import MultistartConfig, MultistartResult, dedupe, multistart
from .problems import (
    FourierExtensionGrid,
    Problem,
    bratu_problem,
    build_problem,
    carrier_problem,
    fe_metric,
    fe_norm,
    ftrig,
    gradient,
    gradient_norm,
    himmelblau,
    iep_problem,
    mn12_problem,
    objective,
    residual_norm,
    stevens_operators,
)
from .solvers import (
    DeflationLoopResult,
    IterationRecord,
    Solution,
    SolutionSet,
    SolveResult,
    SolverConfig,
    bad_deflated_gn,
    deflated_newton_opt,
    deflated_newton_root,
    deflation_loop,
    gauss_newton,
    good_deflated_gn,
    newton_root,
    quadratic_line_search,
)

__version__ = "0.1.0"
