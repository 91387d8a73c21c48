"""Built-in benchmark problems and the name registry used by the harness."""

from .analytic import ftrig, himmelblau
from .base import Problem, gradient, gradient_norm, objective, residual_norm
from .fourier import (
    FourierExtensionGrid,
    bratu_problem,
    carrier_problem,
    fe_metric,
    fe_norm,
)
from .spin import (
    MN12_DEFAULT_PLANTED,
    SpinSystem,
    iep_problem,
    mn12_problem,
    stevens_operators,
)

__all__ = [
    "Problem",
    "objective",
    "gradient",
    "gradient_norm",
    "residual_norm",
    "himmelblau",
    "ftrig",
    "FourierExtensionGrid",
    "fe_norm",
    "fe_metric",
    "bratu_problem",
    "carrier_problem",
    "stevens_operators",
    "SpinSystem",
    "iep_problem",
    "mn12_problem",
    "MN12_DEFAULT_PLANTED",
    "PROBLEM_BUILDERS",
    "build_problem",
]


def _build_himmelblau(params):
    return himmelblau()


def _build_ftrig(params):
    return ftrig(a=params.get("a", 10.0))


def _build_bratu(params):
    return bratu_problem(n=params.get("n", 100), m=params.get("m", 400))


def _build_carrier(params):
    return carrier_problem(n=params.get("n", 100), m=params.get("m", 400))


def _build_mn12(params):
    return mn12_problem(planted=params.get("planted"))


PROBLEM_BUILDERS = {
    "himmelblau": _build_himmelblau,
    "ftrig": _build_ftrig,
    "bratu": _build_bratu,
    "carrier": _build_carrier,
    "mn12": _build_mn12,
}


def build_problem(name: str, params: dict | None = None) -> Problem:
    """Instantiate a registered problem by name."""
    if name not in PROBLEM_BUILDERS:
        known = ", ".join(sorted(PROBLEM_BUILDERS))
        raise KeyError(f"unknown problem {name!r}; known problems: {known}")
    return PROBLEM_BUILDERS[name](params or {})
