"""Experiment configuration: a flat key-value document plus CLI overrides."""

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..deflation import VARIANTS, DeflationConfig
from ..exceptions import ConfigError
from ..problems import PROBLEM_BUILDERS, Problem, build_problem
from ..solvers import SOLVER_METHODS, SolverConfig

METHOD_NAMES = tuple(sorted(SOLVER_METHODS)) + ("multistart",)


@dataclass
class ExperimentConfig:
    """Flat, human-editable description of one experiment.

    Unknown keys are rejected so typos fail loudly.  Problem-specific keys
    (``a`` for ftrig, ``n``/``m`` for the BVPs, ``planted`` for mn12) are
    ignored by problems that do not use them.
    """

    problem: str = "himmelblau"
    method: str = "gauss_newton"
    rounds: int = 1
    x0: object = None  # None -> problem default; preset name; or explicit vector
    # problem parameters
    a: float = 10.0
    n: int = 100
    m: int = 400
    planted: list | None = None
    # deflation operator
    theta: float = 2.0
    sigma: float = 1.0
    variant: str = "multi-shift"
    # solver
    step_tol: float = 1e-10
    max_iters: int = 500
    epsilon: float = 0.01
    armijo_c1: float = 1e-4
    alpha_min: float = 1e-12
    max_ls_trials: int = 50
    stop_on_failure: bool = True
    # multistart
    seed: int = 0
    n_starts: int = 300
    bounds: list | None = None
    # beta-field grid [xmin, xmax, ymin, ymax, nx, ny] and optional explicit points
    grid: list = field(default_factory=lambda: [-6.0, 6.0, -6.0, 6.0, 151, 151])
    deflated_points: list | None = None
    # output
    output_dir: str | None = None
    plots: bool = True

    def validate(self) -> "ExperimentConfig":
        if self.problem not in PROBLEM_BUILDERS:
            raise ConfigError(
                f"unknown problem {self.problem!r}; valid problems: "
                + ", ".join(sorted(PROBLEM_BUILDERS))
            )
        if self.method not in METHOD_NAMES:
            raise ConfigError(
                f"unknown method {self.method!r}; valid methods: " + ", ".join(METHOD_NAMES)
            )
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError("epsilon must lie in [0, 1]")
        if min(self.step_tol, self.alpha_min) <= 0 or self.max_iters < 1:
            raise ConfigError("tolerances must be positive and max_iters >= 1")
        if len(self.grid) != 6:
            raise ConfigError("grid must be [xmin, xmax, ymin, ymax, nx, ny]")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data).validate()

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a flat JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, overrides: dict) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(overrides)
        return ExperimentConfig.from_dict(data)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            step_tol=self.step_tol,
            max_iters=self.max_iters,
            epsilon=self.epsilon,
            armijo_c1=self.armijo_c1,
            alpha_min=self.alpha_min,
            max_ls_trials=self.max_ls_trials,
        )

    def deflation_config(self) -> DeflationConfig:
        return DeflationConfig(theta=self.theta, sigma=self.sigma, variant=self.variant)

    def build_problem(self) -> Problem:
        params = {"a": self.a, "n": self.n, "m": self.m, "planted": self.planted}
        return build_problem(self.problem, params)

    def problem_key(self) -> tuple:
        """Identity of the configured problem instance, for compare checks."""
        return (
            self.problem,
            self.a if self.problem == "ftrig" else None,
            (self.n, self.m) if self.problem in ("bratu", "carrier") else None,
            tuple(self.planted) if self.problem == "mn12" and self.planted else None,
        )


def resolve_x0(config: ExperimentConfig, problem: Problem) -> np.ndarray:
    """Initial guess from an explicit vector, a named preset, or the default."""
    spec = config.x0
    if spec is None:
        if problem.default_x0 is None:
            raise ConfigError(f"problem {problem.name!r} has no default x0; set x0")
        return np.asarray(problem.default_x0, dtype=problem.dtype)
    if isinstance(spec, str):
        text = spec.strip()
        if text == "zero":
            return problem.zero_x()
        if text in problem.presets:
            return np.asarray(problem.presets[text], dtype=problem.dtype)
        if text.startswith("[") and text.endswith("]"):
            parts = [p for p in text[1:-1].replace(",", ";").split(";") if p.strip()]
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise ConfigError(f"cannot parse x0 {spec!r}") from exc
            return _shape_x0(np.asarray(values), problem)
        raise ConfigError(
            f"unknown x0 preset {spec!r}; presets for {problem.name}: "
            + ", ".join(["zero"] + sorted(problem.presets))
        )
    return _shape_x0(np.asarray(spec, dtype=float), problem)


def _shape_x0(values: np.ndarray, problem: Problem) -> np.ndarray:
    if values.shape != (problem.n_params,):
        raise ConfigError(
            f"x0 has {values.size} entries, problem {problem.name!r} needs {problem.n_params}"
        )
    return values.astype(problem.dtype)
