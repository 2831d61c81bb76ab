"""Monte Carlo power of the bootstrap independence test.

For every lifetime model and sample size the study draws data from the
dependent family at each exponent a, applies the test and reports the
rejection rate. Null critical values come either from the a = 1 member of
the family (computed once per model and n) or from the null bootstrap of
each replicated data set.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .config import (
    DEFAULT_ALPHAS,
    DEFAULT_PI1,
    DESK_BOOTSTRAP_B,
    DESK_REPS,
    MIN_BOOTSTRAP_B,
    ScalePreset,
    default_seed,
    get_scale_preset,
    parse_seed,
)
from .errors import ConfigError, CrindepError
from .models import DependentFamily, LifetimeModel
from .resampling import (
    bootstrap_distribution,
    check_scheme,
    critical_value,
    spawn_generator,
    validate_alphas,
)
from .ustat import delta_hat_arrays

logger = logging.getLogger(__name__)

NullMethod = Literal["family", "bootstrap"]

DEFAULT_A_GRID: Tuple[float, ...] = (1.0, 1.2, 1.5, 1.8, 2.0)
DEFAULT_N_GRID: Tuple[int, ...] = (25, 50, 75, 100)

# streams below a (model, n) cell
_NULL_STREAM = 0
_DATA_STREAM = 1
_BOOTSTRAP_STREAM = 2

TABLE_COLUMNS = [
    "model", "p", "beta", "a", "n", "alpha", "power", "mc_se",
    "rejections", "reps", "error",
]


@dataclass(frozen=True)
class PowerStudyConfig:
    """Grid and Monte Carlo settings of a power study.

    Parameters
    ----------
    models : tuple of LifetimeModel
        Lifetime laws of the overall failure time
    a_grid : tuple of float
        Dependence exponents, each in [1, 2]
    n_grid : tuple of int
        Sample sizes, each >= 3
    alphas : tuple of float
        Levels
    reps : int
        Replications per cell
    B : int
        Null draws behind each critical value
    pi : tuple of float
        (pi_1, ..., pi_{k-1}); the default (0.5,) gives two causes
    seed : int
        Master seed
    null_method : {'family', 'bootstrap'}
        Source of the critical values
    cause_scheme : {'uniform', 'empirical'}
        Cause scheme of the per-replicate bootstrap
    n_jobs : int
        Worker processes over (model, n) cells

    Raises
    ------
    ConfigError
        On invalid settings
    ModelParameterError
        If some (model, a, pi) does not define a valid family
    """

    models: Tuple[LifetimeModel, ...]
    a_grid: Tuple[float, ...] = DEFAULT_A_GRID
    n_grid: Tuple[int, ...] = DEFAULT_N_GRID
    alphas: Tuple[float, ...] = DEFAULT_ALPHAS
    reps: int = DESK_REPS
    B: int = DESK_BOOTSTRAP_B
    pi: Tuple[float, ...] = (DEFAULT_PI1,)
    seed: int = field(default_factory=default_seed)
    null_method: NullMethod = "family"
    cause_scheme: str = "uniform"
    n_jobs: int = 1

    def __post_init__(self):
        models = self.models
        if isinstance(models, LifetimeModel):
            models = (models,)
        models = tuple(models)
        if not models:
            raise ConfigError("at least one lifetime model is required")
        a_grid = tuple(float(a) for a in self.a_grid)
        n_grid = tuple(int(n) for n in self.n_grid)
        if not a_grid or not n_grid:
            raise ConfigError("a_grid and n_grid must not be empty")
        if any(n < 3 for n in n_grid):
            raise ConfigError(f"every n must be >= 3, got {list(n_grid)}")
        if int(self.reps) < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if int(self.B) < MIN_BOOTSTRAP_B:
            raise ConfigError(f"B must be >= {MIN_BOOTSTRAP_B}, got {self.B}")
        if int(self.n_jobs) < 1:
            raise ConfigError(f"n_jobs must be >= 1, got {self.n_jobs}")
        if self.null_method not in ("family", "bootstrap"):
            raise ConfigError(
                f"Unknown null method '{self.null_method}'. "
                "Available methods: ['family', 'bootstrap']"
            )
        check_scheme(self.cause_scheme)
        labels = [_table_label(m.kind, **m.parameters()) for m in models]
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise ConfigError(f"duplicate models in power study: {duplicates}")

        object.__setattr__(self, "models", models)
        object.__setattr__(self, "a_grid", a_grid)
        object.__setattr__(self, "n_grid", n_grid)
        object.__setattr__(self, "alphas", validate_alphas(self.alphas))
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "B", int(self.B))
        object.__setattr__(self, "pi", tuple(float(x) for x in np.atleast_1d(self.pi)))
        object.__setattr__(self, "seed", parse_seed(self.seed))
        object.__setattr__(self, "n_jobs", int(self.n_jobs))

        # reject invalid families before any simulation
        for model in models:
            for a in a_grid:
                DependentFamily(model, a, self.pi)

    @classmethod
    def from_preset(
        cls,
        models: Sequence[LifetimeModel],
        preset: ScalePreset = "desk",
        **kwargs,
    ) -> "PowerStudyConfig":
        """Config with ``reps`` and ``B`` taken from a scale preset."""
        scale = get_scale_preset(preset)
        scale.update(kwargs)
        return cls(models=tuple(models), **scale)


def _row(model: LifetimeModel, a: float, n: int, alpha: float) -> Dict[str, Any]:
    row = {"model": model.kind, "a": a, "n": n, "alpha": alpha}
    row.update(model.parameters())
    return row


def _family_critical_values(
    config: PowerStudyConfig, model: LifetimeModel, n: int, cell: Tuple[int, int]
) -> Dict[float, float]:
    null_family = DependentFamily(model, 1.0, config.pi)
    values = np.empty(config.B)
    for b in range(config.B):
        rng = spawn_generator(config.seed, *cell, _NULL_STREAM, b)
        sample = null_family.sample(n, rng)
        values[b] = delta_hat_arrays(sample.times, sample.causes, sample.k)
    return {alpha: critical_value(values, alpha) for alpha in config.alphas}


def _rejections(
    config: PowerStudyConfig,
    family: DependentFamily,
    n: int,
    cell: Tuple[int, int],
    critical: Optional[Dict[float, float]],
) -> Dict[float, int]:
    counts = {alpha: 0 for alpha in config.alphas}
    for r in range(config.reps):
        # same stream for every a: common random numbers across the a grid
        rng = spawn_generator(config.seed, *cell, _DATA_STREAM, r)
        sample = family.sample(n, rng)
        observed = delta_hat_arrays(sample.times, sample.causes, sample.k)
        if critical is None:
            values = bootstrap_distribution(
                sample, config.B, config.cause_scheme, config.seed,
                key=(*cell, _BOOTSTRAP_STREAM, r),
            )
            levels = {alpha: critical_value(values, alpha) for alpha in config.alphas}
        else:
            levels = critical
        for alpha, cv in levels.items():
            counts[alpha] += int(observed > cv)
    return counts


def run_cell(config: PowerStudyConfig, model_index: int, n_index: int) -> List[Dict[str, Any]]:
    """Rows of the power table for one (model, n) cell.

    Domain errors are recorded in the ``error`` column instead of raised.
    """
    model = config.models[model_index]
    n = config.n_grid[n_index]
    cell = (model_index, n_index)
    logger.info("power cell: %s, n=%d", model.label, n)

    try:
        critical = None
        if config.null_method == "family":
            critical = _family_critical_values(config, model, n, cell)
            logger.debug("%s, n=%d: critical values %s", model.label, n, critical)
    except CrindepError as exc:
        logger.warning("power cell %s, n=%d failed: %s", model.label, n, exc)
        return [
            _failed_row(config, model, a, n, alpha, exc)
            for a in config.a_grid
            for alpha in config.alphas
        ]

    rows = []
    for a in config.a_grid:
        try:
            family = DependentFamily(model, a, config.pi)
            counts = _rejections(config, family, n, cell, critical)
        except CrindepError as exc:
            logger.warning("power cell %s, a=%g, n=%d failed: %s", model.label, a, n, exc)
            rows.extend(_failed_row(config, model, a, n, alpha, exc) for alpha in config.alphas)
            continue
        for alpha in config.alphas:
            power = counts[alpha] / config.reps
            row = _row(model, a, n, alpha)
            row.update(
                power=power,
                mc_se=math.sqrt(power * (1.0 - power) / config.reps),
                rejections=counts[alpha],
                reps=config.reps,
                error=None,
            )
            rows.append(row)
    return rows


def _failed_row(config, model, a, n, alpha, exc) -> Dict[str, Any]:
    row = _row(model, a, n, alpha)
    row.update(
        power=math.nan,
        mc_se=math.nan,
        rejections=0,
        reps=config.reps,
        error=f"{exc.__class__.__name__}: {exc}",
    )
    return row


def _run_cell_args(args: Tuple[PowerStudyConfig, int, int]) -> List[Dict[str, Any]]:
    return run_cell(*args)


def power_study(config: PowerStudyConfig) -> pd.DataFrame:
    """Empirical power over the grid of a config.

    Parameters
    ----------
    config : PowerStudyConfig
        Grid, replications, null method and seed

    Returns
    -------
    pd.DataFrame
        One row per (model, n, a, alpha) with columns
        ``model, p, beta, a, n, alpha, power, mc_se, rejections, reps, error``.
        Results do not depend on ``n_jobs``.
    """
    cells = [
        (config, mi, ni)
        for mi in range(len(config.models))
        for ni in range(len(config.n_grid))
    ]
    logger.info(
        "power study: %d cells, reps=%d, B=%d, null=%s",
        len(cells), config.reps, config.B, config.null_method,
    )
    if config.n_jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.n_jobs) as executor:
            results = list(executor.map(_run_cell_args, cells))
    else:
        results = [_run_cell_args(args) for args in cells]

    rows = [row for cell_rows in results for row in cell_rows]
    table = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    return table.sort_values(["model", "p", "beta", "a", "n", "alpha"], kind="stable",
                             ascending=[True, True, True, True, True, False],
                             ignore_index=True)


def _table_label(kind: str, p: float, beta: float) -> str:
    if kind == "explicit":
        return kind
    label = f"{kind} p={p:g}"
    if kind == "weibull":
        label += f" beta={beta:g}"
    return label


def _model_label(row: pd.Series) -> str:
    return _table_label(row["model"], row["p"], row["beta"])


def power_table_wide(table: pd.DataFrame) -> pd.DataFrame:
    """Reshape a power table to rows (a, n) and columns (model, alpha).

    Parameters
    ----------
    table : pd.DataFrame
        Output of ``power_study``

    Returns
    -------
    pd.DataFrame
        Power values indexed by (a, n) with a (model, alpha) column index
    """
    labelled = table.assign(label=table.apply(_model_label, axis=1))
    wide = labelled.pivot(index=["a", "n"], columns=["label", "alpha"], values="power")
    return wide.sort_index()
