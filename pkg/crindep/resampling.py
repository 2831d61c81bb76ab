"""Null bootstrap for the independence test.

Each bootstrap sample resamples the observed lifetimes with replacement and
attaches causes drawn independently of them, either uniformly on
{1, ..., k} or from the observed proportions. The statistic is recomputed
on every replicate and its upper quantiles serve as critical values.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_ALPHAS,
    MIN_BOOTSTRAP_B,
    TEST_BOOTSTRAP_B,
    default_seed,
    parse_seed,
)
from .errors import ConfigError, InputValidationError
from .sample import Sample
from .ustat import delta_hat, delta_hat_arrays

logger = logging.getLogger(__name__)

CauseScheme = Literal["uniform", "empirical"]
CAUSE_SCHEMES: Tuple[str, ...] = ("uniform", "empirical")


def spawn_generator(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream ``key`` of a master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def validate_alphas(alphas: Sequence[float]) -> Tuple[float, ...]:
    """Levels as a tuple of floats in (0, 1), duplicates removed in order."""
    levels = tuple(dict.fromkeys(float(a) for a in alphas))
    if not levels:
        raise ConfigError("at least one significance level is required")
    for a in levels:
        if not 0.0 < a < 1.0:
            raise ConfigError(f"significance levels must lie in (0, 1), got {a}")
    return levels


def check_scheme(scheme: str) -> str:
    if scheme not in CAUSE_SCHEMES:
        raise ConfigError(
            f"Unknown cause scheme '{scheme}'. Available schemes: {list(CAUSE_SCHEMES)}"
        )
    return scheme


@dataclass(frozen=True)
class BootstrapConfig:
    """Settings of the null bootstrap.

    Parameters
    ----------
    B : int
        Number of bootstrap replicates, at least ``MIN_BOOTSTRAP_B``
    alpha_levels : tuple of float
        Significance levels reported jointly
    cause_scheme : {'uniform', 'empirical'}
        How null causes are drawn
    seed : int
        Master seed; defaults to ``CRINDEP_SEED`` or ``DEFAULT_SEED``
    """

    B: int = TEST_BOOTSTRAP_B
    alpha_levels: Tuple[float, ...] = DEFAULT_ALPHAS
    cause_scheme: CauseScheme = "uniform"
    seed: int = field(default_factory=default_seed)

    def __post_init__(self):
        if int(self.B) < MIN_BOOTSTRAP_B:
            raise ConfigError(f"B must be >= {MIN_BOOTSTRAP_B}, got {self.B}")
        object.__setattr__(self, "B", int(self.B))
        object.__setattr__(self, "alpha_levels", validate_alphas(self.alpha_levels))
        check_scheme(self.cause_scheme)
        object.__setattr__(self, "seed", parse_seed(self.seed))


def _null_arrays(
    times: np.ndarray,
    k: int,
    proportions: np.ndarray,
    scheme: str,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    n = times.size
    boot_times = times[rng.integers(0, n, size=n)]
    if scheme == "uniform":
        boot_causes = rng.integers(1, k + 1, size=n)
    else:
        boot_causes = rng.choice(np.arange(1, k + 1), size=n, p=proportions)
    return boot_times, boot_causes


def null_bootstrap_sample(
    sample: Sample, scheme: CauseScheme, rng: np.random.Generator
) -> Sample:
    """One bootstrap sample satisfying independence.

    Parameters
    ----------
    sample : Sample
        Observed sample
    scheme : {'uniform', 'empirical'}
        Causes uniform on {1, ..., k} or drawn from pi_hat
    rng : np.random.Generator
        Random stream

    Returns
    -------
    Sample
        n lifetimes drawn with replacement, causes independent of them
    """
    check_scheme(scheme)
    times, causes = _null_arrays(
        sample.times, sample.k, sample.proportions, scheme, rng
    )
    return Sample(times, causes, sample.k)


def bootstrap_distribution(
    sample: Sample,
    B: int,
    scheme: CauseScheme,
    seed: int,
    key: Tuple[int, ...] = (),
) -> np.ndarray:
    """Delta_hat on B null bootstrap samples.

    Replicate b uses the stream ``key + (b,)`` of ``seed``, so the values do
    not depend on the order in which replicates are evaluated.
    """
    check_scheme(scheme)
    proportions = sample.proportions
    values = np.empty(B)
    for b in range(B):
        rng = spawn_generator(seed, *key, b)
        times, causes = _null_arrays(sample.times, sample.k, proportions, scheme, rng)
        values[b] = delta_hat_arrays(times, causes, sample.k)
    return values


def critical_value(values: np.ndarray, alpha: float) -> float:
    """Order statistic ceil((1 - alpha) B) (1-based) of the values.

    Examples
    --------
    >>> critical_value(np.arange(1.0, 101.0), 0.05)
    95.0
    """
    ordered = np.sort(np.asarray(values, dtype=float))
    B = ordered.size
    if B == 0:
        raise InputValidationError("no bootstrap values")
    index = math.ceil(round((1.0 - alpha) * B, 9))
    index = min(max(index, 1), B)
    return float(ordered[index - 1])


def bootstrap_p_value(values: np.ndarray, observed: float) -> float:
    """(1 + #{values >= observed}) / (B + 1)."""
    values = np.asarray(values)
    return float((1 + np.count_nonzero(values >= observed)) / (values.size + 1))


def bootstrap_critical_values(
    sample: Sample, config: BootstrapConfig
) -> Dict[float, float]:
    """Critical value of Delta_hat for each level of the config.

    Returns
    -------
    Dict[float, float]
        Level to (1 - level) bootstrap quantile
    """
    values = bootstrap_distribution(sample, config.B, config.cause_scheme, config.seed)
    return {alpha: critical_value(values, alpha) for alpha in config.alpha_levels}


def _level_key(alpha: float) -> str:
    return f"{alpha:g}"


@dataclass(frozen=True)
class TestReport:
    """Result of the bootstrap independence test.

    ``decisions[alpha]`` is "reject" exactly when
    ``delta_hat > critical_values[alpha]``.
    """

    __test__ = False

    delta_hat: float
    critical_values: Dict[float, float]
    p_value: float
    decisions: Dict[float, str]
    B: int
    scheme: str
    seed: int
    n: int
    k: int
    proportions: Tuple[float, ...]
    asymptotic: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        """Plain dictionary with string level keys."""
        out = {
            "delta_hat": self.delta_hat,
            "critical_values": {
                _level_key(a): v for a, v in self.critical_values.items()
            },
            "p_value": self.p_value,
            "decisions": {_level_key(a): d for a, d in self.decisions.items()},
            "B": self.B,
            "scheme": self.scheme,
            "seed": self.seed,
            "n": self.n,
            "k": self.k,
            "proportions": list(self.proportions),
        }
        if self.asymptotic is not None:
            out["asymptotic"] = self.asymptotic
        return out

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def independence_test(
    sample: Sample, config: Optional[BootstrapConfig] = None
) -> TestReport:
    """Bootstrap test of independence between failure time and cause.

    Parameters
    ----------
    sample : Sample
        Validated sample, n >= 3
    config : BootstrapConfig, optional
        Defaults to ``BootstrapConfig()``

    Returns
    -------
    TestReport
        Statistic, critical values, p-value and decisions per level
    """
    config = config or BootstrapConfig()
    observed = delta_hat(sample).delta_hat
    logger.info(
        "bootstrap test: n=%d, k=%d, B=%d, scheme=%s",
        sample.n, sample.k, config.B, config.cause_scheme,
    )
    values = bootstrap_distribution(sample, config.B, config.cause_scheme, config.seed)
    critical = {a: critical_value(values, a) for a in config.alpha_levels}
    decisions = {
        a: "reject" if observed > cv else "accept" for a, cv in critical.items()
    }
    logger.debug("critical values: %s", critical)
    return TestReport(
        delta_hat=float(observed),
        critical_values=critical,
        p_value=bootstrap_p_value(values, observed),
        decisions=decisions,
        B=config.B,
        scheme=config.cause_scheme,
        seed=config.seed,
        n=sample.n,
        k=sample.k,
        proportions=tuple(float(p) for p in sample.proportions),
    )
