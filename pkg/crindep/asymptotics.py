"""Null asymptotic variances of the U-statistics and the z-test.

Everything is computed at the level of the projection functions. With
h(t) = sum_{x >= t} F(x) f(x) and, under independence, F_j = pi_j F:

    g_1j(t, c) = pi_j^2 F(t)^2 + 2 pi_j I(c = j) h(t)
    g_2(t)     = F(t)^2 + 2 h(t)

E(psi | X_1) = g / 3 for the averaged kernels, so the asymptotic
covariance of sqrt(n) (U - theta) is 9 Cov(g / 3) = Cov(g). The closed
forms below are the moments of these functions summed over the support;
``g_covariance_by_summation`` evaluates the same covariance on the
(t, c) grid and serves as a cross-check.

Under independence sum_j g_1j / pi_j = g_2 identically, so the contrast
a' Sigma a with a = (1/pi_1, ..., 1/pi_k, -1) vanishes for every null law.
The plug-in z-test therefore reports a degenerate variance; the jackknife
variance is offered as an experimental alternative.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from .config import PSD_TOLERANCE, TAIL_MASS, TRUNCATION_WARN_TAIL
from .errors import (
    CovarianceError,
    DegenerateVarianceError,
    InputValidationError,
    InsufficientDataError,
    TruncationWarning,
    UndefinedTestError,
)
from .models import LifetimeModel
from .sample import EmpiricalLaw, Sample, empirical_law
from .ustat import delta_hat, delta_hat_arrays

logger = logging.getLogger(__name__)

VarianceMethod = Literal["plugin", "jackknife"]


@dataclass(frozen=True, eq=False)
class NullLaw:
    """Joint law of (T, C) under independence.

    Parameters
    ----------
    support : array-like of int
        Increasing support points of T
    pmf : array-like of float
        f(t) at each support point
    proportions : array-like of float
        pi_j, summing to 1
    truncation_tail : float
        Upper bound on the probability mass beyond the support
    """

    support: np.ndarray
    pmf: np.ndarray
    proportions: np.ndarray
    truncation_tail: float = 0.0

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        pmf = np.asarray(self.pmf, dtype=float)
        proportions = np.asarray(self.proportions, dtype=float)
        if support.ndim != 1 or support.size == 0 or support.shape != pmf.shape:
            raise InputValidationError(
                "support and pmf must be non-empty 1-D arrays of equal length"
            )
        if np.any(np.diff(support) <= 0):
            raise InputValidationError("support must be strictly increasing")
        if np.any(pmf < 0):
            raise InputValidationError("pmf must be non-negative")
        if proportions.ndim != 1 or np.any(proportions < 0):
            raise InputValidationError("proportions must be a non-negative vector")
        if abs(proportions.sum() - 1.0) > 1e-9:
            raise InputValidationError(
                f"proportions sum to {proportions.sum()}, not 1"
            )
        if pmf.sum() < 1.0 - self.truncation_tail - 1e-9:
            raise InputValidationError(
                f"pmf sums to {pmf.sum()}, more mass missing than "
                f"truncation_tail={self.truncation_tail:g}"
            )
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "proportions", proportions)

    @classmethod
    def from_model(
        cls,
        model: LifetimeModel,
        proportions: Sequence[float],
        tail: float = TAIL_MASS,
        t_max: Optional[int] = None,
    ) -> "NullLaw":
        """Null law of a parametric lifetime model with independent causes.

        The support is 1..t_max, by default the smallest point leaving less
        than ``tail`` beyond it.
        """
        if t_max is None:
            t_max = model.support_max(tail)
        t = np.arange(1, int(t_max) + 1)
        return cls(
            support=t,
            pmf=np.asarray(model.pmf(t), dtype=float),
            proportions=np.asarray(proportions, dtype=float),
            truncation_tail=float(model.survival(int(t_max))),
        )

    @classmethod
    def from_empirical(cls, law: EmpiricalLaw) -> "NullLaw":
        """Plug-in null law (F_hat, f_hat, pi_hat); finite, nothing truncated."""
        return cls(
            support=law.support,
            pmf=law.overall_pmf,
            proportions=law.proportions,
            truncation_tail=0.0,
        )

    @property
    def k(self) -> int:
        return int(self.proportions.size)

    @property
    def cdf(self) -> np.ndarray:
        """F at each support point."""
        return np.cumsum(self.pmf)

    def tail_sum(self) -> np.ndarray:
        """h(t) = sum_{x >= t} F(x) f(x) at each support point."""
        weighted = self.cdf * self.pmf
        return np.cumsum(weighted[::-1])[::-1]


@dataclass(frozen=True)
class _Moments:
    s4: float  # sum F^4 f
    s_fh: float  # sum F^2 h f
    s_hh: float  # sum h^2 f
    d2: float  # sum F^2 f


def _check_tail(law: NullLaw) -> None:
    if law.truncation_tail > TRUNCATION_WARN_TAIL:
        message = (
            f"null law neglects tail mass {law.truncation_tail:.3g} "
            f"(> {TRUNCATION_WARN_TAIL:g}); variances may be biased"
        )
        logger.warning(message)
        warnings.warn(message, TruncationWarning, stacklevel=3)


def _moments(law: NullLaw) -> _Moments:
    _check_tail(law)
    F = law.cdf
    f = law.pmf
    h = law.tail_sum()
    return _Moments(
        s4=float(np.sum(F**4 * f)),
        s_fh=float(np.sum(F**2 * h * f)),
        s_hh=float(np.sum(h**2 * f)),
        d2=float(np.sum(F**2 * f)),
    )


def _proportion(law: NullLaw, j: int) -> float:
    if not 1 <= j <= law.k:
        raise InputValidationError(f"cause {j} outside 1..{law.k}")
    return float(law.proportions[j - 1])


def _var_u1j(m: _Moments, pi_j: float) -> float:
    value = (
        pi_j**4 * m.s4
        + 4 * pi_j**4 * m.s_fh
        + 4 * pi_j**3 * m.s_hh
        - 9 * (pi_j**2 * m.d2) ** 2
    )
    return max(value, 0.0)


def _var_u2(m: _Moments) -> float:
    return max(m.s4 + 4 * m.s_fh + 4 * m.s_hh - 9 * m.d2**2, 0.0)


def _cov_u1j_u1s(m: _Moments, pi_j: float, pi_s: float) -> float:
    scale = pi_j**2 * pi_s**2
    return scale * (m.s4 + 4 * m.s_fh - 9 * m.d2**2)


def _cov_u1j_u2(m: _Moments, pi_j: float) -> float:
    scale = pi_j**2
    return scale * (4 * m.s_hh + 4 * m.s_fh + m.s4 - 9 * m.d2**2)


def var_u1j_null(law: NullLaw, j: int) -> float:
    """Asymptotic variance of sqrt(n) (U_1j - Delta_1j) under independence.

    Equals Var(g_1j(T, C)) computed by summation over the support.
    """
    pi_j = _proportion(law, j)
    return _var_u1j(_moments(law), pi_j)


def var_u2_null(law: NullLaw) -> float:
    """Asymptotic variance of sqrt(n) (U_2 - Delta_2), i.e. Var(g_2(T))."""
    return _var_u2(_moments(law))


def cov_u1j_u1s_null(law: NullLaw, j: int, s: int) -> float:
    """Asymptotic covariance of sqrt(n) U_1j and sqrt(n) U_1s, j != s.

    Raises
    ------
    InputValidationError
        If j == s
    """
    if j == s:
        raise InputValidationError("j == s; use var_u1j_null")
    pi_j = _proportion(law, j)
    pi_s = _proportion(law, s)
    return _cov_u1j_u1s(_moments(law), pi_j, pi_s)


def cov_u1j_u2_null(law: NullLaw, j: int) -> float:
    """Asymptotic covariance of sqrt(n) U_1j and sqrt(n) U_2."""
    pi_j = _proportion(law, j)
    return _cov_u1j_u2(_moments(law), pi_j)


def g_vector(law: NullLaw, times, causes) -> np.ndarray:
    """Projection functions (g_11, ..., g_1k, g_2) at each observation.

    Times off the support use the step convention: F from the largest
    support point <= t, h from the smallest support point >= t.

    Returns
    -------
    np.ndarray
        Shape (n, k + 1)
    """
    times = np.asarray(times)
    causes = np.asarray(causes)
    F_ext = np.concatenate(([0.0], law.cdf))
    h_ext = np.concatenate((law.tail_sum(), [0.0]))
    F = F_ext[np.searchsorted(law.support, times, side="right")]
    h = h_ext[np.searchsorted(law.support, times, side="left")]

    pi = law.proportions
    is_cause = causes[:, None] == np.arange(1, law.k + 1)[None, :]
    g1 = pi[None, :] ** 2 * (F**2)[:, None] + 2 * pi[None, :] * is_cause * h[:, None]
    g2 = F**2 + 2 * h
    return np.column_stack([g1, g2])


def g_covariance_by_summation(law: NullLaw) -> np.ndarray:
    """Cov of the projection vector summed over the (t, c) grid.

    Each cell has probability f(t) pi_c; like the closed forms, the
    truncated support is not renormalized. Independent of the closed forms
    and used to cross-check them.
    """
    _check_tail(law)
    times = np.repeat(law.support, law.k)
    causes = np.tile(np.arange(1, law.k + 1), law.support.size)
    weights = np.repeat(law.pmf, law.k) * np.tile(law.proportions, law.support.size)
    g = g_vector(law, times, causes)
    mean = weights @ g
    return (g * weights[:, None]).T @ g - np.outer(mean, mean)


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Asymptotic covariance of sqrt(n) (U_11, ..., U_1k, U_2).

    Attributes
    ----------
    sigma : np.ndarray
        Symmetric (k + 1) x (k + 1) matrix
    min_eigenvalue : float
        Smallest eigenvalue, kept for diagnostics
    """

    sigma: np.ndarray
    min_eigenvalue: float = field(default=0.0)

    @property
    def k(self) -> int:
        return int(self.sigma.shape[0]) - 1

    def __repr__(self) -> str:
        return f"CovarianceMatrix(k={self.k}, trace={np.trace(self.sigma):.4g})"


def assemble_sigma(law: NullLaw) -> CovarianceMatrix:
    """Assemble Sigma from the closed-form variances and covariances.

    Raises
    ------
    CovarianceError
        If the smallest eigenvalue is below -PSD_TOLERANCE * trace
    """
    m = _moments(law)
    k = law.k
    pi = law.proportions
    sigma = np.zeros((k + 1, k + 1))
    for j in range(k):
        sigma[j, j] = _var_u1j(m, pi[j])
        for s in range(j + 1, k):
            sigma[j, s] = sigma[s, j] = _cov_u1j_u1s(m, pi[j], pi[s])
        sigma[j, k] = sigma[k, j] = _cov_u1j_u2(m, pi[j])
    sigma[k, k] = _var_u2(m)

    eigenvalues = np.linalg.eigvalsh(sigma)
    smallest = float(eigenvalues.min())
    tolerance = PSD_TOLERANCE * max(float(np.trace(sigma)), 0.0) + 1e-15
    if smallest < -tolerance:
        raise CovarianceError(
            f"Sigma is not positive semi-definite: smallest eigenvalue "
            f"{smallest:.3g} below -{tolerance:.3g}"
        )
    logger.debug("assembled Sigma with trace %.6g", np.trace(sigma))
    return CovarianceMatrix(sigma=sigma, min_eigenvalue=smallest)


def _contrast(proportions: np.ndarray) -> np.ndarray:
    pi = np.asarray(proportions, dtype=float)
    if np.any(pi <= 0):
        raise UndefinedTestError("asymptotic test undefined; use bootstrap")
    return np.concatenate((1.0 / pi, [-1.0]))


def sigma0_sq(sigma: CovarianceMatrix, proportions: Sequence[float]) -> float:
    """Null variance sigma_0^2 = a' Sigma a, a = (1/pi_1, ..., 1/pi_k, -1).

    Raises
    ------
    UndefinedTestError
        If some pi_j = 0
    """
    a = _contrast(proportions)
    if a.size != sigma.sigma.shape[0]:
        raise InputValidationError(
            f"{a.size - 1} proportions for a {sigma.k}-cause covariance matrix"
        )
    return max(float(a @ sigma.sigma @ a), 0.0)


def jackknife_sigma0_sq(sample: Sample) -> float:
    """Jackknife estimate of the variance of sqrt(n) Delta_hat.

    n * Var_jack = (n - 1) * sum_i (Delta_hat_(-i) - mean)^2. Identical
    (t, c) pairs share their leave-one-out value, so each distinct pair is
    evaluated once.

    Raises
    ------
    InsufficientDataError
        If n < 4
    """
    n = sample.n
    if n < 4:
        raise InsufficientDataError(
            f"jackknife needs at least 4 observations, got {n}"
        )
    pairs, first, counts = np.unique(
        np.column_stack([sample.times, sample.causes]),
        axis=0,
        return_index=True,
        return_counts=True,
    )
    values = np.empty(len(pairs))
    for i, idx in enumerate(first):
        keep = np.ones(n, dtype=bool)
        keep[idx] = False
        values[i] = delta_hat_arrays(sample.times[keep], sample.causes[keep], sample.k)
    mean = np.sum(counts * values) / n
    return float((n - 1) * np.sum(counts * (values - mean) ** 2))


@dataclass(frozen=True)
class AsymptoticTestResult:
    """Outcome of the one-sided z-test sqrt(n) Delta_hat / sigma_0 > Z_alpha.

    Attributes
    ----------
    statistic : float
        sqrt(n) Delta_hat / sigma_hat_0
    sigma0_sq : float
        Estimated null variance
    z_alpha : float
        Upper alpha point of N(0, 1)
    decision : str
        "reject" or "accept"
    alpha : float
        Level
    variance_method : str
        "plugin" or "jackknife"
    notes : tuple of str
        Caveats attached to the result
    """

    statistic: float
    sigma0_sq: float
    z_alpha: float
    decision: str
    alpha: float
    variance_method: str
    notes: Tuple[str, ...] = ()

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "statistic": self.statistic,
            "sigma0_sq": self.sigma0_sq,
            "z_alpha": self.z_alpha,
            "decision": self.decision,
            "alpha": self.alpha,
            "variance_method": self.variance_method,
            "notes": list(self.notes),
        }


def asymptotic_test(
    sample: Sample,
    alpha: float = 0.05,
    variance: VarianceMethod = "plugin",
) -> AsymptoticTestResult:
    """Asymptotic z-test of independence (experimental).

    Parameters
    ----------
    sample : Sample
        Validated sample with n >= 3
    alpha : float
        Level in (0, 0.5]
    variance : {'plugin', 'jackknife'}
        Estimator of sigma_0^2. The plug-in estimator substitutes the
        empirical null law into Sigma; it is zero whenever the law is a
        null law, which every plug-in law is.

    Returns
    -------
    AsymptoticTestResult

    Raises
    ------
    UndefinedTestError
        If some pi_hat_j = 0
    DegenerateVarianceError
        If the estimated variance is zero within tolerance
    """
    if not 0.0 < alpha <= 0.5:
        raise InputValidationError(f"alpha must lie in (0, 0.5], got {alpha}")
    if variance not in ("plugin", "jackknife"):
        raise ValueError(
            f"Unknown variance method '{variance}'. "
            "Available methods: ['plugin', 'jackknife']"
        )

    stats = delta_hat(sample)
    a = _contrast(stats.proportions)

    notes = ["experimental: the bootstrap test is the reference procedure"]
    if variance == "plugin":
        law = NullLaw.from_empirical(empirical_law(sample))
        sigma = assemble_sigma(law)
        value = sigma0_sq(sigma, law.proportions)
        scale = float(np.abs(a) @ np.abs(sigma.sigma) @ np.abs(a))
        threshold = PSD_TOLERANCE * scale + 1e-15
        notes.append("plug-in sigma_0^2 from the empirical null law")
    else:
        value = jackknife_sigma0_sq(sample)
        threshold = 1e-15
        notes.append("jackknife sigma_0^2 of sqrt(n) Delta_hat")

    if value <= threshold:
        raise DegenerateVarianceError("degenerate variance, use bootstrap")

    statistic = math.sqrt(sample.n) * stats.delta_hat / math.sqrt(value)
    z_alpha = float(norm.isf(alpha))
    decision = "reject" if statistic > z_alpha else "accept"
    logger.debug(
        "asymptotic test (%s): statistic=%.6g, z=%.4g", variance, statistic, z_alpha
    )
    return AsymptoticTestResult(
        statistic=float(statistic),
        sigma0_sq=value,
        z_alpha=z_alpha,
        decision=decision,
        alpha=float(alpha),
        variance_method=variance,
        notes=tuple(notes),
    )
