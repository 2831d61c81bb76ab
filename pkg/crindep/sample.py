"""Competing-risks samples and their empirical estimators.

A sample is a set of pairs ``(T_i, C_i)`` where ``T_i`` is a discrete
lifetime on ``{1, 2, ...}`` and ``C_i`` one of ``k`` causes of failure.
The empirical law stores, on the observed support only, the overall ECDF
``F(t)``, the cause-specific sub-distributions (cumulative incidence
functions) ``F_j(t)`` and the cause proportions ``pi_j``. Queries between
support points follow the right-continuous step convention.
"""

from dataclasses import dataclass
from typing import Protocol, Sequence, Union

import numpy as np
import pandas as pd

from .errors import (
    HazardUndefinedError,
    InputValidationError,
    SampleValidationError,
)

ArrayLike = Union[Sequence[int], np.ndarray]


def _as_int_array(values: ArrayLike, name: str) -> np.ndarray:
    """Convert to a 1-D int64 array, rejecting non-integer entries."""
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise SampleValidationError(f"{name} must be one-dimensional")
    if arr.size == 0:
        return arr.astype(np.int64)
    if arr.dtype.kind in "iu":
        return arr.astype(np.int64)
    if arr.dtype.kind == "f":
        bad = ~np.isfinite(arr) | (arr != np.floor(arr))
        if bad.any():
            i = int(np.argmax(bad))
            raise SampleValidationError(
                f"non-integer {name[:-1]} {arr[i]!r} at index {i + 1}; "
                "rank-map the values to 1, 2, ... first"
            )
        return arr.astype(np.int64)
    raise SampleValidationError(
        f"{name} must be integers, got dtype {arr.dtype}"
    )


@dataclass(frozen=True, eq=False)
class Sample:
    """Paired discrete lifetimes and cause labels.

    Parameters
    ----------
    times : array-like of int
        Lifetimes, every value >= 1
    causes : array-like of int
        Cause labels in {1, ..., k}
    k : int
        Declared number of causes

    Raises
    ------
    SampleValidationError
        If lengths differ, the sample is empty, a time is non-positive or a
        cause lies outside {1, ..., k}. Offending positions are reported
        1-based.
    """

    times: np.ndarray
    causes: np.ndarray
    k: int

    def __post_init__(self):
        times = _as_int_array(self.times, "times")
        causes = _as_int_array(self.causes, "causes")

        if times.size != causes.size:
            raise SampleValidationError(
                f"length mismatch: {times.size} times but {causes.size} causes"
            )
        if times.size == 0:
            raise SampleValidationError("sample is empty")
        k = int(self.k)
        if k < 1:
            raise SampleValidationError(f"k must be >= 1, got {k}")

        bad = np.flatnonzero(times < 1)
        if bad.size:
            i = int(bad[0])
            raise SampleValidationError(
                f"non-positive time at index {i + 1} (got {times[i]})"
            )
        bad = np.flatnonzero(causes > k)
        if bad.size:
            i = int(bad[0])
            raise SampleValidationError(
                f"cause {causes[i]} exceeds k={k} at index {i + 1}"
            )
        bad = np.flatnonzero(causes < 1)
        if bad.size:
            i = int(bad[0])
            raise SampleValidationError(
                f"cause {causes[i]} below 1 at index {i + 1}"
            )

        times.setflags(write=False)
        causes.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "causes", causes)
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        """Sample size."""
        return int(self.times.size)

    @property
    def cause_counts(self) -> np.ndarray:
        """Number of observations per cause, shape (k,)."""
        return np.bincount(self.causes, minlength=self.k + 1)[1:]

    @property
    def proportions(self) -> np.ndarray:
        """Cause proportions pi_hat_j = #{C_i = j} / n."""
        return self.cause_counts / self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sample):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.causes, other.causes)
        )

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Sample(n={self.n}, k={self.k})"


def validate_sample(
    times: ArrayLike,
    causes: ArrayLike,
    k: int,
    min_causes: int = 2,
) -> Sample:
    """Build a validated ``Sample``.

    Parameters
    ----------
    times : array-like of int
        Discrete lifetimes (>= 1)
    causes : array-like of int
        Cause labels in {1, ..., k}
    k : int
        Declared number of causes
    min_causes : int
        Smallest admissible k. A competing-risks sample needs two causes;
        pass 1 only for descriptive use of a single-cause file.

    Returns
    -------
    Sample
        The validated sample

    Raises
    ------
    SampleValidationError
        On any violated invariant, naming the offending index
    """
    if len(times) != len(causes):
        raise SampleValidationError(
            f"length mismatch: {len(times)} times but {len(causes)} causes"
        )
    if int(k) < min_causes:
        raise SampleValidationError(f"k must be >= {min_causes}, got {k}")
    return Sample(times, causes, int(k))


def _step(support: np.ndarray, values: np.ndarray, t, below: float = 0.0):
    """Right-continuous step lookup of ``values`` at ``t``."""
    t_arr = np.asarray(t)
    idx = np.searchsorted(support, t_arr, side="right") - 1
    out = np.where(idx >= 0, values[np.clip(idx, 0, None)], below)
    return float(out) if out.ndim == 0 else out


def _point(support: np.ndarray, values: np.ndarray, t):
    """Value at ``t`` if ``t`` is a support point, else 0."""
    t_arr = np.asarray(t)
    idx = np.searchsorted(support, t_arr, side="left")
    clipped = np.clip(idx, 0, support.size - 1)
    hit = (idx < support.size) & (support[clipped] == t_arr)
    out = np.where(hit, values[clipped], 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class EmpiricalLaw:
    """Empirical distribution of a competing-risks sample.

    Attributes
    ----------
    support : np.ndarray
        Sorted distinct observed times, shape (m,)
    overall_cdf : np.ndarray
        F_hat at each support point, shape (m,)
    subdist : np.ndarray
        F_hat_j at each support point, shape (k, m)
    proportions : np.ndarray
        pi_hat_j, shape (k,)
    counts : np.ndarray
        Number of observations with time == support[i] and cause j,
        shape (k, m)
    n : int
        Sample size
    """

    support: np.ndarray
    overall_cdf: np.ndarray
    subdist: np.ndarray
    proportions: np.ndarray
    counts: np.ndarray
    n: int

    @property
    def k(self) -> int:
        """Number of causes."""
        return int(self.subdist.shape[0])

    @property
    def overall_pmf(self) -> np.ndarray:
        """f_hat at each support point."""
        return self.counts.sum(axis=0) / self.n

    @property
    def subdensity_table(self) -> np.ndarray:
        """f_hat_j at each support point, shape (k, m)."""
        return self.counts / self.n

    def cdf(self, t):
        """Overall ECDF F_hat(t)."""
        return _step(self.support, self.overall_cdf, t)

    def cif(self, j: int, t):
        """Cumulative incidence F_hat_j(t) of cause j."""
        return _step(self.support, self.subdist[j - 1], t)

    def survival(self, t):
        """S_hat(t) = 1 - F_hat(t), exactly zero from the largest time on."""
        remaining = (self.n - np.cumsum(self.counts.sum(axis=0))) / self.n
        return _step(self.support, remaining, t, below=1.0)

    def pmf(self, t):
        """f_hat(t)."""
        return _point(self.support, self.overall_pmf, t)

    def subdensity(self, j: int, t):
        """f_hat_j(t)."""
        return _point(self.support, self.subdensity_table[j - 1], t)


def empirical_law(sample: Sample) -> EmpiricalLaw:
    """Empirical law of a sample.

    F_hat(t) = n^-1 sum I(T_i <= t), F_hat_j(t) = n^-1 sum I(T_i <= t, C_i = j)
    and pi_hat_j = F_hat_j(max support). All values come from integer counts,
    so the result does not depend on observation order.

    Parameters
    ----------
    sample : Sample
        Validated sample

    Returns
    -------
    EmpiricalLaw
        The empirical law on the observed support
    """
    support, inverse = np.unique(sample.times, return_inverse=True)
    counts = np.zeros((sample.k, support.size), dtype=np.int64)
    np.add.at(counts, (sample.causes - 1, inverse), 1)

    cumulative = np.cumsum(counts, axis=1)
    n = sample.n
    return EmpiricalLaw(
        support=support,
        overall_cdf=cumulative.sum(axis=0) / n,
        subdist=cumulative / n,
        proportions=cumulative[:, -1] / n,
        counts=counts,
        n=n,
    )


class SubdistributionLaw(Protocol):
    """Anything exposing sub-densities and a survival function.

    Implemented by ``EmpiricalLaw``, every ``LifetimeModel`` (one cause)
    and ``DependentFamily``.
    """

    k: int

    def pmf(self, t): ...

    def subdensity(self, j: int, t): ...

    def survival(self, t): ...


def _check_time(t) -> int:
    if int(t) != t or t < 1:
        raise InputValidationError(f"time must be a positive integer, got {t}")
    return int(t)


def _survival_before(law: SubdistributionLaw, t: int) -> float:
    s = float(law.survival(t - 1))
    if s <= 0.0:
        raise HazardUndefinedError(
            f"hazard undefined beyond support (S({t - 1}) = 0)"
        )
    return s


def cause_specific_hazard(law: SubdistributionLaw, j: int, t: int) -> float:
    """Cause-specific hazard lambda_j(t) = f_j(t) / S(t - 1).

    Parameters
    ----------
    law : SubdistributionLaw
        Empirical law, lifetime model or dependent family
    j : int
        Cause in {1, ..., k}
    t : int
        Time point (>= 1)

    Returns
    -------
    float
        Probability of failing at t from cause j given survival past t - 1

    Raises
    ------
    HazardUndefinedError
        If S(t - 1) = 0
    """
    t = _check_time(t)
    if not 1 <= j <= law.k:
        raise InputValidationError(f"cause {j} outside 1..{law.k}")
    s = _survival_before(law, t)
    return float(np.clip(law.subdensity(j, t) / s, 0.0, 1.0))


def overall_hazard(law: SubdistributionLaw, t: int) -> float:
    """Overall hazard lambda(t) = f(t) / S(t - 1) = sum_j lambda_j(t)."""
    t = _check_time(t)
    s = _survival_before(law, t)
    return float(np.clip(law.pmf(t) / s, 0.0, 1.0))


def cif_table(sample: Sample) -> pd.DataFrame:
    """Cumulative incidence functions at each distinct observed time.

    Parameters
    ----------
    sample : Sample
        Validated sample

    Returns
    -------
    pd.DataFrame
        Columns ``t, F1, ..., Fk, F``
    """
    law = empirical_law(sample)
    table = {"t": law.support}
    for j in range(law.k):
        table[f"F{j + 1}"] = law.subdist[j]
    table["F"] = law.overall_cdf
    return pd.DataFrame(table)


def hazard_share_table(sample: Sample) -> pd.DataFrame:
    """Share of each cause in the overall hazard at each observed time.

    lambda_j(t) / lambda(t) = f_j(t) / f(t); under independence every column
    is constant and equal to pi_j.

    Returns
    -------
    pd.DataFrame
        Columns ``t, share1, ..., sharek``
    """
    law = empirical_law(sample)
    totals = law.counts.sum(axis=0)
    table = {"t": law.support}
    for j in range(law.k):
        table[f"share{j + 1}"] = law.counts[j] / totals
    return pd.DataFrame(table)
