"""Degree-3 U-statistics for the independence test.

Both kernels are the average of three indicators, one per choice of the
"top" element of the triple::

    psi_1j = (1/3) [ I(max(T1,T2) <= T3, C1 = C2 = j)
                   + I(max(T2,T3) <= T1, C2 = C3 = j)
                   + I(max(T1,T3) <= T2, C1 = C3 = j) ]
    psi_2  = (1/3) [ I(max(T1,T2) <= T3) + I(max(T2,T3) <= T1)
                   + I(max(T1,T3) <= T2) ]

With this convention E(psi_1j) = P(max(T1,T2) <= T3, C1 = C2 = j) and
E(psi_2) = P(max(T1,T2) <= T3) hold exactly, ties included. The union of
the three conditions is identically true, so the averaged form is the one
that estimates anything.

U-statistics are kept as integer counts of firing indicators over the
denominator 3 * C(n, 3) and divided once at the end.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Literal, Sequence, Tuple

import numpy as np

from .errors import InsufficientDataError
from .sample import Sample

Observation = Tuple[int, int]
Method = Literal["fast", "bruteforce"]

# beyond this n, sum of C(m, 2) may overflow int64
_INT64_SAFE_N = 2_000_000


@dataclass(frozen=True, eq=False)
class UStatistics:
    """U-statistics U_11..U_1k, U_2, cause proportions and Delta_hat.

    Attributes
    ----------
    u1 : np.ndarray
        (U_11, ..., U_1k)
    u2 : float
        U_2
    proportions : np.ndarray
        pi_hat
    delta_hat : float
        sum_j U_1j / pi_hat_j - U_2, a term with pi_hat_j = 0 counting as 0
    n : int
        Sample size
    u1_counts : tuple of int
        Firing indicators per cause, summed over all triples
    u2_count : int
        Firing indicators of psi_2, summed over all triples
    cause_counts : tuple of int
        Observations per cause
    denominator : int
        3 * C(n, 3)
    """

    u1: np.ndarray
    u2: float
    proportions: np.ndarray
    delta_hat: float
    n: int
    u1_counts: Tuple[int, ...]
    u2_count: int
    cause_counts: Tuple[int, ...]
    denominator: int

    @property
    def k(self) -> int:
        return len(self.u1_counts)

    @property
    def u1_exact(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(c, self.denominator) for c in self.u1_counts)

    @property
    def u2_exact(self) -> Fraction:
        return Fraction(self.u2_count, self.denominator)

    @property
    def delta_hat_exact(self) -> Fraction:
        """Delta_hat as an exact rational."""
        return _delta_exact(
            self.u1_counts, self.u2_count, self.cause_counts,
            self.n, self.denominator,
        )

    def same_counts(self, other: "UStatistics") -> bool:
        """True when both were computed from identical integer counts."""
        return (
            self.u1_counts == other.u1_counts
            and self.u2_count == other.u2_count
            and self.cause_counts == other.cause_counts
            and self.denominator == other.denominator
        )


def _require_three(n: int) -> None:
    if n < 3:
        raise InsufficientDataError(
            f"at least 3 observations required, got {n}"
        )


def _psi1j_count(triple: Sequence[Observation], j: int) -> int:
    (t1, c1), (t2, c2), (t3, c3) = triple
    return (
        int(max(t1, t2) <= t3 and c1 == j and c2 == j)
        + int(max(t2, t3) <= t1 and c2 == j and c3 == j)
        + int(max(t1, t3) <= t2 and c1 == j and c3 == j)
    )


def _psi2_count(triple: Sequence[int]) -> int:
    t1, t2, t3 = triple
    return (
        int(max(t1, t2) <= t3)
        + int(max(t2, t3) <= t1)
        + int(max(t1, t3) <= t2)
    )


def kernel_psi1j(triple: Sequence[Observation], j: int) -> Fraction:
    """Symmetric kernel psi_1j on three (time, cause) pairs.

    Examples
    --------
    >>> kernel_psi1j(((1, 1), (2, 1), (3, 2)), 1)
    Fraction(1, 3)
    """
    return Fraction(_psi1j_count(triple, j), 3)


def kernel_psi2(triple: Sequence[int]) -> Fraction:
    """Symmetric kernel psi_2 on three times.

    Equals (number of elements >= both others) / 3.
    """
    return Fraction(_psi2_count(triple), 3)


def _denominator(n: int) -> int:
    return 3 * math.comb(n, 3)


def _delta_exact(u1_counts, u2_count, cause_counts, n, denominator) -> Fraction:
    total = Fraction(0)
    for count, c in zip(u1_counts, cause_counts):
        if c > 0:
            # U_1j / pi_hat_j = (count / den) / (c / n)
            total += Fraction(count * n, denominator * c)
    return total - Fraction(u2_count, denominator)


def _build(u1_counts, u2_count, cause_counts, n) -> UStatistics:
    denominator = _denominator(n)
    u1 = np.array([c / denominator for c in u1_counts], dtype=float)
    proportions = np.array(cause_counts, dtype=float) / n
    delta = 0.0
    for count, c in zip(u1_counts, cause_counts):
        if c > 0:
            delta += (count * n) / (denominator * c)
    delta -= u2_count / denominator
    return UStatistics(
        u1=u1,
        u2=u2_count / denominator,
        proportions=proportions,
        delta_hat=delta,
        n=n,
        u1_counts=tuple(int(c) for c in u1_counts),
        u2_count=int(u2_count),
        cause_counts=tuple(int(c) for c in cause_counts),
        denominator=denominator,
    )


def u_statistics_bruteforce(sample: Sample) -> UStatistics:
    """U-statistics by enumeration of all C(n, 3) triples.

    Quadratic-cubic cost; kept as the correctness oracle for
    ``u_statistics_fast``.

    Raises
    ------
    InsufficientDataError
        If n < 3
    """
    n = sample.n
    _require_three(n)
    obs = list(zip(sample.times.tolist(), sample.causes.tolist()))
    u1_counts = [0] * sample.k
    u2_count = 0
    for triple in combinations(obs, 3):
        u2_count += _psi2_count([t for t, _ in triple])
        for j in range(1, sample.k + 1):
            u1_counts[j - 1] += _psi1j_count(triple, j)
    return _build(u1_counts, u2_count, sample.cause_counts.tolist(), n)


def _sum_pairs(m: np.ndarray) -> int:
    """sum over l of C(m_l, 2) as a Python int."""
    if m.size > _INT64_SAFE_N:
        return sum(int(x) * (int(x) - 1) // 2 for x in m)
    return int(np.sum(m * (m - 1) // 2, dtype=np.int64))


def _fast_counts(times: np.ndarray, causes: np.ndarray, k: int):
    """Integer counts behind the U-statistics in O(n log n + nk).

    With m_l = #{i != l : T_i <= T_l}, every unordered pair below l in time
    makes l the top of one firing psi_2 indicator, so the psi_2 count is
    sum_l C(m_l, 2). Restricting the pair to cause j gives the psi_1j count.
    """
    sorted_times = np.sort(times)
    m = np.searchsorted(sorted_times, times, side="right") - 1
    u2_count = _sum_pairs(m)

    u1_counts = []
    cause_counts = []
    for j in range(1, k + 1):
        is_j = causes == j
        times_j = np.sort(times[is_j])
        cause_counts.append(int(times_j.size))
        m_j = np.searchsorted(times_j, times, side="right") - is_j
        u1_counts.append(_sum_pairs(m_j))
    return u1_counts, u2_count, cause_counts


def u_statistics_fast(sample: Sample) -> UStatistics:
    """U-statistics by sorting and per-cause cumulative counts.

    Returns exactly the counts of ``u_statistics_bruteforce``.

    Raises
    ------
    InsufficientDataError
        If n < 3
    """
    _require_three(sample.n)
    u1_counts, u2_count, cause_counts = _fast_counts(
        sample.times, sample.causes, sample.k
    )
    return _build(u1_counts, u2_count, cause_counts, sample.n)


def delta_hat_arrays(times: np.ndarray, causes: np.ndarray, k: int) -> float:
    """Delta_hat straight from arrays, skipping sample validation.

    Used in resampling loops where inputs are valid by construction.
    """
    n = int(times.size)
    _require_three(n)
    u1_counts, u2_count, cause_counts = _fast_counts(times, causes, k)
    denominator = _denominator(n)
    delta = 0.0
    for count, c in zip(u1_counts, cause_counts):
        if c > 0:
            delta += (count * n) / (denominator * c)
    return delta - u2_count / denominator


def delta_hat(sample: Sample, method: Method = "fast") -> UStatistics:
    """Test statistic Delta_hat = sum_j U_1j / pi_hat_j - U_2.

    Parameters
    ----------
    sample : Sample
        Validated sample with n >= 3
    method : {'fast', 'bruteforce'}
        Counting algorithm

    Returns
    -------
    UStatistics
        With ``delta_hat`` populated
    """
    if method == "fast":
        return u_statistics_fast(sample)
    if method == "bruteforce":
        return u_statistics_bruteforce(sample)
    raise ValueError(
        f"Unknown method '{method}'. Available methods: ['fast', 'bruteforce']"
    )
