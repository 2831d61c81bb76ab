"""Discrete lifetime laws and the dependent competing-risks family.

Lifetime models live on {1, 2, ...}:

- geometric:        F(t) = 1 - (1 - p)^t
- discrete Weibull: F(t) = 1 - ((1 - p)^t)^beta  (geometric at beta = 1)
- explicit pmf table on {1, ..., m}

The dependent family with k causes has sub-distributions
F_j(t) = pi_j F^a(t) for j < k and F_k(t) = F(t) - sum_{j<k} pi_j F^a(t),
1 <= a <= 2. Time and cause are independent exactly when a = 1.
"""

import math
from dataclasses import dataclass, field
from typing import ClassVar, Dict, Sequence, Tuple, Union

import numpy as np

from .config import DENSITY_TOLERANCE, MAX_SUPPORT, TAIL_MASS
from .errors import FamilyValidityError, ModelParameterError, TruncationError
from .sample import Sample

TimeLike = Union[int, float, np.ndarray, Sequence[int]]


def _scalar_or_array(out: np.ndarray):
    return float(out) if out.ndim == 0 else out


class LifetimeModel:
    """Base class for parametric discrete lifetime laws.

    Subclasses implement ``survival`` and ``quantile``; everything else is
    derived. A lifetime model is also a one-cause law, so the hazard
    functions of ``crindep.sample`` accept it directly.
    """

    kind: ClassVar[str] = "base"
    k: ClassVar[int] = 1

    def survival(self, t: TimeLike):
        """S(t) = P(T > t)."""
        raise NotImplementedError

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Smallest s with F(s) >= u."""
        raise NotImplementedError

    def support_max(self, tail: float = TAIL_MASS) -> int:
        """Smallest T with S(T) < tail."""
        raise NotImplementedError

    def parameters(self) -> Dict[str, float]:
        """Parameters as reported in power tables."""
        return {"p": math.nan, "beta": math.nan}

    @property
    def label(self) -> str:
        return self.kind

    def cdf(self, t: TimeLike):
        """F(t) = P(T <= t); F(0) = 0."""
        return _scalar_or_array(1.0 - np.asarray(self.survival(t)))

    def pmf(self, t: TimeLike):
        """f(t) = F(t) - F(t - 1)."""
        t_arr = np.asarray(t, dtype=float)
        out = np.asarray(self.survival(t_arr - 1)) - np.asarray(self.survival(t_arr))
        out = np.where(t_arr >= 1, np.maximum(out, 0.0), 0.0)
        return _scalar_or_array(out)

    def subdensity(self, j: int, t: TimeLike):
        """One-cause sub-density, equal to the pmf."""
        if j != 1:
            raise ModelParameterError(f"a lifetime model has one cause, got j={j}")
        return self.pmf(t)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` lifetimes by inverse-CDF sampling."""
        return self.quantile(rng.random(size))


@dataclass(frozen=True)
class DiscreteWeibull(LifetimeModel):
    """Discrete Weibull law F(t) = 1 - ((1 - p)^t)^beta.

    Parameters
    ----------
    p : float
        0 < p < 1
    beta : float
        Shape, beta > 0
    """

    p: float
    beta: float = 1.0

    kind: ClassVar[str] = "weibull"

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ModelParameterError(f"p must lie in (0, 1), got {self.p}")
        if not self.beta > 0.0:
            raise ModelParameterError(f"beta must be positive, got {self.beta}")

    @property
    def _log_q(self) -> float:
        return math.log1p(-self.p)

    def parameters(self) -> Dict[str, float]:
        return {"p": float(self.p), "beta": float(self.beta)}

    @property
    def label(self) -> str:
        return f"{self.kind}(p={self.p:g}, beta={self.beta:g})"

    def survival(self, t: TimeLike):
        t_arr = np.asarray(t, dtype=float)
        exponent = np.maximum(t_arr, 0.0) * self.beta
        out = np.where(t_arr <= 0, 1.0, np.power(1.0 - self.p, exponent))
        return _scalar_or_array(out)

    def quantile(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        s = np.ceil(np.log1p(-u) / (self.beta * self._log_q))
        s = np.maximum(s, 1.0)
        # the closed form can be one step off where u sits on a jump
        too_far = (s > 1) & (np.asarray(self.cdf(s - 1)) >= u)
        s = np.where(too_far, s - 1, s)
        short = np.asarray(self.cdf(s)) < u
        s = np.where(short, s + 1, s)
        return s.astype(np.int64)

    def support_max(self, tail: float = TAIL_MASS) -> int:
        t = int(math.floor(math.log(tail) / (self.beta * self._log_q))) + 1
        t = max(t, 1)
        if t > MAX_SUPPORT:
            raise TruncationError(
                f"{self.label} needs about {t} support points to reach tail {tail:g}"
            )
        while self.survival(t) >= tail:
            t += 1
        while t > 1 and self.survival(t - 1) < tail:
            t -= 1
        return t


@dataclass(frozen=True)
class Geometric(DiscreteWeibull):
    """Geometric law F(t) = 1 - (1 - p)^t on {1, 2, ...}.

    Shares every formula with ``DiscreteWeibull`` at beta = 1, so both give
    bit-identical CDFs and samples.
    """

    p: float
    beta: float = field(default=1.0, init=False)

    kind: ClassVar[str] = "geometric"

    @property
    def label(self) -> str:
        return f"{self.kind}(p={self.p:g})"


@dataclass(frozen=True, eq=False)
class ExplicitPmf(LifetimeModel):
    """Lifetime law given by a pmf table on {1, ..., m}.

    Parameters
    ----------
    table : sequence of float
        table[i] = P(T = i + 1); non-negative, summing to 1
    """

    table: Tuple[float, ...]
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    kind: ClassVar[str] = "explicit"

    def __post_init__(self):
        pmf = np.asarray(self.table, dtype=float)
        if pmf.ndim != 1 or pmf.size == 0:
            raise ModelParameterError("pmf table must be a non-empty sequence")
        if (pmf < 0).any() or not np.isfinite(pmf).all():
            raise ModelParameterError("pmf table entries must be finite and >= 0")
        total = float(pmf.sum())
        if abs(total - 1.0) > 1e-9:
            raise ModelParameterError(f"pmf table sums to {total}, not 1")
        cdf = np.cumsum(pmf)
        cdf[-1] = 1.0
        object.__setattr__(self, "table", tuple(float(x) for x in pmf))
        object.__setattr__(self, "_cdf", np.minimum(cdf, 1.0))

    def survival(self, t: TimeLike):
        t_arr = np.asarray(t, dtype=float)
        idx = np.clip(np.floor(t_arr).astype(np.int64), 0, self._cdf.size)
        padded = np.concatenate(([0.0], self._cdf))
        return _scalar_or_array(1.0 - padded[idx])

    def quantile(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        s = np.searchsorted(self._cdf, u, side="left") + 1
        return np.minimum(s, self._cdf.size).astype(np.int64)

    def support_max(self, tail: float = TAIL_MASS) -> int:
        below = (1.0 - self._cdf) < tail
        return int(np.argmax(below)) + 1


def model_cdf(model: LifetimeModel, t: TimeLike):
    """F(t) of a lifetime model."""
    return model.cdf(t)


def model_pmf(model: LifetimeModel, t: TimeLike):
    """f(t) = F(t) - F(t - 1) of a lifetime model."""
    return model.pmf(t)


def sample_lifetime(model: LifetimeModel, rng: np.random.Generator) -> int:
    """One lifetime t = min{s : F(s) >= u}, u ~ Uniform(0, 1)."""
    return int(model.sample(rng, 1)[0])


@dataclass(frozen=True, eq=False)
class DependentFamily:
    """Competing-risks family with power dependence.

    Parameters
    ----------
    base : LifetimeModel
        Overall lifetime law F
    a : float
        Dependence exponent in [1, 2]; a = 1 gives independence
    pi : sequence of float
        (pi_1, ..., pi_{k-1}); pi_k = 1 - sum(pi)
    tail : float
        Tail mass neglected when checking validity and summing

    Raises
    ------
    ModelParameterError
        If a or pi are out of range
    FamilyValidityError
        If f_k(t) < 0 at some t of the truncated support
    """

    base: LifetimeModel
    a: float
    pi: Tuple[float, ...]
    tail: float = TAIL_MASS

    def __post_init__(self):
        pi = tuple(float(x) for x in np.atleast_1d(self.pi))
        if len(pi) < 1:
            raise ModelParameterError("pi must hold at least one proportion")
        if not 1.0 <= self.a <= 2.0:
            raise ModelParameterError(f"a must lie in [1, 2], got {self.a}")
        if any(not 0.0 <= x <= 1.0 for x in pi):
            raise ModelParameterError(f"each pi_j must lie in [0, 1], got {pi}")
        if sum(pi) > 1.0 + 1e-12:
            raise ModelParameterError(f"pi sums to {sum(pi)} > 1")
        object.__setattr__(self, "pi", pi)

        t = self.grid()
        f_k = self._raw_last_subdensity(t)
        worst = int(np.argmin(f_k))
        if f_k[worst] < -DENSITY_TOLERANCE:
            raise FamilyValidityError(
                f"f_{self.k}({t[worst]}) = {f_k[worst]:.3g} < 0 for "
                f"a={self.a}, pi={pi} with {self.base.label}"
            )

    @property
    def k(self) -> int:
        return len(self.pi) + 1

    @property
    def proportions(self) -> np.ndarray:
        """(pi_1, ..., pi_k) with pi_k = 1 - sum of the others."""
        return np.array(self.pi + (max(1.0 - sum(self.pi), 0.0),))

    def grid(self) -> np.ndarray:
        """Truncated support 1..T with residual mass below ``tail``."""
        return np.arange(1, self.base.support_max(self.tail) + 1)

    def _powered_increment(self, t) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        upper = np.power(np.asarray(self.base.cdf(t_arr)), self.a)
        lower = np.power(np.asarray(self.base.cdf(t_arr - 1)), self.a)
        return upper - lower

    def _raw_last_subdensity(self, t) -> np.ndarray:
        return np.asarray(self.base.pmf(t)) - sum(self.pi) * self._powered_increment(t)

    def _check_cause(self, j: int) -> None:
        if not 1 <= j <= self.k:
            raise ModelParameterError(f"cause {j} outside 1..{self.k}")

    def cdf(self, t: TimeLike):
        return self.base.cdf(t)

    def pmf(self, t: TimeLike):
        return self.base.pmf(t)

    def survival(self, t: TimeLike):
        return self.base.survival(t)

    def cif(self, j: int, t: TimeLike):
        """Sub-distribution F_j(t)."""
        self._check_cause(j)
        powered = np.power(np.asarray(self.base.cdf(t)), self.a)
        if j < self.k:
            return _scalar_or_array(self.pi[j - 1] * powered)
        return _scalar_or_array(np.asarray(self.base.cdf(t)) - sum(self.pi) * powered)

    def subdensity(self, j: int, t: TimeLike):
        """Sub-density f_j(t); tiny negative rounding of f_k is clipped."""
        self._check_cause(j)
        if j < self.k:
            out = self.pi[j - 1] * self._powered_increment(t)
        else:
            out = np.maximum(self._raw_last_subdensity(t), 0.0)
        return _scalar_or_array(np.asarray(out))

    def cause_probabilities(self, t) -> np.ndarray:
        """P(C = j | T = t) for each t, shape (len(t), k)."""
        t_arr = np.atleast_1d(np.asarray(t))
        f = np.asarray(self.base.pmf(t_arr), dtype=float)
        sub = np.column_stack(
            [np.atleast_1d(self.subdensity(j, t_arr)) for j in range(1, self.k + 1)]
        )
        safe = np.where(f > 0, f, 1.0)
        return np.where(f[:, None] > 0, sub / safe[:, None], 1.0 / self.k)

    def sample(self, n: int, rng: np.random.Generator) -> Sample:
        """Draw n pairs: T from F, then C given T = t with prob f_j(t)/f(t)."""
        if n < 1:
            raise ModelParameterError(f"n must be >= 1, got {n}")
        times = self.base.sample(rng, n)
        cumulative = np.cumsum(self.cause_probabilities(times), axis=1)
        u = rng.random(n)
        causes = (cumulative[:, :-1] <= u[:, None]).sum(axis=1) + 1
        return Sample(times, causes, self.k)


def family_subdensity(family: DependentFamily, j: int, t: TimeLike):
    """f_j(t) of a dependent family; the f_j sum to the base pmf."""
    return family.subdensity(j, t)


def sample_competing_risks(
    family: DependentFamily, n: int, rng: np.random.Generator
) -> Sample:
    """Generate n competing-risks observations from the family."""
    return family.sample(n, rng)


def delta_components(
    family: DependentFamily, tail: float = TAIL_MASS
) -> Tuple[np.ndarray, float]:
    """Population Delta_1j = sum F_j^2 f and Delta_2 = sum F^2 f.

    Sums run over 1..T with S(T) < ``tail``.

    Returns
    -------
    Tuple[np.ndarray, float]
        (Delta_11, ..., Delta_1k) and Delta_2
    """
    if not tail <= TAIL_MASS:
        raise TruncationError(
            f"truncation tail {tail:g} is coarser than the required {TAIL_MASS:g}"
        )
    t = np.arange(1, family.base.support_max(tail) + 1)
    f = np.asarray(family.pmf(t))
    F = np.asarray(family.cdf(t))
    delta1 = np.array(
        [np.sum(np.asarray(family.cif(j, t)) ** 2 * f) for j in range(1, family.k + 1)]
    )
    return delta1, float(np.sum(F**2 * f))


def true_delta(family: DependentFamily, tail: float = TAIL_MASS) -> float:
    """Departure from independence Delta = sum_j Delta_1j / pi_j - Delta_2.

    Zero (up to truncation error) exactly when a = 1. Causes with pi_j = 0
    contribute nothing.
    """
    delta1, delta2 = delta_components(family, tail)
    pi = family.proportions
    present = pi > 0
    return float(np.sum(delta1[present] / pi[present]) - delta2)
