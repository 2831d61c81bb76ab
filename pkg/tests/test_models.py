import numpy as np
import pytest

from crindep.errors import FamilyValidityError, ModelParameterError, TruncationError
from crindep.models import (
    DependentFamily,
    DiscreteWeibull,
    ExplicitPmf,
    Geometric,
    delta_components,
    family_subdensity,
    model_cdf,
    model_pmf,
    sample_competing_risks,
    sample_lifetime,
    true_delta,
)
from crindep.resampling import spawn_generator
from crindep.sample import cause_specific_hazard, empirical_law
from crindep.ustat import delta_hat_arrays


def test_geometric_cdf():
    model = Geometric(0.5)
    assert model_cdf(model, 1) == 0.5
    assert model_cdf(model, 2) == 0.75
    assert model_pmf(model, 2) == 0.25

def test_cdf_at_zero():
    for model in (Geometric(0.3), DiscreteWeibull(0.3, 2.0), ExplicitPmf((0.2, 0.8))):
        assert model_cdf(model, 0) == 0.0
        assert model_pmf(model, 0) == 0.0

def test_weibull_beta_one_is_geometric():
    t = np.arange(1, 101)
    for p in (0.1, 0.3, 0.7):
        np.testing.assert_array_equal(
            DiscreteWeibull(p, 1.0).cdf(t), Geometric(p).cdf(t)
        )
    u = spawn_generator(3).random(1000)
    np.testing.assert_array_equal(
        DiscreteWeibull(0.3, 1.0).quantile(u), Geometric(0.3).quantile(u)
    )

def test_invalid_parameters():
    with pytest.raises(ModelParameterError):
        Geometric(1.5)
    with pytest.raises(ModelParameterError):
        Geometric(0.0)
    with pytest.raises(ModelParameterError):
        DiscreteWeibull(0.3, 0.0)
    with pytest.raises(ModelParameterError):
        ExplicitPmf((0.5, 0.4))
    with pytest.raises(ModelParameterError):
        ExplicitPmf((1.2, -0.2))

def test_quantile_is_inverse_cdf():
    model = Geometric(0.5)
    assert model.quantile(np.array([0.4]))[0] == 1
    assert model.quantile(np.array([1e-12]))[0] == 1
    assert model.quantile(np.array([0.5]))[0] == 1
    assert model.quantile(np.array([0.5000001]))[0] == 2

    weibull = DiscreteWeibull(0.3, 2.0)
    u = spawn_generator(11).random(2000)
    s = weibull.quantile(u)
    assert np.all(weibull.cdf(s) >= u)
    assert np.all((s == 1) | (weibull.cdf(s - 1) < u))

    table = ExplicitPmf((0.2, 0.0, 0.8))
    assert table.quantile(np.array([0.1, 0.2, 0.3, 0.99])).tolist() == [1, 1, 3, 3]

def test_sample_lifetime_matches_cdf():
    model = DiscreteWeibull(0.3, 0.8)
    rng = spawn_generator(5)
    assert sample_lifetime(model, rng) >= 1
    draws = model.sample(rng, 100_000)
    law = empirical_law(sample_competing_risks(
        DependentFamily(model, 1.0, (0.5,)), 10, rng))
    assert law.n == 10
    t = np.arange(1, 60)
    ecdf = np.searchsorted(np.sort(draws), t, side="right") / draws.size
    assert np.max(np.abs(ecdf - model.cdf(t))) < 0.01

def test_support_max():
    model = Geometric(0.5)
    t = model.support_max(1e-10)
    assert model.survival(t) < 1e-10 <= model.survival(t - 1)
    weibull = DiscreteWeibull(0.3, 2.0)
    t = weibull.support_max(1e-10)
    assert weibull.survival(t) < 1e-10 <= weibull.survival(t - 1)
    assert ExplicitPmf((0.5, 0.5, 0.0)).support_max() == 2

def test_support_max_too_large():
    with pytest.raises(TruncationError):
        DiscreteWeibull(1e-9, 0.5).support_max(1e-10)

def test_family_subdensity_hand_value():
    family = DependentFamily(Geometric(0.5), 2.0, (0.5,))
    assert family.subdensity(1, 1) == pytest.approx(0.125)
    assert family.subdensity(2, 1) == pytest.approx(0.375)
    assert family_subdensity(family, 1, 1) == family.subdensity(1, 1)

def test_family_independent_member():
    family = DependentFamily(Geometric(0.3), 1.0, (0.2, 0.3))
    t = np.arange(1, 30)
    f = family.pmf(t)
    np.testing.assert_allclose(family.subdensity(1, t), 0.2 * f, rtol=1e-9)
    np.testing.assert_allclose(family.subdensity(2, t), 0.3 * f, rtol=1e-9)
    np.testing.assert_allclose(family.subdensity(3, t), 0.5 * f, rtol=1e-9, atol=1e-15)
    assert cause_specific_hazard(family, 1, 4) == pytest.approx(0.2 * 0.3)

def test_family_subdensities_sum_to_pmf():
    family = DependentFamily(DiscreteWeibull(0.3, 2.0), 1.5, (0.3, 0.2))
    t = family.grid()
    total = sum(family.subdensity(j, t) for j in range(1, family.k + 1))
    np.testing.assert_allclose(total, family.pmf(t), atol=1e-14)
    cifs = sum(family.cif(j, t) for j in range(1, family.k + 1))
    np.testing.assert_allclose(cifs, family.cdf(t), atol=1e-14)
    assert family.proportions == pytest.approx([0.3, 0.2, 0.5])

def test_family_parameter_checks():
    with pytest.raises(ModelParameterError):
        DependentFamily(Geometric(0.5), 2.5, (0.5,))
    with pytest.raises(ModelParameterError):
        DependentFamily(Geometric(0.5), 1.5, (0.7, 0.6))
    with pytest.raises(ModelParameterError):
        DependentFamily(Geometric(0.5), 1.5, (0.5,)).subdensity(3, 1)

def test_family_negative_last_subdensity_rejected():
    # with pi_1 = 1 and a = 2, F^a gains more mass than F at t = 2
    with pytest.raises(FamilyValidityError, match="< 0"):
        DependentFamily(ExplicitPmf((0.01, 0.99)), 2.0, (1.0,))

def test_sampled_cause_frequencies():
    family = DependentFamily(Geometric(0.5), 2.0, (0.5,))
    sample = sample_competing_risks(family, 100_000, spawn_generator(21))
    assert sample.proportions[0] == pytest.approx(0.5, abs=0.01)
    law = empirical_law(sample)
    for t in range(1, 8):
        assert law.cif(1, t) == pytest.approx(family.cif(1, t), abs=0.01)

def test_sampling_is_deterministic():
    family = DependentFamily(Geometric(0.3), 1.5, (0.5,))
    first = family.sample(50, spawn_generator(1, 2))
    second = family.sample(50, spawn_generator(1, 2))
    assert first == second

def test_true_delta_null_is_zero():
    for model in (Geometric(0.3), DiscreteWeibull(0.3, 2.0)):
        assert true_delta(DependentFamily(model, 1.0, (0.5,))) == pytest.approx(0.0, abs=1e-9)

def test_true_delta_regression_value():
    # F(t) = 1 - 2^-t, F_1 = F^2 / 2, F_2 = (1 - 4^-t) / 2, summed in closed form
    family = DependentFamily(Geometric(0.5), 2.0, (0.5,))
    delta1, delta2 = delta_components(family, tail=1e-15)
    np.testing.assert_allclose(delta1, [157 / 2170, 81 / 434], rtol=0, atol=1e-12)
    assert delta2 == pytest.approx(10 / 21, abs=1e-12)
    assert true_delta(family, tail=1e-15) == pytest.approx(136 / 3255, abs=1e-12)

def test_true_delta_increases_with_a():
    values = [
        true_delta(DependentFamily(Geometric(0.3), a, (0.5,)))
        for a in (1.0, 1.2, 1.5, 1.8, 2.0)
    ]
    assert np.all(np.diff(values) > 0)

def test_true_delta_rejects_coarse_tail():
    with pytest.raises(TruncationError):
        true_delta(DependentFamily(Geometric(0.5), 1.5, (0.5,)), tail=1e-6)

@pytest.mark.slow
def test_mean_delta_hat_matches_true_delta():
    family = DependentFamily(Geometric(0.5), 1.5, (0.5,))
    n, reps = 200, 2000
    values = np.empty(reps)
    for r in range(reps):
        sample = family.sample(n, spawn_generator(55, r))
        values[r] = delta_hat_arrays(sample.times, sample.causes, sample.k)
    _, delta2 = delta_components(family)
    # 1 / pi_hat_j biases the estimate by about -(k - 1) Delta_2 / n
    expected = true_delta(family) - (family.k - 1) * delta2 / n
    se = values.std(ddof=1) / np.sqrt(reps)
    assert abs(values.mean() - expected) < 3 * se
