"""crindep - test of independence of time and cause in discrete competing risks."""

__version__ = "0.1.0"

from .errors import (
    CrindepError,
    InputValidationError,
    SampleValidationError,
    InsufficientDataError,
    ModelParameterError,
    FamilyValidityError,
    ConfigError,
    IngestionError,
    HazardUndefinedError,
    TruncationError,
    NumericalStabilityError,
    CovarianceError,
    UndefinedTestError,
    DegenerateVarianceError,
    TruncationWarning,
)
from .sample import (
    Sample,
    EmpiricalLaw,
    validate_sample,
    empirical_law,
    cause_specific_hazard,
    overall_hazard,
    cif_table,
    hazard_share_table,
)
from .ustat import (
    UStatistics,
    kernel_psi1j,
    kernel_psi2,
    u_statistics_bruteforce,
    u_statistics_fast,
    delta_hat,
)
from .models import (
    LifetimeModel,
    Geometric,
    DiscreteWeibull,
    ExplicitPmf,
    DependentFamily,
    model_cdf,
    model_pmf,
    sample_lifetime,
    sample_competing_risks,
    true_delta,
    delta_components,
    family_subdensity,
)
from .asymptotics import (
    NullLaw,
    CovarianceMatrix,
    AsymptoticTestResult,
    var_u1j_null,
    var_u2_null,
    cov_u1j_u1s_null,
    cov_u1j_u2_null,
    g_vector,
    g_covariance_by_summation,
    assemble_sigma,
    sigma0_sq,
    jackknife_sigma0_sq,
    asymptotic_test,
)
from .resampling import (
    BootstrapConfig,
    TestReport,
    null_bootstrap_sample,
    bootstrap_critical_values,
    independence_test,
    spawn_generator,
)
from .power import PowerStudyConfig, power_study, power_table_wide
from .io import IngestionPolicy, read_csv, write_sample_csv

__all__ = [
    "CrindepError",
    "InputValidationError",
    "SampleValidationError",
    "InsufficientDataError",
    "ModelParameterError",
    "FamilyValidityError",
    "ConfigError",
    "IngestionError",
    "HazardUndefinedError",
    "TruncationError",
    "NumericalStabilityError",
    "CovarianceError",
    "UndefinedTestError",
    "DegenerateVarianceError",
    "TruncationWarning",
    "Sample",
    "EmpiricalLaw",
    "validate_sample",
    "empirical_law",
    "cause_specific_hazard",
    "overall_hazard",
    "cif_table",
    "hazard_share_table",
    "UStatistics",
    "kernel_psi1j",
    "kernel_psi2",
    "u_statistics_bruteforce",
    "u_statistics_fast",
    "delta_hat",
    "LifetimeModel",
    "Geometric",
    "DiscreteWeibull",
    "ExplicitPmf",
    "DependentFamily",
    "model_cdf",
    "model_pmf",
    "sample_lifetime",
    "sample_competing_risks",
    "true_delta",
    "delta_components",
    "family_subdensity",
    "NullLaw",
    "CovarianceMatrix",
    "AsymptoticTestResult",
    "var_u1j_null",
    "var_u2_null",
    "cov_u1j_u1s_null",
    "cov_u1j_u2_null",
    "g_vector",
    "g_covariance_by_summation",
    "assemble_sigma",
    "sigma0_sq",
    "jackknife_sigma0_sq",
    "asymptotic_test",
    "BootstrapConfig",
    "TestReport",
    "null_bootstrap_sample",
    "bootstrap_critical_values",
    "independence_test",
    "spawn_generator",
    "PowerStudyConfig",
    "power_study",
    "power_table_wide",
    "IngestionPolicy",
    "read_csv",
    "write_sample_csv",
]
