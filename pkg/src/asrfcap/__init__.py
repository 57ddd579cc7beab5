"""Single systematic factor credit portfolio capital.

Analytic layer: conditional default probabilities, asymptotic capital
charges, and the limiting loss distribution of an infinitely granular
homogeneous portfolio.  Simulation layer: a counter-based, reproducible
Monte Carlo engine for one-factor Gaussian, product and Student t
copulas with either exact per-credit indicators or a conditional
binomial shortcut per homogeneous block.
"""

from .analytic import (
    CapitalReport,
    asrf_capital,
    conditional_expected_loss,
    conditional_pd,
    conditional_pd_general,
    expected_loss,
    general_capital,
    inverse_conditional_pd,
    vasicek_cdf,
    vasicek_quantile,
)
from .distributions import (
    DistributionFunction,
    ModelDistributions,
    RandomStream,
    StandardNormal,
    StudentT,
    sample_chi_square,
    sample_std_normal,
    std_normal_cdf,
    std_normal_inv_cdf,
    student_t_cdf,
    student_t_inv_cdf,
)
from .errors import DomainError, PortfolioFormatError, SimulationResourceError
from .portfolio import (
    GradeRow,
    Obligor,
    Portfolio,
    build_homogeneous,
    expand_granular,
    load_grade_table,
)
from .simulate import (
    CopulaSpec,
    EmpiricalLossDistribution,
    SimulationConfig,
    default_threshold_gaussian,
    default_threshold_t,
    default_thresholds,
    empirical_cdf,
    empirical_mean,
    empirical_quantile,
    quantile_index,
    simulate_losses,
    simulated_capital,
    write_loss_dump,
)

__version__ = "0.1.0"

__all__ = [
    "CapitalReport",
    "CopulaSpec",
    "DistributionFunction",
    "DomainError",
    "EmpiricalLossDistribution",
    "GradeRow",
    "ModelDistributions",
    "Obligor",
    "Portfolio",
    "PortfolioFormatError",
    "RandomStream",
    "SimulationConfig",
    "SimulationResourceError",
    "StandardNormal",
    "StudentT",
    "asrf_capital",
    "build_homogeneous",
    "conditional_expected_loss",
    "conditional_pd",
    "conditional_pd_general",
    "default_threshold_gaussian",
    "default_threshold_t",
    "default_thresholds",
    "empirical_cdf",
    "empirical_mean",
    "empirical_quantile",
    "expand_granular",
    "expected_loss",
    "general_capital",
    "inverse_conditional_pd",
    "load_grade_table",
    "quantile_index",
    "sample_chi_square",
    "sample_std_normal",
    "simulate_losses",
    "simulated_capital",
    "std_normal_cdf",
    "std_normal_inv_cdf",
    "student_t_cdf",
    "student_t_inv_cdf",
    "vasicek_cdf",
    "vasicek_quantile",
    "write_loss_dump",
]
