"""Batch studies: capital agreement, convergence, sensitivities, scatter.

Each study returns plain records; writers serialize them as CSV curves
(series,alpha,value) and JSON summaries with a full configuration echo,
so downstream plotting never needs to rerun a simulation.
"""

import json
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels_numpy as _knp
from .analytic import (
    CapitalReport, asrf_capital, conditional_expected_loss, conditional_pd,
)
from .distributions import std_normal_inv_cdf, student_t_cdf
from .errors import DomainError
from .portfolio import Portfolio, build_homogeneous, expand_granular, load_grade_table
from .simulate import (
    CopulaSpec, SimulationConfig, empirical_quantile, simulate_losses,
    simulated_capital,
)

# Exposure-weighted business-sector totals used as the homogeneous
# portfolio parameters of the convergence study.
BUSINESS_SECTOR_LGD = 0.429
BUSINESS_SECTOR_PD = 0.0102
BUSINESS_SECTOR_RHO = 0.198

DEFAULT_GRANULARITY = 1e-4


@dataclass(frozen=True)
class SectorParams:
    """Homogeneous parameter triple for synthetic portfolios."""

    lgd: float
    pd: float
    rho: float

    @classmethod
    def business(cls) -> "SectorParams":
        return cls(BUSINESS_SECTOR_LGD, BUSINESS_SECTOR_PD, BUSINESS_SECTOR_RHO)


@dataclass(frozen=True)
class CurvePoint:
    """One plotted point: series label, confidence level, loss fraction."""

    series: str
    alpha: float
    value: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")


@dataclass(frozen=True)
class ComparisonRecord:
    """Analytic vs simulated capital at one confidence level."""

    analytic: CapitalReport
    simulated: CapitalReport
    gap_bp: float

    def __post_init__(self):
        expected = abs(self.analytic.capital - self.simulated.capital) * 1e4
        if abs(self.gap_bp - expected) > 1e-9:
            raise DomainError("gap_bp must equal |capital difference| in basis points")


def convergence_grid() -> tuple:
    """Confidence grid 0.990 .. 0.9995, step 0.0005."""
    return tuple(round(0.990 + 0.0005 * k, 6) for k in range(20))


def wide_grid() -> tuple:
    """Confidence grid 0.900 .. 0.9975 step 0.0025, plus the 0.9995 end."""
    return tuple(round(0.900 + 0.0025 * k, 6) for k in range(40)) + (0.9995,)


def _granular_portfolio(portfolio_csv, max_weight) -> Portfolio:
    return expand_granular(load_grade_table(portfolio_csv), max_weight)


def run_table2(
    portfolio_csv,
    n_iterations: int = 1_000_000,
    seed: int = 1,
    max_weight: float = DEFAULT_GRANULARITY,
    max_workers="auto",
    alpha: float = 0.999,
) -> ComparisonRecord:
    """Analytic and simulated capital on the granular table portfolio."""
    pf = _granular_portfolio(portfolio_csv, max_weight)
    analytic = asrf_capital(pf, alpha)
    dist = simulate_losses(
        pf, CopulaSpec("gaussian_one_factor"),
        SimulationConfig(iterations=n_iterations, seed=seed, max_workers=max_workers),
    )
    simulated = simulated_capital(dist, alpha)
    return ComparisonRecord(
        analytic=analytic, simulated=simulated,
        gap_bp=abs(analytic.capital - simulated.capital) * 1e4,
    )


def run_convergence(
    sector_params: SectorParams,
    sizes,
    alphas=None,
    n_iterations: int = 200_000,
    seed: int = 1,
    max_workers="auto",
) -> list:
    """Empirical VaR curves for growing homogeneous portfolios.

    One curve per size n plus the analytic asymptote
    E[L | Y = Phi^-1(1 - alpha)] the curves approach as n grows.
    """
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise DomainError("sizes must be nonempty")
    alphas = tuple(alphas) if alphas is not None else convergence_grid()
    for a in alphas:
        if not 0.99 <= a <= 0.9999:
            raise DomainError(
                f"convergence grid alphas must lie in [0.99, 0.9999], got {a}"
            )
    points = []
    config = SimulationConfig(
        iterations=n_iterations, seed=seed, max_workers=max_workers
    )
    for n in sizes:
        pf = build_homogeneous(
            n, 1.0, sector_params.lgd, sector_params.pd, sector_params.rho
        )
        dist = simulate_losses(pf, CopulaSpec("gaussian_one_factor"), config)
        for a in alphas:
            points.append(CurvePoint(f"n={n}", a, empirical_quantile(dist, a)))
    for a in alphas:
        asymptote = sector_params.lgd * conditional_pd(
            sector_params.pd, sector_params.rho, std_normal_inv_cdf(1.0 - a)
        )
        points.append(CurvePoint("asymptote", a, asymptote))
    return points


def run_rho_sensitivity(
    portfolio_csv,
    multipliers,
    alphas=None,
    max_weight: float = DEFAULT_GRANULARITY,
) -> list:
    """Analytic stress-loss curves under scaled asset correlations."""
    multipliers = [float(m) for m in multipliers]
    if not multipliers:
        raise DomainError("multipliers must be nonempty")
    alphas = tuple(alphas) if alphas is not None else wide_grid()
    base = _granular_portfolio(portfolio_csv, max_weight)
    points = []
    for mult in multipliers:
        if mult <= 0.0:
            raise DomainError(f"multiplier must be positive, got {mult}")
        scaled = Portfolio(
            base.ead, base.lgd, base.pd, base.rho * mult,
            base.sectors, base.grades,
        )
        for a in alphas:
            y = std_normal_inv_cdf(1.0 - a)
            points.append(
                CurvePoint(f"rho x{mult:g}", a, conditional_expected_loss(scaled, y))
            )
    return points


def copula_label(copula: CopulaSpec) -> str:
    if copula.family == "gaussian_one_factor":
        return "gaussian"
    if copula.family == "product":
        return "product"
    if copula.family == "t_gaussian_margins":
        return f"t nu={copula.nu}"
    return f"t-t nu={copula.nu}"


def run_copula_sensitivity(
    portfolio_csv,
    families,
    alphas=None,
    n_iterations: int = 200_000,
    seed: int = 1,
    max_weight: float = DEFAULT_GRANULARITY,
    max_workers="auto",
) -> list:
    """Empirical VaR curves per copula family on the same portfolio.

    Families share the (Y, Z) draws through the common counter layout,
    so curve differences isolate the dependence structure.
    """
    families = list(families)
    if not families:
        raise DomainError("families must be nonempty")
    alphas = tuple(alphas) if alphas is not None else wide_grid()
    pf = _granular_portfolio(portfolio_csv, max_weight)
    config = SimulationConfig(
        iterations=n_iterations, seed=seed, max_workers=max_workers
    )
    points = []
    for copula in families:
        dist = simulate_losses(pf, copula, config)
        label = copula_label(copula)
        for a in alphas:
            points.append(CurvePoint(label, a, empirical_quantile(dist, a)))
    return points


def emit_scatter(copula: CopulaSpec, rho: float, count: int, seed: int) -> np.ndarray:
    """Latent pairs (X1, X2) of two credits sharing the factor.

    Gaussian: X_i = sqrt(rho) Y + sqrt(1-rho) Z_i.  Product: X_i = Z_i.
    t variants scale the Gaussian pair by sqrt(nu/V); t_gaussian_margins
    then maps each coordinate through Phi^-1(Phi_nu(.)), which restores
    standard normal margins while keeping the t dependence.
    """
    if not (np.isfinite(rho) and 0.0 < rho < 1.0):
        raise DomainError(f"rho must lie strictly inside (0, 1), got {rho!r}")
    count = int(count)
    if not 1 <= count < 1 << 32:
        raise DomainError(f"count must lie in [1, 2^32), got {count}")
    key = _knp.stream_key(seed)
    its = np.arange(count, dtype=np.uint64)
    z1 = _knp.ppnd16(_knp.uniform_at(key, its, 2))
    z2 = _knp.ppnd16(_knp.uniform_at(key, its, 3))
    if copula.family == "product":
        return np.column_stack((z1, z2))
    y = _knp.ppnd16(_knp.uniform_at(key, its, 0))
    w1 = np.sqrt(rho) * y + np.sqrt(1.0 - rho) * z1
    w2 = np.sqrt(rho) * y + np.sqrt(1.0 - rho) * z2
    if copula.family == "gaussian_one_factor":
        return np.column_stack((w1, w2))
    v = _knp.chi2_draws(key, its, copula.nu)
    s = np.sqrt(copula.nu / v)
    t1, t2 = s * w1, s * w2
    if copula.family == "t_t_margins":
        return np.column_stack((t1, t2))
    # t_gaussian_margins: strictly increasing margin transform per axis
    x1 = _knp.ppnd16(np.asarray(student_t_cdf(t1, copula.nu)))
    x2 = _knp.ppnd16(np.asarray(student_t_cdf(t2, copula.nu)))
    return np.column_stack((x1, x2))


def write_curves_csv(points, path) -> None:
    """series,alpha,value rows, values at 8 decimal places."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("series,alpha,value\n")
        for p in points:
            fh.write(f"{p.series},{p.alpha:.6f},{p.value:.8f}\n")


def write_scatter_csv(pairs, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("x1,x2\n")
        for x1, x2 in pairs:
            fh.write(f"{x1:.8f},{x2:.8f}\n")


def curves_payload(points) -> list:
    return [
        {"series": p.series, "alpha": p.alpha, "value": p.value} for p in points
    ]


def comparison_payload(record: ComparisonRecord) -> dict:
    return {
        "analytic": record.analytic.to_dict(),
        "simulated": record.simulated.to_dict(),
        "gap_bp": record.gap_bp,
    }


def write_summary_json(path, payload) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


class WallClock:
    """Context manager measuring elapsed wall time in seconds."""

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._t0
        return False
