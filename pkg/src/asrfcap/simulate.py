"""Monte Carlo loss engine for single-factor elliptical copulas.

Families:
  gaussian_one_factor  W_i = sqrt(rho_i) Y + sqrt(1-rho_i) Z_i
  product              independent defaults (no common factor)
  t_gaussian_margins   W_i = sqrt(nu/V) (sqrt(rho_i) Y + sqrt(1-rho_i) Z_i)
  t_t_margins          same latent vector, t margins kept on both axes

Default indicators compare the latent variable with F^-1(pd_i), so the
two t families produce identical loss samples; they differ only in how
scatter coordinates are reported.  Per iteration the engine draws the
factor (slot 0), a chi-square mixing block (reserved band anchored at
slot 1) and either one binomial count per homogeneous block (block
path) or one latent shock per credit (per-credit path, slots 2..n+1).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from . import _kernels_numpy as _knp
from ._coeffs import (
    FAMILY_GAUSSIAN, FAMILY_PRODUCT, FAMILY_T, VARIATE_LIMIT,
)
from .analytic import CapitalReport
from .distributions import student_t_inv_cdf
from .errors import DomainError, SimulationResourceError
from .portfolio import Portfolio

FAMILIES = (
    "gaussian_one_factor",
    "product",
    "t_gaussian_margins",
    "t_t_margins",
)
_T_FAMILIES = ("t_gaussian_margins", "t_t_margins")
_PATHS = ("block", "per-credit")
_ITERATION_LIMIT = 1 << 32


@dataclass(frozen=True)
class CopulaSpec:
    """Dependence family of the latent vector, plus t degrees of freedom."""

    family: str
    nu: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(
                f"unknown copula family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.family in _T_FAMILIES:
            try:
                bad = (self.nu is None or isinstance(self.nu, bool)
                       or self.nu != int(self.nu) or int(self.nu) < 1)
            except (TypeError, ValueError, OverflowError):
                bad = True
            if bad:
                raise DomainError(
                    f"family {self.family} requires integer nu >= 1, got {self.nu!r}"
                )
            object.__setattr__(self, "nu", int(self.nu))
        elif self.nu is not None:
            raise DomainError(f"family {self.family} does not take nu")


@dataclass(frozen=True)
class SimulationConfig:
    """Run-shape parameters; identical configs replay identical losses."""

    iterations: int = 1_000_000
    seed: int = 1
    max_workers: int | str = "auto"

    def __post_init__(self):
        try:
            bad = isinstance(self.iterations, bool) or int(self.iterations) != self.iterations
        except (TypeError, ValueError, OverflowError):
            bad = True
        if bad:
            raise DomainError("iterations must be an integer")
        if not 1 <= int(self.iterations) < _ITERATION_LIMIT:
            raise DomainError(
                f"iterations must lie in [1, 2^32), got {self.iterations}"
            )
        try:
            seed_ok = 0 <= int(self.seed) < 1 << 64 and int(self.seed) == self.seed
        except (TypeError, ValueError, OverflowError):
            seed_ok = False
        if not seed_ok:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        if self.max_workers != "auto":
            try:
                bad = (isinstance(self.max_workers, bool)
                       or int(self.max_workers) != self.max_workers
                       or int(self.max_workers) < 1)
            except (TypeError, ValueError, OverflowError):
                bad = True
            if bad:
                raise DomainError(
                    f"max_workers must be 'auto' or an integer >= 1, got {self.max_workers!r}"
                )


class EmpiricalLossDistribution:
    """Simulated loss fractions, one per iteration, with a sorted view."""

    def __init__(self, losses: np.ndarray):
        losses = np.ascontiguousarray(losses, dtype=np.float64)
        if losses.ndim != 1 or losses.size == 0:
            raise DomainError("losses must be a nonempty 1-d array")
        losses.setflags(write=False)
        self.losses = losses
        self._sorted = None

    @property
    def n(self) -> int:
        return self.losses.size

    @property
    def sorted_losses(self) -> np.ndarray:
        # sorted once on first use; quantile queries then cost O(1)
        if self._sorted is None:
            s = np.sort(self.losses)
            s.setflags(write=False)
            self._sorted = s
        return self._sorted


def default_thresholds(portfolio: Portfolio, copula: CopulaSpec) -> np.ndarray:
    """Latent default thresholds F^-1(pd_i) for the copula's margin."""
    if copula.family in _T_FAMILIES:
        return np.asarray(student_t_inv_cdf(portfolio.pd, copula.nu), dtype=np.float64)
    return _knp.ppnd16(portfolio.pd)


def default_threshold_gaussian(p: float, rho: float, y: float) -> float:
    """Shock level below which a credit defaults, given factor level y.

    zeta(y) = (Phi^-1(p) - sqrt(rho) y) / sqrt(1 - rho); by construction
    Phi(zeta) equals the Gaussian conditional PD.
    """
    _check_unit_open(p, "p")
    _check_unit_open(rho, "rho")
    if not np.isfinite(y):
        raise DomainError("factor level y must be finite")
    thr = float(_knp.ppnd16(np.array([p]))[0])
    return (thr - math.sqrt(rho) * y) / math.sqrt(1.0 - rho)


def default_threshold_t(p: float, rho: float, nu: int, y: float, v: float) -> float:
    """Default shock level given factor y and chi-square mix level v.

    zeta(y, v) = (sqrt(v/nu) t_nu^-1(p) - sqrt(rho) y) / sqrt(1 - rho).
    At v = nu the mixing factor is 1 and only the t threshold differs
    from the Gaussian case; as v -> 0 the threshold is driven purely by
    the factor term.
    """
    _check_unit_open(p, "p")
    _check_unit_open(rho, "rho")
    if not np.isfinite(y):
        raise DomainError("factor level y must be finite")
    if not (np.isfinite(v) and v > 0.0):
        raise DomainError(f"mixing level v must be positive, got {v!r}")
    thr = student_t_inv_cdf(p, nu)
    return (math.sqrt(v / nu) * thr - math.sqrt(rho) * y) / math.sqrt(1.0 - rho)


def _check_unit_open(x, name):
    if not (np.isfinite(x) and 0.0 < x < 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1), got {x!r}")


def _family_code(copula: CopulaSpec) -> int:
    if copula.family == "product":
        return FAMILY_PRODUCT
    if copula.family in _T_FAMILIES:
        return FAMILY_T
    return FAMILY_GAUSSIAN


def simulate_losses(
    portfolio: Portfolio,
    copula: CopulaSpec,
    config: SimulationConfig,
    path: str = "block",
) -> EmpiricalLossDistribution:
    """Simulate the portfolio loss fraction per iteration.

    The block path draws one binomial count per homogeneous block by CDF
    inversion; the per-credit path draws each credit's latent shock.
    Both sample the same model; per-iteration losses are pure functions
    of (seed, iteration), so worker count and chunking cannot change the
    result, and a run is reproducible bit for bit on its backend.
    """
    if path not in _PATHS:
        raise DomainError(f"unknown simulation path {path!r}; expected one of {_PATHS}")
    if portfolio.size + 2 > VARIATE_LIMIT:
        raise SimulationResourceError(
            f"portfolio of {portfolio.size} credits exceeds the variate address space"
        )
    backend = _backend.backend_name()
    kern = _backend.kernels(backend)
    requested = config.max_workers
    if requested == "auto":
        requested = _backend.default_workers()
    _backend.apply_workers(requested, backend)

    key = _knp.stream_key(config.seed)
    fam = _family_code(copula)
    nu = float(copula.nu) if copula.nu is not None else 1.0
    thr = default_thresholds(portfolio, copula)
    sqr = np.sqrt(portfolio.rho)
    s1r = np.sqrt(1.0 - portfolio.rho)
    unit = portfolio.weights * portfolio.lgd
    n_iter = int(config.iterations)

    try:
        if path == "block":
            first = portfolio.block_first
            losses = kern.simulate_fast(
                key, n_iter, fam, nu,
                portfolio.block_sizes,
                np.ascontiguousarray(thr[first]),
                np.ascontiguousarray(sqr[first]),
                np.ascontiguousarray(s1r[first]),
                np.ascontiguousarray(unit[first]),
                np.ascontiguousarray(first + 2),
            )
        else:
            losses = kern.simulate_naive(key, n_iter, fam, nu, thr, sqr, s1r, unit)
    except MemoryError as exc:
        raise SimulationResourceError(
            f"cannot allocate {n_iter} loss samples"
        ) from exc
    return EmpiricalLossDistribution(losses)


def quantile_index(alpha: float, n: int) -> int:
    """1-based order statistic index ceil(alpha * n), guarded against
    the product rounding just above an integer."""
    k = int(math.ceil(alpha * n - 1e-9))
    return min(max(k, 1), n)


def empirical_quantile(dist: EmpiricalLossDistribution, alpha: float) -> float:
    """Value-at-risk: the ceil(alpha*n)-th smallest simulated loss."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return float(dist.sorted_losses[quantile_index(alpha, dist.n) - 1])


def empirical_mean(dist: EmpiricalLossDistribution) -> float:
    return float(dist.losses.mean())


def empirical_cdf(dist: EmpiricalLossDistribution, level: float) -> float:
    """Fraction of iterations with loss <= level."""
    if not np.isfinite(level):
        raise DomainError("level must be finite")
    return float(np.searchsorted(dist.sorted_losses, level, side="right")) / dist.n


def simulated_capital(dist: EmpiricalLossDistribution, alpha: float) -> CapitalReport:
    """Empirical VaR_alpha minus the empirical mean loss."""
    var = empirical_quantile(dist, alpha)
    mean = empirical_mean(dist)
    return CapitalReport(
        alpha=float(alpha), expected_loss=mean, stress_loss=var,
        capital=var - mean, method="simulated",
    )


def write_loss_dump(dist: EmpiricalLossDistribution, path) -> None:
    """Write raw losses, one per line at 12 decimal places, iteration order."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for x in dist.losses:
            fh.write(f"{x:.12f}\n")
