"""Closed-form capital under a single systematic risk factor.

In the one-factor threshold model an obligor defaults when its latent
variable W_i = sqrt(rho_i) Y + sqrt(1 - rho_i) Z_i falls below
F^-1(pd_i).  Conditional on the factor level Y = y the defaults are
independent with probability

    p_i(y) = G((F^-1(pd_i) - sqrt(rho_i) y) / sqrt(1 - rho_i)),

and in an infinitely granular portfolio the loss converges to its
conditional expectation.  Capital at confidence alpha is the excess of
the loss conditional on the adverse factor quantile y_alpha = H^-1(1-alpha)
over the unconditional expected loss.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels_numpy as _k
from .distributions import ModelDistributions
from .errors import DomainError
from .portfolio import Portfolio

_REPORT_METHODS = ("analytic", "simulated")


@dataclass(frozen=True)
class CapitalReport:
    """Capital decomposition at one confidence level.

    stress_loss is the conditional expected loss at the stress factor
    level for the analytic method, or the empirical loss quantile for
    the simulated method.  capital = stress_loss - expected_loss; it can
    be negative at low alpha, where the stress scenario is mild.
    """

    alpha: float
    expected_loss: float
    stress_loss: float
    capital: float
    method: str

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.method not in _REPORT_METHODS:
            raise DomainError(f"method must be one of {_REPORT_METHODS}")
        for name in ("expected_loss", "stress_loss"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        if abs(self.capital - (self.stress_loss - self.expected_loss)) > 1e-12:
            raise DomainError("capital must equal stress_loss - expected_loss")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "expected_loss": self.expected_loss,
            "stress_loss": self.stress_loss,
            "capital": self.capital,
            "method": self.method,
        }


def _validate_probability(p, name="p"):
    arr = np.asarray(p, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1)")
    return arr


def _validate_loading(gamma):
    # sign is free; only gamma^2 < 1 is structural (it is the variance share)
    arr = np.asarray(gamma, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr == 0.0) or np.any(arr * arr >= 1.0):
        raise DomainError("loading gamma must satisfy 0 < gamma^2 < 1")
    return arr


def _validate_y(y):
    arr = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("factor level y must be finite")
    return arr


_PROB_LO = float(np.nextafter(0.0, 1.0))
_PROB_HI = float(np.nextafter(1.0, 0.0))


def _scalar_or_array(x, *inputs):
    if all(np.asarray(i).ndim == 0 for i in inputs):
        return float(x)
    return x


def conditional_pd(p, rho, y):
    """Default probability given factor level y, Gaussian preset.

    p(y) = Phi((Phi^-1(p) - sqrt(rho) y) / sqrt(1 - rho)).  Decreasing
    in y and increasing in p; rho steepens the response to the factor.
    """
    p_arr = _validate_probability(p, "p")
    rho_arr = _validate_probability(rho, "rho")
    y_arr = _validate_y(y)
    flat_p = np.atleast_1d(p_arr).ravel()
    thr = _k.ppnd16(flat_p).reshape(p_arr.shape)
    zeta = (thr - np.sqrt(rho_arr) * y_arr) / np.sqrt(1.0 - rho_arr)
    out = _k.normal_cdf(np.atleast_1d(zeta).ravel()).reshape(zeta.shape)
    out = np.clip(out, _PROB_LO, _PROB_HI)
    return _scalar_or_array(out if out.shape else float(out), p, rho, y)


def conditional_pd_general(p, gamma, dists: ModelDistributions, y):
    """Default probability given y under arbitrary margins.

    p(y) = G((F^-1(p) - gamma y) / sqrt(1 - gamma^2)) with F the obligor
    margin, G the shock law and gamma the factor loading (so gamma^2
    plays the role of rho).  Negative gamma is allowed and flips the
    direction of the factor exposure.
    """
    p_arr = _validate_probability(p, "p")
    gamma_arr = _validate_loading(gamma)
    y_arr = _validate_y(y)
    thr = dists.margin_w.inverse_cdf(p_arr if p_arr.shape else float(p_arr))
    zeta = (thr - gamma_arr * y_arr) / np.sqrt(1.0 - gamma_arr * gamma_arr)
    out = np.clip(dists.margin_z.cdf(zeta), _PROB_LO, _PROB_HI)
    return _scalar_or_array(out, p, gamma, y)


def inverse_conditional_pd(p, gamma, dists: ModelDistributions, x):
    """Factor level at which the conditional PD equals x.

    y = (F^-1(p) - sqrt(1 - gamma^2) G^-1(x)) / gamma, the exact inverse
    of conditional_pd_general in y.
    """
    p_arr = _validate_probability(p, "p")
    gamma_arr = _validate_loading(gamma)
    x_arr = _validate_probability(x, "x")
    thr = dists.margin_w.inverse_cdf(p_arr if p_arr.shape else float(p_arr))
    ginv = dists.margin_z.inverse_cdf(x_arr if x_arr.shape else float(x_arr))
    out = (thr - np.sqrt(1.0 - gamma_arr * gamma_arr) * ginv) / gamma_arr
    return _scalar_or_array(out, p, gamma, x)


def expected_loss(portfolio: Portfolio) -> float:
    """Unconditional expected loss fraction, sum of w_i lgd_i pd_i."""
    return float(np.dot(portfolio.weights, portfolio.lgd * portfolio.pd))


def conditional_expected_loss(portfolio: Portfolio, y) -> float:
    """Expected loss fraction given factor level y (Gaussian preset)."""
    y_arr = _validate_y(y)
    if y_arr.shape:
        raise DomainError("factor level y must be scalar")
    pcond = conditional_pd(portfolio.pd, portfolio.rho, float(y_arr))
    return float(np.dot(portfolio.weights, portfolio.lgd * pcond))


def asrf_capital(portfolio: Portfolio, alpha: float) -> CapitalReport:
    """Analytic capital at confidence alpha, Gaussian preset.

    The stress factor level y_alpha = Phi^-1(1 - alpha) is computed
    once; stress loss is the conditional expected loss at that level.
    """
    _validate_probability(alpha, "alpha")
    y_stress = float(_k.ppnd16(np.array([1.0 - alpha]))[0])
    stress = conditional_expected_loss(portfolio, y_stress)
    el = expected_loss(portfolio)
    return CapitalReport(
        alpha=float(alpha), expected_loss=el, stress_loss=stress,
        capital=stress - el, method="analytic",
    )


def general_capital(
    portfolio: Portfolio, dists: ModelDistributions, alpha: float
) -> CapitalReport:
    """Analytic capital with arbitrary margin and factor laws.

    Loadings are gamma_i = sqrt(rho_i); the stress level is the
    (1 - alpha) quantile of the systematic law H.
    """
    _validate_probability(alpha, "alpha")
    y_stress = dists.systematic.inverse_cdf(1.0 - alpha)
    gamma = np.sqrt(portfolio.rho)
    pcond = conditional_pd_general(portfolio.pd, gamma, dists, y_stress)
    stress = float(np.dot(portfolio.weights, portfolio.lgd * pcond))
    el = expected_loss(portfolio)
    return CapitalReport(
        alpha=float(alpha), expected_loss=el, stress_loss=stress,
        capital=stress - el, method="analytic",
    )


def vasicek_cdf(p, gamma, eta, l, dists: ModelDistributions | None = None) -> float:
    """CDF of the asymptotic loss fraction of a homogeneous portfolio.

    P(L <= l) = 1 - H((F^-1(p) - sqrt(1 - gamma^2) G^-1(l / eta)) / gamma)
    for l in (0, eta), where eta is the common loss given default.
    Defaults to the Gaussian triple.
    """
    dists = dists or ModelDistributions.gaussian()
    _validate_probability(p, "p")
    _validate_probability(gamma, "gamma")
    if not (np.isfinite(eta) and 0.0 < eta <= 1.0):
        raise DomainError(f"eta must lie in (0, 1], got {eta!r}")
    if not (np.isfinite(l) and 0.0 < l < eta):
        raise DomainError(f"loss level must lie in (0, eta), got {l!r}")
    thr = dists.margin_w.inverse_cdf(float(p))
    ginv = dists.margin_z.inverse_cdf(float(l) / float(eta))
    arg = (thr - np.sqrt(1.0 - gamma * gamma) * ginv) / gamma
    return float(1.0 - dists.systematic.cdf(arg))


def vasicek_quantile(p, gamma, eta, u, dists: ModelDistributions | None = None) -> float:
    """Quantile of the asymptotic loss fraction at probability u.

    l_u = eta G((F^-1(p) - gamma H^-1(1 - u)) / sqrt(1 - gamma^2)), the
    exact inverse of vasicek_cdf on (0, eta).
    """
    dists = dists or ModelDistributions.gaussian()
    _validate_probability(p, "p")
    _validate_probability(gamma, "gamma")
    _validate_probability(u, "u")
    if not (np.isfinite(eta) and 0.0 < eta <= 1.0):
        raise DomainError(f"eta must lie in (0, 1], got {eta!r}")
    thr = dists.margin_w.inverse_cdf(float(p))
    hinv = dists.systematic.inverse_cdf(1.0 - float(u))
    return float(eta) * float(
        dists.margin_z.cdf((thr - gamma * hinv) / np.sqrt(1.0 - gamma * gamma))
    )
