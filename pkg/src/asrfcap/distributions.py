"""Distribution kernels and the deterministic random stream.

Gaussian CDF and quantile use own rational approximations (Cody's erfc,
Wichura's PPND16) shared bit-for-bit with the simulation backends.
Student-t CDF and quantile delegate to scipy's incomplete-beta routines.
All sampling is counter-based: a draw is a pure function of
(seed, iteration, variate), which makes every simulation replayable and
order-independent.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from . import _kernels_numpy as _k
from ._coeffs import VARIATE_LIMIT
from .errors import DomainError

_ITERATION_LIMIT = 1 << 32


def _apply(fn, x, validate):
    """Run a vector kernel on scalar or array input, preserving shape."""
    arr = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(arr).ravel()
    validate(flat)
    out = fn(flat)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def _check_finite(flat):
    if not np.all(np.isfinite(flat)):
        raise DomainError("argument must be finite")


def _check_open_unit(flat):
    if not np.all(np.isfinite(flat)) or np.any(flat <= 0.0) or np.any(flat >= 1.0):
        raise DomainError("probability must lie strictly inside (0, 1)")


def _check_nu(nu) -> int:
    try:
        if isinstance(nu, bool) or nu != int(nu) or int(nu) < 1:
            raise DomainError(f"degrees of freedom must be a positive integer, got {nu!r}")
    except (TypeError, ValueError, OverflowError):
        raise DomainError(f"degrees of freedom must be a positive integer, got {nu!r}") from None
    return int(nu)


_CDF_LO = float(np.nextafter(0.0, 1.0))
_CDF_HI = float(np.nextafter(1.0, 0.0))


def std_normal_cdf(x):
    """Standard normal CDF, absolute error below 1e-13.

    Computed as erfc(-x/sqrt(2))/2 with Cody's rational erfc, so both
    tails keep full relative accuracy down to the underflow threshold.
    Saturated tails clamp to the nearest double inside (0, 1).
    """
    return _apply(lambda f: np.clip(_k.normal_cdf(f), _CDF_LO, _CDF_HI), x, _check_finite)


def std_normal_inv_cdf(u):
    """Standard normal quantile (PPND16), absolute error below 1e-9."""
    return _apply(_k.ppnd16, u, _check_open_unit)


def student_t_cdf(x, nu):
    """CDF of the Student-t distribution with integer nu >= 1."""
    dof = _check_nu(nu)
    return _apply(lambda f: _sp.stdtr(dof, f), x, _check_finite)


def student_t_inv_cdf(u, nu):
    """Quantile of the Student-t distribution with integer nu >= 1."""
    dof = _check_nu(nu)
    return _apply(lambda f: _sp.stdtrit(dof, f), u, _check_open_unit)


@dataclass(frozen=True)
class RandomStream:
    """Coordinates into the counter-based uniform generator.

    The uniform at (seed, iteration_index, variate_index) never depends
    on draw order or worker scheduling.  Slot layout within an
    iteration: 0 is the systematic factor, 1 anchors the chi-square
    mixing block (realized as a reserved high band of sub-slots), and
    2..n+1 are the idiosyncratic draws of an n-credit portfolio.
    """

    seed: int
    iteration_index: int = 0
    variate_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 1 << 64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        if not 0 <= int(self.iteration_index) < _ITERATION_LIMIT:
            raise DomainError("iteration_index must lie in [0, 2^32)")
        if not 0 <= int(self.variate_index) < VARIATE_LIMIT:
            raise DomainError("variate_index must lie in [0, 2^31)")

    def at(self, iteration_index=None, variate_index=None) -> "RandomStream":
        """Return a stream pointing at new coordinates, same seed."""
        return RandomStream(
            self.seed,
            self.iteration_index if iteration_index is None else iteration_index,
            self.variate_index if variate_index is None else variate_index,
        )

    def uniform(self) -> float:
        """The uniform(0,1) value at this coordinate, always in (0, 1)."""
        key = _k.stream_key(self.seed)
        its = np.array([self.iteration_index], dtype=np.uint64)
        return float(_k.uniform_at(key, its, self.variate_index)[0])


class DistributionFunction(ABC):
    """A continuous distribution usable as margin or mixing law."""

    @abstractmethod
    def cdf(self, x):
        ...

    @abstractmethod
    def inverse_cdf(self, u):
        ...

    def sample(self, stream: RandomStream) -> float:
        """Inverse-CDF draw from the uniform at the stream coordinate."""
        return self.inverse_cdf(stream.uniform())


class StandardNormal(DistributionFunction):
    def cdf(self, x):
        return std_normal_cdf(x)

    def inverse_cdf(self, u):
        return std_normal_inv_cdf(u)

    def __repr__(self):
        return "StandardNormal()"

    def __eq__(self, other):
        return isinstance(other, StandardNormal)

    def __hash__(self):
        return hash("StandardNormal")


class StudentT(DistributionFunction):
    def __init__(self, nu):
        self.nu = _check_nu(nu)

    def cdf(self, x):
        return student_t_cdf(x, self.nu)

    def inverse_cdf(self, u):
        return student_t_inv_cdf(u, self.nu)

    def __repr__(self):
        return f"StudentT(nu={self.nu})"

    def __eq__(self, other):
        return isinstance(other, StudentT) and other.nu == self.nu

    def __hash__(self):
        return hash(("StudentT", self.nu))


@dataclass(frozen=True)
class ModelDistributions:
    """Distributional triple of the latent-variable model.

    margin_w: law F of the obligor latent variable W_i.
    margin_z: law G of the idiosyncratic shock given the factor.
    systematic: law H of the systematic factor Y.
    """

    margin_w: DistributionFunction
    margin_z: DistributionFunction
    systematic: DistributionFunction

    @classmethod
    def gaussian(cls) -> "ModelDistributions":
        n = StandardNormal()
        return cls(margin_w=n, margin_z=n, systematic=n)

    @classmethod
    def t_margins(cls, nu) -> "ModelDistributions":
        """Student-t obligor margins and shocks, Gaussian factor law."""
        t = StudentT(nu)
        return cls(margin_w=t, margin_z=t, systematic=StandardNormal())


def sample_std_normal(stream: RandomStream) -> float:
    """One standard normal deviate at the stream coordinate."""
    return std_normal_inv_cdf(stream.uniform())


def sample_chi_square(stream: RandomStream, nu) -> float:
    """One chi-square(nu) deviate for the stream's iteration.

    Consumes the iteration's reserved sub-slot band (anchored by layout
    slot 1), not the stream's variate_index: the draw is shared by every
    credit of the iteration, mirroring the simulator.
    """
    dof = _check_nu(nu)
    key = _k.stream_key(stream.seed)
    its = np.array([stream.iteration_index], dtype=np.uint64)
    return float(_k.chi2_draws(key, its, dof)[0])


def sample_std_normal_array(seed, count, variate=0, start=0) -> np.ndarray:
    """Normal deviates for iterations start..start+count-1 at one slot."""
    if count < 0:
        raise DomainError("count must be nonnegative")
    return _k.normal_grid(_k.stream_key(seed), start, count, variate)


def sample_chi_square_array(seed, count, nu, start=0) -> np.ndarray:
    """Chi-square(nu) deviates for iterations start..start+count-1."""
    dof = _check_nu(nu)
    if count < 0:
        raise DomainError("count must be nonnegative")
    return _k.chi2_grid(_k.stream_key(seed), start, count, dof)
