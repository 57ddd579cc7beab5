"""Simulation backend selection.

ASRFCAP_BACKEND chooses the kernel implementation: "numba" (compiled,
parallel), "numpy" (pure vectorized fallback), or "auto" (numba when
importable, else numpy).  Both backends implement the same counter-based
sampling scheme; loss samples agree up to last-ulp differences in libm
transcendentals, and each backend is bit-reproducible on its own.
"""

import os

from .errors import DomainError
from . import _kernels_numpy

# workqueue is always present; the TBB probe would warn on older TBBs
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
    from . import _kernels_numba
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    _kernels_numba = None
    NUMBA_AVAILABLE = False

_ENV_FLAG = "ASRFCAP_BACKEND"
_ENV_WORKERS = "ASRFCAP_WORKERS"


def backend_name(override: str | None = None) -> str:
    """Resolve the active backend name from override or environment."""
    choice = (override or os.environ.get(_ENV_FLAG, "auto")).strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise DomainError(
            f"unknown backend {choice!r}; expected auto, numba or numpy"
        )
    if choice == "auto":
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if choice == "numba" and not NUMBA_AVAILABLE:
        raise DomainError("backend 'numba' requested but numba is not importable")
    return choice


def kernels(override: str | None = None):
    """Return the kernel module for the active backend."""
    if backend_name(override) == "numba":
        return _kernels_numba
    return _kernels_numpy


def default_workers() -> int | str:
    raw = os.environ.get(_ENV_WORKERS, "").strip()
    if not raw:
        return "auto"
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"{_ENV_WORKERS} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError(f"{_ENV_WORKERS} must be >= 1, got {value}")
    return value


def apply_workers(requested: int | str, name: str) -> int:
    """Pin the thread count for the numba backend; numpy runs single-threaded.

    Requests beyond the machine's thread budget clamp down: worker count
    is a scheduling hint and can never change simulated values.
    """
    if name != "numba":
        return 1
    limit = int(numba.config.NUMBA_NUM_THREADS)
    if requested == "auto":
        workers = limit
    else:
        workers = max(1, min(int(requested), limit))
    numba.set_num_threads(workers)
    return workers
