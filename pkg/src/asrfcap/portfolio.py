"""Portfolio data model: grade tables, granular expansion, blocks.

A portfolio is an ordered list of credits with exposure, loss given
default, default probability and factor-variance share rho (the squared
factor loading: pairwise asset correlation between credits i and j is
sqrt(rho_i * rho_j)).  Consecutive credits with identical parameters
form exchangeable blocks, which the simulator exploits.
"""

import csv
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PortfolioFormatError, DomainError

# pd and rho must stay this far away from 0 and 1 so thresholds and
# loadings remain finite and well conditioned.
PARAM_BOUND = 1e-6

_HEADER = ("sector", "grade", "ead", "lgd", "pd", "rho")


def _check_params(ead, lgd, pd, rho, line=None):
    def fail(msg):
        raise PortfolioFormatError(msg, line) if line is not None else DomainError(msg)

    if not (math.isfinite(ead) and ead > 0.0):
        fail(f"ead must be positive and finite, got {ead!r}")
    if not (math.isfinite(lgd) and 0.0 <= lgd <= 1.0):
        fail(f"lgd must lie in [0, 1], got {lgd!r}")
    if not (math.isfinite(pd) and PARAM_BOUND <= pd <= 1.0 - PARAM_BOUND):
        fail(f"pd must lie in [{PARAM_BOUND}, 1 - {PARAM_BOUND}], got {pd!r}")
    if not (math.isfinite(rho) and PARAM_BOUND <= rho <= 1.0 - PARAM_BOUND):
        fail(f"rho must lie in [{PARAM_BOUND}, 1 - {PARAM_BOUND}], got {rho!r}")


def _check_param_arrays(ead, lgd, pd, rho):
    if not np.all(np.isfinite(ead)) or np.any(ead <= 0.0):
        raise DomainError("ead must be positive and finite for every credit")
    if not np.all(np.isfinite(lgd)) or np.any(lgd < 0.0) or np.any(lgd > 1.0):
        raise DomainError("lgd must lie in [0, 1] for every credit")
    for name, arr in (("pd", pd), ("rho", rho)):
        if (
            not np.all(np.isfinite(arr))
            or np.any(arr < PARAM_BOUND)
            or np.any(arr > 1.0 - PARAM_BOUND)
        ):
            raise DomainError(
                f"{name} must lie in [{PARAM_BOUND}, 1 - {PARAM_BOUND}] for every credit"
            )


@dataclass(frozen=True)
class GradeRow:
    """One sector/grade cell of an aggregate exposure table."""

    sector: str
    grade: str
    ead: float
    lgd: float
    pd: float
    rho: float

    def __post_init__(self):
        if not self.sector or not self.grade:
            raise DomainError("sector and grade labels must be nonempty")
        _check_params(self.ead, self.lgd, self.pd, self.rho)


@dataclass(frozen=True)
class Obligor:
    """A single credit."""

    ead: float
    lgd: float
    pd: float
    rho: float
    sector: str = ""
    grade: str = ""


class Portfolio:
    """Ordered credits with cached weight and block structure.

    Parameter arrays are read-only; weights are ead shares of the total.
    Blocks are maximal runs of consecutive credits sharing
    (ead, lgd, pd, rho), precomputed for the block simulation path.
    """

    def __init__(self, ead, lgd, pd, rho, sectors=None, grades=None):
        ead = np.ascontiguousarray(ead, dtype=np.float64)
        lgd = np.ascontiguousarray(lgd, dtype=np.float64)
        pd = np.ascontiguousarray(pd, dtype=np.float64)
        rho = np.ascontiguousarray(rho, dtype=np.float64)
        n = ead.size
        if n == 0:
            raise DomainError("empty portfolio")
        if not (lgd.size == pd.size == rho.size == n):
            raise DomainError("parameter arrays must share one length")
        _check_param_arrays(ead, lgd, pd, rho)
        self.ead = ead
        self.lgd = lgd
        self.pd = pd
        self.rho = rho
        self.sectors = list(sectors) if sectors is not None else [""] * n
        self.grades = list(grades) if grades is not None else [""] * n
        if len(self.sectors) != n or len(self.grades) != n:
            raise DomainError("label lists must match the credit count")
        self.total_ead = float(ead.sum())
        self.weights = ead / self.total_ead
        self._freeze()
        self._build_blocks()

    def _freeze(self):
        for arr in (self.ead, self.lgd, self.pd, self.rho, self.weights):
            arr.setflags(write=False)

    def _build_blocks(self):
        # run-length encode identical consecutive credits
        if self.size == 1:
            edges = np.array([0, 1], dtype=np.int64)
        else:
            change = (
                (self.ead[1:] != self.ead[:-1])
                | (self.lgd[1:] != self.lgd[:-1])
                | (self.pd[1:] != self.pd[:-1])
                | (self.rho[1:] != self.rho[:-1])
            )
            edges = np.concatenate(
                ([0], np.flatnonzero(change) + 1, [self.size])
            ).astype(np.int64)
        self.block_first = edges[:-1]
        self.block_sizes = np.diff(edges)
        self.block_first.setflags(write=False)
        self.block_sizes.setflags(write=False)

    @property
    def size(self) -> int:
        return self.ead.size

    @property
    def n_blocks(self) -> int:
        return self.block_sizes.size

    @property
    def obligors(self) -> tuple:
        """Materialize the credits as Obligor records (O(n), for small n)."""
        return tuple(
            Obligor(
                float(self.ead[i]), float(self.lgd[i]), float(self.pd[i]),
                float(self.rho[i]), self.sectors[i], self.grades[i],
            )
            for i in range(self.size)
        )

    @classmethod
    def from_obligors(cls, obligors) -> "Portfolio":
        obligors = list(obligors)
        if not obligors:
            raise DomainError("empty portfolio")
        return cls(
            [o.ead for o in obligors],
            [o.lgd for o in obligors],
            [o.pd for o in obligors],
            [o.rho for o in obligors],
            [o.sector for o in obligors],
            [o.grade for o in obligors],
        )

    def content_hash(self) -> str:
        """sha256 over the canonical parameter arrays and labels."""
        h = hashlib.sha256()
        h.update(b"portfolio-v1")
        h.update(np.int64(self.size).tobytes())
        for arr in (self.ead, self.lgd, self.pd, self.rho):
            h.update(arr.tobytes())
        h.update("\x1f".join(self.sectors).encode())
        h.update("\x1f".join(self.grades).encode())
        return h.hexdigest()


def load_grade_table(source) -> list:
    """Parse a sector/grade exposure table from a CSV path or stream.

    Expected header: sector,grade,ead,lgd,pd,rho.  pd and rho are
    fractions.  Raises PortfolioFormatError with the offending line
    number on malformed records, duplicate (sector, grade) pairs, or an
    empty table.
    """
    if hasattr(source, "read"):
        return _parse_grade_csv(source)
    with open(Path(source), newline="", encoding="utf-8-sig") as fh:
        return _parse_grade_csv(fh)


def _parse_grade_csv(fh) -> list:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise PortfolioFormatError("empty portfolio") from None
    cols = tuple(c.strip().lower() for c in header)
    if cols != _HEADER:
        raise PortfolioFormatError(
            f"expected header {','.join(_HEADER)}, got {','.join(cols)}", line=1
        )
    rows = []
    seen = set()
    for record in reader:
        line = reader.line_num
        if not record or all(not c.strip() for c in record):
            continue
        if len(record) != len(_HEADER):
            raise PortfolioFormatError(
                f"expected {len(_HEADER)} fields, got {len(record)}", line=line
            )
        sector, grade = record[0].strip(), record[1].strip()
        if not sector or not grade:
            raise PortfolioFormatError("sector and grade must be nonempty", line=line)
        key = (sector, grade)
        if key in seen:
            raise PortfolioFormatError(f"duplicate sector/grade pair {key!r}", line=line)
        seen.add(key)
        values = []
        for name, text in zip(_HEADER[2:], record[2:]):
            try:
                values.append(float(text))
            except ValueError:
                raise PortfolioFormatError(
                    f"field {name} is not a number: {text!r}", line=line
                ) from None
        _check_params(*values, line=line)
        rows.append(GradeRow(sector, grade, *values))
    if not rows:
        raise PortfolioFormatError("empty portfolio")
    return rows


def expand_granular(rows, max_weight: float) -> Portfolio:
    """Split each grade row into equal credits so no weight exceeds the cap.

    Row exposure E becomes m = ceil(E / (max_weight * total)) credits of
    E/m each, preserving sector totals exactly up to rounding.  The
    resulting maximum weight is at most max_weight even after floating
    point effects: m is bumped until the realized weights comply.
    """
    rows = list(rows)
    if not rows:
        raise DomainError("empty portfolio")
    if not (0.0 < max_weight <= 1.0):
        raise DomainError(f"max_weight must lie in (0, 1], got {max_weight!r}")
    total = sum(r.ead for r in rows)
    counts = [max(1, math.ceil(r.ead / (max_weight * total))) for r in rows]
    while True:
        eads = np.repeat([r.ead / m for r, m in zip(rows, counts)],
                         counts).astype(np.float64)
        realized = eads.max() / eads.sum()
        if realized <= max_weight:
            break
        # an ulp of rounding pushed a weight over the cap; split further
        worst = int(np.argmax([r.ead / m for r, m in zip(rows, counts)]))
        counts[worst] += 1
    lgd = np.repeat([r.lgd for r in rows], counts)
    pd = np.repeat([r.pd for r in rows], counts)
    rho = np.repeat([r.rho for r in rows], counts)
    sectors, grades = [], []
    for r, m in zip(rows, counts):
        sectors.extend([r.sector] * m)
        grades.extend([r.grade] * m)
    return Portfolio(eads, lgd, pd, rho, sectors, grades)


def build_homogeneous(n: int, ead: float, lgd: float, pd: float, rho: float) -> Portfolio:
    """Portfolio of n identical credits (one block)."""
    if n < 1:
        raise DomainError(f"portfolio size must be >= 1, got {n}")
    _check_params(ead, lgd, pd, rho)
    return Portfolio(
        np.full(n, float(ead)), np.full(n, float(lgd)),
        np.full(n, float(pd)), np.full(n, float(rho)),
        ["homogeneous"] * n, ["all"] * n,
    )
