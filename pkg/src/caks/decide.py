"""Decision layer: streaming z-test and the reference batch KS test.

The streaming test studentizes the running chunk-average against the
calibrated chunk moments and applies a one-sided upper z-test; the batch
test evaluates the classic asymptotic tail series of the scaled
Kolmogorov statistic. Both produce the same TestReport record.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .calib import Calibration
from .ksdist import ks_statistic
from .nulls import NullModel, erfc

__all__ = [
    "TestReport",
    "caks_z",
    "caks_pvalue",
    "ks_asymptotic_tail",
    "batch_ks_test",
    "TEST_REPORT_CSV_HEADER",
]

TEST_REPORT_CSV_HEADER = (
    "method,statistic,p_value,alpha,reject,T,J,n_used,n_discarded,warnings"
)

_SQRT2 = math.sqrt(2.0)

# Tail-series truncation: stop once the next term drops below this, with
# a hard cap on terms; the alternating series then bounds the error by
# the first omitted term.
_TAIL_TERM_FLOOR = 1e-12
_TAIL_MAX_TERMS = 1000


@dataclass(frozen=True)
class TestReport:
    """Outcome of one goodness-of-fit test.

    ``statistic`` is the z-score for the streaming method and
    sqrt(N) * K for the batch method; ``T`` and ``J`` are set only for
    the streaming method. ``reject`` always equals ``not (p_value >
    alpha)``, so a p-value exactly at alpha rejects.
    """

    method: str
    statistic: float
    p_value: float
    alpha: float
    reject: bool
    n_used: int
    n_discarded: int
    T: int | None = None
    J: int | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.method not in ("CAKS", "BatchKS"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p_value out of [0, 1]: {self.p_value!r}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha out of (0, 1): {self.alpha!r}")
        if self.reject != (not (self.p_value > self.alpha)):
            raise ValueError("reject flag inconsistent with p_value and alpha")

    def with_warnings(self, *extra: str) -> "TestReport":
        return replace(self, warnings=self.warnings + tuple(extra))

    def to_text(self) -> str:
        """Human-readable multi-line block."""
        lines = [
            f"method        {self.method}",
            f"statistic     {self.statistic!r}",
            f"p_value       {self.p_value!r}",
            f"alpha         {self.alpha!r}",
            f"reject        {'yes' if self.reject else 'no'}",
        ]
        if self.T is not None:
            lines.append(f"T             {self.T}")
        if self.J is not None:
            lines.append(f"J             {self.J}")
        lines.append(f"n_used        {self.n_used}")
        lines.append(f"n_discarded   {self.n_discarded}")
        for w in self.warnings:
            lines.append(f"warning       {w}")
        return "\n".join(lines)

    def to_json(self) -> str:
        """Single-line JSON record with fields named as in the type."""
        return json.dumps(
            {
                "method": self.method,
                "statistic": self.statistic,
                "p_value": self.p_value,
                "alpha": self.alpha,
                "reject": self.reject,
                "T": self.T,
                "J": self.J,
                "n_used": self.n_used,
                "n_discarded": self.n_discarded,
                "warnings": list(self.warnings),
            }
        )

    def to_csv(self) -> str:
        """Single CSV line matching TEST_REPORT_CSV_HEADER."""
        warn = ";".join(self.warnings)
        if "," in warn or '"' in warn:
            warn = '"' + warn.replace('"', '""') + '"'
        return ",".join(
            [
                self.method,
                repr(self.statistic),
                repr(self.p_value),
                repr(self.alpha),
                "true" if self.reject else "false",
                "" if self.T is None else str(self.T),
                "" if self.J is None else str(self.J),
                str(self.n_used),
                str(self.n_discarded),
                warn,
            ]
        )


def caks_z(theta_bar: float, T: int, cal: Calibration) -> float:
    """Studentized chunk average: sqrt(T) * (theta_bar - mu_J) / sigma_J."""
    if T < 1:
        raise ValueError(f"need at least one chunk, got T={T!r}")
    if not cal.sigma2_J > 0.0:
        raise ValueError(f"sigma2_J must be positive, got {cal.sigma2_J!r}")
    return math.sqrt(T) * (theta_bar - cal.mu_J) / math.sqrt(cal.sigma2_J)


def caks_pvalue(z: float) -> float:
    """One-sided upper-tail p-value 1 - Phi(z).

    Computed as erfc(z / sqrt(2)) / 2 so large z keeps relative accuracy
    instead of cancelling against 1.
    """
    if not math.isfinite(z):
        raise ValueError("non-finite z-score")
    return 0.5 * erfc(z / _SQRT2)


def ks_asymptotic_tail(k: float) -> float:
    """Limiting tail P(sqrt(N) * K > k): 2 * sum_j (-1)^(j+1) exp(-2 j^2 k^2).

    Truncated once the next term falls below 1e-12 (hard cap 1000 terms)
    and clamped to [0, 1]; strictly decreasing in k on (0, inf).
    """
    if not k > 0.0:
        raise ValueError(f"k must be positive, got {k!r}")
    total = 0.0
    sign = 1.0
    for j in range(1, _TAIL_MAX_TERMS + 1):
        total += sign * 2.0 * math.exp(-2.0 * j * j * k * k)
        sign = -sign
        nxt = j + 1
        if 2.0 * math.exp(-2.0 * nxt * nxt * k * k) < _TAIL_TERM_FLOOR:
            break
    return min(1.0, max(0.0, total))


def batch_ks_test(data, null: NullModel, alpha: float = 0.1) -> TestReport:
    """Whole-sample KS test with the asymptotic tail p-value.

    Sorts the full sample, so memory and time grow with N; the streaming
    test is the fixed-memory alternative.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 1:
        x = x.ravel()
    if x.size == 0:
        raise ValueError("empty data")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha out of (0, 1): {alpha!r}")
    k = ks_statistic(x, null)
    statistic = math.sqrt(x.size) * k
    p = ks_asymptotic_tail(statistic)
    return TestReport(
        method="BatchKS",
        statistic=statistic,
        p_value=p,
        alpha=alpha,
        reject=not (p > alpha),
        n_used=int(x.size),
        n_discarded=0,
    )
