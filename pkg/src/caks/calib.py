"""Chunk-level moments of the KS statistic under the null.

The z-test behind the streaming decision needs the mean and variance of
the per-chunk Kolmogorov distance for the configured chunk size J. Those
moments do not depend on which continuous null is tested (probability
integral transform), so they are estimated once, on uniform samples,
either from the built-in table below or by Monte Carlo on demand.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass

import numpy as np

from .ksdist import ks_uniform_rows

__all__ = [
    "Calibration",
    "calibrate",
    "builtin_table",
    "asymptotic_moments",
    "lookup",
    "interpolate_scaled",
    "write_calibration_file",
    "read_calibration_file",
    "calibration_csv",
    "CALIBRATION_CSV_HEADER",
]

CALIBRATION_CSV_HEADER = "J,mu_J,sigma2_J,replicates,seed"

# Values per batch when vectorizing Monte Carlo replicates; fixed so the
# reduction order (and therefore the result) is reproducible.
_BATCH_VALUES = 4_000_000

# Scaled chunk moments (sqrt(J)*mean, J*variance) of the uniform-null KS
# statistic, estimated offline with 1e6 Monte Carlo replicates per row.
# The scaling makes the rows comparable to the J -> infinity limits.
_SCALED_MOMENTS = (
    (100, 0.8525199, 0.06734524),
    (200, 0.8567999, 0.06759134),
    (500, 0.8613619, 0.06758775),
    (1_000, 0.8638072, 0.06768931),
    (2_000, 0.8649057, 0.06747976),
    (5_000, 0.8661168, 0.06769269),
    (10_000, 0.8670493, 0.06772049),
    (20_000, 0.8674296, 0.06777601),
    (50_000, 0.8679541, 0.06782049),
    (100_000, 0.8683573, 0.06788714),
    (200_000, 0.8684477, 0.06780899),
    (500_000, 0.8685257, 0.06765810),
    (1_000_000, 0.8685212, 0.06787872),
)


@dataclass(frozen=True)
class Calibration:
    """Null moments of the chunk KS statistic for one chunk size.

    ``replicates`` records how many Monte Carlo replicates produced the
    estimate (0 marks analytic entries); ``seed`` is kept so a file can
    be regenerated bit for bit, and is None for built-in rows.
    """

    J: int
    mu_J: float
    sigma2_J: float
    replicates: int
    seed: int | None = None

    def __post_init__(self):
        if self.J < 1:
            raise ValueError(f"chunk size must be >= 1, got {self.J!r}")
        if not (1.0 / (2.0 * self.J) < self.mu_J < 1.0):
            raise ValueError(
                f"mu_J={self.mu_J!r} outside (1/(2J), 1) for J={self.J}"
            )
        if not self.sigma2_J > 0.0:
            raise ValueError(f"sigma2_J must be positive, got {self.sigma2_J!r}")
        if self.replicates < 0:
            raise ValueError(f"replicates must be >= 0, got {self.replicates!r}")

    @property
    def scaled_mean(self) -> float:
        return math.sqrt(self.J) * self.mu_J

    @property
    def scaled_variance(self) -> float:
        return self.J * self.sigma2_J


def calibrate(J: int, replicates: int, seed: int) -> Calibration:
    """Estimate (mu_J, sigma2_J) by Monte Carlo on uniform chunks.

    Draws ``replicates`` independent uniform samples of size J, computes
    the chunk KS statistic on each, and returns the sample mean and the
    unbiased (n-1) sample variance. Deterministic given (J, replicates,
    seed): the batch layout and reduction order are fixed.
    """
    if J < 1:
        raise ValueError(f"chunk size must be >= 1, got {J!r}")
    if replicates < 2:
        raise ValueError("need at least 2 replicates (variance undefined)")
    rng = np.random.default_rng(seed)
    stats = np.empty(replicates, dtype=np.float64)
    rows_per_batch = max(1, _BATCH_VALUES // J)
    done = 0
    while done < replicates:
        m = min(rows_per_batch, replicates - done)
        u = np.sort(rng.random((m, J)), axis=1)
        stats[done:done + m] = ks_uniform_rows(u)
        done += m
    return Calibration(
        J=J,
        mu_J=float(np.mean(stats)),
        sigma2_J=float(np.var(stats, ddof=1)),
        replicates=replicates,
        seed=seed,
    )


def builtin_table() -> list[Calibration]:
    """The 13 built-in finite-J calibrations, ascending in J."""
    return [
        Calibration(
            J=j,
            mu_J=scaled_mu / math.sqrt(j),
            sigma2_J=scaled_var / j,
            replicates=1_000_000,
            seed=None,
        )
        for j, scaled_mu, scaled_var in _SCALED_MOMENTS
    ]


def asymptotic_moments() -> tuple[float, float]:
    """Scaled limits of the chunk moments as J grows without bound.

    Closed forms: sqrt(pi/2) * ln 2 for the scaled mean and
    pi^2/12 - (pi/2) * (ln 2)^2 for the scaled variance, about
    (0.8687312, 0.0677732).
    """
    scaled_mean = math.sqrt(math.pi / 2.0) * math.log(2.0)
    scaled_variance = math.pi ** 2 / 12.0 - (math.pi / 2.0) * math.log(2.0) ** 2
    return scaled_mean, scaled_variance


def lookup(
    J: int,
    table: list[Calibration] | None = None,
    *,
    replicates: int | None = None,
    seed: int | None = None,
) -> Calibration:
    """Exact-J calibration from a table, or Monte Carlo on a miss.

    With ``replicates`` unset the policy is exact-only and a miss is an
    error; moments for one J are never reused for another, and nothing
    is interpolated (see interpolate_scaled for the explicit opt-in).
    """
    if J < 1:
        raise ValueError(f"chunk size must be >= 1, got {J!r}")
    rows = builtin_table() if table is None else table
    for cal in rows:
        if cal.J == J:
            return cal
    if replicates is None:
        raise ValueError(
            f"no calibration for J={J}; pass replicates and seed to "
            f"calibrate on demand"
        )
    if seed is None:
        raise ValueError("on-demand calibration requires an explicit seed")
    return calibrate(J, replicates, seed)


def interpolate_scaled(J: int, table: list[Calibration] | None = None) -> Calibration:
    """Approximate moments for J between two table rows. Exploratory only.

    Interpolates the scaled mean linearly in 1/sqrt(J) and the scaled
    variance linearly in 1/J between the bracketing rows. The result is
    marked with replicates=0; prefer calibrate() for real decisions.
    """
    rows = sorted(builtin_table() if table is None else table, key=lambda c: c.J)
    if not rows:
        raise ValueError("empty calibration table")
    if J < rows[0].J or J > rows[-1].J:
        raise ValueError(
            f"J={J} outside the table range [{rows[0].J}, {rows[-1].J}]"
        )
    for cal in rows:
        if cal.J == J:
            return cal
    hi_idx = next(i for i, c in enumerate(rows) if c.J > J)
    lo, hi = rows[hi_idx - 1], rows[hi_idx]
    t_mu = (1.0 / math.sqrt(J) - 1.0 / math.sqrt(lo.J)) / (
        1.0 / math.sqrt(hi.J) - 1.0 / math.sqrt(lo.J)
    )
    t_s2 = (1.0 / J - 1.0 / lo.J) / (1.0 / hi.J - 1.0 / lo.J)
    scaled_mu = lo.scaled_mean + t_mu * (hi.scaled_mean - lo.scaled_mean)
    scaled_s2 = lo.scaled_variance + t_s2 * (hi.scaled_variance - lo.scaled_variance)
    return Calibration(
        J=J,
        mu_J=scaled_mu / math.sqrt(J),
        sigma2_J=scaled_s2 / J,
        replicates=0,
        seed=None,
    )


def _format_float(v: float) -> str:
    return format(v, ".17g")


def write_calibration_file(path_or_file, calibrations) -> None:
    """Write calibrations as CSV (17 significant digits, exact round trip)."""
    own = isinstance(path_or_file, (str, os.PathLike))
    f = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CALIBRATION_CSV_HEADER.split(","))
        for cal in calibrations:
            writer.writerow(
                [
                    cal.J,
                    _format_float(cal.mu_J),
                    _format_float(cal.sigma2_J),
                    cal.replicates,
                    "" if cal.seed is None else cal.seed,
                ]
            )
    finally:
        if own:
            f.close()


def read_calibration_file(path_or_file) -> list[Calibration]:
    """Read a calibration CSV written by write_calibration_file."""
    own = isinstance(path_or_file, (str, os.PathLike))
    f = open(path_or_file, "r", newline="") if own else path_or_file
    try:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CALIBRATION_CSV_HEADER.split(","):
            raise ValueError(
                f"bad calibration file header; expected {CALIBRATION_CSV_HEADER!r}"
            )
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ValueError(f"calibration file line {lineno}: expected 5 fields")
            try:
                out.append(
                    Calibration(
                        J=int(row[0]),
                        mu_J=float(row[1]),
                        sigma2_J=float(row[2]),
                        replicates=int(row[3]),
                        seed=None if row[4].strip() == "" else int(row[4]),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"calibration file line {lineno}: {exc}") from None
        return out
    finally:
        if own:
            f.close()


def calibration_csv(calibrations) -> str:
    """The CSV text for a list of calibrations (header included)."""
    buf = io.StringIO()
    write_calibration_file(buf, calibrations)
    return buf.getvalue()
