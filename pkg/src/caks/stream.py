"""Fixed-memory streaming state for the chunk-and-average KS test.

A CaksState inspects each observation exactly once, keeps at most one
partial chunk of J values plus a handful of scalars, and folds each
completed chunk's KS statistic into a running mean:

    mean_t = ((t - 1) * mean_{t-1} + stat_t) / t

so memory never grows with the length of the stream. States for disjoint
sub-streams can be merged, which makes sharded ingestion possible.
"""

from __future__ import annotations

import numpy as np

from .calib import Calibration
from .decide import TestReport, caks_pvalue, caks_z
from .ksdist import ks_statistic
from .nulls import NullModel

__all__ = ["CaksState", "merge"]


class CaksState:
    """Streaming accumulator of per-chunk KS statistics.

    Sequential object: one writer at a time. Parallel ingestion shards
    the stream into independent states and combines them with merge().

    Parameters
    ----------
    chunk_size:
        Number of observations per chunk (J >= 1).
    null:
        The hypothesized distribution each chunk is compared against.
    on_invalid:
        "error" (default) raises on non-finite input; "skip" drops and
        counts such values instead.
    """

    __slots__ = (
        "chunk_size",
        "null",
        "on_invalid",
        "chunks_done",
        "running_mean",
        "observations_seen",
        "n_skipped",
        "_buffer",
        "_fill",
    )

    def __init__(self, chunk_size: int, null: NullModel, *, on_invalid: str = "error"):
        if chunk_size < 1:
            raise ValueError(f"chunk size must be >= 1, got {chunk_size!r}")
        if on_invalid not in ("error", "skip"):
            raise ValueError(f"on_invalid must be 'error' or 'skip', got {on_invalid!r}")
        self.chunk_size = int(chunk_size)
        self.null = null
        self.on_invalid = on_invalid
        self.chunks_done = 0
        self.running_mean = 0.0
        self.observations_seen = 0
        self.n_skipped = 0
        self._buffer = np.empty(self.chunk_size, dtype=np.float64)
        self._fill = 0

    @property
    def buffer(self) -> np.ndarray:
        """Copy of the pending (incomplete-chunk) observations."""
        return self._buffer[: self._fill].copy()

    @property
    def buffered(self) -> int:
        """Number of pending observations (always < chunk_size)."""
        return self._fill

    @property
    def nbytes(self) -> int:
        """Approximate resident size of the state; independent of how
        many observations have been streamed."""
        return self._buffer.nbytes + 8 * len(self.__slots__)

    def push(self, values) -> "CaksState":
        """Ingest a batch of observations, completing chunks as they fill.

        The final statistic does not depend on how the stream is split
        into push calls. Returns self.
        """
        x = np.asarray(values, dtype=np.float64)
        if x.ndim != 1:
            x = x.ravel()
        finite = np.isfinite(x)
        if not finite.all():
            if self.on_invalid == "error":
                bad = int(np.argmin(finite))
                raise ValueError(f"non-finite value at index {bad} of push")
            self.n_skipped += int(x.size - np.count_nonzero(finite))
            x = x[finite]
        pos = 0
        n = int(x.size)
        while pos < n:
            take = min(self.chunk_size - self._fill, n - pos)
            self._buffer[self._fill : self._fill + take] = x[pos : pos + take]
            self._fill += take
            pos += take
            if self._fill == self.chunk_size:
                stat = ks_statistic(self._buffer, self.null)
                self.chunks_done += 1
                self.running_mean = (
                    (self.chunks_done - 1) * self.running_mean + stat
                ) / self.chunks_done
                self._fill = 0
        self.observations_seen += n
        return self

    def report(self, cal: Calibration, alpha: float = 0.1) -> TestReport:
        """Decide the test at level alpha using the calibrated moments.

        Pending buffered observations are excluded from the statistic
        (mixing chunk sizes would invalidate the calibration) and are
        reported as discarded.
        """
        if self.chunks_done < 1:
            raise ValueError("no complete chunk")
        if cal.J != self.chunk_size:
            raise ValueError(
                f"calibration is for J={cal.J}, state uses J={self.chunk_size}"
            )
        if not (0.0 < alpha < 1.0):
            raise ValueError(f"alpha out of (0, 1): {alpha!r}")
        z = caks_z(self.running_mean, self.chunks_done, cal)
        p = caks_pvalue(z)
        warnings = []
        if self.chunks_done < 30:
            warnings.append(
                f"normal approximation unreliable: only {self.chunks_done} "
                f"complete chunks (fewer than 30)"
            )
        if self.n_skipped:
            warnings.append(f"skipped {self.n_skipped} non-finite observations")
        return TestReport(
            method="CAKS",
            statistic=z,
            p_value=p,
            alpha=alpha,
            reject=not (p > alpha),
            n_used=self.chunks_done * self.chunk_size,
            n_discarded=self._fill,
            T=self.chunks_done,
            J=self.chunk_size,
            warnings=tuple(warnings),
        )


def merge(a: CaksState, b: CaksState) -> CaksState:
    """Combine states built from disjoint sub-streams into a fresh state.

    Both states must share the chunk size and null model, and at most
    one may hold a partial chunk (otherwise the chunk boundary of the
    combined stream would be ambiguous). Inputs are left untouched.
    """
    if a.chunk_size != b.chunk_size:
        raise ValueError(
            f"chunk size mismatch: {a.chunk_size} vs {b.chunk_size}"
        )
    if a.null != b.null:
        raise ValueError(f"null model mismatch: {a.null} vs {b.null}")
    if a.buffered > 0 and b.buffered > 0:
        raise ValueError("ambiguous chunk boundary: both states hold partial chunks")
    if a.on_invalid != b.on_invalid:
        raise ValueError(
            f"invalid-value policy mismatch: {a.on_invalid!r} vs {b.on_invalid!r}"
        )
    out = CaksState(a.chunk_size, a.null, on_invalid=a.on_invalid)
    total = a.chunks_done + b.chunks_done
    out.chunks_done = total
    if total > 0:
        out.running_mean = (
            a.chunks_done * a.running_mean + b.chunks_done * b.running_mean
        ) / total
    survivor = a if a.buffered > 0 else b
    out._buffer[: survivor.buffered] = survivor._buffer[: survivor.buffered]
    out._fill = survivor.buffered
    out.observations_seen = a.observations_seen + b.observations_seen
    out.n_skipped = a.n_skipped + b.n_skipped
    return out
