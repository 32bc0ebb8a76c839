"""Scenario simulations and the streaming-vs-batch benchmark.

Three data-vs-null scenarios probe detection of a mean shift (S1), a
variance change (S2), and a shape difference (S3):

    S1: data ~ Normal(effect, 1),  null Normal(0, 1)
    S2: data ~ Normal(0, effect),  null Normal(0, 1)
    S3: data ~ Normal(0, 1),       null StudentT(effect)   ["forward"]
        data ~ StudentT(effect),   null Normal(0, 1)       ["reversed"]

Each replicate streams T*J fresh observations through a CaksState and
records the decision at level alpha. Replicates use sub-seeds derived
from the master seed by a fixed mixing, so runs are reproducible and
could be farmed out in parallel without changing the counts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .calib import Calibration, lookup
from .decide import ks_asymptotic_tail
from .ksdist import ks_statistic
from .nulls import Normal, NullModel, StudentT, Uniform01
from .stream import CaksState

__all__ = [
    "ScenarioSpec",
    "ScenarioResult",
    "BenchmarkResult",
    "uniform01",
    "normal",
    "replicate_rng",
    "sample_null",
    "run_scenario",
    "benchmark",
    "SCENARIO_CSV_HEADER",
    "BENCHMARK_CSV_HEADER",
]

SCENARIO_CSV_HEADER = "scenario,effect,T,J,replicates,alpha,rejections,avg_time_s,seed"
BENCHMARK_CSV_HEADER = "n,J,caks_s,batch_stat_s,batch_pvalue_s"

_SCENARIOS = ("S1", "S2", "S3")
_GEN_BLOCK = 1 << 16
_PUSH_BLOCK = 1 << 20


def uniform01(rng: np.random.Generator, size=None):
    """Uniform draws on [0, 1); deterministic given the generator state."""
    return rng.random(size)


def normal(rng: np.random.Generator, mean: float = 0.0, sd: float = 1.0, size=None):
    """Normal draws; affine in a standard normal draw from the same state."""
    if not sd > 0.0:
        raise ValueError(f"standard deviation must be positive, got {sd!r}")
    return rng.normal(mean, sd, size)


def replicate_rng(master_seed: int, index: int) -> np.random.Generator:
    """Generator for one replicate, from a fixed (seed, index) mixing."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def sample_null(null: NullModel, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw a sample distributed according to the given null model."""
    if isinstance(null, Uniform01):
        return rng.random(size)
    if isinstance(null, Normal):
        return rng.normal(null.mean, null.sd, size)
    if isinstance(null, StudentT):
        return rng.standard_t(null.df, size)
    raise TypeError(f"cannot sample from {type(null).__name__}")


@dataclass(frozen=True)
class ScenarioSpec:
    """One cell of the simulation grid."""

    scenario: str
    effect: float
    T: int
    J: int
    replicates: int
    alpha: float
    master_seed: int
    direction: str = "forward"

    def __post_init__(self):
        object.__setattr__(self, "scenario", self.scenario.upper())
        if self.scenario not in _SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; expected S1, S2 or S3")
        if min(self.T, self.J, self.replicates) < 1:
            raise ValueError("T, J and replicates must all be >= 1")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha out of (0, 1): {self.alpha!r}")
        if self.direction not in ("forward", "reversed"):
            raise ValueError(f"direction must be 'forward' or 'reversed', got {self.direction!r}")
        if self.scenario == "S2" and not self.effect > 0.0:
            raise ValueError("S2 effect is a standard deviation and must be > 0")
        if self.scenario == "S3" and not self.effect > 0.0:
            raise ValueError("S3 effect is a degrees-of-freedom and must be > 0")


@dataclass(frozen=True)
class ScenarioResult:
    """Rejection count and mean per-replicate test time for one spec."""

    spec: ScenarioSpec
    rejections: int
    avg_time_seconds: float

    def to_csv(self) -> str:
        s = self.spec
        return ",".join(
            [
                s.scenario,
                repr(s.effect),
                str(s.T),
                str(s.J),
                str(s.replicates),
                repr(s.alpha),
                str(self.rejections),
                format(self.avg_time_seconds, ".6e"),
                str(s.master_seed),
            ]
        )


@dataclass(frozen=True)
class BenchmarkResult:
    """Wall-clock seconds for one streaming-vs-batch comparison."""

    n: int
    J: int
    caks_seconds: float
    batch_stat_seconds: float
    batch_pvalue_seconds: float
    state_bytes: int

    @property
    def batch_seconds(self) -> float:
        return self.batch_stat_seconds + self.batch_pvalue_seconds

    def to_csv(self) -> str:
        return ",".join(
            [
                str(self.n),
                str(self.J),
                format(self.caks_seconds, ".6e"),
                format(self.batch_stat_seconds, ".6e"),
                format(self.batch_pvalue_seconds, ".6e"),
            ]
        )


def _scenario_law(spec: ScenarioSpec):
    """The (sampler, null) pair a spec tests against."""
    if spec.scenario == "S1":
        mu = spec.effect
        return (lambda rng, n: rng.normal(mu, 1.0, n)), Normal(0.0, 1.0)
    if spec.scenario == "S2":
        sd = spec.effect
        return (lambda rng, n: rng.normal(0.0, sd, n)), Normal(0.0, 1.0)
    df = spec.effect
    if spec.direction == "forward":
        return (lambda rng, n: rng.normal(0.0, 1.0, n)), StudentT(df)
    return (lambda rng, n: rng.standard_t(df, n)), Normal(0.0, 1.0)


def run_scenario(
    spec: ScenarioSpec,
    calibration: Calibration | None = None,
    *,
    cal_replicates: int | None = None,
    cal_seed: int | None = None,
) -> ScenarioResult:
    """Run all replicates of one scenario cell and count rejections.

    Calibration resolves to the built-in table for matching J unless an
    explicit Calibration (or on-miss Monte Carlo policy) is supplied.
    Timing covers streaming and the decision, not variate generation.
    """
    if calibration is not None:
        if calibration.J != spec.J:
            raise ValueError(
                f"calibration is for J={calibration.J}, spec uses J={spec.J}"
            )
        cal = calibration
    else:
        cal = lookup(spec.J, replicates=cal_replicates, seed=cal_seed)
    sampler, null = _scenario_law(spec)
    n_total = spec.T * spec.J
    block = min(n_total, max(spec.J, _GEN_BLOCK))
    rejections = 0
    time_sum = 0.0
    for r in range(spec.replicates):
        rng = replicate_rng(spec.master_seed, r)
        state = CaksState(spec.J, null)
        elapsed = 0.0
        remaining = n_total
        while remaining > 0:
            m = min(block, remaining)
            data = sampler(rng, m)
            t0 = time.perf_counter()
            state.push(data)
            elapsed += time.perf_counter() - t0
            remaining -= m
        t0 = time.perf_counter()
        report = state.report(cal, spec.alpha)
        elapsed += time.perf_counter() - t0
        rejections += int(report.reject)
        time_sum += elapsed
    return ScenarioResult(
        spec=spec,
        rejections=rejections,
        avg_time_seconds=time_sum / spec.replicates,
    )


def benchmark(n: int, chunk_size: int, null: NullModel, seed: int) -> BenchmarkResult:
    """Time the streaming pass and the batch test on one null sample.

    The streaming time covers chunk statistics and the running mean (the
    final z decision is constant time); the batch side is split into
    statistic and p-value evaluation. A trailing remainder shorter than
    chunk_size is discarded by the stream, as usual.
    """
    if chunk_size < 1:
        raise ValueError(f"chunk size must be >= 1, got {chunk_size!r}")
    if n < chunk_size:
        raise ValueError(f"n={n} is smaller than one chunk (J={chunk_size})")
    rng = np.random.default_rng(seed)
    data = sample_null(null, rng, n)

    state = CaksState(chunk_size, null)
    t0 = time.perf_counter()
    for start in range(0, n, _PUSH_BLOCK):
        state.push(data[start : start + _PUSH_BLOCK])
    caks_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    k = ks_statistic(data, null)
    batch_stat_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    ks_asymptotic_tail(float(np.sqrt(n)) * k)
    batch_pvalue_seconds = time.perf_counter() - t0

    return BenchmarkResult(
        n=n,
        J=chunk_size,
        caks_seconds=caks_seconds,
        batch_stat_seconds=batch_stat_seconds,
        batch_pvalue_seconds=batch_pvalue_seconds,
        state_bytes=state.nbytes,
    )
