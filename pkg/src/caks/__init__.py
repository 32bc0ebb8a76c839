"""Fixed-memory streaming goodness-of-fit testing.

The stream is split into consecutive chunks of J observations, each
chunk contributes one Kolmogorov-Smirnov distance from the hypothesized
distribution, and the running average of those distances is studentized
against Monte Carlo calibrated chunk moments to give a one-sided z-test.
Memory stays bounded by one chunk no matter how long the stream runs.
"""

from .calib import (
    Calibration,
    asymptotic_moments,
    builtin_table,
    calibrate,
    interpolate_scaled,
    lookup,
    read_calibration_file,
    write_calibration_file,
)
from .decide import (
    TestReport,
    batch_ks_test,
    caks_pvalue,
    caks_z,
    ks_asymptotic_tail,
)
from .ksdist import ks_statistic, ks_uniform, ks_uniform_rows
from .nulls import (
    Normal,
    NullModel,
    StudentT,
    Uniform01,
    parse_null,
    regularized_incomplete_beta,
    std_normal_cdf,
    student_t_cdf,
)
from .sim import (
    BenchmarkResult,
    ScenarioResult,
    ScenarioSpec,
    benchmark,
    normal,
    replicate_rng,
    run_scenario,
    sample_null,
    uniform01,
)
from .stream import CaksState, merge

__version__ = "0.1.0"

__all__ = [
    "Calibration",
    "asymptotic_moments",
    "builtin_table",
    "calibrate",
    "interpolate_scaled",
    "lookup",
    "read_calibration_file",
    "write_calibration_file",
    "TestReport",
    "batch_ks_test",
    "caks_pvalue",
    "caks_z",
    "ks_asymptotic_tail",
    "ks_statistic",
    "ks_uniform",
    "ks_uniform_rows",
    "Normal",
    "NullModel",
    "StudentT",
    "Uniform01",
    "parse_null",
    "regularized_incomplete_beta",
    "std_normal_cdf",
    "student_t_cdf",
    "BenchmarkResult",
    "ScenarioResult",
    "ScenarioSpec",
    "benchmark",
    "normal",
    "replicate_rng",
    "run_scenario",
    "sample_null",
    "uniform01",
    "CaksState",
    "merge",
    "__version__",
]
