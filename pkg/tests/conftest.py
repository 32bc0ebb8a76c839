import numpy as np
import pytest


def edf_supremum(values, cdf):
    """Brute-force two-sided supremum of |EDF - F| over the jump points.

    Counts, for every data point t, how many observations are <= t and
    < t, and compares both EDF limits against F(t). Quadratic on purpose:
    it shares no code with the order-statistic implementation it checks.
    """
    n = len(values)
    worst = 0.0
    for t in values:
        at_or_below = sum(1 for v in values if v <= t) / n
        below = sum(1 for v in values if v < t) / n
        f = cdf(float(t))
        worst = max(worst, abs(at_or_below - f), abs(below - f))
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
