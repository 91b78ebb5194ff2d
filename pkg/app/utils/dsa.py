"""Derivative time series Segment Approximation (DSA) of activity series."""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from app.core.exceptions import InvalidParameterError
from app.models.features import ActivitySeries, DsaSegment, DsaSeries

logger = logging.getLogger(__name__)

# Threshold defaults to this fraction of the derivative series' standard deviation
DEFAULT_EPSILON_SCALE = 0.5


def estimate_derivatives(counts: np.ndarray, times: np.ndarray) -> np.ndarray:
    """First-derivative estimate at every point.

    Central difference at interior points and one-sided differences at the
    boundaries, always over the actual time deltas.
    """
    n = len(counts)
    if n < 2:
        return np.zeros(n)
    x = counts.astype(float)
    t = times.astype(float)
    d = np.empty(n)
    d[0] = (x[1] - x[0]) / (t[1] - t[0])
    d[-1] = (x[-1] - x[-2]) / (t[-1] - t[-2])
    if n > 2:
        d[1:-1] = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    return d


def segment_derivatives(derivatives: np.ndarray, epsilon: float) -> List[Tuple[int, int]]:
    """Greedy partition into maximal runs whose points stay within epsilon of the running mean.

    Returns (first, last) index pairs. Single-point runs left between two
    trends are then folded into the neighbor with the closest mean.
    """
    runs: List[List[int]] = []
    total = 0.0
    for i, value in enumerate(derivatives):
        if runs and abs(value - total / (runs[-1][1] - runs[-1][0] + 1)) <= epsilon:
            runs[-1][1] = i
            total += value
        else:
            runs.append([i, i])
            total = value

    def mean(run: List[int]) -> float:
        return float(np.mean(derivatives[run[0]:run[1] + 1]))

    while len(runs) > 1:
        single = next((j for j, run in enumerate(runs) if run[0] == run[1]), None)
        if single is None:
            break
        value = derivatives[runs[single][0]]
        if single == 0:
            target = 1
        elif single == len(runs) - 1:
            target = single - 1
        else:
            before = abs(value - mean(runs[single - 1]))
            after = abs(value - mean(runs[single + 1]))
            target = single - 1 if before <= after else single + 1
        lo, hi = sorted((single, target))
        runs[lo:hi + 1] = [[runs[lo][0], runs[hi][1]]]

    return [(run[0], run[1]) for run in runs]


def default_epsilon(derivatives: np.ndarray, scale: float = DEFAULT_EPSILON_SCALE) -> float:
    return scale * float(np.std(derivatives))


def dsa_transform(
    series: ActivitySeries,
    epsilon: Optional[float] = None,
    epsilon_scale: float = DEFAULT_EPSILON_SCALE
) -> DsaSeries:
    """Compress an activity series into (alpha-hat, span) segments.

    alpha = arctan(mean segment derivative), normalized as alpha/pi + 1/2, so
    0.5 is a flat trend and values above 0.5 an increasing one.
    """
    if len(series) == 0:
        raise InvalidParameterError("DSA requires a non-empty activity series")

    times = np.asarray(series.times, dtype=np.int64)
    if len(series) == 1:
        t = int(times[0])
        return DsaSeries(
            segments=(DsaSegment(alpha_hat=0.5, start_time=t, end_time=t, length=1),),
            source_length=1
        )

    derivatives = estimate_derivatives(np.asarray(series.counts), times)
    if epsilon is None:
        epsilon = default_epsilon(derivatives, epsilon_scale)
    if epsilon < 0:
        raise InvalidParameterError(f"epsilon must be non-negative, got {epsilon}")

    segments = []
    for first, last in segment_derivatives(derivatives, epsilon):
        alpha = math.atan(float(np.mean(derivatives[first:last + 1])))
        segments.append(DsaSegment(
            alpha_hat=alpha / math.pi + 0.5,
            start_time=int(times[first]),
            end_time=int(times[last]),
            length=last - first + 1
        ))

    return DsaSeries(segments=tuple(segments), source_length=len(series))
