import math

import numpy as np
import pytest

from app.core.exceptions import InvalidParameterError
from app.models.features import ActivitySeries
from app.utils.dsa import dsa_transform, estimate_derivatives, segment_derivatives


def series(counts, times=None):
    times = list(range(len(counts))) if times is None else times
    return ActivitySeries(counts=tuple(counts), times=tuple(times))


class TestEstimateDerivatives:

    def test_uneven_spacing(self):
        d = estimate_derivatives(np.array([0, 2, 8]), np.array([0, 1, 3]))
        np.testing.assert_allclose(d, [2.0, 8.0 / 3.0, 3.0])


class TestSegmentDerivatives:

    def test_singleton_folds_into_previous_on_tie(self):
        runs = segment_derivatives(np.array([2.0, 2.0, 0.0, -2.0, -2.0]), 0.5)
        assert runs == [(0, 2), (3, 4)]

    def test_zero_epsilon_constant(self):
        assert segment_derivatives(np.zeros(6), 0.0) == [(0, 5)]


class TestDsaTransform:

    def test_constant_series(self):
        dsa = dsa_transform(series([5, 5, 5], [1, 2, 3]))
        assert len(dsa) == 1
        assert dsa.alphas == [0.5]

    def test_unit_slope(self):
        dsa = dsa_transform(series(range(1, 11)))
        assert len(dsa) == 1
        assert dsa.alphas[0] == pytest.approx(0.75, abs=1e-12)

    def test_up_then_down(self):
        counts = [0, 2, 4, 6, 8, 10, 8, 6, 4, 2]
        dsa = dsa_transform(series(counts), epsilon=0.5)
        assert len(dsa) == 2
        assert dsa.alphas[0] > 0.5 > dsa.alphas[1]

    def test_three_planted_trends(self):
        up = [20 + 2 * t for t in range(10)]
        flat = [38] * 10
        down = [38 - 2 * (t + 1) for t in range(10)]
        dsa = dsa_transform(series(up + flat + down))
        assert len(dsa) == 3
        assert dsa.alphas[0] > dsa.alphas[1] > dsa.alphas[2]
        assert [s.length for s in dsa.segments] == [10, 10, 10]
        assert dsa.end_times == [9, 19, 29]

    def test_monotone_series_alpha_side(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            steps = rng.integers(1, 5, size=int(rng.integers(2, 30)))
            rising = np.cumsum(steps)
            up = dsa_transform(series(rising.tolist()))
            down = dsa_transform(series(rising[::-1].tolist()))
            assert all(0.5 < a < 1.0 for a in up.alphas)
            assert all(0.0 < a < 0.5 for a in down.alphas)
            assert sum(s.length for s in up.segments) == len(rising)
            assert len(up) <= len(rising)

    def test_single_point(self):
        dsa = dsa_transform(series([3], [12]))
        assert dsa.alphas == [0.5]
        assert dsa.end_times == [12]

    def test_alpha_formula(self):
        dsa = dsa_transform(series([0, 3, 6], [0, 1, 2]))
        assert dsa.alphas[0] == pytest.approx(math.atan(3.0) / math.pi + 0.5)

    def test_errors(self):
        with pytest.raises(InvalidParameterError):
            dsa_transform(ActivitySeries())
        with pytest.raises(InvalidParameterError):
            dsa_transform(series([1, 2, 3]), epsilon=-1.0)
