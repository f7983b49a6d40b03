"""
重みの集計と数え上げ推定のテスト
"""
import math

import numpy as np
import pytest

from conftest import FINCH_COUNT
from margin_sampler.models.profile import Heuristic
from margin_sampler.models.weights import WeightAccumulator, exp_or_inf
from margin_sampler.services.weight_service import (
    estimate_count, estimate_expectation, log_delta, summarize, validate_log_weights
)
from margin_sampler.utils.error_handlers import DegenerateInputError, ShapeError


def test_summarize_two_weights():
    summary = summarize([math.log(1.0), math.log(3.0)])
    assert summary.delta_hat == pytest.approx(3.0)
    assert summary.mean == pytest.approx(2.0)
    assert summary.cv2_hat == pytest.approx(0.5)
    # S_W^2 = 2、S_W̄ = 1
    assert summary.log_se == pytest.approx(0.0, abs=1e-12)


def test_summarize_constant_weights():
    summary = summarize([2.5] * 10)
    assert summary.cv2_hat == 0.0
    assert summary.log_delta == 0.0
    assert summary.log_se == -math.inf
    assert summary.log_mean == pytest.approx(2.5)


def test_summarize_is_scale_free():
    values = np.array([0.0, 0.3, 1.2, -0.4])
    base = summarize(values)
    shifted = summarize(values + 800.0)
    assert shifted.cv2_hat == pytest.approx(base.cv2_hat, rel=1e-12)
    assert shifted.log_mean - base.log_mean == pytest.approx(800.0)
    assert shifted.mean == math.inf


def test_summarize_rejects_degenerate_input():
    with pytest.raises(DegenerateInputError):
        summarize([1.0])
    with pytest.raises(DegenerateInputError):
        summarize([0.0, math.nan])
    with pytest.raises(DegenerateInputError):
        validate_log_weights([0.0, math.inf])


def test_log_delta():
    assert log_delta([]) == 0.0
    assert log_delta([1.0, 4.0, 2.0]) == pytest.approx(3.0)


def test_accumulator_merge_matches_summary():
    values = np.random.default_rng(3).normal(size=50)
    left, right = WeightAccumulator(), WeightAccumulator()
    left.add_many(values[:20])
    right.add_many(values[20:])
    merged = left.merge(right).summary()
    direct = summarize(values)
    assert merged.count == 50
    assert merged.log_mean == pytest.approx(direct.log_mean, abs=1e-10)
    assert merged.cv2_hat == pytest.approx(direct.cv2_hat, rel=1e-8)
    assert merged.log_se == pytest.approx(direct.log_se, abs=1e-8)
    assert merged.log_delta == pytest.approx(direct.log_delta)


def test_empty_accumulator_is_identity():
    acc = WeightAccumulator()
    acc.add_many([0.5, 1.5])
    merged = acc.merge(WeightAccumulator())
    assert merged.count == 2
    assert merged.log_sum == pytest.approx(acc.log_sum)
    assert WeightAccumulator().log_delta == 0.0


def test_exp_or_inf():
    assert exp_or_inf(0.0) == 1.0
    assert exp_or_inf(1000.0) == math.inf


def test_estimate_count_on_derangement(derangement):
    mp, mask = derangement
    summary = estimate_count(mp, Heuristic.CGM_SZ, mask, count=50, seed=1)
    assert summary.mean == pytest.approx(2.0, abs=1e-9)
    assert summary.cv2_hat == pytest.approx(0.0, abs=1e-12)


def test_estimate_count_small_example(small_margins):
    summary = estimate_count(small_margins, Heuristic.CGM, count=4000, seed=7)
    assert summary.mean == pytest.approx(5.0, rel=0.1)
    assert summary.log_weights.size == 4000


def test_estimate_count_is_reproducible(small_margins):
    first = estimate_count(small_margins, Heuristic.ONEIL, count=100, seed=3)
    second = estimate_count(small_margins, Heuristic.ONEIL, count=100, seed=3)
    assert np.array_equal(first.log_weights, second.log_weights)


@pytest.mark.slow
def test_estimate_count_finch(finch_margins):
    summary = estimate_count(finch_margins, Heuristic.CGM, count=2000, seed=0)
    assert summary.mean == pytest.approx(FINCH_COUNT, rel=0.05)


def test_estimate_expectation():
    samples = [np.zeros((1, 1)), np.ones((1, 1))]
    log_w = [math.log(1.0), math.log(3.0)]
    assert estimate_expectation(samples, log_w, [0.0, 1.0]) == pytest.approx(0.75)
    assert estimate_expectation(samples, log_w, lambda z: float(z.sum())) == pytest.approx(0.75)
    with pytest.raises(ShapeError):
        estimate_expectation(samples, log_w, [1.0])
    with pytest.raises(DegenerateInputError):
        estimate_expectation([], [], [])
