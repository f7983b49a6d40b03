"""
外部一様性チェックのテスト
"""
import math

import numpy as np
import pytest

from conftest import TILDE_C, TILDE_R
from margin_sampler.models.margins import MarginPair
from margin_sampler.models.profile import Heuristic
from margin_sampler.services.dp_sampler_service import ProposalSampler
from margin_sampler.services.uniformity_service import (
    adversarial_block, adversarial_greedy, delta_max_experiment, delta_star, delta_star_from_log,
    uniform_given_rowsums
)
from margin_sampler.utils.error_handlers import (
    ConstructionFailedError, ShapeError, SupportError, ValidationError
)
from margin_sampler.utils.helpers import make_stream


def test_uniform_given_rowsums_keeps_row_sums():
    z = uniform_given_rowsums([3, 0, 5, 1], 5, make_stream(0))
    assert z.shape == (4, 5)
    assert list(z.sum(axis=1)) == [3, 0, 5, 1]
    assert set(np.unique(z)) <= {0, 1}


def test_uniform_given_rowsums_rejects_large_rows():
    with pytest.raises(ValidationError):
        uniform_given_rowsums([6], 5, make_stream(0))


def test_uniform_given_rowsums_covers_all_subsets():
    rng = make_stream(3)
    seen = {tuple(uniform_given_rowsums([2], 4, rng)[0]) for _ in range(300)}
    assert len(seen) == 6


@pytest.mark.parametrize("h", [Heuristic.ONEIL, Heuristic.GMW])
def test_unit_row_sums_are_exactly_uniform(h):
    result = delta_max_experiment([1] * 5, 5, replicates=3, count=20, h=h, seed=2)
    assert result.replicates == 3
    assert result.log_delta_max == pytest.approx(0.0, abs=1e-9)
    assert result.delta_max == pytest.approx(1.0, abs=1e-9)


def test_delta_max_experiment_is_reproducible():
    args = dict(r=[3, 2, 2, 1], n=5, replicates=2, count=15, h=Heuristic.CGM, seed=9)
    first = delta_max_experiment(**args)
    second = delta_max_experiment(**args)
    assert np.array_equal(first.log_deltas, second.log_deltas)
    assert first.column_sums == second.column_sums
    assert np.all(first.log_deltas >= 0)
    assert np.all(np.isfinite(first.log_q0))
    assert all(sum(c) == 8 for c in first.column_sums)


def test_delta_max_callback_and_zero_samples():
    calls = []
    result = delta_max_experiment(
        [2, 2, 1], 4, replicates=2, count=0, h=Heuristic.BINOMIAL, seed=1,
        on_replicate=lambda ell, ld, lq0, acc: calls.append((ell, ld, acc.count))
    )
    assert calls == [(0, 0.0, 1), (1, 0.0, 1)]
    assert result.log_delta_max == 0.0


def test_delta_max_experiment_validates_arguments():
    with pytest.raises(ValidationError):
        delta_max_experiment([1, 1], 2, replicates=0, count=5, h=Heuristic.CGM)


def test_adversarial_block():
    z = adversarial_block(4, 4, 2)
    expected = np.array([
        [1, 1, 0, 0],
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 1, 1],
    ])
    assert np.array_equal(z, expected)


def test_adversarial_block_errors():
    with pytest.raises(ShapeError) as excinfo:
        adversarial_block(4, 4, 3)
    assert excinfo.value.error_code == "NOT_DIVISIBLE"
    with pytest.raises(ShapeError):
        adversarial_block(4, 6, 2)


def test_adversarial_greedy_examples():
    assert np.array_equal(adversarial_greedy((1, 1), (1, 1)), [[0, 1], [1, 0]])
    assert np.array_equal(adversarial_greedy((2, 2), (2, 2)), np.ones((2, 2)))
    z = adversarial_greedy((2, 1, 1), (2, 1, 1))
    assert list(z.sum(axis=1)) == [2, 1, 1]
    assert list(z.sum(axis=0)) == [2, 1, 1]


def test_adversarial_greedy_on_irregular_margins():
    z = adversarial_greedy(TILDE_R, TILDE_C)
    assert z.shape == (50, 100)
    assert tuple(z.sum(axis=1)) == TILDE_R
    assert tuple(z.sum(axis=0)) == TILDE_C
    assert set(np.unique(z)) <= {0, 1}
    # 列和の大きい列の1は行和の小さい行に寄る
    assert z[-TILDE_C[0]:, 0].sum() == TILDE_C[0]

    sampler = ProposalSampler(MarginPair(TILDE_R, TILDE_C), Heuristic.CGM)
    log_weights = [s.log_weight for s in sampler.sample_many(5, seed=2)]
    result = delta_star(z, sampler, log_weights)
    assert math.isfinite(result.log_delta_star)
    assert result.log_delta_star >= result.log_delta_internal


def test_adversarial_greedy_fails_on_doubled_irregular_margins():
    with pytest.raises(ConstructionFailedError):
        adversarial_greedy(tuple(2 * x for x in TILDE_R), tuple(2 * x for x in TILDE_C))


def test_adversarial_greedy_errors():
    with pytest.raises(ConstructionFailedError):
        adversarial_greedy((3, 1, 1, 1), (3, 3, 0))
    with pytest.raises(ValidationError):
        adversarial_greedy((1, 2), (2, 1))


def test_delta_star_from_log():
    result = delta_star_from_log(math.log(100.0), [0.0, math.log(10.0)])
    assert result.delta_star == pytest.approx(100.0)
    assert result.delta_internal == pytest.approx(10.0)
    with pytest.raises(SupportError):
        delta_star_from_log(math.inf, [0.0])


def test_delta_star_uses_proposal_weight(small_margins):
    sampler = ProposalSampler(small_margins, Heuristic.CGM)
    z_star = adversarial_greedy(small_margins.r, small_margins.c)
    samples = sampler.sample_many(30, seed=4)
    log_weights = [s.log_weight for s in samples]
    result = delta_star(z_star, sampler, log_weights)
    assert result.log_weight_star == pytest.approx(-sampler.evaluate(z_star))
    assert result.log_delta_star >= result.log_delta_internal
    with pytest.raises(SupportError):
        delta_star(np.eye(3, dtype=int), sampler, log_weights)
